#pragma once

// Executes scenarios into result tables. Sweep cells run in parallel and are
// assembled in grid order (first sweep axis outermost), so output does not
// depend on the thread count.

#include <optional>

#include "coboson/scenario.hpp"

namespace coboson {

inline constexpr const char* kToolVersion = "0.1.0";

RunResult run_scenario(const Scenario& scenario, unsigned threads = 1);

/// Explicit request, else COBOSON_THREADS, else 1.
unsigned resolve_threads(std::optional<unsigned> requested);

}  // namespace coboson
