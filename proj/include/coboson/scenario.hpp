#pragma once

// Scenario documents, figure presets and result serialization.
//
// A scenario is a JSON object
//   {"version": 1, "kind": ..., "params": {...}, "sweep": {...}, "output": {...}}
// Parsing is strict: unknown keys are rejected and missing optional keys are
// filled with their defaults, so a loaded scenario is always complete.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace coboson {

using Json = nlohmann::ordered_json;

inline constexpr int kScenarioVersion = 1;

enum class ScenarioKind { coboson_sweep, tunnel, ep_scan, branching_sweep, network };

const char* scenario_kind_name(ScenarioKind kind) noexcept;

/// start + (stop - start) i / (count - 1), i = 0..count-1.
struct Linspace {
  double start = 0.0;
  double stop = 0.0;
  long count = 1;
  bool operator==(const Linspace&) const = default;
};

struct SweepAxis {
  std::string name;
  /// Set when the axis was written as {start, stop, count}; kept for round-trips.
  std::optional<Linspace> range;
  std::vector<double> values;
  bool operator==(const SweepAxis&) const = default;
};

struct OutputSpec {
  std::string path;  // empty: standard output
  std::string format = "csv";
  bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
  int version = kScenarioVersion;
  ScenarioKind kind = ScenarioKind::tunnel;
  /// Complete parameter set in schema order.
  Json params = Json::object();
  std::vector<SweepAxis> sweep;  // at most two axes, first is outermost
  OutputSpec output;

  bool operator==(const Scenario&) const = default;

  double number(std::string_view key) const;
  long integer(std::string_view key) const;
  std::string text(std::string_view key) const;
  const SweepAxis* axis(std::string_view name) const;
};

/// ParseError (with line and column) for malformed JSON or wrong shapes;
/// ValidationError naming the key and constraint otherwise.
Scenario load_scenario(std::string_view document);
Scenario load_scenario_file(const std::string& path);

/// Validates an in-memory document (defaults filled, constraints checked).
Scenario scenario_from_json(const Json& doc);
Json scenario_to_json(const Scenario& scenario);
std::string serialize_scenario(const Scenario& scenario);

/// fig1, fig2a, fig2b, fig3a, fig3b, fmo_demo.
Scenario preset(std::string_view name);
const std::vector<std::string>& preset_names();

// ---------------------------------------------------------------------------
// Result tables.

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// %.11e (12 significant digits); negative zero prints as zero.
std::string format_number(double value);

/// Header row then one line per row, '\n' line endings.
std::string to_csv(const Table& table);

struct RunResult {
  Scenario scenario;
  Table table;
  /// Per-site fractions for network scenarios.
  std::optional<Table> branching;
  Json metadata = Json::object();
};

/// {scenario, columns, rows, metadata[, branching]}.
std::string to_json(const RunResult& result);

/// The main table as CSV; for networks the branching table follows after a
/// blank line.
std::string to_csv(const RunResult& result);

}  // namespace coboson
