#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coboson {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle-agreement checks on randomized inputs drawn from `seed`.
std::vector<SelftestCheck> run_selftest(std::uint64_t seed);

}  // namespace coboson
