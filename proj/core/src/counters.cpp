#include "biobench/counters.hpp"

#include <array>

namespace biobench {

OpCategory dominant_category(const OpCounters& c) {
  // loads_stores is reported but does not compete for the dominant slot
  const std::array<std::pair<OpCategory, std::uint64_t>, 5> ranked{{
      {OpCategory::branches, c.branches},
      {OpCategory::fxp_mul, c.fxp_mul},
      {OpCategory::fxp_mac, c.fxp_mac},
      {OpCategory::fp_mul, c.fp_mul},
      {OpCategory::fp_mac, c.fp_mac},
  }};
  OpCategory best = OpCategory::branches;
  std::uint64_t best_count = 0;
  for (const auto& [cat, count] : ranked) {
    if (count > best_count) {
      best = cat;
      best_count = count;
    }
  }
  return best;
}

std::string category_name(OpCategory c) {
  switch (c) {
    case OpCategory::branches: return "branches";
    case OpCategory::fxp_mul: return "fxp_mul";
    case OpCategory::fxp_mac: return "fxp_mac";
    case OpCategory::fp_mul: return "fp_mul";
    case OpCategory::fp_mac: return "fp_mac";
  }
  return "unknown";
}

}  // namespace biobench
