// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fail.

#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include "checks.hpp"

int main() {
  using namespace manet::checks;
  const auto seeds = default_seeds();
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 classify worked examples", [] { return criterion1_classify_examples(); }},
      {"2 attack impact", [&] { return criterion2_attack_impact(seeds); }},
      {"3 detection recovery", [&] { return criterion3_detection_recovery(seeds); }},
      {"4 congestion contrast", [] { return criterion4_congestion_contrast(); }},
      {"5 directional ordering", [&] { return criterion5_directional_ordering(seeds); }},
      {"6 property suites", [] { return criterion6_properties(200); }},
      {"7 route optimality", [] { return criterion7_route_optimality(20); }},
      {"8 line metrics", [] { return criterion8_line_metrics(); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("criterion %s: %s - %s\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
