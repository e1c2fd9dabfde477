#include <catch_amalgamated.hpp>

#include "checks.hpp"

using namespace manet::checks;

namespace {
constexpr std::size_t kCases = 200;

void require_pass(const Outcome& o) {
  INFO(o.detail);
  REQUIRE(o.pass);
}
}  // namespace

TEST_CASE("engine determinism: identical seed and scenario give byte-identical traces") {
  require_pass(prop_determinism(kCases));
}
TEST_CASE("event times are dispatched and recorded in order") {
  require_pass(prop_time_monotonicity(kCases));
}
TEST_CASE("dest_seq never decreases per (node, dest)") { require_pass(prop_dest_seq_monotone(kCases)); }
TEST_CASE("attack-free static runs are loop free") { require_pass(prop_loop_freedom(kCases)); }
TEST_CASE("delivery conservation holds exactly on every run") { require_pass(prop_conservation(kCases)); }
TEST_CASE("connectivity is symmetric with an inclusive boundary") {
  require_pass(prop_connectivity_symmetry(kCases));
}
TEST_CASE("classify_suspect is scale invariant and monotone in loss") {
  require_pass(prop_classify_invariance(kCases * 5));
}
TEST_CASE("an active attacker never emits data") { require_pass(prop_attacker_silence(kCases)); }
TEST_CASE("hop counts on random static topologies are within BFS + 1") {
  require_pass(criterion7_route_optimality(20));
}
