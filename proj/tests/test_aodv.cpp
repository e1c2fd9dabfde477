#include <catch_amalgamated.hpp>

#include <map>
#include <utility>
#include <vector>

#include "manet/aodv.hpp"
#include "manet/simulation.hpp"

using namespace manet;

namespace {

Scenario static_net(std::vector<Position> pos) {
  Scenario s;
  s.duration_s = 30.0;
  s.area = Area{2000, 2000};
  s.node_count = pos.size();
  s.placement = PlacementKind::Explicit;
  s.positions = std::move(pos);
  s.mobility = MobilityConfig{0.0, 0.0, 0.0};
  s.radio.loss_prob = 0.0;
  s.flows.clear();
  return s;
}

std::vector<Position> line(std::size_t n, double spacing = 200.0) {
  std::vector<Position> pos;
  for (std::size_t i = 0; i < n; ++i) pos.push_back({i * spacing, 0.0});
  return pos;
}

void send_at(Simulation& sim, SimTime t, NodeId src, NodeId dst) {
  sim.scheduler().schedule(t, [&sim, src, dst] { sim.inject_data(src, dst, 512); });
}

std::size_t count(const Simulation& sim, TraceEvent ev, PacketKind kind) {
  std::size_t n = 0;
  for (const auto& r : sim.trace().records()) n += r.event == ev && r.kind == kind;
  return n;
}

bool dropped_with(const Simulation& sim, DropCause cause) {
  for (const auto& r : sim.trace().records())
    if (r.event == TraceEvent::Drop && r.kind == PacketKind::Data && r.cause == cause) return true;
  return false;
}

}  // namespace

TEST_CASE("route update rule", "[aodv]") {
  RouteEntry cur;
  cur.dest_seq = 10;
  cur.seq_known = true;
  cur.hop_count = 3;
  cur.state = RouteState::Valid;
  CHECK(should_replace(nullptr, 1, 9));
  CHECK(should_replace(&cur, 12, 5));   // fresher wins despite more hops
  CHECK(should_replace(&cur, 10, 2));   // equal freshness, shorter
  CHECK_FALSE(should_replace(&cur, 10, 3));
  CHECK_FALSE(should_replace(&cur, 9, 1));  // stale loses despite fewer hops
  cur.state = RouteState::Invalid;
  CHECK(should_replace(&cur, 10, 3));
  CHECK_FALSE(should_replace(&cur, 9, 1));
}

TEST_CASE("configuration is validated", "[aodv]") {
  AodvConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.ring_traversal(3) == Catch::Approx(0.2));
  c.ttl_start = 0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("two neighbours discover a one-hop route", "[aodv]") {
  Simulation sim(static_net(line(2)));
  send_at(sim, 1.0, 0, 1);
  sim.run_until(2.0);
  const RouteEntry* r = sim.aodv().route(0, 1);
  REQUIRE(r);
  CHECK(r->state == RouteState::Valid);
  CHECK(r->hop_count == 1);
  CHECK(r->next_hop == 1);
  CHECK(sim.summarize().data_delivered == 1);
}

TEST_CASE("a five-node line yields a four-hop route", "[aodv]") {
  Simulation sim(static_net(line(5)));
  send_at(sim, 1.0, 0, 4);
  sim.run_until(3.0);
  const RouteEntry* r = sim.aodv().route(0, 4);
  REQUIRE(r);
  CHECK(r->hop_count == 4);
  CHECK(r->next_hop == 1);
  // Reverse route at the destination.
  REQUIRE(sim.aodv().route(4, 0));
  CHECK(sim.aodv().route(4, 0)->hop_count == 4);
  CHECK(sim.summarize().data_delivered == 1);
}

TEST_CASE("an unreachable destination fails after the retries", "[aodv]") {
  Simulation sim(static_net({{0, 0}, {200, 0}, {1500, 0}}));
  send_at(sim, 1.0, 0, 2);
  sim.run_until(20.0);
  CHECK(sim.aodv().counters().discovery_failures == 1);
  CHECK_FALSE(sim.aodv().discovering(0, 2));
  CHECK(sim.aodv().pending_count(0) == 0);
  CHECK(dropped_with(sim, DropCause::NoRoute));
  // Expanding ring: the first attempt plus rreq_retries more.
  CHECK(sim.aodv().counters().rreq_originated == 1 + sim.aodv().config().rreq_retries);
}

TEST_CASE("each node relays a request at most once", "[aodv]") {
  // 0, 1 and 2 all hear each other; 3 is out of reach.
  Simulation sim(static_net({{0, 0}, {100, 0}, {50, 80}, {1500, 0}}));
  sim.scheduler().schedule(1.0, [&] { sim.aodv().originate_route_request(0, 3); });
  sim.run_until(1.1);  // before the first ring times out
  CHECK(sim.aodv().counters().rreq_originated == 1);
  CHECK(sim.aodv().counters().rreq_forwarded == 2);
}

TEST_CASE("an intermediate node with a fresh route replies", "[aodv]") {
  Simulation sim(static_net(line(4)));
  send_at(sim, 1.0, 1, 3);
  sim.run_until(2.0);
  REQUIRE(sim.aodv().route(1, 3));
  const auto generated = sim.aodv().counters().rrep_generated;
  send_at(sim, 3.0, 0, 3);
  sim.run_until(4.0);
  CHECK(sim.aodv().counters().rrep_generated > generated);
  bool node1_replied = false;
  for (const auto& r : sim.trace().records())
    if (r.time >= 3.0 && r.event == TraceEvent::Send && r.kind == PacketKind::Rrep && r.node == 1)
      node1_replied = true;
  CHECK(node1_replied);
  REQUIRE(sim.aodv().route(0, 3));
  CHECK(sim.aodv().route(0, 3)->hop_count == 3);
  CHECK(sim.summarize().data_delivered == 2);
}

TEST_CASE("a broken link is repaired locally through another neighbour", "[aodv]") {
  // 0-1-2-3 line; node 4 links 2 and 3 but is only on a longer path.
  Simulation sim(static_net({{0, 0}, {200, 0}, {400, 0}, {600, 0}, {450, 200}}));
  send_at(sim, 1.0, 0, 3);
  sim.run_until(2.0);
  REQUIRE(sim.aodv().route(2, 3));
  CHECK(sim.aodv().route(2, 3)->next_hop == 3);
  sim.world().place(3, {650, 200});  // out of 2's reach, next to 4
  send_at(sim, 3.0, 0, 3);
  send_at(sim, 4.0, 0, 3);
  sim.run_until(6.0);
  CHECK(sim.aodv().counters().local_repairs >= 1);
  CHECK(sim.aodv().counters().repair_success >= 1);
  REQUIRE(sim.aodv().route(2, 3));
  CHECK(sim.aodv().route(2, 3)->next_hop == 4);
  bool later_delivered = false;
  for (const auto& r : sim.trace().records())
    if (r.time >= 4.0 && r.event == TraceEvent::Recv) later_delivered = true;
  CHECK(later_delivered);
  CHECK(count(sim, TraceEvent::Repair, PacketKind::Rreq) >= 1);
}

TEST_CASE("a failed repair reports the destination upstream", "[aodv]") {
  Simulation sim(static_net(line(4)));
  send_at(sim, 1.0, 0, 3);
  sim.run_until(2.0);
  REQUIRE(sim.aodv().route(0, 3));
  sim.world().place(3, {1800, 0});
  send_at(sim, 3.0, 0, 3);
  sim.run_until(6.0);
  CHECK(sim.aodv().counters().repair_failure >= 1);
  CHECK(sim.aodv().counters().rerr_sent >= 1);
  const RouteEntry* r = sim.aodv().route(0, 3);
  CHECK((r == nullptr || r->state != RouteState::Valid));
}

TEST_CASE("purging forgets routes through or learned from a node", "[aodv]") {
  Simulation sim(static_net(line(3)));
  send_at(sim, 1.0, 0, 2);
  sim.run_until(2.0);
  REQUIRE(sim.aodv().route(0, 2));
  sim.aodv().purge_routes_via(0, 1);
  CHECK(sim.aodv().route(0, 2) == nullptr);
  CHECK(sim.aodv().route(0, 1) == nullptr);
}

TEST_CASE("route observer sees sequence numbers only grow", "[aodv]") {
  Simulation sim(static_net(line(4)));
  std::map<std::pair<NodeId, NodeId>, SeqNum> last;
  bool regressed = false;
  sim.aodv().set_route_observer(
      [&](NodeId node, NodeId dest, const RouteEntry*, const RouteEntry* after) {
        if (!after || !after->seq_known) return;
        auto [it, inserted] = last.emplace(std::pair{node, dest}, after->dest_seq);
        if (!inserted) {
          regressed |= after->dest_seq < it->second;
          it->second = after->dest_seq;
        }
      });
  for (int k = 0; k < 5; ++k) {
    send_at(sim, 1.0 + k, 0, 3);
    send_at(sim, 1.5 + k, 3, 0);
  }
  sim.run_until(8.0);
  CHECK_FALSE(last.empty());
  CHECK_FALSE(regressed);
}
