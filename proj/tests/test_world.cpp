#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "manet/errors.hpp"
#include "manet/world.hpp"

using namespace manet;

namespace {

struct Heard {
  NodeId at;
  NodeId from;
  PacketId id;
  Reception how;
  SimTime time;
};

class Recorder : public LinkListener {
 public:
  explicit Recorder(Scheduler& s) : s_(s) {}
  void on_receive(NodeId at, NodeId from, const Packet& pkt, Reception how) override {
    heard.push_back({at, from, pkt.id, how, s_.now()});
  }
  void on_departure(NodeId, const Packet& pkt, NodeId, bool in_range) override {
    departures.push_back({pkt.id, s_.now()});
    if (!in_range) ++out_of_range;
  }
  void on_link_failure(NodeId, const Packet&, NodeId) override { ++link_failures; }
  void on_queue_overflow(NodeId, const Packet& pkt) override { overflowed.push_back(pkt.id); }
  void on_mac_loss(NodeId, const Packet&, NodeId) override { ++mac_losses; }

  std::vector<Heard> heard;
  std::vector<std::pair<PacketId, SimTime>> departures;
  std::vector<PacketId> overflowed;
  int out_of_range = 0;
  int link_failures = 0;
  int mac_losses = 0;

 private:
  Scheduler& s_;
};

MobilityConfig still() { return MobilityConfig{0.0, 0.0, 0.0}; }

Packet data(PacketId id) {
  Packet p;
  p.kind = PacketKind::Data;
  p.id = id;
  p.payload_bytes = 512;
  return p;
}

Packet control(PacketId id) {
  Packet p;
  p.kind = PacketKind::Rreq;
  p.id = id;
  return p;
}

}  // namespace

TEST_CASE("link exists exactly up to the radio range", "[world]") {
  Scheduler s;
  World w(s, Area{1000, 1000}, RadioModel{250.0, 0.0}, QueueConfig{}, still(),
          {{0, 0}, {250, 0}, {250.001, 0}, {150, 200}}, RandomStream(1), RandomStream(2));
  CHECK(w.in_range(0, 1));
  CHECK(w.in_range(1, 0));
  CHECK_FALSE(w.in_range(0, 2));
  CHECK(w.in_range(0, 3));  // 3-4-5 triangle: distance exactly 250
  CHECK(w.neighbors(0) == std::vector<NodeId>{1, 3});
  CHECK_THROWS_AS(w.in_range(0, 9), InvariantViolation);
}

TEST_CASE("unicast reaches the next hop and every other neighbor overhears", "[world]") {
  Scheduler s;
  World w(s, Area{1000, 1000}, RadioModel{}, QueueConfig{}, still(),
          {{0, 0}, {200, 0}, {100, 100}, {900, 900}}, RandomStream(1), RandomStream(2));
  Recorder rec(s);
  w.set_listener(&rec);
  w.transmit(0, data(7), 1);
  s.run_until(1.0);
  REQUIRE(rec.heard.size() == 2);
  CHECK(rec.heard[0].at == 1);
  CHECK(rec.heard[0].how == Reception::Unicast);
  CHECK(rec.heard[1].at == 2);
  CHECK(rec.heard[1].how == Reception::Overheard);
  // Service starts at once, the frame arrives one hop latency later.
  CHECK(rec.departures.at(0).second == 0.0);
  CHECK(rec.heard[0].time == Catch::Approx(0.002));
}

TEST_CASE("broadcast reaches every neighbor", "[world]") {
  Scheduler s;
  World w(s, Area{1000, 1000}, RadioModel{}, QueueConfig{}, still(),
          {{0, 0}, {200, 0}, {100, 100}, {900, 900}}, RandomStream(1), RandomStream(2));
  Recorder rec(s);
  w.set_listener(&rec);
  w.transmit(0, control(1), kNoNode);
  s.run_until(1.0);
  REQUIRE(rec.heard.size() == 2);
  for (const auto& h : rec.heard) CHECK(h.how == Reception::Broadcast);
}

TEST_CASE("unicast to a node out of range reports a link failure", "[world]") {
  Scheduler s;
  World w(s, Area{1000, 1000}, RadioModel{}, QueueConfig{}, still(), {{0, 0}, {900, 0}},
          RandomStream(1), RandomStream(2));
  Recorder rec(s);
  w.set_listener(&rec);
  w.transmit(0, data(3), 1);
  s.run_until(1.0);
  CHECK(rec.link_failures == 1);
  CHECK(rec.out_of_range == 1);
  CHECK(rec.heard.empty());
}

TEST_CASE("queue is drop-tail per lane and serves control first", "[world]") {
  TxQueue q(2, 100.0);
  CHECK(q.push({data(1), 0}));
  CHECK(q.push({data(2), 0}));
  CHECK_FALSE(q.push({data(3), 0}));
  CHECK(q.push({control(10), kNoNode}));
  CHECK(q.data_backlog() == 2);
  CHECK(q.control_backlog() == 1);
  CHECK(q.pop()->packet.id == 10);
  CHECK(q.pop()->packet.id == 1);
  CHECK(q.pop()->packet.id == 2);
  CHECK_FALSE(q.pop().has_value());
  CHECK(q.empty());
}

TEST_CASE("world reports queue overflow and services at the configured rate", "[world]") {
  Scheduler s;
  World w(s, Area{1000, 1000}, RadioModel{}, QueueConfig{2, 100.0, 0.002}, still(),
          {{0, 0}, {100, 0}}, RandomStream(1), RandomStream(2));
  Recorder rec(s);
  w.set_listener(&rec);
  // Frames wait in the lane until the interface serves them.
  for (PacketId id = 1; id <= 5; ++id) w.transmit(0, data(id), 1);
  s.run_until(1.0);
  CHECK(rec.overflowed == std::vector<PacketId>{3, 4, 5});
  REQUIRE(rec.departures.size() == 2);
  CHECK(rec.departures[0].second == Catch::Approx(0.0));
  CHECK(rec.departures[1].second == Catch::Approx(0.01));
}

TEST_CASE("loss probability one loses every frame", "[world]") {
  Scheduler s;
  World w(s, Area{1000, 1000}, RadioModel{250.0, 1.0}, QueueConfig{}, still(),
          {{0, 0}, {100, 0}}, RandomStream(1), RandomStream(2));
  Recorder rec(s);
  w.set_listener(&rec);
  w.transmit(0, data(1), 1);
  s.run_until(1.0);
  CHECK(rec.mac_losses == 1);
  CHECK(rec.heard.empty());
  CHECK(w.data_in_flight().empty());
}

TEST_CASE("data in flight tracks queued and airborne frames", "[world]") {
  Scheduler s;
  World w(s, Area{1000, 1000}, RadioModel{}, QueueConfig{}, still(), {{0, 0}, {100, 0}},
          RandomStream(1), RandomStream(2));
  Recorder rec(s);
  w.set_listener(&rec);
  w.transmit(0, data(1), 1);
  w.transmit(0, data(2), 1);
  CHECK(w.data_in_flight() == std::vector<PacketId>{1, 2});
  s.run_until(1.0);
  CHECK(w.data_in_flight().empty());
}

TEST_CASE("random waypoint keeps nodes inside the area", "[world]") {
  Scheduler s;
  const Area area{300, 200};
  std::vector<Position> start(10, Position{150, 100});
  World w(s, area, RadioModel{}, QueueConfig{}, MobilityConfig{1.0, 20.0, 0.5}, start,
          RandomStream(11), RandomStream(12));
  bool moved = false;
  for (int step = 1; step <= 1000; ++step) {
    const SimTime t = step * 0.5;
    for (NodeId n = 0; n < 10; ++n) {
      const Position p = w.step_mobility(n, t);
      REQUIRE(p.x >= 0.0);
      REQUIRE(p.x <= area.width);
      REQUIRE(p.y >= 0.0);
      REQUIRE(p.y <= area.height);
      moved |= !(p == Position{150, 100});
    }
  }
  CHECK(moved);
}

TEST_CASE("scripted motion moves in a straight line and stops", "[world]") {
  Scheduler s;
  World w(s, Area{1000, 1000}, RadioModel{}, QueueConfig{}, still(), {{0, 0}, {0, 0}},
          RandomStream(1), RandomStream(2));
  w.set_motion(1, {0, 0}, {100, 0}, 10.0);
  CHECK(w.step_mobility(1, 5.0).x == Catch::Approx(50.0));
  CHECK(w.step_mobility(1, 20.0) == Position{100, 0});
  w.place(1, {400, 0});
  CHECK(w.step_mobility(1, 30.0) == Position{400, 0});
  CHECK_FALSE(w.in_range(0, 1));
}
