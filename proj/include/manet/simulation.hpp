#pragma once

#include <map>
#include <memory>
#include <vector>

#include "manet/aodv.hpp"
#include "manet/blackhole.hpp"
#include "manet/engine.hpp"
#include "manet/metrics.hpp"
#include "manet/scenario.hpp"
#include "manet/sentinel.hpp"
#include "manet/world.hpp"

namespace manet {

/// Initial node positions for a scenario: random, line or explicit placement,
/// followed by attacker adjacency. Draws only from the placement substream.
std::vector<Position> initial_positions(const Scenario& scenario);

/// One fully wired run: scheduler, world, routing, adversary, detectors and
/// trace. Owns all state; independent instances never share anything.
class Simulation final : private LinkListener, private AodvHost, private SentinelHost {
 public:
  explicit Simulation(const Scenario& scenario);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Schedules the configured CBR flows and runs to the scenario duration.
  std::uint64_t run();
  /// Runs to `until` without scheduling flows (for scripted tests).
  std::uint64_t run_until(SimTime until) { return scheduler_.run_until(until); }

  /// Application-level send of one Data packet from src at the current time.
  PacketId inject_data(NodeId src, NodeId dst, std::uint32_t payload_bytes);

  RunSummary summarize() const;
  std::map<NodeId, SimTime> ground_truth() const;
  std::vector<PacketId> in_flight() const;

  const Scenario& scenario() const { return scenario_; }
  const Trace& trace() const { return trace_; }
  Scheduler& scheduler() { return scheduler_; }
  World& world() { return *world_; }
  Aodv& aodv() { return *aodv_; }
  Sentinel& sentinel() { return *sentinel_; }
  const Blackhole& blackhole() const { return blackhole_; }

 private:
  // LinkListener
  void on_receive(NodeId at, NodeId from, const Packet& pkt, Reception how) override;
  void on_departure(NodeId src, const Packet& pkt, NodeId next_hop, bool in_range) override;
  void on_link_failure(NodeId src, const Packet& pkt, NodeId next_hop) override;
  void on_queue_overflow(NodeId src, const Packet& pkt) override;
  void on_mac_loss(NodeId src, const Packet& pkt, NodeId next_hop) override;

  // AodvHost and SentinelHost
  SimTime now() const override { return scheduler_.now(); }
  void schedule_at(SimTime at, std::function<void()> fn) override;
  PacketId next_packet_id() override { return next_packet_id_++; }
  void send(NodeId from, const Packet& pkt, NodeId next_hop, SendRole role) override;
  void deliver(NodeId at, const Packet& pkt) override;
  void drop(NodeId at, const Packet& pkt, DropCause cause) override;
  void note_repair(NodeId at, NodeId dest) override;
  bool blacklisted(NodeId at, NodeId other) const override;
  SeqNum own_seq(NodeId node) const override;
  void flood(NodeId from, const Packet& alert, bool originated) override;
  void repair_route(NodeId watcher, NodeId suspect, NodeId dest) override;
  void purge_routes_via(NodeId node, NodeId suspect) override;
  void note_verdict(const VerdictInfo& info) override;

  TraceRecord base_record(TraceEvent event, NodeId node, const Packet& pkt) const;
  void schedule_flow(std::size_t flow, std::uint64_t k);

  Scenario scenario_;
  Scheduler scheduler_;
  Trace trace_;
  Blackhole blackhole_;
  std::unique_ptr<World> world_;
  std::unique_ptr<Aodv> aodv_;
  std::unique_ptr<Sentinel> sentinel_;
  PacketId next_packet_id_ = 1;
};

}  // namespace manet
