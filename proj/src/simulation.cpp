#include "manet/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "manet/errors.hpp"

namespace manet {

std::vector<Position> initial_positions(const Scenario& sc) {
  RandomStream rng = derive_stream(sc.seed, Substream::Placement);
  std::vector<Position> pos(sc.node_count);
  switch (sc.placement) {
    case PlacementKind::Random:
      for (auto& p : pos) {
        p.x = rng.uniform(0.0, sc.area.width);
        p.y = rng.uniform(0.0, sc.area.height);
      }
      break;
    case PlacementKind::Line:
      for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = Position{i * sc.spacing, 0.0};
      break;
    case PlacementKind::Explicit:
      pos = sc.positions;
      break;
  }
  if (sc.attack_adjacent_to != kNoNode && !sc.attackers.empty()) {
    const Position anchor = pos.at(sc.attack_adjacent_to);
    const double r = rng.uniform(0.0, sc.radio.range / 2.0);
    const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    Position& p = pos.at(sc.attackers.front().node);
    p.x = std::clamp(anchor.x + r * std::cos(a), 0.0, sc.area.width);
    p.y = std::clamp(anchor.y + r * std::sin(a), 0.0, sc.area.height);
  }
  return pos;
}

Simulation::Simulation(const Scenario& scenario)
    : scenario_(scenario), blackhole_(scenario.attackers) {
  scenario_.validate();
  world_ = std::make_unique<World>(scheduler_, scenario_.area, scenario_.radio, scenario_.queue,
                                   scenario_.mobility, initial_positions(scenario_),
                                   derive_stream(scenario_.seed, Substream::Mobility),
                                   derive_stream(scenario_.seed, Substream::MacLoss));
  world_->set_listener(this);
  aodv_ = std::make_unique<Aodv>(scenario_.node_count, scenario_.aodv,
                                 static_cast<AodvHost&>(*this));
  aodv_->set_adversary(&blackhole_);
  sentinel_ = std::make_unique<Sentinel>(scenario_.node_count, scenario_.detection,
                                         scenario_.aodv.net_diameter,
                                         static_cast<SentinelHost&>(*this));
}

std::uint64_t Simulation::run() {
  for (std::size_t f = 0; f < scenario_.flows.size(); ++f) schedule_flow(f, 0);
  return scheduler_.run_until(scenario_.duration_s);
}

void Simulation::schedule_flow(std::size_t flow, std::uint64_t k) {
  const FlowSpec& fs = scenario_.flows[flow];
  // Computed from k rather than accumulated so that timings stay exact.
  const SimTime at = fs.start_s + static_cast<double>(k) / fs.rate_pps;
  if (at >= fs.stop_s || at > scenario_.duration_s) return;
  scheduler_.schedule(at, [this, flow, k] {
    const FlowSpec& f = scenario_.flows[flow];
    inject_data(f.src, f.dst, f.payload_bytes);
    schedule_flow(flow, k + 1);
  });
}

PacketId Simulation::inject_data(NodeId src, NodeId dst, std::uint32_t payload_bytes) {
  if (src >= scenario_.node_count || dst >= scenario_.node_count || src == dst)
    throw InvariantViolation("inject_data with invalid endpoints");
  Packet data;
  data.kind = PacketKind::Data;
  data.id = next_packet_id();
  data.origin = src;
  data.target = dst;
  data.payload_bytes = payload_bytes;
  data.created_at = now();
  trace_.record(base_record(TraceEvent::Send, src, data));
  aodv_->originate_data(src, data);
  return data.id;
}

TraceRecord Simulation::base_record(TraceEvent event, NodeId node, const Packet& pkt) const {
  TraceRecord r;
  r.time = now();
  r.event = event;
  r.node = node;
  r.pkt_id = pkt.id;
  r.kind = pkt.kind;
  r.origin = pkt.origin;
  r.target = pkt.target;
  r.size_bytes = pkt.size_bytes();
  return r;
}

std::map<NodeId, SimTime> Simulation::ground_truth() const {
  std::map<NodeId, SimTime> truth;
  for (const auto& p : blackhole_.profiles()) {
    auto [it, inserted] = truth.emplace(p.node, p.active_from);
    if (!inserted) it->second = std::min(it->second, p.active_from);
  }
  return truth;
}

std::vector<PacketId> Simulation::in_flight() const {
  std::vector<PacketId> ids = world_->data_in_flight();
  const std::vector<PacketId> pending = aodv_->pending_data();
  ids.insert(ids.end(), pending.begin(), pending.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

RunSummary Simulation::summarize() const {
  return finalize(trace_.records(), scenario_.duration_s, ground_truth(), in_flight());
}

// ---- LinkListener ----

void Simulation::on_receive(NodeId at, NodeId from, const Packet& pkt, Reception how) {
  if (scenario_.detection.mode != DetectionMode::None &&
      sentinel_->observe_overhear(at, from, pkt, now())) {
    TraceRecord r = base_record(TraceEvent::Overhear, at, pkt);
    r.suspect = from;
    trace_.record(r);
  }
  if (how == Reception::Overheard) return;

  Packet p = pkt;
  ++p.hop_count;
  if (p.ttl > 0) --p.ttl;
  if (p.kind == PacketKind::Alert)
    sentinel_->handle_alert(at, p, from);
  else
    aodv_->receive(at, from, p);
}

void Simulation::on_departure(NodeId src, const Packet& pkt, NodeId next_hop, bool in_range) {
  if (pkt.kind != PacketKind::Data || next_hop == kNoNode || !in_range) return;
  if (scenario_.detection.mode == DetectionMode::None || next_hop == pkt.target) return;
  sentinel_->record_entrust(src, next_hop, pkt, now());
}

void Simulation::on_link_failure(NodeId src, const Packet& pkt, NodeId next_hop) {
  aodv_->handle_link_failure(src, pkt, next_hop);
}

void Simulation::on_queue_overflow(NodeId src, const Packet& pkt) {
  drop(src, pkt, DropCause::QueueOverflow);
}

void Simulation::on_mac_loss(NodeId src, const Packet& pkt, NodeId /*next_hop*/) {
  drop(src, pkt, DropCause::MacLoss);
}

// ---- AodvHost / SentinelHost ----

void Simulation::schedule_at(SimTime at, std::function<void()> fn) {
  scheduler_.schedule(at, std::move(fn));
}

void Simulation::send(NodeId from, const Packet& pkt, NodeId next_hop, SendRole role) {
  if (role == SendRole::Relay)
    trace_.record(base_record(TraceEvent::Forward, from, pkt));
  else if (pkt.is_control())
    trace_.record(base_record(TraceEvent::Send, from, pkt));
  world_->transmit(from, pkt, next_hop);
}

void Simulation::deliver(NodeId at, const Packet& pkt) {
  if (pkt.kind == PacketKind::Data) {
    TraceRecord r = base_record(TraceEvent::Recv, at, pkt);
    r.size_bytes = pkt.payload_bytes;
    trace_.record(r);
  }
}

void Simulation::drop(NodeId at, const Packet& pkt, DropCause cause) {
  TraceRecord r = base_record(TraceEvent::Drop, at, pkt);
  r.cause = cause;
  trace_.record(r);
}

void Simulation::note_repair(NodeId at, NodeId dest) {
  TraceRecord r;
  r.time = now();
  r.event = TraceEvent::Repair;
  r.node = at;
  r.kind = PacketKind::Rreq;
  r.origin = at;
  r.target = dest;
  trace_.record(r);
}

bool Simulation::blacklisted(NodeId at, NodeId other) const {
  return sentinel_->is_blacklisted(at, other);
}

SeqNum Simulation::own_seq(NodeId node) const { return aodv_->own_seq(node); }

void Simulation::flood(NodeId from, const Packet& alert, bool originated) {
  if (originated) {
    TraceRecord r = base_record(TraceEvent::Alert, from, alert);
    r.suspect = alert.blamed;
    if (alert.target_seq_known) r.suspect_seq = alert.target_seq;
    trace_.record(r);
  } else {
    trace_.record(base_record(TraceEvent::Forward, from, alert));
  }
  world_->transmit(from, alert, kNoNode);
}

void Simulation::repair_route(NodeId watcher, NodeId suspect, NodeId dest) {
  const RouteEntry* r = aodv_->usable_route(watcher, dest);
  if (r && r->next_hop == suspect) aodv_->local_repair(watcher, dest);
}

void Simulation::purge_routes_via(NodeId node, NodeId suspect) {
  aodv_->purge_routes_via(node, suspect);
}

void Simulation::note_verdict(const VerdictInfo& info) {
  TraceRecord r;
  r.time = now();
  r.event = TraceEvent::Verdict;
  r.node = info.watcher;
  r.pkt_id = info.pkt_id;
  r.kind = PacketKind::Data;
  r.suspect = info.suspect;
  r.suspect_seq = info.suspect_seq;
  if (info.suspect_seq) r.d = info.d;
  r.loss_pct = info.loss_pct;
  r.outcome = info.outcome;
  trace_.record(r);
}

}  // namespace manet
