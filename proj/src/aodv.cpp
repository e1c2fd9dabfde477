#include "manet/aodv.hpp"

#include <algorithm>
#include <sstream>

#include "manet/blackhole.hpp"
#include "manet/errors.hpp"

namespace manet {

void AodvConfig::validate() const {
  if (net_diameter == 0) throw ConfigError("aodv.net_diameter must be positive");
  if (ttl_start == 0) throw ConfigError("aodv.ttl_start must be positive");
  if (repair_ttl == 0) throw ConfigError("aodv.repair_ttl must be positive");
  if (!(node_traversal_s > 0.0)) throw ConfigError("aodv.node_traversal must be positive");
  if (!(route_lifetime_s > 0.0)) throw ConfigError("aodv.route_lifetime must be positive");
  if (!(repair_timeout_s > 0.0)) throw ConfigError("aodv.repair_timeout must be positive");
  if (!(rreq_cache_s > 0.0)) throw ConfigError("aodv.rreq_cache must be positive");
  if (pending_capacity == 0) throw ConfigError("aodv.pending_capacity must be positive");
}

bool should_replace(const RouteEntry* current, SeqNum seq, std::uint32_t hops) {
  if (current == nullptr || !current->seq_known) return true;
  if (seq > current->dest_seq) return true;
  if (seq < current->dest_seq) return false;
  return hops < current->hop_count || current->state != RouteState::Valid;
}

Aodv::Aodv(std::size_t node_count, AodvConfig config, AodvHost& host)
    : config_(config), host_(host), nodes_(node_count) {
  config_.validate();
}

RouteEntry* Aodv::find(NodeId node, NodeId dest) {
  auto& routes = nodes_.at(node).routes;
  auto it = routes.find(dest);
  return it == routes.end() ? nullptr : &it->second;
}

const RouteEntry* Aodv::route(NodeId node, NodeId dest) const {
  const auto& routes = nodes_.at(node).routes;
  auto it = routes.find(dest);
  return it == routes.end() ? nullptr : &it->second;
}

std::vector<RouteEntry> Aodv::routes(NodeId node) const {
  std::vector<RouteEntry> out;
  for (const auto& [dest, e] : nodes_.at(node).routes) out.push_back(e);
  return out;
}

bool Aodv::discovering(NodeId node, NodeId dest) const {
  return nodes_.at(node).discoveries.count(dest) != 0;
}

std::vector<PacketId> Aodv::pending_data() const {
  std::vector<PacketId> ids;
  for (const auto& n : nodes_)
    for (const auto& p : n.pending) ids.push_back(p.id);
  return ids;
}

void Aodv::commit(NodeId node, RouteEntry& slot, const RouteEntry& updated) {
  if (slot.seq_known && updated.seq_known && updated.dest_seq < slot.dest_seq) {
    std::ostringstream msg;
    msg << "destination sequence number decreased at node " << node << " for " << slot.dest
        << ": " << slot.dest_seq << " -> " << updated.dest_seq;
    throw InvariantViolation(msg.str());
  }
  if (slot.seq_known && !updated.seq_known)
    throw InvariantViolation("route update dropped a known sequence number");
  const RouteEntry before = slot;
  slot = updated;
  if (observer_) observer_(node, slot.dest, &before, &slot);
}

bool Aodv::offer_route(NodeId node, NodeId dest, NodeId next_hop, SeqNum seq, bool seq_known,
                       std::uint32_t hops, NodeId learned_from) {
  if (dest == node) return false;
  auto& routes = nodes_.at(node).routes;
  RouteEntry* current = find(node, dest);
  if (current && seq_known && !should_replace(current, seq, hops)) return false;
  if (current && !seq_known && current->seq_known) return false;

  RouteEntry updated;
  updated.dest = dest;
  updated.next_hop = next_hop;
  updated.dest_seq = seq;
  updated.seq_known = seq_known;
  updated.hop_count = hops;
  updated.expires_at = host_.now() + config_.route_lifetime_s;
  updated.state = RouteState::Valid;
  updated.learned_from = learned_from;
  if (current) {
    updated.expires_at = std::max(updated.expires_at, current->expires_at);
    commit(node, *current, updated);
  } else {
    auto [it, inserted] = routes.emplace(dest, updated);
    if (observer_) observer_(node, dest, nullptr, &it->second);
  }
  return true;
}

void Aodv::touch_neighbor(NodeId node, NodeId neighbor) {
  // Hearing a neighbor only creates a sequence-less one-hop route when no
  // route with a known sequence number exists; routes learned through
  // discovery are left to the sequence-number rules.
  RouteEntry* e = find(node, neighbor);
  if (e && e->seq_known) {
    if (e->next_hop == neighbor && e->hop_count == 1) refresh(node, neighbor);
    return;
  }
  const bool was_usable = e && e->state == RouteState::Valid;
  if (e) {
    RouteEntry updated = *e;
    updated.next_hop = neighbor;
    updated.hop_count = 1;
    updated.state = RouteState::Valid;
    updated.expires_at = std::max(e->expires_at, host_.now() + config_.route_lifetime_s);
    updated.learned_from = neighbor;
    commit(node, *e, updated);
  } else {
    offer_route(node, neighbor, neighbor, 0, false, 1, neighbor);
  }
  if (!was_usable && discovering(node, neighbor)) finish_discovery(node, neighbor);
}

void Aodv::refresh(NodeId node, NodeId dest) {
  if (RouteEntry* e = find(node, dest); e && e->state == RouteState::Valid)
    e->expires_at = std::max(e->expires_at, host_.now() + config_.route_lifetime_s);
}

const RouteEntry* Aodv::usable_route(NodeId node, NodeId dest) {
  RouteEntry* e = find(node, dest);
  if (!e || e->state != RouteState::Valid) return nullptr;
  if (e->expires_at < host_.now()) {
    RouteEntry updated = *e;
    updated.state = RouteState::Invalid;
    commit(node, *e, updated);
    return nullptr;
  }
  if (host_.blacklisted(node, e->next_hop)) return nullptr;
  return e;
}

void Aodv::invalidate(NodeId node, RouteEntry& entry, RouteState state) {
  // The sequence number is kept: an entry that is no longer Valid accepts an
  // equal sequence number (see should_replace), so the destination itself can
  // always repair it.
  RouteEntry updated = entry;
  updated.state = state;
  commit(node, entry, updated);
}

bool Aodv::seen_flood(NodeId node, NodeId origin, std::uint32_t flood_id) {
  auto& seen = nodes_.at(node).seen;
  const SimTime now = host_.now();
  if (seen.size() > 4096) {
    for (auto it = seen.begin(); it != seen.end();)
      it = it->second < now ? seen.erase(it) : std::next(it);
  }
  auto [it, inserted] = seen.emplace(std::make_pair(origin, flood_id), now + config_.rreq_cache_s);
  if (inserted) return false;
  if (it->second < now) {
    it->second = now + config_.rreq_cache_s;
    return false;
  }
  return true;
}

void Aodv::originate_data(NodeId src, Packet data) {
  data.ttl = config_.net_diameter;
  forward_data(src, std::move(data));
}

void Aodv::receive(NodeId at, NodeId from, const Packet& pkt) {
  switch (pkt.kind) {
    case PacketKind::Rreq: handle_rreq(at, pkt, from); return;
    case PacketKind::Rrep: handle_rrep(at, pkt, from); return;
    case PacketKind::Rerr: handle_rerr(at, pkt, from); return;
    case PacketKind::Data: break;
    case PacketKind::Alert: throw InvariantViolation("alert routed to the AODV agent");
  }

  if (adversary_) {
    if (const AttackerProfile* a = adversary_->active(at, host_.now()); a && pkt.target != at) {
      Blackhole::handle_data(*a, pkt, host_);
      return;
    }
  }
  if (pkt.target == at) {
    refresh(at, pkt.origin);
    refresh(at, from);
    host_.deliver(at, pkt);
    return;
  }
  if (pkt.ttl == 0) {
    host_.drop(at, pkt, DropCause::TtlExpired);
    return;
  }
  refresh(at, pkt.origin);
  forward_data(at, pkt);
}

void Aodv::forward_data(NodeId node, Packet pkt) {
  if (pkt.kind != PacketKind::Data) throw InvariantViolation("forward_data on a control packet");
  if (pkt.target == node) throw InvariantViolation("forward_data at the packet's target");
  if (const RouteEntry* r = usable_route(node, pkt.target)) {
    const NodeId next = r->next_hop;
    refresh(node, pkt.target);
    refresh(node, next);
    host_.send(node, pkt, next, pkt.origin == node ? SendRole::Originate : SendRole::Relay);
    return;
  }
  const NodeId dest = pkt.target;
  const NodeId origin = pkt.origin;
  buffer(node, std::move(pkt));
  if (discovering(node, dest)) return;
  if (node == origin)
    originate_route_request(node, dest);
  else
    local_repair(node, dest);
}

void Aodv::buffer(NodeId node, Packet pkt) {
  auto& pending = nodes_.at(node).pending;
  if (pending.size() >= config_.pending_capacity) {
    Packet oldest = std::move(pending.front());
    pending.pop_front();
    host_.drop(node, oldest, DropCause::NoRoute);
  }
  pending.push_back(std::move(pkt));
}

void Aodv::flush_pending(NodeId node, NodeId dest) {
  auto& pending = nodes_.at(node).pending;
  std::vector<Packet> ready;
  for (auto it = pending.begin(); it != pending.end();) {
    if (it->target == dest) {
      ready.push_back(std::move(*it));
      it = pending.erase(it);
    } else {
      ++it;
    }
  }
  for (auto& p : ready) forward_data(node, std::move(p));
}

void Aodv::drop_pending(NodeId node, NodeId dest) {
  auto& pending = nodes_.at(node).pending;
  std::vector<Packet> lost;
  for (auto it = pending.begin(); it != pending.end();) {
    if (it->target == dest) {
      lost.push_back(std::move(*it));
      it = pending.erase(it);
    } else {
      ++it;
    }
  }
  for (const auto& p : lost) host_.drop(node, p, DropCause::NoRoute);
}

void Aodv::originate_route_request(NodeId src, NodeId dest) {
  NodeState& st = nodes_.at(src);
  if (st.discoveries.count(dest)) return;
  if (RouteEntry* e = find(src, dest); e && e->state == RouteState::Valid)
    invalidate(src, *e, RouteState::Invalid);
  Discovery d;
  d.token = next_token_++;
  st.discoveries[dest] = d;
  send_rreq(src, dest, config_.ttl_start, d.token);
}

void Aodv::send_rreq(NodeId node, NodeId dest, std::uint32_t ttl, std::uint64_t token) {
  NodeState& st = nodes_.at(node);
  ++st.own_seq;
  const std::uint32_t flood_id = ++st.next_flood_id;
  seen_flood(node, node, flood_id);

  Packet rreq;
  rreq.kind = PacketKind::Rreq;
  rreq.id = host_.next_packet_id();
  rreq.origin = node;
  rreq.origin_seq = st.own_seq;
  rreq.target = dest;
  if (const RouteEntry* e = route(node, dest); e && e->seq_known) {
    rreq.target_seq = e->dest_seq;
    rreq.target_seq_known = true;
  }
  rreq.ttl = ttl;
  rreq.flood_id = flood_id;
  rreq.created_at = host_.now();
  ++counters_.rreq_originated;
  host_.send(node, rreq, kNoNode, SendRole::Originate);

  const bool repair = st.discoveries.at(dest).repair;
  const double wait = repair ? config_.repair_timeout_s : config_.ring_traversal(ttl);
  host_.schedule_at(host_.now() + wait,
                    [this, node, dest, token] { on_discovery_timeout(node, dest, token); });
}

void Aodv::on_discovery_timeout(NodeId node, NodeId dest, std::uint64_t token) {
  NodeState& st = nodes_.at(node);
  auto it = st.discoveries.find(dest);
  if (it == st.discoveries.end() || it->second.token != token) return;
  if (usable_route(node, dest)) {
    finish_discovery(node, dest);
    return;
  }
  Discovery& d = it->second;
  if (d.repair) {
    ++counters_.repair_failure;
    st.discoveries.erase(it);
    drop_pending(node, dest);
    Packet rerr;
    rerr.kind = PacketKind::Rerr;
    rerr.id = host_.next_packet_id();
    rerr.origin = node;
    rerr.ttl = 1;
    rerr.created_at = host_.now();
    if (RouteEntry* e = find(node, dest)) {
      invalidate(node, *e, RouteState::Invalid);
      rerr.blamed = e->next_hop;
      rerr.unreachable.push_back(Unreachable{dest, e->dest_seq});
    } else {
      rerr.unreachable.push_back(Unreachable{dest, 0});
    }
    ++counters_.rerr_sent;
    host_.send(node, rerr, kNoNode, SendRole::Originate);
    return;
  }
  if (d.attempt < config_.rreq_retries) {
    ++d.attempt;
    send_rreq(node, dest, config_.net_diameter, token);
    return;
  }
  ++counters_.discovery_failures;
  st.discoveries.erase(it);
  drop_pending(node, dest);
}

void Aodv::finish_discovery(NodeId node, NodeId dest) {
  NodeState& st = nodes_.at(node);
  auto it = st.discoveries.find(dest);
  if (it != st.discoveries.end()) {
    if (it->second.repair) ++counters_.repair_success;
    st.discoveries.erase(it);
  }
  flush_pending(node, dest);
}

bool Aodv::local_repair(NodeId node, NodeId dest) {
  NodeState& st = nodes_.at(node);
  if (st.discoveries.count(dest)) return false;
  if (RouteEntry* e = find(node, dest)) invalidate(node, *e, RouteState::UnderRepair);
  Discovery d;
  d.repair = true;
  d.token = next_token_++;
  st.discoveries[dest] = d;
  ++counters_.local_repairs;
  host_.note_repair(node, dest);
  send_rreq(node, dest, config_.repair_ttl, d.token);
  return true;
}

NodeId Aodv::reverse_hop(NodeId node, NodeId origin, NodeId fallback) {
  if (const RouteEntry* r = usable_route(node, origin)) return r->next_hop;
  return fallback;
}

void Aodv::reply_as_destination(NodeId node, const Packet& rreq, NodeId from) {
  NodeState& st = nodes_.at(node);
  // Step at most one past the requester's knowledge so that a bogus request
  // cannot drag this node's sequence number arbitrarily far.
  if (rreq.target_seq_known && rreq.target_seq > st.own_seq) ++st.own_seq;
  Packet rrep;
  rrep.kind = PacketKind::Rrep;
  rrep.id = host_.next_packet_id();
  rrep.origin = rreq.origin;
  rrep.target = node;
  rrep.target_seq = st.own_seq;
  rrep.target_seq_known = true;
  rrep.hop_count = 0;
  rrep.ttl = config_.net_diameter;
  rrep.informant = node;
  rrep.created_at = host_.now();
  ++counters_.rrep_generated;
  host_.send(node, rrep, reverse_hop(node, rreq.origin, from), SendRole::Originate);
}

void Aodv::handle_rreq(NodeId node, Packet pkt, NodeId from) {
  if (host_.blacklisted(node, from)) return;
  touch_neighbor(node, from);
  if (pkt.origin == node) return;
  if (seen_flood(node, pkt.origin, pkt.flood_id)) return;

  offer_route(node, pkt.origin, from, pkt.origin_seq, true, pkt.hop_count, pkt.origin);
  refresh(node, pkt.origin);

  if (adversary_) {
    if (const AttackerProfile* a = adversary_->active(node, host_.now())) {
      Blackhole::handle_rreq(*a, pkt, from, host_);
      return;
    }
  }

  if (pkt.target == node) {
    reply_as_destination(node, pkt, from);
    return;
  }

  if (const RouteEntry* r = usable_route(node, pkt.target);
      r && r->seq_known && (!pkt.target_seq_known || r->dest_seq >= pkt.target_seq) &&
      r->next_hop != from && r->next_hop != pkt.origin) {
    Packet rrep;
    rrep.kind = PacketKind::Rrep;
    rrep.id = host_.next_packet_id();
    rrep.origin = pkt.origin;
    rrep.target = pkt.target;
    rrep.target_seq = r->dest_seq;
    rrep.target_seq_known = true;
    rrep.hop_count = r->hop_count;
    rrep.ttl = config_.net_diameter;
    rrep.informant = r->learned_from;
    rrep.created_at = host_.now();
    ++counters_.rrep_generated;
    host_.send(node, rrep, reverse_hop(node, pkt.origin, from), SendRole::Originate);
    return;
  }

  if (pkt.ttl == 0) return;
  ++counters_.rreq_forwarded;
  host_.send(node, pkt, kNoNode, SendRole::Relay);
}

void Aodv::handle_rrep(NodeId node, Packet pkt, NodeId from) {
  if (host_.blacklisted(node, from)) return;
  if (pkt.informant != kNoNode && host_.blacklisted(node, pkt.informant)) return;
  touch_neighbor(node, from);

  offer_route(node, pkt.target, from, pkt.target_seq, pkt.target_seq_known, pkt.hop_count,
              pkt.informant);

  if (node == pkt.origin) {
    if (discovering(node, pkt.target) && usable_route(node, pkt.target))
      finish_discovery(node, pkt.target);
    return;
  }
  if (pkt.ttl == 0) return;
  if (const RouteEntry* r = usable_route(node, pkt.origin)) {
    const NodeId next = r->next_hop;
    refresh(node, pkt.origin);
    host_.send(node, pkt, next, SendRole::Relay);
  } else {
    host_.drop(node, pkt, DropCause::RrepLost);
  }
}

void Aodv::handle_rerr(NodeId node, const Packet& pkt, NodeId from) {
  if (host_.blacklisted(node, from)) return;
  std::vector<Unreachable> lost;
  for (const auto& u : pkt.unreachable) {
    RouteEntry* e = find(node, u.dest);
    if (!e || e->next_hop != from || e->state != RouteState::Valid) continue;
    RouteEntry updated = *e;
    updated.state = RouteState::Invalid;
    if (!updated.seq_known || u.seq > updated.dest_seq) {
      updated.dest_seq = u.seq;
      updated.seq_known = true;
    }
    commit(node, *e, updated);
    lost.push_back(Unreachable{u.dest, e->dest_seq});
  }
  if (lost.empty()) return;
  Packet rerr;
  rerr.kind = PacketKind::Rerr;
  rerr.id = host_.next_packet_id();
  rerr.origin = node;
  rerr.ttl = 1;
  rerr.blamed = pkt.blamed;
  rerr.created_at = host_.now();
  rerr.unreachable = std::move(lost);
  ++counters_.rerr_sent;
  host_.send(node, rerr, kNoNode, SendRole::Originate);
}

void Aodv::handle_link_failure(NodeId at, const Packet& pkt, NodeId next_hop) {
  host_.drop(at, pkt, DropCause::OutOfRange);
  if (pkt.kind == PacketKind::Data)
    handle_link_break(at, next_hop, pkt.target, pkt.origin);
  else
    handle_link_break(at, next_hop);
}

void Aodv::handle_link_break(NodeId node, NodeId broken_next_hop, NodeId dest_hint,
                             NodeId origin_hint) {
  std::vector<NodeId> affected;
  for (auto& [dest, e] : nodes_.at(node).routes)
    if (e.next_hop == broken_next_hop && e.state == RouteState::Valid) affected.push_back(dest);

  for (NodeId dest : affected) {
    if (dest == dest_hint) continue;
    invalidate(node, *find(node, dest), RouteState::Invalid);
  }
  if (dest_hint == kNoNode || dest_hint == node) return;
  if (discovering(node, dest_hint)) return;
  const bool hint_affected =
      std::find(affected.begin(), affected.end(), dest_hint) != affected.end();
  if (!hint_affected && usable_route(node, dest_hint)) return;
  if (node == origin_hint)
    originate_route_request(node, dest_hint);
  else
    local_repair(node, dest_hint);
}

void Aodv::purge_routes_via(NodeId node, NodeId suspect) {
  auto& routes = nodes_.at(node).routes;
  for (auto it = routes.begin(); it != routes.end();) {
    const RouteEntry& e = it->second;
    if (e.next_hop == suspect || e.learned_from == suspect || e.dest == suspect) {
      const RouteEntry before = e;
      it = routes.erase(it);
      if (observer_) observer_(node, before.dest, &before, nullptr);
    } else {
      ++it;
    }
  }
}

}  // namespace manet
