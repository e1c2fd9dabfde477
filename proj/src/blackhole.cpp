#include "manet/blackhole.hpp"

#include <algorithm>

#include "manet/errors.hpp"

namespace manet {

Blackhole::Blackhole(std::vector<AttackerProfile> profiles) : profiles_(std::move(profiles)) {
  for (const auto& p : profiles_) {
    if (p.node == kNoNode) throw ConfigError("attacker profile without a node");
    if (p.active_from < 0.0) throw ConfigError("attacker active_from must be non-negative");
  }
}

const AttackerProfile* Blackhole::active(NodeId node, SimTime now) const {
  for (const auto& p : profiles_)
    if (p.node == node && now >= p.active_from) return &p;
  return nullptr;
}

bool Blackhole::is_attacker(NodeId node) const {
  return std::any_of(profiles_.begin(), profiles_.end(),
                     [node](const AttackerProfile& p) { return p.node == node; });
}

std::set<NodeId> Blackhole::nodes() const {
  std::set<NodeId> out;
  for (const auto& p : profiles_) out.insert(p.node);
  return out;
}

void Blackhole::handle_rreq(const AttackerProfile& attacker, const Packet& rreq, NodeId from,
                            AodvHost& host) {
  Packet reply;
  reply.kind = PacketKind::Rrep;
  reply.id = host.next_packet_id();
  reply.origin = rreq.origin;
  reply.target = rreq.target;
  reply.target_seq = attacker.forged_seq;
  reply.target_seq_known = true;
  reply.hop_count = attacker.forged_hops;
  reply.ttl = rreq.hop_count + 1;
  reply.informant = attacker.node;
  reply.created_at = host.now();
  host.send(attacker.node, reply, from, SendRole::Originate);
}

void Blackhole::handle_data(const AttackerProfile& attacker, const Packet& data, AodvHost& host) {
  host.drop(attacker.node, data, DropCause::BlackHole);
}

}  // namespace manet
