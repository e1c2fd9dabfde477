#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "manet/engine.hpp"
#include "manet/packet.hpp"

namespace manet {

class Blackhole;

struct AodvConfig {
  std::uint32_t net_diameter = 35;
  std::uint32_t ttl_start = 3;
  std::uint32_t rreq_retries = 2;
  std::uint32_t repair_ttl = 3;
  double node_traversal_s = 0.02;
  double route_lifetime_s = 10.0;
  double repair_timeout_s = 0.5;
  double rreq_cache_s = 5.0;
  std::size_t pending_capacity = 64;

  /// Wait for a reply to a request sent with the given ttl.
  double ring_traversal(std::uint32_t ttl) const { return 2.0 * node_traversal_s * (ttl + 2); }
  void validate() const;
};

enum class RouteState { Valid, UnderRepair, Invalid };

struct RouteEntry {
  NodeId dest = kNoNode;
  NodeId next_hop = kNoNode;
  SeqNum dest_seq = 0;
  bool seq_known = false;
  std::uint32_t hop_count = 0;
  SimTime expires_at = 0.0;
  RouteState state = RouteState::Invalid;
  // Node whose advertisement produced dest_seq; used to purge forged state.
  NodeId learned_from = kNoNode;
};

/// Route update rule: a candidate replaces the current entry when its
/// sequence number is newer, or equal with strictly fewer hops. An entry that
/// is no longer Valid also accepts an equal sequence number.
bool should_replace(const RouteEntry* current, SeqNum seq, std::uint32_t hops);

enum class SendRole { Originate, Relay };

/// Services the router needs from the surrounding simulation.
class AodvHost {
 public:
  virtual ~AodvHost() = default;
  virtual SimTime now() const = 0;
  virtual void schedule_at(SimTime at, std::function<void()> fn) = 0;
  virtual PacketId next_packet_id() = 0;
  /// next_hop == kNoNode broadcasts.
  virtual void send(NodeId from, const Packet& pkt, NodeId next_hop, SendRole role) = 0;
  virtual void deliver(NodeId at, const Packet& pkt) = 0;
  virtual void drop(NodeId at, const Packet& pkt, DropCause cause) = 0;
  virtual void note_repair(NodeId at, NodeId dest) = 0;
  virtual bool blacklisted(NodeId at, NodeId other) const = 0;
};

/// Per-node AODV state machines for the whole network.
class Aodv {
 public:
  struct Counters {
    std::uint64_t rreq_originated = 0;
    std::uint64_t rreq_forwarded = 0;
    std::uint64_t rrep_generated = 0;
    std::uint64_t rerr_sent = 0;
    std::uint64_t local_repairs = 0;
    std::uint64_t repair_success = 0;
    std::uint64_t repair_failure = 0;
    std::uint64_t discovery_failures = 0;
  };

  /// Called on every change of a routing entry; `after` is empty when the
  /// entry was erased.
  using RouteObserver = std::function<void(NodeId node, NodeId dest, const RouteEntry* before,
                                           const RouteEntry* after)>;

  Aodv(std::size_t node_count, AodvConfig config, AodvHost& host);

  void set_adversary(const Blackhole* adversary) { adversary_ = adversary; }
  void set_route_observer(RouteObserver observer) { observer_ = std::move(observer); }

  /// A new data packet from the application at its origin.
  void originate_data(NodeId src, Packet data);
  /// Dispatches a received Data/Rreq/Rrep/Rerr. hop_count and ttl are
  /// already adjusted for the hop just taken.
  void receive(NodeId at, NodeId from, const Packet& pkt);
  /// The radio could not reach next_hop while sending pkt.
  void handle_link_failure(NodeId at, const Packet& pkt, NodeId next_hop);

  void originate_route_request(NodeId src, NodeId dest);
  void handle_rreq(NodeId node, Packet pkt, NodeId from);
  void handle_rrep(NodeId node, Packet pkt, NodeId from);
  void handle_rerr(NodeId node, const Packet& pkt, NodeId from);
  void forward_data(NodeId node, Packet pkt);
  /// Routes through broken_next_hop stop being used. The route to dest_hint
  /// is repaired (or rediscovered when this node is origin_hint).
  void handle_link_break(NodeId node, NodeId broken_next_hop, NodeId dest_hint = kNoNode,
                         NodeId origin_hint = kNoNode);
  /// Starts a scoped route request for dest. Returns false when a discovery
  /// for dest is already running at node. The outcome is reported through
  /// counters and the route state once repair_timeout_s elapses.
  bool local_repair(NodeId node, NodeId dest);
  /// Forgets every entry whose next hop or advertised freshness came from suspect.
  void purge_routes_via(NodeId node, NodeId suspect);

  const RouteEntry* route(NodeId node, NodeId dest) const;
  /// Valid, unexpired route with a next hop the node has not blacklisted.
  const RouteEntry* usable_route(NodeId node, NodeId dest);
  std::vector<RouteEntry> routes(NodeId node) const;
  SeqNum own_seq(NodeId node) const { return nodes_.at(node).own_seq; }
  bool discovering(NodeId node, NodeId dest) const;
  std::size_t pending_count(NodeId node) const { return nodes_.at(node).pending.size(); }
  /// Ids of data packets buffered while waiting for a route.
  std::vector<PacketId> pending_data() const;

  const Counters& counters() const { return counters_; }
  const AodvConfig& config() const { return config_; }

 private:
  struct Discovery {
    std::uint32_t attempt = 0;
    bool repair = false;
    std::uint64_t token = 0;
  };

  struct NodeState {
    SeqNum own_seq = 0;
    std::uint32_t next_flood_id = 0;
    std::map<NodeId, RouteEntry> routes;
    std::map<std::pair<NodeId, std::uint32_t>, SimTime> seen;
    std::deque<Packet> pending;
    std::map<NodeId, Discovery> discoveries;
  };

  RouteEntry* find(NodeId node, NodeId dest);
  void commit(NodeId node, RouteEntry& slot, const RouteEntry& updated);
  bool offer_route(NodeId node, NodeId dest, NodeId next_hop, SeqNum seq, bool seq_known,
                   std::uint32_t hops, NodeId learned_from);
  void touch_neighbor(NodeId node, NodeId neighbor);
  void refresh(NodeId node, NodeId dest);
  void invalidate(NodeId node, RouteEntry& entry, RouteState state);
  bool seen_flood(NodeId node, NodeId origin, std::uint32_t flood_id);
  void send_rreq(NodeId node, NodeId dest, std::uint32_t ttl, std::uint64_t token);
  void on_discovery_timeout(NodeId node, NodeId dest, std::uint64_t token);
  void finish_discovery(NodeId node, NodeId dest);
  void buffer(NodeId node, Packet pkt);
  void flush_pending(NodeId node, NodeId dest);
  void drop_pending(NodeId node, NodeId dest);
  void reply_as_destination(NodeId node, const Packet& rreq, NodeId from);
  NodeId reverse_hop(NodeId node, NodeId origin, NodeId fallback);

  AodvConfig config_;
  AodvHost& host_;
  const Blackhole* adversary_ = nullptr;
  RouteObserver observer_;
  std::vector<NodeState> nodes_;
  std::uint64_t next_token_ = 1;
  Counters counters_;
};

}  // namespace manet
