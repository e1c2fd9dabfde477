#pragma once

#include <set>
#include <vector>

#include "manet/aodv.hpp"
#include "manet/packet.hpp"

namespace manet {

inline constexpr SeqNum kDefaultForgedSeq = 23451234;

struct AttackerProfile {
  NodeId node = kNoNode;
  SeqNum forged_seq = kDefaultForgedSeq;
  std::uint32_t forged_hops = 1;
  SimTime active_from = 0.0;

  friend bool operator==(const AttackerProfile&, const AttackerProfile&) = default;
};

/// Black-hole adversaries: answer every route request with the freshest,
/// shortest possible route and swallow every data packet they are handed.
class Blackhole {
 public:
  Blackhole() = default;
  explicit Blackhole(std::vector<AttackerProfile> profiles);

  /// Profile of `node` if it is an attacker that is active at `now`.
  const AttackerProfile* active(NodeId node, SimTime now) const;
  bool is_attacker(NodeId node) const;
  std::set<NodeId> nodes() const;
  const std::vector<AttackerProfile>& profiles() const { return profiles_; }

  /// Answers rreq with a forged reply sent back to `from`; the request is
  /// not propagated any further.
  static void handle_rreq(const AttackerProfile& attacker, const Packet& rreq, NodeId from,
                          AodvHost& host);
  /// Destroys a data packet handed to the attacker.
  static void handle_data(const AttackerProfile& attacker, const Packet& data, AodvHost& host);

 private:
  std::vector<AttackerProfile> profiles_;
};

}  // namespace manet
