#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "manet/engine.hpp"

namespace manet {

using NodeId = std::uint32_t;
using SeqNum = std::uint64_t;
using PacketId = std::uint64_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class PacketKind : std::uint8_t { Data, Rreq, Rrep, Rerr, Alert };

std::string_view to_string(PacketKind kind);

enum class DropCause : std::uint8_t {
  QueueOverflow,
  OutOfRange,
  TtlExpired,
  NoRoute,
  BlackHole,
  MacLoss,
  RrepLost,
};

std::string_view to_string(DropCause cause);

/// Destination listed in a route error, with the sequence number it was
/// invalidated at.
struct Unreachable {
  NodeId dest;
  SeqNum seq;
};

/// One unit of transmission. Data keeps its id across hops; every control
/// packet generated by a node gets a fresh id.
struct Packet {
  PacketKind kind = PacketKind::Data;
  PacketId id = 0;
  NodeId origin = kNoNode;
  NodeId target = kNoNode;
  SeqNum origin_seq = 0;
  SeqNum target_seq = 0;
  bool target_seq_known = false;
  std::uint32_t hop_count = 0;
  std::uint32_t ttl = 0;
  std::uint32_t payload_bytes = 0;
  SimTime created_at = 0.0;
  // Rreq id or alert id, unique per origin.
  std::uint32_t flood_id = 0;
  // Rrep: the node whose freshness claim target_seq carries. The generator for
  // a destination reply, the cached entry's source for an intermediate reply.
  NodeId informant = kNoNode;
  // Alert: accused node. Rerr: the node whose link broke.
  NodeId blamed = kNoNode;
  std::vector<Unreachable> unreachable;

  bool is_control() const { return kind != PacketKind::Data; }
  /// Nominal on-air size used for trace records.
  std::uint32_t size_bytes() const;
};

}  // namespace manet
