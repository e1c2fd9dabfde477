#include "manet/packet.hpp"

namespace manet {

std::string_view to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::Data: return "Data";
    case PacketKind::Rreq: return "Rreq";
    case PacketKind::Rrep: return "Rrep";
    case PacketKind::Rerr: return "Rerr";
    case PacketKind::Alert: return "Alert";
  }
  return "?";
}

std::string_view to_string(DropCause cause) {
  switch (cause) {
    case DropCause::QueueOverflow: return "QueueOverflow";
    case DropCause::OutOfRange: return "OutOfRange";
    case DropCause::TtlExpired: return "TtlExpired";
    case DropCause::NoRoute: return "NoRoute";
    case DropCause::BlackHole: return "BlackHole";
    case DropCause::MacLoss: return "MacLoss";
    case DropCause::RrepLost: return "RrepLost";
  }
  return "?";
}

std::uint32_t Packet::size_bytes() const {
  switch (kind) {
    case PacketKind::Data: return payload_bytes;
    case PacketKind::Rreq: return 24;
    case PacketKind::Rrep: return 20;
    case PacketKind::Rerr: return 4 + 8 * static_cast<std::uint32_t>(unreachable.size());
    case PacketKind::Alert: return 16;
  }
  return 0;
}

}  // namespace manet
