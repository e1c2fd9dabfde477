#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "manet/engine.hpp"
#include "manet/packet.hpp"

namespace manet {

enum class DetectionMode { None, Watchdog, IWatchdog };

std::string_view to_string(DetectionMode mode);
/// Throws ConfigError for an unknown name.
DetectionMode parse_detection_mode(std::string_view name);

struct DetectorConfig {
  DetectionMode mode = DetectionMode::None;
  double tau = 0.1;     // forward deadline, seconds
  double rho = 0.9;     // sequence gap ratio threshold
  double theta = 20.0;  // loss percentage threshold
  std::size_t window = 20;
  std::size_t min_obs = 5;

  void validate() const;
  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

enum class Verdict { Benign, CongestionRepair, Malicious };

std::string_view to_string(Verdict verdict);

struct GapTest {
  SeqNum d = 0;
  double ratio = 0.0;
  bool pass = false;
};

/// d = suspect - current (clamped at 0); passes when d / suspect >= rho.
GapTest gap_test(SeqNum seq_suspect, SeqNum seq_current, double rho);

/// The improved detector's decision once a forward deadline is missed: a
/// suspect is malicious only if its advertised sequence number dwarfs the
/// watcher's own and its loss percentage is above threshold.
Verdict classify_suspect(SeqNum seq_suspect, SeqNum seq_current, double loss_pct,
                         const DetectorConfig& cfg);

enum class Resolution { Pending, Forwarded, TimedOut };

struct EntrustRecord {
  PacketId pkt_id = 0;
  NodeId suspect = kNoNode;
  NodeId dest = kNoNode;
  SimTime stored_at = 0.0;
  SimTime deadline = 0.0;
  Resolution resolved = Resolution::Pending;
};

struct SuspectLedger {
  std::deque<bool> window;  // true = forwarded in time
  std::optional<SeqNum> last_heard_seq;

  double loss_pct() const;
};

/// What a watcher decided after a missed deadline, with the evidence used.
struct VerdictInfo {
  NodeId watcher = kNoNode;
  NodeId suspect = kNoNode;
  PacketId pkt_id = 0;
  std::optional<SeqNum> suspect_seq;
  SeqNum own_seq = 0;
  SeqNum d = 0;
  double loss_pct = 0.0;
  std::size_t observations = 0;
  Verdict outcome = Verdict::Benign;
};

class SentinelHost {
 public:
  virtual ~SentinelHost() = default;
  virtual SimTime now() const = 0;
  virtual void schedule_at(SimTime at, std::function<void()> fn) = 0;
  virtual PacketId next_packet_id() = 0;
  virtual SeqNum own_seq(NodeId node) const = 0;
  virtual void flood(NodeId from, const Packet& alert, bool originated) = 0;
  virtual void repair_route(NodeId watcher, NodeId suspect, NodeId dest) = 0;
  virtual void purge_routes_via(NodeId node, NodeId suspect) = 0;
  virtual void note_verdict(const VerdictInfo& info) = 0;
};

/// Overhearing detectors (baseline and improved), alert flooding and
/// per-node blacklists. All evidence is local to each watcher.
class Sentinel {
 public:
  struct Counters {
    std::uint64_t entrusted = 0;
    std::uint64_t forwarded = 0;
    std::uint64_t timed_out = 0;
    std::uint64_t malicious = 0;
    std::uint64_t congestion_repair = 0;
    std::uint64_t alerts_originated = 0;
  };

  Sentinel(std::size_t node_count, DetectorConfig config, std::uint32_t alert_ttl,
           SentinelHost& host);

  /// `watcher` just handed data packet pkt to `suspect`.
  void record_entrust(NodeId watcher, NodeId suspect, const Packet& pkt, SimTime now);
  /// `watcher` heard `heard_from` transmit pkt. Returns true when this
  /// resolved a pending entrust record.
  bool observe_overhear(NodeId watcher, NodeId heard_from, const Packet& pkt, SimTime now);
  /// Deadline of an entrust record expired.
  Verdict on_timeout(NodeId watcher, PacketId pkt_id, SimTime now);
  void act_on_verdict(NodeId watcher, NodeId suspect, NodeId dest, Verdict verdict,
                      std::optional<SeqNum> evidence = std::nullopt);
  void handle_alert(NodeId node, const Packet& pkt, NodeId from);

  bool is_blacklisted(NodeId node, NodeId other) const;
  const std::set<NodeId>& blacklist(NodeId node) const { return nodes_.at(node).blacklist; }
  const SuspectLedger* ledger(NodeId watcher, NodeId suspect) const;
  const EntrustRecord* record(NodeId watcher, PacketId pkt_id) const;
  const DetectorConfig& config() const { return config_; }
  const Counters& counters() const { return counters_; }

 private:
  struct WatcherState {
    std::map<PacketId, EntrustRecord> records;
    std::map<NodeId, SuspectLedger> ledgers;
    std::set<NodeId> blacklist;
    std::set<std::pair<NodeId, std::uint32_t>> alerts_seen;
    std::uint32_t next_alert_id = 0;
  };

  void push_outcome(SuspectLedger& ledger, bool forwarded);
  void blacklist_node(NodeId node, NodeId suspect);

  DetectorConfig config_;
  std::uint32_t alert_ttl_;
  SentinelHost& host_;
  std::vector<WatcherState> nodes_;
  Counters counters_;
};

}  // namespace manet
