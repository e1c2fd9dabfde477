#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "manet/engine.hpp"
#include "manet/packet.hpp"
#include "manet/sentinel.hpp"

namespace manet {

/// Send: application hands a Data packet to its origin, or a node originates
/// a control packet. Forward: a relay transmits a packet it received.
/// Recv: Data reaches its final target. Overhear: a watcher saw its entrusted
/// packet forwarded. Repair: a node starts a scoped route repair.
enum class TraceEvent : std::uint8_t { Send, Recv, Drop, Forward, Overhear, Verdict, Alert, Repair };

std::string_view to_string(TraceEvent event);

struct TraceRecord {
  SimTime time = 0.0;
  TraceEvent event = TraceEvent::Send;
  NodeId node = kNoNode;
  PacketId pkt_id = 0;
  PacketKind kind = PacketKind::Data;
  NodeId origin = kNoNode;
  NodeId target = kNoNode;
  std::uint32_t size_bytes = 0;
  std::optional<DropCause> cause;
  // Verdict and Alert records.
  NodeId suspect = kNoNode;
  std::optional<SeqNum> suspect_seq;
  std::optional<SeqNum> d;
  std::optional<double> loss_pct;
  std::optional<Verdict> outcome;
};

/// Append-only, time-ordered event log of one run.
class Trace {
 public:
  /// Throws InvariantViolation when rec.time precedes the previous record.
  void record(const TraceRecord& rec);
  const std::vector<TraceRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<TraceRecord> records_;
};

inline constexpr std::string_view kTraceHeader =
    "# manetsim-trace v1 time event node pkt_id kind origin target size cause suspect "
    "suspect_seq d loss_pct outcome";

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records);

struct RunSummary {
  SimTime duration = 0.0;
  std::uint64_t data_sent = 0;
  std::uint64_t data_delivered = 0;
  std::uint64_t in_flight_at_end = 0;
  std::map<DropCause, std::uint64_t> data_dropped_by_cause;
  double throughput_bps = 0.0;
  double pdr = 0.0;
  double mean_e2e_delay_s = 0.0;
  // Detection quality against the ground-truth attacker set (per node).
  std::uint64_t true_positives = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t false_negatives = 0;
  std::optional<double> time_to_detection_s;
  std::optional<SimTime> first_alert_s;
  // Delivery ratio of Data originated at or after the first Alert, over the
  // packets whose fate is known at the end of the run.
  std::optional<double> post_detection_pdr;
  std::uint64_t verdicts_malicious = 0;
  std::uint64_t verdicts_congestion = 0;
  std::uint64_t local_repairs = 0;
  std::uint64_t alerts = 0;

  std::uint64_t data_dropped() const;
};

/// Computes the run summary from a complete trace. `attackers` maps every
/// ground-truth attacker to its activation time; `in_flight` lists the Data
/// packets still queued, on air or buffered at the end. Throws
/// InvariantViolation, naming the offending packet ids, when a sent packet is
/// not accounted for exactly once.
RunSummary finalize(const std::vector<TraceRecord>& records, SimTime duration,
                    const std::map<NodeId, SimTime>& attackers,
                    const std::vector<PacketId>& in_flight);

void write_summary(std::ostream& out, const RunSummary& summary);
std::string summary_csv_header();
std::string summary_csv_row(const RunSummary& summary);

/// Per-second bins: time_s (bin end), throughput_bps, cum_pdr, mean_delay_s
/// (empty when nothing was delivered in the bin).
void write_time_series(std::ostream& out, const std::vector<TraceRecord>& records,
                       SimTime duration);

/// "%.17g" formatting (round-trips doubles) shared by every writer.
std::string format_number(double value);

}  // namespace manet
