#include "manet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "manet/errors.hpp"

namespace manet {

std::string_view to_string(TraceEvent event) {
  switch (event) {
    case TraceEvent::Send: return "Send";
    case TraceEvent::Recv: return "Recv";
    case TraceEvent::Drop: return "Drop";
    case TraceEvent::Forward: return "Forward";
    case TraceEvent::Overhear: return "Overhear";
    case TraceEvent::Verdict: return "Verdict";
    case TraceEvent::Alert: return "Alert";
    case TraceEvent::Repair: return "Repair";
  }
  return "?";
}

void Trace::record(const TraceRecord& rec) {
  if (!records_.empty() && rec.time < records_.back().time) {
    std::ostringstream msg;
    msg << "trace record at t=" << rec.time << " precedes previous record at t="
        << records_.back().time;
    throw InvariantViolation(msg.str());
  }
  records_.push_back(rec);
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

void put_node(std::ostream& out, NodeId n) {
  if (n == kNoNode)
    out << '-';
  else
    out << n;
}

}  // namespace

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
  out << kTraceHeader << '\n';
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.9f", r.time);
    out << buf << ' ' << to_string(r.event) << ' ';
    put_node(out, r.node);
    out << ' ' << r.pkt_id << ' ' << to_string(r.kind) << ' ';
    put_node(out, r.origin);
    out << ' ';
    put_node(out, r.target);
    out << ' ' << r.size_bytes << ' ';
    if (r.cause)
      out << to_string(*r.cause);
    else
      out << '-';
    out << ' ';
    put_node(out, r.suspect);
    out << ' ';
    if (r.suspect_seq)
      out << *r.suspect_seq;
    else
      out << '-';
    out << ' ';
    if (r.d)
      out << *r.d;
    else
      out << '-';
    out << ' ';
    if (r.loss_pct) {
      std::snprintf(buf, sizeof buf, "%.6f", *r.loss_pct);
      out << buf;
    } else {
      out << '-';
    }
    out << ' ';
    if (r.outcome)
      out << to_string(*r.outcome);
    else
      out << '-';
    out << '\n';
  }
}

std::uint64_t RunSummary::data_dropped() const {
  std::uint64_t total = 0;
  for (const auto& [cause, n] : data_dropped_by_cause) total += n;
  return total;
}

RunSummary finalize(const std::vector<TraceRecord>& records, SimTime duration,
                    const std::map<NodeId, SimTime>& attackers,
                    const std::vector<PacketId>& in_flight) {
  if (!(duration > 0.0)) throw InvariantViolation("finalize needs a positive duration");
  RunSummary s;
  s.duration = duration;

  struct Fate {
    SimTime sent_at = 0.0;
    int sends = 0;
    int outcomes = 0;
    bool delivered = false;
  };
  std::map<PacketId, Fate> fates;
  std::set<NodeId> blamed;
  double delay_sum = 0.0;
  double bits = 0.0;

  for (const auto& r : records) {
    switch (r.event) {
      case TraceEvent::Send:
        if (r.kind == PacketKind::Data) {
          Fate& f = fates[r.pkt_id];
          f.sent_at = r.time;
          ++f.sends;
          ++s.data_sent;
        }
        break;
      case TraceEvent::Recv:
        if (r.kind == PacketKind::Data) {
          Fate& f = fates[r.pkt_id];
          ++f.outcomes;
          f.delivered = true;
          ++s.data_delivered;
          delay_sum += r.time - f.sent_at;
          bits += 8.0 * r.size_bytes;
        }
        break;
      case TraceEvent::Drop:
        if (r.kind == PacketKind::Data) {
          if (!r.cause) throw InvariantViolation("drop record without a cause");
          ++fates[r.pkt_id].outcomes;
          ++s.data_dropped_by_cause[*r.cause];
        }
        break;
      case TraceEvent::Verdict:
        if (!r.outcome) throw InvariantViolation("verdict record without an outcome");
        if (*r.outcome == Verdict::Malicious) {
          ++s.verdicts_malicious;
          blamed.insert(r.suspect);
          auto it = attackers.find(r.suspect);
          if (it != attackers.end() && !s.time_to_detection_s)
            s.time_to_detection_s = std::max(0.0, r.time - it->second);
        } else if (*r.outcome == Verdict::CongestionRepair) {
          ++s.verdicts_congestion;
        }
        break;
      case TraceEvent::Alert:
        ++s.alerts;
        if (!s.first_alert_s) s.first_alert_s = r.time;
        break;
      case TraceEvent::Repair:
        ++s.local_repairs;
        break;
      case TraceEvent::Forward:
      case TraceEvent::Overhear:
        break;
    }
  }

  for (PacketId id : in_flight) {
    ++fates[id].outcomes;
    ++s.in_flight_at_end;
  }

  std::vector<PacketId> bad;
  for (const auto& [id, f] : fates)
    if (f.sends != 1 || f.outcomes != 1) bad.push_back(id);
  if (!bad.empty() ||
      s.data_sent != s.data_delivered + s.data_dropped() + s.in_flight_at_end) {
    std::ostringstream msg;
    msg << "conservation violated: sent=" << s.data_sent << " delivered=" << s.data_delivered
        << " dropped=" << s.data_dropped() << " in_flight=" << s.in_flight_at_end
        << "; unaccounted pkt_ids:";
    for (std::size_t i = 0; i < bad.size() && i < 50; ++i) msg << ' ' << bad[i];
    if (bad.size() > 50) msg << " ... (" << bad.size() << " total)";
    throw InvariantViolation(msg.str());
  }

  s.throughput_bps = bits / duration;
  s.pdr = s.data_sent ? static_cast<double>(s.data_delivered) / s.data_sent : 0.0;
  s.mean_e2e_delay_s = s.data_delivered ? delay_sum / s.data_delivered : 0.0;

  for (NodeId n : blamed) (attackers.count(n) ? s.true_positives : s.false_positives)++;
  for (const auto& [n, from] : attackers)
    if (!blamed.count(n)) ++s.false_negatives;

  if (s.first_alert_s) {
    const std::set<PacketId> open(in_flight.begin(), in_flight.end());
    std::uint64_t sent = 0, delivered = 0;
    for (const auto& [id, f] : fates) {
      if (f.sent_at < *s.first_alert_s || open.count(id)) continue;
      ++sent;
      if (f.delivered) ++delivered;
    }
    s.post_detection_pdr = sent ? static_cast<double>(delivered) / sent : 0.0;
  }
  return s;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : "-"; }

constexpr DropCause kAllCauses[] = {DropCause::QueueOverflow, DropCause::OutOfRange,
                                    DropCause::TtlExpired,    DropCause::NoRoute,
                                    DropCause::BlackHole,     DropCause::MacLoss,
                                    DropCause::RrepLost};

std::uint64_t drops_of(const RunSummary& s, DropCause c) {
  auto it = s.data_dropped_by_cause.find(c);
  return it == s.data_dropped_by_cause.end() ? 0 : it->second;
}

}  // namespace

void write_summary(std::ostream& out, const RunSummary& s) {
  out << "duration_s=" << format_number(s.duration) << '\n'
      << "data_sent=" << s.data_sent << '\n'
      << "data_delivered=" << s.data_delivered << '\n'
      << "data_dropped=" << s.data_dropped() << '\n';
  for (DropCause c : kAllCauses) out << "dropped." << to_string(c) << '=' << drops_of(s, c) << '\n';
  out << "in_flight_at_end=" << s.in_flight_at_end << '\n'
      << "throughput_bps=" << format_number(s.throughput_bps) << '\n'
      << "pdr=" << format_number(s.pdr) << '\n'
      << "mean_e2e_delay_s=" << format_number(s.mean_e2e_delay_s) << '\n'
      << "true_positives=" << s.true_positives << '\n'
      << "false_positives=" << s.false_positives << '\n'
      << "false_negatives=" << s.false_negatives << '\n'
      << "time_to_detection_s=" << opt(s.time_to_detection_s) << '\n'
      << "first_alert_s=" << opt(s.first_alert_s) << '\n'
      << "post_detection_pdr=" << opt(s.post_detection_pdr) << '\n'
      << "verdicts_malicious=" << s.verdicts_malicious << '\n'
      << "verdicts_congestion=" << s.verdicts_congestion << '\n'
      << "local_repairs=" << s.local_repairs << '\n'
      << "alerts=" << s.alerts << '\n';
}

std::string summary_csv_header() {
  return "throughput_bps,pdr,mean_delay_s,data_sent,data_delivered,data_dropped,"
         "TP,FP,FN,time_to_detection_s,post_detection_pdr,verdicts_malicious,local_repairs";
}

std::string summary_csv_row(const RunSummary& s) {
  std::ostringstream row;
  auto blank = [](const std::optional<double>& v) { return v ? format_number(*v) : ""; };
  row << format_number(s.throughput_bps) << ',' << format_number(s.pdr) << ','
      << format_number(s.mean_e2e_delay_s) << ',' << s.data_sent << ',' << s.data_delivered
      << ',' << s.data_dropped() << ',' << s.true_positives << ',' << s.false_positives << ','
      << s.false_negatives << ',' << blank(s.time_to_detection_s) << ','
      << blank(s.post_detection_pdr) << ',' << s.verdicts_malicious << ',' << s.local_repairs;
  return row.str();
}

void write_time_series(std::ostream& out, const std::vector<TraceRecord>& records,
                       SimTime duration) {
  const auto bins = static_cast<std::size_t>(std::ceil(duration));
  std::vector<double> bits(bins, 0.0), delay(bins, 0.0);
  std::vector<std::uint64_t> sent(bins, 0), got(bins, 0);
  std::map<PacketId, SimTime> sent_at;
  auto bin_of = [bins](SimTime t) {
    return std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, std::floor(t))));
  };
  for (const auto& r : records) {
    if (r.kind != PacketKind::Data || bins == 0) continue;
    if (r.event == TraceEvent::Send) {
      sent_at[r.pkt_id] = r.time;
      ++sent[bin_of(r.time)];
    } else if (r.event == TraceEvent::Recv) {
      const std::size_t b = bin_of(r.time);
      bits[b] += 8.0 * r.size_bytes;
      delay[b] += r.time - sent_at[r.pkt_id];
      ++got[b];
    }
  }
  out << "time_s,throughput_bps,cum_pdr,mean_delay_s\n";
  std::uint64_t cum_sent = 0, cum_got = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    cum_sent += sent[b];
    cum_got += got[b];
    const double width = std::min(1.0, duration - static_cast<double>(b));
    out << format_number(static_cast<double>(b) + width) << ','
        << format_number(bits[b] / width) << ','
        << format_number(cum_sent ? static_cast<double>(cum_got) / cum_sent : 0.0) << ',';
    if (got[b]) out << format_number(delay[b] / got[b]);
    out << '\n';
  }
}

}  // namespace manet
