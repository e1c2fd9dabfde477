#include "manet/sentinel.hpp"

#include <string>

#include "manet/errors.hpp"

namespace manet {

std::string_view to_string(DetectionMode mode) {
  switch (mode) {
    case DetectionMode::None: return "none";
    case DetectionMode::Watchdog: return "watchdog";
    case DetectionMode::IWatchdog: return "iwatchdog";
  }
  return "?";
}

DetectionMode parse_detection_mode(std::string_view name) {
  if (name == "none") return DetectionMode::None;
  if (name == "watchdog") return DetectionMode::Watchdog;
  if (name == "iwatchdog") return DetectionMode::IWatchdog;
  throw ConfigError("unknown detection mode '" + std::string(name) + "'");
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Benign: return "Benign";
    case Verdict::CongestionRepair: return "CongestionRepair";
    case Verdict::Malicious: return "Malicious";
  }
  return "?";
}

void DetectorConfig::validate() const {
  if (!(tau > 0.0)) throw ConfigError("detection.tau must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("detection.rho must lie in (0,1)");
  if (!(theta >= 0.0 && theta <= 100.0)) throw ConfigError("detection.theta must lie in [0,100]");
  if (window == 0) throw ConfigError("detection.window must be positive");
  if (min_obs > window) throw ConfigError("detection.min_obs must not exceed detection.window");
}

GapTest gap_test(SeqNum seq_suspect, SeqNum seq_current, double rho) {
  GapTest g;
  g.d = seq_suspect > seq_current ? seq_suspect - seq_current : 0;
  if (seq_suspect == 0) return g;
  g.ratio = static_cast<double>(g.d) / static_cast<double>(seq_suspect);
  g.pass = g.ratio >= rho;
  return g;
}

Verdict classify_suspect(SeqNum seq_suspect, SeqNum seq_current, double loss_pct,
                         const DetectorConfig& cfg) {
  if (!gap_test(seq_suspect, seq_current, cfg.rho).pass) return Verdict::CongestionRepair;
  return loss_pct > cfg.theta ? Verdict::Malicious : Verdict::CongestionRepair;
}

double SuspectLedger::loss_pct() const {
  if (window.empty()) return 0.0;
  std::size_t lost = 0;
  for (bool ok : window) lost += ok ? 0 : 1;
  return 100.0 * static_cast<double>(lost) / static_cast<double>(window.size());
}

Sentinel::Sentinel(std::size_t node_count, DetectorConfig config, std::uint32_t alert_ttl,
                   SentinelHost& host)
    : config_(config), alert_ttl_(alert_ttl), host_(host), nodes_(node_count) {
  config_.validate();
}

void Sentinel::push_outcome(SuspectLedger& ledger, bool forwarded) {
  ledger.window.push_back(forwarded);
  while (ledger.window.size() > config_.window) ledger.window.pop_front();
}

void Sentinel::record_entrust(NodeId watcher, NodeId suspect, const Packet& pkt, SimTime now) {
  if (config_.mode == DetectionMode::None) return;
  auto& records = nodes_.at(watcher).records;
  if (auto it = records.find(pkt.id); it != records.end() && it->second.resolved == Resolution::Pending)
    return;
  EntrustRecord rec;
  rec.pkt_id = pkt.id;
  rec.suspect = suspect;
  rec.dest = pkt.target;
  rec.stored_at = now;
  rec.deadline = now + config_.tau;
  records[pkt.id] = rec;
  ++counters_.entrusted;
  const PacketId id = pkt.id;
  const SimTime deadline = rec.deadline;
  host_.schedule_at(deadline, [this, watcher, id, deadline] {
    // A packet that revisits the watcher gets a fresh record; its earlier
    // timer must not judge the new one.
    const EntrustRecord* current = record(watcher, id);
    if (current && current->deadline == deadline) on_timeout(watcher, id, host_.now());
  });
}

bool Sentinel::observe_overhear(NodeId watcher, NodeId heard_from, const Packet& pkt,
                                SimTime now) {
  WatcherState& w = nodes_.at(watcher);
  switch (pkt.kind) {
    case PacketKind::Rrep:
      if (pkt.informant == heard_from && pkt.target_seq_known)
        w.ledgers[heard_from].last_heard_seq = pkt.target_seq;
      return false;
    case PacketKind::Rreq:
      if (pkt.origin == heard_from) w.ledgers[heard_from].last_heard_seq = pkt.origin_seq;
      return false;
    case PacketKind::Data: break;
    default: return false;
  }
  auto it = w.records.find(pkt.id);
  if (it == w.records.end()) return false;
  EntrustRecord& rec = it->second;
  if (rec.resolved != Resolution::Pending || rec.suspect != heard_from || now > rec.deadline)
    return false;
  rec.resolved = Resolution::Forwarded;
  push_outcome(w.ledgers[heard_from], true);
  ++counters_.forwarded;
  return true;
}

Verdict Sentinel::on_timeout(NodeId watcher, PacketId pkt_id, SimTime now) {
  WatcherState& w = nodes_.at(watcher);
  auto it = w.records.find(pkt_id);
  if (it == w.records.end() || it->second.resolved != Resolution::Pending) return Verdict::Benign;
  EntrustRecord& rec = it->second;
  if (now < rec.deadline) throw InvariantViolation("entrust timeout fired before its deadline");
  rec.resolved = Resolution::TimedOut;
  ++counters_.timed_out;
  SuspectLedger& ledger = w.ledgers[rec.suspect];
  push_outcome(ledger, false);

  VerdictInfo info;
  info.watcher = watcher;
  info.suspect = rec.suspect;
  info.pkt_id = pkt_id;
  info.suspect_seq = ledger.last_heard_seq;
  info.own_seq = host_.own_seq(watcher);
  info.loss_pct = ledger.loss_pct();
  info.observations = ledger.window.size();
  if (info.suspect_seq) info.d = gap_test(*info.suspect_seq, info.own_seq, config_.rho).d;

  switch (config_.mode) {
    case DetectionMode::None:
      throw InvariantViolation("entrust timeout with detection disabled");
    case DetectionMode::Watchdog:
      info.outcome = Verdict::Malicious;
      break;
    case DetectionMode::IWatchdog:
      if (info.observations < config_.min_obs || !info.suspect_seq)
        info.outcome = Verdict::CongestionRepair;
      else
        info.outcome = classify_suspect(*info.suspect_seq, info.own_seq, info.loss_pct, config_);
      break;
  }
  host_.note_verdict(info);
  act_on_verdict(watcher, rec.suspect, rec.dest, info.outcome, info.suspect_seq);
  return info.outcome;
}

void Sentinel::blacklist_node(NodeId node, NodeId suspect) {
  nodes_.at(node).blacklist.insert(suspect);
  host_.purge_routes_via(node, suspect);
}

void Sentinel::act_on_verdict(NodeId watcher, NodeId suspect, NodeId dest, Verdict verdict,
                              std::optional<SeqNum> evidence) {
  switch (verdict) {
    case Verdict::Benign:
      return;
    case Verdict::CongestionRepair:
      ++counters_.congestion_repair;
      host_.repair_route(watcher, suspect, dest);
      return;
    case Verdict::Malicious: {
      ++counters_.malicious;
      WatcherState& w = nodes_.at(watcher);
      if (w.blacklist.count(suspect)) return;
      blacklist_node(watcher, suspect);
      Packet alert;
      alert.kind = PacketKind::Alert;
      alert.id = host_.next_packet_id();
      alert.origin = watcher;
      alert.blamed = suspect;
      alert.flood_id = ++w.next_alert_id;
      alert.ttl = alert_ttl_;
      if (evidence) {
        alert.target_seq = *evidence;
        alert.target_seq_known = true;
      }
      alert.created_at = host_.now();
      w.alerts_seen.insert({watcher, alert.flood_id});
      ++counters_.alerts_originated;
      host_.flood(watcher, alert, true);
      return;
    }
  }
}

void Sentinel::handle_alert(NodeId node, const Packet& pkt, NodeId /*from*/) {
  if (pkt.kind != PacketKind::Alert) throw InvariantViolation("handle_alert on a non-alert packet");
  WatcherState& w = nodes_.at(node);
  if (!w.alerts_seen.insert({pkt.origin, pkt.flood_id}).second) return;
  if (pkt.blamed != node && !w.blacklist.count(pkt.blamed)) blacklist_node(node, pkt.blamed);
  if (pkt.ttl > 0) host_.flood(node, pkt, false);
}

bool Sentinel::is_blacklisted(NodeId node, NodeId other) const {
  return nodes_.at(node).blacklist.count(other) != 0;
}

const SuspectLedger* Sentinel::ledger(NodeId watcher, NodeId suspect) const {
  const auto& ledgers = nodes_.at(watcher).ledgers;
  auto it = ledgers.find(suspect);
  return it == ledgers.end() ? nullptr : &it->second;
}

const EntrustRecord* Sentinel::record(NodeId watcher, PacketId pkt_id) const {
  const auto& records = nodes_.at(watcher).records;
  auto it = records.find(pkt_id);
  return it == records.end() ? nullptr : &it->second;
}

}  // namespace manet
