#include "manet/scenario.hpp"

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "manet/errors.hpp"
#include "manet/simulation.hpp"

namespace manet {

std::string_view to_string(PlacementKind kind) {
  switch (kind) {
    case PlacementKind::Random: return "random";
    case PlacementKind::Line: return "line";
    case PlacementKind::Explicit: return "explicit";
  }
  return "?";
}

std::vector<FlowSpec> default_flows(double rate_pps, std::uint32_t payload_bytes, double start_s,
                                    double stop_s) {
  std::vector<FlowSpec> flows;
  for (NodeId s = 0; s < 8; s += 2) flows.push_back({s, s + 1, rate_pps, payload_bytes, start_s, stop_s});
  return flows;
}

namespace {

std::string fmt_node(NodeId n) { return std::to_string(n); }

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void Scenario::validate() const {
  require(std::isfinite(duration_s) && duration_s > 0.0, "simulation.duration must be positive");
  require(area.width > 0.0 && area.height > 0.0, "area dimensions must be positive");
  require(node_count >= 1, "nodes.count must be at least 1");
  require(node_count < kNoNode, "nodes.count is too large");
  switch (placement) {
    case PlacementKind::Random: break;
    case PlacementKind::Line:
      require(spacing > 0.0, "nodes.spacing must be positive");
      require(spacing * static_cast<double>(node_count - 1) <= area.width,
              "line placement does not fit inside the area width");
      break;
    case PlacementKind::Explicit:
      require(positions.size() == node_count, "nodes.positions must list exactly nodes.count points");
      for (const auto& p : positions)
        require(p.x >= 0.0 && p.y >= 0.0 && p.x <= area.width && p.y <= area.height,
                "nodes.positions contains a point outside the area");
      break;
  }
  require(radio.range > 0.0, "radio.range must be positive");
  require(radio.loss_prob >= 0.0 && radio.loss_prob <= 1.0, "radio.loss_prob must lie in [0,1]");
  require(queue.capacity >= 1, "queue.capacity must be positive");
  require(queue.service_rate > 0.0, "queue.service_rate must be positive");
  require(queue.hop_latency_s >= 0.0, "queue.hop_latency must be non-negative");
  require(mobility.speed_min >= 0.0 && mobility.speed_min <= mobility.speed_max,
          "mobility speeds must satisfy 0 <= speed_min <= speed_max");
  require(mobility.pause_s >= 0.0, "mobility.pause must be non-negative");
  aodv.validate();
  detection.validate();

  for (const auto& f : flows) {
    const std::string tag = "flow " + fmt_node(f.src) + "->" + fmt_node(f.dst);
    require(f.src < node_count && f.dst < node_count, tag + " names a node >= nodes.count");
    require(f.src != f.dst, tag + " has identical source and destination");
    require(f.rate_pps > 0.0 && std::isfinite(f.rate_pps), tag + " needs a positive rate");
    require(f.payload_bytes > 0, tag + " needs a positive payload");
    require(f.start_s >= 0.0 && f.stop_s >= f.start_s, tag + " needs 0 <= start <= stop");
  }
  for (const auto& a : attackers) {
    require(a.node < node_count, "attacker " + fmt_node(a.node) + " is not a node (nodes.count = " +
                                     std::to_string(node_count) + ")");
    require(a.active_from >= 0.0, "attack.active_from must be non-negative");
    require(a.forged_seq > 0, "attack.forged_seq must be positive");
    for (const auto& f : flows)
      require(f.src != a.node, "attacker " + fmt_node(a.node) + " cannot be a flow source");
  }
  if (attack_adjacent_to != kNoNode) {
    require(attack_adjacent_to < node_count, "attack.adjacent_to is not a node");
    require(!attackers.empty(), "attack.adjacent_to needs at least one attacker");
    require(attackers.front().node != attack_adjacent_to,
            "attack.adjacent_to must differ from the attacker");
  }
}

// ---------------------------------------------------------------- parsing

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view s, std::string_view seps) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && seps.find(s[i]) != std::string_view::npos) ++i;
    std::size_t j = i;
    while (j < s.size() && seps.find(s[j]) == std::string_view::npos) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

class Builder {
 public:
  struct Where {
    std::size_t line = 0;  // 0 for command-line overrides
    std::string key;
  };

  void set(const std::string& section, const std::string& key, std::string_view value,
           const Where& where, bool replace_lists);
  Scenario finish();

 private:
  [[noreturn]] void fail(const Where& where, const std::string& what) const;
  double real(std::string_view v, const Where& w) const;
  std::uint64_t integer(std::string_view v, const Where& w) const;
  NodeId node(std::string_view v, const Where& w) const;

  Scenario s_;
  double rate_ = 4.0;
  std::uint32_t payload_ = 512;
  double start_ = 1.0;
  double stop_ = std::numeric_limits<double>::infinity();
  std::vector<std::pair<Where, std::vector<std::string>>> flow_lines_;
  bool flows_none_ = false;

  SeqNum forged_seq_ = kDefaultForgedSeq;
  std::uint32_t forged_hops_ = 1;
  double active_from_ = 0.0;
  std::vector<NodeId> attack_nodes_;
  Where attack_nodes_where_;
  std::vector<std::pair<Where, std::vector<std::string>>> attacker_lines_;
};

void Builder::fail(const Where& where, const std::string& what) const {
  std::ostringstream msg;
  if (where.line)
    msg << "line " << where.line << ": key '" << where.key << "': " << what;
  else
    msg << "override '" << where.key << "': " << what;
  throw ConfigError(msg.str());
}

double Builder::real(std::string_view v, const Where& w) const {
  const std::string text(trim(v));
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || std::isnan(x) || errno == ERANGE)
    fail(w, "expected a number, got '" + text + "'");
  return x;
}

std::uint64_t Builder::integer(std::string_view v, const Where& w) const {
  const std::string_view text = trim(v);
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    fail(w, "expected a non-negative integer, got '" + std::string(text) + "'");
  return x;
}

NodeId Builder::node(std::string_view v, const Where& w) const {
  const std::uint64_t x = integer(v, w);
  if (x >= kNoNode) fail(w, "node id out of range");
  return static_cast<NodeId>(x);
}

void Builder::set(const std::string& section, const std::string& key, std::string_view value,
                  const Where& w, bool replace_lists) {
  const std::string full = section + "." + key;
  auto u32 = [&](std::string_view v) {
    const std::uint64_t x = integer(v, w);
    if (x > 0xffffffffULL) fail(w, "value too large");
    return static_cast<std::uint32_t>(x);
  };

  if (full == "simulation.duration") s_.duration_s = real(value, w);
  else if (full == "simulation.seed") s_.seed = integer(value, w);
  else if (full == "area.width") s_.area.width = real(value, w);
  else if (full == "area.height") s_.area.height = real(value, w);
  else if (full == "nodes.count") s_.node_count = integer(value, w);
  else if (full == "nodes.placement") {
    const std::string_view v = trim(value);
    if (v == "random") s_.placement = PlacementKind::Random;
    else if (v == "line") s_.placement = PlacementKind::Line;
    else if (v == "explicit") s_.placement = PlacementKind::Explicit;
    else fail(w, "expected random, line or explicit");
  } else if (full == "nodes.spacing") s_.spacing = real(value, w);
  else if (full == "nodes.positions") {
    s_.positions.clear();
    for (const auto& pair : split(value, ";")) {
      const auto xy = split(pair, " \t,");
      if (xy.size() != 2) fail(w, "positions are 'x y' pairs separated by ';'");
      s_.positions.push_back(Position{real(xy[0], w), real(xy[1], w)});
    }
  } else if (full == "radio.range") s_.radio.range = real(value, w);
  else if (full == "radio.loss_prob") s_.radio.loss_prob = real(value, w);
  else if (full == "queue.capacity") s_.queue.capacity = integer(value, w);
  else if (full == "queue.service_rate") s_.queue.service_rate = real(value, w);
  else if (full == "queue.hop_latency") s_.queue.hop_latency_s = real(value, w);
  else if (full == "mobility.speed_min") s_.mobility.speed_min = real(value, w);
  else if (full == "mobility.speed_max") s_.mobility.speed_max = real(value, w);
  else if (full == "mobility.pause") s_.mobility.pause_s = real(value, w);
  else if (full == "aodv.net_diameter") s_.aodv.net_diameter = u32(value);
  else if (full == "aodv.ttl_start") s_.aodv.ttl_start = u32(value);
  else if (full == "aodv.rreq_retries") s_.aodv.rreq_retries = u32(value);
  else if (full == "aodv.repair_ttl") s_.aodv.repair_ttl = u32(value);
  else if (full == "aodv.node_traversal") s_.aodv.node_traversal_s = real(value, w);
  else if (full == "aodv.route_lifetime") s_.aodv.route_lifetime_s = real(value, w);
  else if (full == "aodv.repair_timeout") s_.aodv.repair_timeout_s = real(value, w);
  else if (full == "aodv.rreq_cache") s_.aodv.rreq_cache_s = real(value, w);
  else if (full == "aodv.pending_capacity") s_.aodv.pending_capacity = integer(value, w);
  else if (full == "traffic.rate") rate_ = real(value, w);
  else if (full == "traffic.payload") payload_ = u32(value);
  else if (full == "traffic.start") start_ = real(value, w);
  else if (full == "traffic.stop") stop_ = real(value, w);
  else if (full == "traffic.flow") {
    if (replace_lists) flow_lines_.clear();
    const auto tokens = split(value, " \t");
    if (tokens.size() == 1 && tokens[0] == "none") {
      flows_none_ = true;
      flow_lines_.clear();
      return;
    }
    if (tokens.size() != 2 && tokens.size() != 6)
      fail(w, "expected 'src dst' or 'src dst rate payload start stop' or 'none'");
    flows_none_ = false;
    flow_lines_.emplace_back(w, tokens);
  } else if (full == "attack.nodes") {
    attack_nodes_.clear();
    attack_nodes_where_ = w;
    if (replace_lists) attacker_lines_.clear();
    const std::string_view v = trim(value);
    if (v != "none" && !v.empty())
      for (const auto& t : split(v, " \t,")) attack_nodes_.push_back(node(t, w));
  } else if (full == "attack.attacker") {
    if (replace_lists) {
      attacker_lines_.clear();
      attack_nodes_.clear();
    }
    const auto tokens = split(value, " \t");
    if (tokens.size() != 1 && tokens.size() != 4)
      fail(w, "expected 'node' or 'node forged_seq forged_hops active_from'");
    attacker_lines_.emplace_back(w, tokens);
  } else if (full == "attack.forged_seq") forged_seq_ = integer(value, w);
  else if (full == "attack.forged_hops") forged_hops_ = u32(value);
  else if (full == "attack.active_from") active_from_ = real(value, w);
  else if (full == "attack.adjacent_to") {
    const std::string_view v = trim(value);
    s_.attack_adjacent_to = v == "none" ? kNoNode : node(v, w);
  } else if (full == "detection.mode") {
    try {
      s_.detection.mode = parse_detection_mode(trim(value));
    } catch (const ConfigError& e) {
      fail(w, e.what());
    }
  } else if (full == "detection.tau") s_.detection.tau = real(value, w);
  else if (full == "detection.rho") s_.detection.rho = real(value, w);
  else if (full == "detection.theta") s_.detection.theta = real(value, w);
  else if (full == "detection.window") s_.detection.window = integer(value, w);
  else if (full == "detection.min_obs") s_.detection.min_obs = integer(value, w);
  else fail(w, "unknown key '" + full + "'");
}

Scenario Builder::finish() {
  Scenario s = s_;
  s.flows.clear();
  if (!flows_none_) {
    if (flow_lines_.empty()) {
      s.flows = default_flows(rate_, payload_, start_, stop_);
    } else {
      for (const auto& [w, t] : flow_lines_) {
        FlowSpec f{node(t[0], w), node(t[1], w), rate_, payload_, start_, stop_};
        if (t.size() == 6) {
          f.rate_pps = real(t[2], w);
          const std::uint64_t p = integer(t[3], w);
          if (p > 0xffffffffULL) fail(w, "payload too large");
          f.payload_bytes = static_cast<std::uint32_t>(p);
          f.start_s = real(t[4], w);
          f.stop_s = real(t[5], w);
        }
        if (f.src >= s.node_count || f.dst >= s.node_count)
          fail(w, "flow endpoint is not a node (nodes.count = " + std::to_string(s.node_count) + ")");
        s.flows.push_back(f);
      }
    }
  }
  auto check_node = [&](NodeId n, const Where& w) {
    if (n >= s.node_count)
      fail(w, "attacker " + std::to_string(n) + " is not a node (nodes.count = " +
                  std::to_string(s.node_count) + ")");
  };
  for (NodeId n : attack_nodes_) {
    check_node(n, attack_nodes_where_);
    s.attackers.push_back({n, forged_seq_, forged_hops_, active_from_});
  }
  for (const auto& [w, t] : attacker_lines_) {
    AttackerProfile a{node(t[0], w), forged_seq_, forged_hops_, active_from_};
    check_node(a.node, w);
    if (t.size() == 4) {
      a.forged_seq = integer(t[1], w);
      const std::uint64_t h = integer(t[2], w);
      if (h > 0xffffffffULL) fail(w, "forged_hops too large");
      a.forged_hops = static_cast<std::uint32_t>(h);
      a.active_from = real(t[3], w);
    }
    s.attackers.push_back(a);
  }
  s.validate();
  return s;
}

Builder parse_into(std::string_view text) {
  Builder b;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> kSections = {
          "simulation", "area", "nodes", "radio",   "queue",
          "mobility",   "aodv", "traffic", "attack", "detection"};
      if (!kSections.count(section))
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section +
                          "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (section.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                        "' appears before any [section]");
    b.set(section, key, line.substr(eq + 1), Builder::Where{line_no, key}, false);
  }
  return b;
}

void apply_assignment(Builder& b, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const std::string lhs(trim(assignment.substr(0, eq)));
  const auto dot = lhs.find('.');
  if (eq == std::string_view::npos || dot == std::string::npos || dot == 0 ||
      dot + 1 == lhs.size())
    throw ConfigError("override '" + std::string(assignment) + "' is not section.key=value");
  b.set(lhs.substr(0, dot), lhs.substr(dot + 1), assignment.substr(eq + 1),
        Builder::Where{0, lhs}, true);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::vector<std::string>& overrides) {
  Builder b = parse_into(text);
  for (const auto& o : overrides) apply_assignment(b, o);
  return b.finish();
}

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
  return parse_scenario(read_file(path), overrides);
}

// ---------------------------------------------------------------- serialization

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  auto num = [](double x) { return format_number(x); };
  out << "[simulation]\n"
      << "duration = " << num(s.duration_s) << '\n'
      << "seed = " << s.seed << "\n\n"
      << "[area]\n"
      << "width = " << num(s.area.width) << '\n'
      << "height = " << num(s.area.height) << "\n\n"
      << "[nodes]\n"
      << "count = " << s.node_count << '\n'
      << "placement = " << to_string(s.placement) << '\n'
      << "spacing = " << num(s.spacing) << '\n';
  if (!s.positions.empty()) {
    out << "positions =";
    for (std::size_t i = 0; i < s.positions.size(); ++i)
      out << (i ? "; " : " ") << num(s.positions[i].x) << ' ' << num(s.positions[i].y);
    out << '\n';
  }
  out << "\n[radio]\n"
      << "range = " << num(s.radio.range) << '\n'
      << "loss_prob = " << num(s.radio.loss_prob) << "\n\n"
      << "[queue]\n"
      << "capacity = " << s.queue.capacity << '\n'
      << "service_rate = " << num(s.queue.service_rate) << '\n'
      << "hop_latency = " << num(s.queue.hop_latency_s) << "\n\n"
      << "[mobility]\n"
      << "speed_min = " << num(s.mobility.speed_min) << '\n'
      << "speed_max = " << num(s.mobility.speed_max) << '\n'
      << "pause = " << num(s.mobility.pause_s) << "\n\n"
      << "[aodv]\n"
      << "net_diameter = " << s.aodv.net_diameter << '\n'
      << "ttl_start = " << s.aodv.ttl_start << '\n'
      << "rreq_retries = " << s.aodv.rreq_retries << '\n'
      << "repair_ttl = " << s.aodv.repair_ttl << '\n'
      << "node_traversal = " << num(s.aodv.node_traversal_s) << '\n'
      << "route_lifetime = " << num(s.aodv.route_lifetime_s) << '\n'
      << "repair_timeout = " << num(s.aodv.repair_timeout_s) << '\n'
      << "rreq_cache = " << num(s.aodv.rreq_cache_s) << '\n'
      << "pending_capacity = " << s.aodv.pending_capacity << "\n\n"
      << "[traffic]\n";
  if (s.flows.empty()) out << "flow = none\n";
  for (const auto& f : s.flows)
    out << "flow = " << f.src << ' ' << f.dst << ' ' << num(f.rate_pps) << ' ' << f.payload_bytes
        << ' ' << num(f.start_s) << ' ' << num(f.stop_s) << '\n';
  out << "\n[attack]\n";
  for (const auto& a : s.attackers)
    out << "attacker = " << a.node << ' ' << a.forged_seq << ' ' << a.forged_hops << ' '
        << num(a.active_from) << '\n';
  out << "adjacent_to = "
      << (s.attack_adjacent_to == kNoNode ? std::string("none") : fmt_node(s.attack_adjacent_to))
      << "\n\n"
      << "[detection]\n"
      << "mode = " << to_string(s.detection.mode) << '\n'
      << "tau = " << num(s.detection.tau) << '\n'
      << "rho = " << num(s.detection.rho) << '\n'
      << "theta = " << num(s.detection.theta) << '\n'
      << "window = " << s.detection.window << '\n'
      << "min_obs = " << s.detection.min_obs << '\n';
  return out.str();
}

// ---------------------------------------------------------------- running

RunResult run_scenario(const Scenario& scenario, const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  Simulation sim(scenario);
  RunResult result;
  result.events = sim.run();
  result.summary = sim.summarize();
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir + "'");
    auto open = [&](const char* name) {
      std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
      if (!f) throw ConfigError("cannot write '" + (fs::path(out_dir) / name).string() + "'");
      return f;
    };
    {
      auto f = open("trace.txt");
      write_trace(f, sim.trace().records());
    }
    {
      auto f = open("summary.txt");
      f << "seed=" << scenario.seed << '\n'
        << "mode=" << to_string(scenario.detection.mode) << '\n';
      write_summary(f, result.summary);
    }
    {
      auto f = open("summary.csv");
      f << summary_csv_header() << '\n' << summary_csv_row(result.summary) << '\n';
    }
    {
      auto f = open("timeseries.csv");
      write_time_series(f, sim.trace().records(), scenario.duration_s);
    }
    {
      auto f = open("scenario.cfg");
      f << serialize_scenario(scenario);
    }
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const std::vector<DetectionMode>& modes) {
  out << "seed,mode,throughput_bps,pdr,mean_delay_s,data_dropped,TP,FP,FN,time_to_detection_s\n";
  auto ttd = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& r : rows)
    out << r.seed << ',' << to_string(r.mode) << ',' << format_number(r.summary.throughput_bps)
        << ',' << format_number(r.summary.pdr) << ',' << format_number(r.summary.mean_e2e_delay_s)
        << ',' << r.summary.data_dropped() << ',' << r.summary.true_positives << ','
        << r.summary.false_positives << ',' << r.summary.false_negatives << ','
        << ttd(r.summary.time_to_detection_s) << '\n';
  for (DetectionMode m : modes) {
    double thr = 0, pdr = 0, delay = 0, drops = 0, tp = 0, fp = 0, fn = 0, ttd_sum = 0;
    std::size_t n = 0, n_ttd = 0;
    for (const auto& r : rows) {
      if (r.mode != m) continue;
      ++n;
      thr += r.summary.throughput_bps;
      pdr += r.summary.pdr;
      delay += r.summary.mean_e2e_delay_s;
      drops += static_cast<double>(r.summary.data_dropped());
      tp += static_cast<double>(r.summary.true_positives);
      fp += static_cast<double>(r.summary.false_positives);
      fn += static_cast<double>(r.summary.false_negatives);
      if (r.summary.time_to_detection_s) {
        ttd_sum += *r.summary.time_to_detection_s;
        ++n_ttd;
      }
    }
    if (n == 0) continue;
    const double k = static_cast<double>(n);
    out << "mean," << to_string(m) << ',' << format_number(thr / k) << ','
        << format_number(pdr / k) << ',' << format_number(delay / k) << ','
        << format_number(drops / k) << ',' << format_number(tp / k) << ','
        << format_number(fp / k) << ',' << format_number(fn / k) << ','
        << (n_ttd ? format_number(ttd_sum / static_cast<double>(n_ttd)) : std::string()) << '\n';
  }
}

std::vector<SweepRow> sweep(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                            const std::vector<DetectionMode>& modes, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::vector<SweepRow> rows;
  auto flush = [&] {
    if (out_dir.empty()) return;
    fs::create_directories(out_dir);
    std::ofstream f(fs::path(out_dir) / "sweep.csv", std::ios::binary);
    if (!f) throw ConfigError("cannot write sweep.csv in '" + out_dir + "'");
    write_sweep_csv(f, rows, modes);
  };
  for (std::uint64_t seed : seeds) {
    for (DetectionMode mode : modes) {
      Scenario sc = scenario;
      sc.seed = seed;
      sc.detection.mode = mode;
      const std::string dir =
          out_dir.empty() ? std::string()
                          : (fs::path(out_dir) / std::string(to_string(mode)) /
                             ("seed_" + std::to_string(seed)))
                                .string();
      try {
        rows.push_back(SweepRow{seed, mode, run_scenario(sc, dir).summary});
      } catch (...) {
        flush();  // keep the finished runs
        throw;
      }
    }
  }
  flush();
  return rows;
}

}  // namespace manet
