#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "manet/aodv.hpp"
#include "manet/blackhole.hpp"
#include "manet/metrics.hpp"
#include "manet/sentinel.hpp"
#include "manet/world.hpp"

namespace manet {

struct FlowSpec {
  NodeId src = 0;
  NodeId dst = 0;
  double rate_pps = 4.0;
  std::uint32_t payload_bytes = 512;
  double start_s = 1.0;
  double stop_s = std::numeric_limits<double>::infinity();

  friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

enum class PlacementKind { Random, Line, Explicit };

std::string_view to_string(PlacementKind kind);

/// Everything needed to reproduce one run.
struct Scenario {
  double duration_s = 250.0;
  std::uint64_t seed = 1;
  Area area;
  std::size_t node_count = 50;
  PlacementKind placement = PlacementKind::Random;
  double spacing = 200.0;
  std::vector<Position> positions;
  RadioModel radio;
  QueueConfig queue;
  MobilityConfig mobility;
  AodvConfig aodv;
  std::vector<FlowSpec> flows;
  std::vector<AttackerProfile> attackers;
  // When set, the first attacker is placed within half a radio range of this node.
  NodeId attack_adjacent_to = kNoNode;
  DetectorConfig detection;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// The default flow set: 4 CBR flows 0->1, 2->3, 4->5, 6->7 at the given rate and size.
std::vector<FlowSpec> default_flows(double rate_pps, std::uint32_t payload_bytes, double start_s,
                                    double stop_s);

/// Parses the line-oriented `[section]` / `key = value` format, then applies
/// `section.key=value` overrides in order. Errors name the line (or override)
/// and the key. An override of a repeatable key (traffic.flow,
/// attack.attacker) replaces the whole list.
Scenario parse_scenario(std::string_view text, const std::vector<std::string>& overrides = {});
Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides = {});
/// Canonical text form; parse_scenario(serialize_scenario(s)) == s field by field.
std::string serialize_scenario(const Scenario& scenario);

struct RunResult {
  RunSummary summary;
  std::uint64_t events = 0;
  double wall_seconds = 0.0;
};

/// Runs one scenario. When out_dir is non-empty, trace.txt, summary.txt,
/// summary.csv and timeseries.csv are written there.
RunResult run_scenario(const Scenario& scenario, const std::string& out_dir);

struct SweepRow {
  std::uint64_t seed = 0;
  DetectionMode mode = DetectionMode::None;
  RunSummary summary;
};

/// One run per (seed, mode) into out_dir/<mode>/seed_<n>, plus out_dir/sweep.csv
/// with a row per run and a mean row per mode.
std::vector<SweepRow> sweep(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                            const std::vector<DetectionMode>& modes, const std::string& out_dir);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const std::vector<DetectionMode>& modes);

}  // namespace manet
