// manetsim: run MANET scenarios and seed sweeps.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime invariant violation.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "manet/errors.hpp"
#include "manet/metrics.hpp"
#include "manet/scenario.hpp"

namespace {

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  auto to_u64 = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size() || s.empty() || s[0] == '-') throw std::invalid_argument(s);
      return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw manet::ConfigError("--seeds expects 'a..b' or 'n', got '" + text + "'");
    }
  };
  if (dots == std::string::npos) return {to_u64(text)};
  const std::uint64_t a = to_u64(text.substr(0, dots));
  const std::uint64_t b = to_u64(text.substr(dots + 2));
  if (b < a) throw manet::ConfigError("--seeds range is empty: '" + text + "'");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
  return seeds;
}

std::vector<manet::DetectionMode> parse_modes(const std::string& text) {
  std::vector<manet::DetectionMode> modes;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    modes.push_back(manet::parse_detection_mode(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return modes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic MANET simulator: AODV, black-hole attacker, Watchdog and I-Watchdog"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::string seeds = "1..5";
  std::string modes = "watchdog,iwatchdog";

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--config", config, "Scenario file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Seed (overrides simulation.seed)");
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--override", overrides, "section.key=value (repeatable)");

  auto* sw = app.add_subcommand("sweep", "Run every (seed, mode) pair");
  sw->add_option("--config", config, "Scenario file")->required();
  sw->add_option("--seeds", seeds, "Seed range a..b")->capture_default_str();
  sw->add_option("--modes", modes, "Comma-separated detection modes")->capture_default_str();
  sw->add_option("--out", out, "Output directory")->required();
  sw->add_option("--override", overrides, "section.key=value (repeatable)");

  auto* show = app.add_subcommand("print-config", "Print the fully resolved scenario");
  show->add_option("--config", config, "Scenario file")->required();
  show->add_option("--override", overrides, "section.key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    manet::Scenario scenario = manet::load_scenario(config, overrides);
    if (*run) {
      if (*seed_opt) scenario.seed = seed;
      const manet::RunResult r = manet::run_scenario(scenario, out);
      manet::write_summary(std::cout, r.summary);
      std::cout << "events=" << r.events << "\nwall_s=" << manet::format_number(r.wall_seconds)
                << '\n';
    } else if (*sw) {
      const auto rows = manet::sweep(scenario, parse_seed_range(seeds), parse_modes(modes), out);
      manet::write_sweep_csv(std::cout, rows, parse_modes(modes));
    } else {
      std::cout << manet::serialize_scenario(scenario);
    }
  } catch (const manet::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const manet::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
