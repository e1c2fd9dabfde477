#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace manet {

/// Simulation time in seconds.
using SimTime = double;

/// Discrete-event scheduler. Events fire in (time, insertion order); the
/// insertion counter makes every scheduled event unique.
class Scheduler {
 public:
  using Handler = std::function<void()>;
  using DispatchObserver = std::function<void(SimTime, std::uint64_t)>;

  /// Throws InvariantViolation when `at` lies before the current clock.
  void schedule(SimTime at, Handler handler);
  void schedule_in(SimTime delay, Handler handler) { schedule(now_ + delay, std::move(handler)); }

  /// Dispatches every event with fire time <= end. Returns the dispatch count.
  std::size_t run_until(SimTime end);

  SimTime now() const { return now_; }
  std::size_t pending() const { return heap_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }

  void set_dispatch_observer(DispatchObserver observer) { observer_ = std::move(observer); }

 private:
  struct Event {
    SimTime fire_at;
    std::uint64_t seq;
    Handler handler;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  std::vector<Event> heap_;
  SimTime now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  DispatchObserver observer_;
};

/// Fixed tags for the per-subsystem random substreams. Each substream is
/// seeded with `seed ^ tag`, so draws in one subsystem never shift another.
enum class Substream : std::uint64_t {
  Placement = 0x706c6163656d6e74ULL,
  Mobility = 0x6d6f62696c697479ULL,
  Traffic = 0x7472616666696321ULL,
  MacLoss = 0x6d61636c6f737321ULL,
};

/// Deterministic random stream; the output is a pure function of the seed
/// and the draw index.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw on [lo, hi); returns lo when lo == hi. Throws ConfigError when lo > hi.
  double uniform(double lo, double hi);
  bool bernoulli(double p);
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

RandomStream derive_stream(std::uint64_t seed, Substream tag);

}  // namespace manet
