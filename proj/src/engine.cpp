#include "manet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "manet/errors.hpp"

namespace manet {

void Scheduler::schedule(SimTime at, Handler handler) {
  if (!(at >= now_) || !std::isfinite(at)) {
    std::ostringstream msg;
    msg << "event scheduled in the past: fire_at=" << at << " now=" << now_;
    throw InvariantViolation(msg.str());
  }
  heap_.push_back(Event{at, next_seq_++, std::move(handler)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
}

std::size_t Scheduler::run_until(SimTime end) {
  std::size_t count = 0;
  while (!heap_.empty() && heap_.front().fire_at <= end) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event ev = std::move(heap_.back());
    heap_.pop_back();
    now_ = ev.fire_at;
    ++count;
    ++dispatched_;
    if (observer_) observer_(ev.fire_at, ev.seq);
    ev.handler();
  }
  return count;
}

double RandomStream::uniform(double lo, double hi) {
  if (lo > hi) {
    std::ostringstream msg;
    msg << "uniform draw with lo > hi (" << lo << " > " << hi << ")";
    throw ConfigError(msg.str());
  }
  // 53 high bits give a double in [0, 1) independent of the library's
  // distribution implementation.
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  if (lo == hi) return lo;
  const double v = lo + unit * (hi - lo);
  return v < hi ? v : std::nextafter(hi, lo);
}

bool RandomStream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform(0.0, 1.0) < p;
}

RandomStream derive_stream(std::uint64_t seed, Substream tag) {
  return RandomStream(seed ^ static_cast<std::uint64_t>(tag));
}

}  // namespace manet
