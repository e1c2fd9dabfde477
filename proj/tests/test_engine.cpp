#include <catch_amalgamated.hpp>

#include <vector>

#include "manet/engine.hpp"
#include "manet/errors.hpp"

using namespace manet;

TEST_CASE("events fire in time order, ties in insertion order", "[engine]") {
  Scheduler s;
  std::vector<int> order;
  s.schedule(2.0, [&] { order.push_back(3); });
  s.schedule(1.0, [&] { order.push_back(1); });
  s.schedule(1.0, [&] { order.push_back(2); });
  s.schedule(0.5, [&] { order.push_back(0); });
  CHECK(s.run_until(10.0) == 4);
  CHECK(order == std::vector<int>{0, 1, 2, 3});
  CHECK(s.now() == 2.0);
}

TEST_CASE("handlers may schedule further events", "[engine]") {
  Scheduler s;
  std::vector<double> times;
  std::function<void()> tick = [&] {
    times.push_back(s.now());
    if (times.size() < 3) s.schedule_in(0.25, tick);
  };
  s.schedule(1.0, tick);
  s.run_until(5.0);
  CHECK(times == std::vector<double>{1.0, 1.25, 1.5});
}

TEST_CASE("scheduling in the past is rejected", "[engine]") {
  Scheduler s;
  s.schedule(1.0, [] {});
  s.run_until(1.0);
  CHECK_THROWS_AS(s.schedule(0.5, [] {}), InvariantViolation);
  CHECK_NOTHROW(s.schedule(1.0, [] {}));
}

TEST_CASE("run_until stops at the horizon and keeps later events", "[engine]") {
  Scheduler s;
  int fired = 0;
  s.schedule(1.0, [&] { ++fired; });
  s.schedule(2.0, [&] { ++fired; });
  s.schedule(3.0, [&] { ++fired; });
  CHECK(s.run_until(2.0) == 2);
  CHECK(fired == 2);
  CHECK(s.pending() == 1);
  CHECK(s.now() == 2.0);
  s.run_until(3.0);
  CHECK(fired == 3);
  CHECK(s.dispatched() == 3);
}

TEST_CASE("dispatch observer sees every event in order", "[engine]") {
  Scheduler s;
  std::vector<SimTime> seen;
  s.set_dispatch_observer([&](SimTime t, std::uint64_t) { seen.push_back(t); });
  s.schedule(0.3, [] {});
  s.schedule(0.1, [] {});
  s.run_until(1.0);
  CHECK(seen == std::vector<SimTime>{0.1, 0.3});
}

TEST_CASE("random streams are reproducible and independent per substream", "[engine]") {
  RandomStream a = derive_stream(42, Substream::Mobility);
  RandomStream b = derive_stream(42, Substream::Mobility);
  RandomStream c = derive_stream(42, Substream::MacLoss);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t x = a.next();
    CHECK(x == b.next());
    differs |= x != c.next();
  }
  CHECK(differs);
}

TEST_CASE("uniform draws stay in range", "[engine]") {
  RandomStream r(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = r.uniform(2.0, 3.0);
    CHECK(x >= 2.0);
    CHECK(x < 3.0);
  }
  CHECK(r.uniform(4.0, 4.0) == 4.0);
  CHECK_THROWS_AS(r.uniform(3.0, 2.0), ConfigError);
  CHECK_FALSE(r.bernoulli(0.0));
  CHECK(r.bernoulli(1.0));
}
