#include <catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "manet/errors.hpp"
#include "manet/metrics.hpp"

using namespace manet;

namespace {

TraceRecord rec(SimTime t, TraceEvent ev, PacketId id, NodeId node = 0) {
  TraceRecord r;
  r.time = t;
  r.event = ev;
  r.node = node;
  r.pkt_id = id;
  r.kind = PacketKind::Data;
  r.origin = 0;
  r.target = 2;
  r.size_bytes = 512;
  return r;
}

TraceRecord drop(SimTime t, PacketId id, DropCause cause) {
  TraceRecord r = rec(t, TraceEvent::Drop, id, 1);
  r.cause = cause;
  return r;
}

TraceRecord verdict(SimTime t, NodeId suspect, Verdict v) {
  TraceRecord r;
  r.time = t;
  r.event = TraceEvent::Verdict;
  r.suspect = suspect;
  r.outcome = v;
  return r;
}

TraceRecord alert(SimTime t, NodeId suspect) {
  TraceRecord r;
  r.time = t;
  r.event = TraceEvent::Alert;
  r.kind = PacketKind::Alert;
  r.suspect = suspect;
  return r;
}

}  // namespace

TEST_CASE("throughput counts delivered payload bits over the duration", "[metrics]") {
  const std::vector<TraceRecord> t = {
      rec(1.0, TraceEvent::Send, 1), rec(1.002, TraceEvent::Recv, 1, 2),
      rec(1.5, TraceEvent::Send, 2), rec(1.502, TraceEvent::Recv, 2, 2)};
  const RunSummary s = finalize(t, 2.0, {}, {});
  CHECK(s.throughput_bps == 4096.0);  // 2 x 512 B x 8 / 2 s
  CHECK(s.pdr == 1.0);
  CHECK(s.mean_e2e_delay_s == Catch::Approx(0.002).epsilon(1e-9));
}

TEST_CASE("delivery ratio and drop causes", "[metrics]") {
  const std::vector<TraceRecord> t = {
      rec(1.0, TraceEvent::Send, 1), rec(1.1, TraceEvent::Send, 2),
      rec(1.2, TraceEvent::Send, 3), rec(1.3, TraceEvent::Send, 4),
      rec(1.4, TraceEvent::Recv, 1, 2), drop(1.5, 2, DropCause::BlackHole),
      drop(1.6, 3, DropCause::QueueOverflow)};
  const RunSummary s = finalize(t, 10.0, {}, {4});
  CHECK(s.data_sent == 4);
  CHECK(s.pdr == 0.25);
  CHECK(s.data_dropped() == 2);
  CHECK(s.data_dropped_by_cause.at(DropCause::BlackHole) == 1);
  CHECK(s.in_flight_at_end == 1);
}

TEST_CASE("nothing sent gives zero ratios", "[metrics]") {
  const RunSummary s = finalize({}, 5.0, {}, {});
  CHECK(s.pdr == 0.0);
  CHECK(s.throughput_bps == 0.0);
  CHECK(s.mean_e2e_delay_s == 0.0);
  CHECK_THROWS_AS(finalize({}, 0.0, {}, {}), InvariantViolation);
}

TEST_CASE("detection quality against the ground truth", "[metrics]") {
  const std::vector<TraceRecord> t = {
      verdict(3.0, 7, Verdict::CongestionRepair), verdict(4.0, 7, Verdict::Malicious),
      alert(4.0, 7), verdict(5.0, 7, Verdict::Malicious), verdict(6.0, 2, Verdict::Malicious)};
  const RunSummary s = finalize(t, 10.0, {{7, 1.5}, {9, 0.0}}, {});
  CHECK(s.true_positives == 1);
  CHECK(s.false_positives == 1);
  CHECK(s.false_negatives == 1);
  REQUIRE(s.time_to_detection_s);
  CHECK(*s.time_to_detection_s == Catch::Approx(2.5));
  CHECK(s.first_alert_s == 4.0);
  CHECK(s.verdicts_malicious == 3);
  CHECK(s.verdicts_congestion == 1);
  CHECK(s.alerts == 1);
}

TEST_CASE("post-detection delivery ratio only counts later packets", "[metrics]") {
  const std::vector<TraceRecord> t = {
      rec(1.0, TraceEvent::Send, 1), drop(1.1, 1, DropCause::BlackHole), alert(2.0, 5),
      rec(3.0, TraceEvent::Send, 2), rec(3.1, TraceEvent::Recv, 2, 2),
      rec(4.0, TraceEvent::Send, 3), rec(4.1, TraceEvent::Recv, 3, 2),
      rec(5.0, TraceEvent::Send, 4), drop(5.1, 4, DropCause::MacLoss),
      rec(6.0, TraceEvent::Send, 5)};
  const RunSummary s = finalize(t, 10.0, {{5, 0.0}}, {5});
  REQUIRE(s.post_detection_pdr);
  CHECK(*s.post_detection_pdr == Catch::Approx(2.0 / 3.0));
  const RunSummary none = finalize({rec(1.0, TraceEvent::Send, 1)}, 10.0, {}, {1});
  CHECK_FALSE(none.post_detection_pdr);
}

TEST_CASE("conservation violations name the packets", "[metrics]") {
  const std::vector<TraceRecord> t = {rec(1.0, TraceEvent::Send, 11),
                                      rec(1.1, TraceEvent::Send, 12),
                                      rec(1.2, TraceEvent::Recv, 11, 2)};
  try {
    finalize(t, 10.0, {}, {});
    FAIL("expected a conservation violation");
  } catch (const InvariantViolation& e) {
    const std::string msg = e.what();
    CHECK(msg.find("12") != std::string::npos);
    CHECK(msg.find("conservation") != std::string::npos);
  }
  const std::vector<TraceRecord> twice = {rec(1.0, TraceEvent::Send, 1),
                                          rec(1.1, TraceEvent::Recv, 1, 2),
                                          drop(1.2, 1, DropCause::NoRoute)};
  CHECK_THROWS_AS(finalize(twice, 10.0, {}, {}), InvariantViolation);
}

TEST_CASE("the trace rejects records out of time order", "[metrics]") {
  Trace trace;
  trace.record(rec(1.0, TraceEvent::Send, 1));
  trace.record(rec(1.0, TraceEvent::Forward, 1));
  CHECK_THROWS_AS(trace.record(rec(0.5, TraceEvent::Send, 2)), InvariantViolation);
  CHECK(trace.size() == 2);
}

TEST_CASE("trace text has a header and one line per record", "[metrics]") {
  std::ostringstream out;
  TraceRecord d = drop(1.25, 3, DropCause::BlackHole);
  write_trace(out, {rec(1.0, TraceEvent::Send, 3), d});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == kTraceHeader);
  std::getline(in, line);
  CHECK(line.rfind("1.000000000 Send 0 3 Data", 0) == 0);
  std::getline(in, line);
  CHECK(line.find("BlackHole") != std::string::npos);
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("numbers round-trip through their text form", "[metrics]") {
  for (double x : {0.1, 1.0 / 3.0, 2048.0, 0.0048000000000001375, 1e-300}) {
    CHECK(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(2048.0) == "2048");
}

TEST_CASE("summary and time series writers", "[metrics]") {
  const std::vector<TraceRecord> t = {
      rec(0.5, TraceEvent::Send, 1), rec(0.6, TraceEvent::Recv, 1, 2),
      rec(1.5, TraceEvent::Send, 2), drop(1.6, 2, DropCause::NoRoute)};
  const RunSummary s = finalize(t, 2.5, {}, {});
  std::ostringstream sum;
  write_summary(sum, s);
  CHECK(sum.str().find("pdr=0.5\n") != std::string::npos);
  CHECK(sum.str().find("post_detection_pdr=") != std::string::npos);
  CHECK(summary_csv_header().find("throughput_bps") == 0);
  CHECK(summary_csv_row(s).find(format_number(4096.0 / 2.5) + ",0.5,") == 0);

  std::ostringstream ts;
  write_time_series(ts, t, 2.5);
  CHECK(ts.str() == std::string("time_s,throughput_bps,cum_pdr,mean_delay_s\n"
        "1,4096,1," + format_number(0.6 - 0.5) + "\n"
        "2,0,0.5,\n"
        "2.5,0,0.5,\n"));
}
