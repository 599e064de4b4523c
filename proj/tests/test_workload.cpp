#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "faaslab/common/error.hpp"
#include "faaslab/common/rng.hpp"
#include "faaslab/workload/arrivals.hpp"
#include "faaslab/workload/trace.hpp"

using faaslab::Rng;
using faaslab::ValidationError;
using faaslab::sim::SimConfig;
using faaslab::sim::SizeClass;
using faaslab::workload::ArrivalPlan;
using faaslab::workload::SizeMix;
using faaslab::workload::Trace;
using faaslab::workload::TracePattern;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("faaslab-trace-" + std::to_string(counter++) + "-" + std::to_string(::getpid()) +
            ".csv");
    std::ofstream out(path, std::ios::binary);
    out << contents;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

std::string error_text(const std::filesystem::path& p) {
  try {
    faaslab::workload::load_trace(p);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("load_trace parses a plain trace") {
  TempFile f("window,count\n0,12\n1,30\n");
  const Trace t = faaslab::workload::load_trace(f.path);
  REQUIRE(t.windows() == 2);
  CHECK(t.counts[0] == 12);
  CHECK(t.counts[1] == 30);
}

TEST_CASE("load_trace tolerates a missing header, blank lines, and CRLF") {
  TempFile f("0,5\r\n\r\n1,6\r\n");
  const Trace t = faaslab::workload::load_trace(f.path);
  REQUIRE(t.windows() == 2);
  CHECK(t.counts[0] == 5);
  CHECK(t.counts[1] == 6);
}

TEST_CASE("load_trace reports physical line numbers") {
  TempFile negative("window,count\n0,12\n1,30\n2,-1\n");
  CHECK(error_text(negative.path).find("line 4") != std::string::npos);

  TempFile gap("window,count\n0,12\n2,30\n");
  CHECK(error_text(gap.path).find("line 3") != std::string::npos);

  TempFile words("window,count\n0,12\n1,many\n");
  CHECK(error_text(words.path).find("line 3") != std::string::npos);

  TempFile no_comma("window,count\n0 12\n");
  CHECK(error_text(no_comma.path).find("line 2") != std::string::npos);

  // a blank line shifts the physical position of the bad row
  TempFile blank_then_bad("window,count\n\n0,12\n1,-3\n");
  CHECK(error_text(blank_then_bad.path).find("line 4") != std::string::npos);
}

TEST_CASE("load_trace rejects empty input") {
  TempFile empty("");
  CHECK_THROWS_AS(faaslab::workload::load_trace(empty.path), ValidationError&);
  TempFile header_only("window,count\n");
  CHECK_THROWS_AS(faaslab::workload::load_trace(header_only.path), ValidationError&);
  CHECK_THROWS_AS(faaslab::workload::load_trace("/nonexistent/trace.csv"), ValidationError&);
}

TEST_CASE("a fourteen-day trace round-trips through the csv form") {
  // 14 days of 30 s windows
  const long windows = 14 * 24 * 3600 / 30;
  CHECK(windows == 40320);
  const Trace t = faaslab::workload::synth_trace(TracePattern::DiurnalSine, windows, 12, 1u);

  TempFile f("");
  faaslab::workload::save_trace(f.path, t);
  const Trace back = faaslab::workload::load_trace(f.path);
  CHECK(back.counts == t.counts);
}

TEST_CASE("flat pattern repeats the scale") {
  const Trace t = faaslab::workload::synth_trace(TracePattern::Flat, 10, 5, 99u);
  REQUIRE(t.windows() == 10);
  for (long c : t.counts) CHECK(c == 5);
}

TEST_CASE("diurnal pattern spans [0, 2*scale] with a one-day period") {
  const Trace t = faaslab::workload::synth_trace(TracePattern::DiurnalSine, 2 * 2880, 40, 0u);
  long lo = t.counts[0];
  long hi = t.counts[0];
  for (long c : t.counts) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(lo == 0);   // trough at three-quarters of the day
  CHECK(hi == 80);  // crest at one quarter
  CHECK(t.counts[0] == 40);
  CHECK(t.counts[720] == 80);
  CHECK(t.counts[2160] == 0);
  for (long w = 0; w < 2880; ++w) REQUIRE(t.counts[w] == t.counts[w + 2880]);
}

TEST_CASE("bursty pattern is seed-deterministic and non-negative") {
  const Trace a = faaslab::workload::synth_trace(TracePattern::Bursty, 100, 20, 7u);
  const Trace b = faaslab::workload::synth_trace(TracePattern::Bursty, 100, 20, 7u);
  const Trace c = faaslab::workload::synth_trace(TracePattern::Bursty, 100, 20, 8u);
  CHECK(a.counts == b.counts);
  CHECK(a.counts != c.counts);
  long hi = 0;
  for (long v : a.counts) {
    CHECK(v >= 0);
    hi = std::max(hi, v);
  }
  CHECK(hi > 40);  // at least one burst fires in 100 windows at p = 0.05
}

TEST_CASE("trace pattern names round-trip") {
  using faaslab::workload::parse_trace_pattern;
  using faaslab::workload::to_string;
  for (auto p : {TracePattern::Flat, TracePattern::DiurnalSine, TracePattern::Bursty})
    CHECK(parse_trace_pattern(to_string(p)) == p);
  CHECK_THROWS_AS(parse_trace_pattern("sawtooth"), ValidationError&);
}

TEST_CASE("sample_arrivals draws nothing for an empty window") {
  SizeMix mix;
  Rng rng(1u);
  const ArrivalPlan plan = faaslab::workload::sample_arrivals(0, 0.0, 30.0, mix, rng);
  CHECK(plan.timestamps.empty());
  CHECK(plan.size_classes.empty());
}

TEST_CASE("sample_arrivals stays strictly inside the window and sorted") {
  SizeMix mix;
  for (unsigned long seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const double t0 = 120.0;
    const ArrivalPlan plan = faaslab::workload::sample_arrivals(40, t0, 30.0, mix, rng);
    REQUIRE(plan.timestamps.size() == plan.size_classes.size());
    double prev = t0;
    for (double t : plan.timestamps) {
      CHECK(t >= prev);
      CHECK(t > t0);
      CHECK(t < t0 + 30.0);
      prev = t;
    }
  }
}

TEST_CASE("realized arrival count averages to the trace count") {
  SizeMix mix;
  long total = 0;
  for (unsigned long seed = 0; seed < 10000; ++seed) {
    Rng rng(seed);
    total += static_cast<long>(
        faaslab::workload::sample_arrivals(60, 0.0, 30.0, mix, rng).timestamps.size());
  }
  const double mean = static_cast<double>(total) / 10000.0;
  CHECK(mean == doctest::Approx(60.0).epsilon(0.02));
}

TEST_CASE("size classes follow the configured mix") {
  SizeMix mix;
  Rng rng(42u);
  std::array<long, 3> observed{0, 0, 0};
  long samples = 0;
  while (samples < 100000) {
    const ArrivalPlan plan = faaslab::workload::sample_arrivals(500, 0.0, 30.0, mix, rng);
    for (auto s : plan.size_classes) {
      observed[static_cast<std::size_t>(s)] += 1;
      ++samples;
    }
  }
  double chi2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double expected = mix.p[static_cast<std::size_t>(k)] * static_cast<double>(samples);
    const double diff = static_cast<double>(observed[static_cast<std::size_t>(k)]) - expected;
    chi2 += diff * diff / expected;
  }
  CHECK(chi2 < 13.82);  // chi-square critical value, 2 degrees of freedom, p = 0.001
}

TEST_CASE("same seed reproduces the exact arrival plan") {
  SizeMix mix;
  Rng a(5u);
  Rng b(5u);
  const auto plan_a = faaslab::workload::sample_arrivals(30, 60.0, 30.0, mix, a);
  const auto plan_b = faaslab::workload::sample_arrivals(30, 60.0, 30.0, mix, b);
  CHECK(plan_a.timestamps == plan_b.timestamps);
  CHECK(plan_a.size_classes == plan_b.size_classes);
}

TEST_CASE("size mix validation") {
  SizeMix bad;
  bad.p = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(bad.validate(), ValidationError&);
  bad.p = {-0.1, 0.6, 0.5};
  CHECK_THROWS_AS(bad.validate(), ValidationError&);
}

TEST_CASE("make_requests attaches the per-class service times") {
  SimConfig cfg;
  ArrivalPlan plan;
  plan.timestamps = {1.0, 2.0, 3.0};
  plan.size_classes = {SizeClass::Small, SizeClass::Medium, SizeClass::Large};
  const auto reqs = faaslab::workload::make_requests(plan, cfg);
  REQUIRE(reqs.size() == 3);
  CHECK(reqs[0].service_seconds == doctest::Approx(0.5));
  CHECK(reqs[1].service_seconds == doctest::Approx(3.0));
  CHECK(reqs[2].service_seconds == doctest::Approx(8.0));
  CHECK(reqs[1].arrival_time == doctest::Approx(2.0));
}
