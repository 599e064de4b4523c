#include "faaslab/workload/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "faaslab/common/error.hpp"
#include "faaslab/common/rng.hpp"

namespace faaslab::workload {

namespace {

constexpr long kWindowsPerDay = 2880;  // 24 h of 30 s windows

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

long parse_long(const std::string& text, long line_no, const char* what) {
  long value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    std::ostringstream msg;
    msg << "trace: malformed " << what << " '" << text << "' at line " << line_no;
    throw ValidationError(msg.str());
  }
  return value;
}

}  // namespace

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("trace: cannot open '" + path.string() + "'");

  Trace trace;
  trace.name = path.stem().string();

  std::string raw;
  long line_no = 0;
  bool seen_data = false;
  long expected = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (!seen_data && trace.counts.empty() && line == "window,count") continue;  // header

    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      std::ostringstream msg;
      msg << "trace: expected 'index,count' at line " << line_no;
      throw ValidationError(msg.str());
    }
    const long index = parse_long(trim(line.substr(0, comma)), line_no, "window index");
    const long count = parse_long(trim(line.substr(comma + 1)), line_no, "count");
    if (index != expected) {
      std::ostringstream msg;
      msg << "trace: window index " << index << " at line " << line_no << ", expected "
          << expected;
      throw ValidationError(msg.str());
    }
    if (count < 0) {
      std::ostringstream msg;
      msg << "trace: negative count at line " << line_no;
      throw ValidationError(msg.str());
    }
    trace.counts.push_back(count);
    seen_data = true;
    ++expected;
  }
  if (!seen_data) throw ValidationError("trace: no windows in '" + path.string() + "'");
  return trace;
}

void save_trace(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw ValidationError("trace: cannot write '" + path.string() + "'");
  out << "window,count\n";
  for (std::size_t i = 0; i < trace.counts.size(); ++i)
    out << i << ',' << trace.counts[i] << '\n';
  if (!out) throw ValidationError("trace: write failed for '" + path.string() + "'");
}

Trace synth_trace(TracePattern pattern, long windows, long scale, unsigned long long seed) {
  require(windows >= 1, "synth_trace: windows must be >= 1");
  require(scale >= 0, "synth_trace: scale must be >= 0");

  Trace trace;
  trace.name = to_string(pattern);
  trace.counts.reserve(static_cast<std::size_t>(windows));

  switch (pattern) {
    case TracePattern::Flat:
      trace.counts.assign(static_cast<std::size_t>(windows), scale);
      break;
    case TracePattern::DiurnalSine:
      for (long w = 0; w < windows; ++w) {
        const double phase =
            2.0 * std::numbers::pi * static_cast<double>(w % kWindowsPerDay) / kWindowsPerDay;
        trace.counts.push_back(std::lround(scale * (1.0 + std::sin(phase))));
      }
      break;
    case TracePattern::Bursty: {
      Rng rng(seed);
      std::bernoulli_distribution burst_starts(0.05);
      std::uniform_int_distribution<long> burst_length(3, 10);
      long burst_left = 0;
      for (long w = 0; w < windows; ++w) {
        if (burst_left == 0 && burst_starts(rng)) burst_left = burst_length(rng);
        const double mean = static_cast<double>(burst_left > 0 ? 4 * scale : scale);
        if (mean <= 0.0) {
          trace.counts.push_back(0);
        } else {
          std::poisson_distribution<long> draw(mean);
          trace.counts.push_back(draw(rng));
        }
        if (burst_left > 0) --burst_left;
      }
      break;
    }
  }
  return trace;
}

TracePattern parse_trace_pattern(const std::string& text) {
  if (text == "flat") return TracePattern::Flat;
  if (text == "diurnal-sine") return TracePattern::DiurnalSine;
  if (text == "bursty") return TracePattern::Bursty;
  throw ValidationError("unknown trace pattern '" + text +
                        "' (expected flat, diurnal-sine, or bursty)");
}

std::string to_string(TracePattern pattern) {
  switch (pattern) {
    case TracePattern::Flat:
      return "flat";
    case TracePattern::DiurnalSine:
      return "diurnal-sine";
    case TracePattern::Bursty:
      return "bursty";
  }
  throw ValidationError("unknown trace pattern value");
}

}  // namespace faaslab::workload
