#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace faaslab::workload {

// Per-window invocation counts. Position in `counts` is the window index.
struct Trace {
  std::string name;
  std::vector<long> counts;

  long windows() const { return static_cast<long>(counts.size()); }
};

// CSV format: optional header `window,count`, then one `index,count` row per
// window with indices consecutive from 0 and counts >= 0. Blank lines are
// tolerated; LF and CRLF both work. Errors carry 1-based physical line
// numbers, header and blanks included.
Trace load_trace(const std::filesystem::path& path);
void save_trace(const std::filesystem::path& path, const Trace& trace);

enum class TracePattern { Flat, DiurnalSine, Bursty };

// Deterministic synthetic traces:
//   Flat        every window = scale
//   DiurnalSine lround(scale * (1 + sin(2*pi*w / 2880))), one day = 2880 windows
//   Bursty      Poisson(scale) base load with seeded burst episodes at 4x rate
Trace synth_trace(TracePattern pattern, long windows, long scale, unsigned long long seed);

TracePattern parse_trace_pattern(const std::string& text);
std::string to_string(TracePattern pattern);

}  // namespace faaslab::workload
