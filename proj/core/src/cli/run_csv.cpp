#include "faaslab/cli/run_csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "faaslab/common/error.hpp"

namespace faaslab::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // binary: LF endings on every platform
  if (!out) throw ValidationError("csv: cannot write " + path.string());
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

[[noreturn]] void bad_row(const std::filesystem::path& path, std::size_t lineno,
                          const std::string& what) {
  throw ValidationError("csv: " + path.string() + " line " + std::to_string(lineno) + ": " + what);
}

long parse_long(const std::string& s, const std::filesystem::path& path, std::size_t lineno) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    bad_row(path, lineno, "expected an integer, got '" + s + "'");
  }
  if (used != s.size()) bad_row(path, lineno, "expected an integer, got '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t lineno) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    bad_row(path, lineno, "expected a number, got '" + s + "'");
  }
  if (used != s.size()) bad_row(path, lineno, "expected a number, got '" + s + "'");
  return v;
}

struct TableRow {
  std::size_t lineno = 0;  // 1-based physical line
  std::vector<std::string> cells;
};

// Reads all data lines of `path`, checking the exact header first.
std::vector<TableRow> read_table(const std::filesystem::path& path, const char* header,
                                 std::size_t columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv: " + path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw ValidationError("csv: " + path.string() + ": unexpected header '" + line + "'");

  std::vector<TableRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != columns)
      bad_row(path, lineno,
              "expected " + std::to_string(columns) + " columns, got " +
                  std::to_string(cells.size()));
    rows.push_back(TableRow{lineno, std::move(cells)});
  }
  return rows;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_window_csv(const std::filesystem::path& path, const std::vector<WindowRow>& rows) {
  auto out = open_out(path);
  out << kWindowCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.window << ',' << r.policy << ',' << format_real(r.tau) << ',' << format_real(r.phi)
        << ',' << r.q << ',' << r.n << ',' << format_real(r.c) << ',' << format_real(r.m) << ','
        << r.action << ',' << format_real(r.reward) << ',' << r.valid << '\n';
  }
  if (!out) throw ValidationError("csv: short write to " + path.string());
}

std::vector<WindowRow> read_window_csv(const std::filesystem::path& path) {
  const auto table = read_table(path, kWindowCsvHeader, 11);
  std::vector<WindowRow> rows;
  rows.reserve(table.size());
  for (const auto& [lineno, cells] : table) {
    WindowRow r;
    r.window = parse_long(cells[0], path, lineno);
    r.policy = cells[1];
    r.tau = parse_double(cells[2], path, lineno);
    r.phi = parse_double(cells[3], path, lineno);
    r.q = parse_long(cells[4], path, lineno);
    r.n = static_cast<int>(parse_long(cells[5], path, lineno));
    r.c = parse_double(cells[6], path, lineno);
    r.m = parse_double(cells[7], path, lineno);
    r.action = static_cast<int>(parse_long(cells[8], path, lineno));
    r.reward = parse_double(cells[9], path, lineno);
    r.valid = static_cast<int>(parse_long(cells[10], path, lineno));
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_episode_csv(const std::filesystem::path& path, const std::vector<EpisodeRow>& rows) {
  auto out = open_out(path);
  out << kEpisodeCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.episode << ',' << r.cursor << ',' << format_real(r.reward) << ','
        << format_real(r.phi) << ',' << format_real(r.replicas) << ',' << format_real(r.tau)
        << ',' << r.invalid << '\n';
  }
  if (!out) throw ValidationError("csv: short write to " + path.string());
}

std::vector<EpisodeRow> read_episode_csv(const std::filesystem::path& path) {
  const auto table = read_table(path, kEpisodeCsvHeader, 7);
  std::vector<EpisodeRow> rows;
  rows.reserve(table.size());
  for (const auto& [lineno, cells] : table) {
    EpisodeRow r;
    r.episode = parse_long(cells[0], path, lineno);
    r.cursor = parse_long(cells[1], path, lineno);
    r.reward = parse_double(cells[2], path, lineno);
    r.phi = parse_double(cells[3], path, lineno);
    r.replicas = parse_double(cells[4], path, lineno);
    r.tau = parse_double(cells[5], path, lineno);
    r.invalid = parse_long(cells[6], path, lineno);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace faaslab::cli
