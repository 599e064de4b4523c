#include "faaslab/common/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace faaslab::log {

static Level parse_level(const char* s) {
  if (s == nullptr) return Level::Warn;
  if (std::strcmp(s, "debug") == 0) return Level::Debug;
  if (std::strcmp(s, "info") == 0) return Level::Info;
  if (std::strcmp(s, "warn") == 0) return Level::Warn;
  if (std::strcmp(s, "error") == 0) return Level::Error;
  return Level::Warn;
}

Level threshold() {
  static Level lvl = parse_level(std::getenv("FAAS_LAB_LOG"));
  return lvl;
}

void emit(Level level, const std::string& msg) {
  if (level < threshold()) return;
  static const char* names[] = {"debug", "info", "warn", "error"};
  std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

}  // namespace faaslab::log
