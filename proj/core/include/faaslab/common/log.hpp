#pragma once

#include <string>

namespace faaslab::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3 };

// Threshold comes from FAAS_LAB_LOG (debug|info|warn|error), read once. Default: warn.
Level threshold();

void emit(Level level, const std::string& msg);

inline void debug(const std::string& msg) { emit(Level::Debug, msg); }
inline void info(const std::string& msg) { emit(Level::Info, msg); }
inline void warn(const std::string& msg) { emit(Level::Warn, msg); }
inline void error(const std::string& msg) { emit(Level::Error, msg); }

}  // namespace faaslab::log
