#pragma once

#include <stdexcept>
#include <string>

namespace faaslab {

// Caller broke a documented precondition. Indicates a bug, not a domain outcome.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Bad user-supplied input: malformed files, out-of-range configuration.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime failure during learning or checkpoint IO (non-finite loss, truncated file).
class TrainingError : public std::runtime_error {
 public:
  explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

inline void contract(bool ok, const std::string& msg) {
  if (!ok) throw ContractViolation(msg);
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace faaslab
