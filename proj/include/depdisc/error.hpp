#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace depdisc {

/// Malformed input data (unreadable file, ragged CSV row). CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// API contract violation: out-of-range row id, reflexive pair, empty
/// attribute set where one is required.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Request exceeds configured limits (oracle input size). CLI exit code 3.
class LimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A task failed inside a cluster stage; carries the worker that failed.
class StageError : public std::runtime_error {
 public:
  StageError(uint32_t worker, const std::string& message)
      : std::runtime_error("worker " + std::to_string(worker) + ": " + message),
        worker_(worker) {}

  uint32_t worker() const { return worker_; }

 private:
  uint32_t worker_;
};

}  // namespace depdisc
