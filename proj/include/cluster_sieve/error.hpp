#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace csieve {

enum class ErrorKind {
  InvalidArgument,
  DegenerateTrace,   // K-means produced an empty cluster at some step
  DegenerateWithin,  // every cluster of interest is a singleton, d* = 0
  ZeroStatistic,     // ||P_E X||_F or ||P_1 X||_F is exactly zero
  ZeroMassSet,       // truncation set has no representable mass
  EmptySelection,    // a selection rule chose no pair
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Everything except bad input is a "not available" outcome: the test ran
  // but has no p-value to report.
  bool not_available() const noexcept {
    return kind_ != ErrorKind::InvalidArgument;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace csieve
