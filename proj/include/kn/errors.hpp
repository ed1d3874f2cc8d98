#pragma once

#include <stdexcept>
#include <string>

namespace kn {

enum class ErrorKind {
  ZeroDenominator,
  UndefinedOrder,
  WeightMismatch,
  WindowTooSmall,
  DimensionMismatch,
  TruncationOverflow,
  NotScalar,
  CriticalLevel,
  Inconsistent,
  NotStabilized,
  Usage,
};

const char* error_name(ErrorKind k);

class KnError : public std::runtime_error {
 public:
  KnError(ErrorKind k, const std::string& what) : std::runtime_error(std::string(error_name(k)) + ": " + what), kind_(k) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kn
