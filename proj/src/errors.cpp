#include "kn/errors.hpp"

namespace kn {

const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::UndefinedOrder: return "UndefinedOrder";
    case ErrorKind::WeightMismatch: return "WeightMismatch";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TruncationOverflow: return "TruncationOverflow";
    case ErrorKind::NotScalar: return "NotScalar";
    case ErrorKind::CriticalLevel: return "CriticalLevel";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::NotStabilized: return "NotStabilized";
    case ErrorKind::Usage: return "Usage";
  }
  return "Unknown";
}

}  // namespace kn
