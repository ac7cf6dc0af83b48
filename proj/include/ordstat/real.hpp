#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cstdlib>
#include <iomanip>
#include <ios>
#include <sstream>
#include <string>

#include "ordstat/error.hpp"
#include "ordstat/rational.hpp"

namespace ordstat {

/// Variable-precision binary float (MPFR). New values take the process-wide
/// default precision, which PrecisionScope manages.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

inline constexpr unsigned kDefaultPrecision = 50;
inline constexpr unsigned kMinPrecision = 4;
inline constexpr unsigned kMaxPrecision = 1000;
/// Extra decimal digits carried during score arithmetic beyond the declared
/// comparison precision.
inline constexpr unsigned kGuardDigits = 20;

inline unsigned checked_precision(long digits) {
  if (digits < static_cast<long>(kMinPrecision) || digits > static_cast<long>(kMaxPrecision)) {
    throw Error(ErrorCode::ParseError, "precision must be in [" + std::to_string(kMinPrecision) +
                                           ", " + std::to_string(kMaxPrecision) + "], got " +
                                           std::to_string(digits));
  }
  return static_cast<unsigned>(digits);
}

/// Precision from ORDSTAT_PRECISION, falling back to kDefaultPrecision.
inline unsigned precision_from_env() {
  const char* env = std::getenv("ORDSTAT_PRECISION");
  if (env == nullptr || *env == '\0') return kDefaultPrecision;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0') {
    throw Error(ErrorCode::ParseError, std::string("ORDSTAT_PRECISION is not an integer: ") + env);
  }
  return checked_precision(v);
}

/// Sets the MPFR working precision to `digits + kGuardDigits` for its
/// lifetime. The setting is process-wide: worker threads may read it, but
/// scopes must only be opened from the orchestrating thread.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits) : saved_(Real::default_precision()) {
    Real::default_precision(digits + kGuardDigits);
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

inline Real to_real(const Rational& q) { return Real(q); }

/// Scientific notation with `digits` significant digits.
inline std::string format_real(const Real& value, unsigned digits) {
  std::ostringstream out;
  out << std::scientific << std::setprecision(static_cast<int>(digits > 0 ? digits - 1 : 0)) << value;
  return out.str();
}

}  // namespace ordstat
