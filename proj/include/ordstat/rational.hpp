#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <regex>
#include <string>
#include <string_view>

#include "ordstat/error.hpp"

namespace ordstat {

/// Exact rational backed by GMP's mpq_t; always kept in lowest terms.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;

/// Parses "p/q" or "p" (optionally signed). Decimal notation is rejected so
/// that probabilities can never silently be rounded.
inline Rational parse_rational(std::string_view text) {
  static const std::regex grammar(R"(^\s*([+-]?[0-9]+)(?:\s*/\s*([0-9]+))?\s*$)");
  std::string s(text);
  std::smatch match;
  if (!std::regex_match(s, match, grammar)) {
    throw Error(ErrorCode::ParseError, "not an exact rational: \"" + s + "\"");
  }
  Integer num(match[1].str().front() == '+' ? match[1].str().substr(1) : match[1].str());
  Integer den(1);
  if (match[2].matched) {
    den = Integer(match[2].str());
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in \"" + s + "\"");
  }
  return Rational(num, den);
}

/// Parses a finite decimal such as "-12.375" or "1.5e-3" into the exact
/// rational it denotes. Integers and "p/q" are accepted too.
inline Rational parse_decimal(std::string_view text) {
  static const std::regex grammar(R"(^\s*([+-]?)([0-9]*)(?:\.([0-9]*))?(?:[eE]([+-]?[0-9]+))?\s*$)");
  std::string s(text);
  if (s.find('/') != std::string::npos) return parse_rational(s);
  std::smatch match;
  if (!std::regex_match(s, match, grammar) ||
      (match[2].length() == 0 && match[3].length() == 0)) {
    throw Error(ErrorCode::ParseError, "not a decimal number: \"" + s + "\"");
  }
  std::string digits = match[2].str() + match[3].str();
  long exponent = -static_cast<long>(match[3].length());
  if (match[4].matched) {
    try {
      exponent += std::stol(match[4].str());
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "exponent out of range in \"" + s + "\"");
    }
  }
  if (exponent > 4096 || exponent < -4096) {
    throw Error(ErrorCode::ParseError, "exponent out of range in \"" + s + "\"");
  }
  Integer mantissa(digits.empty() ? std::string("0") : digits);
  if (match[1].str() == "-") mantissa = -mantissa;
  Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  return exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
}

/// Lowest-terms text form: "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& value) { return value.str(); }

}  // namespace ordstat
