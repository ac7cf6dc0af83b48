#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ordstat/error.hpp"
#include "ordstat/rational.hpp"
#include "ordstat/real.hpp"

namespace ordstat {

enum class Ordering { LT, EQ, GT };

constexpr const char* to_string(Ordering o) noexcept {
  switch (o) {
    case Ordering::LT: return "LT";
    case Ordering::EQ: return "EQ";
    case Ordering::GT: return "GT";
  }
  return "?";
}

/// Fixed-precision real. `digits` is the number of significant decimal
/// digits the value is trusted to; it sets the tie tolerance in compare().
struct Score {
  Real value;
  unsigned digits = kDefaultPrecision;
};

struct Rank {
  std::int64_t value = 0;
};

/// Accumulates side information from comparisons. A comparison that returns
/// EQ only because two Scores agree within tolerance (but are not bitwise
/// equal) marks the context imprecise.
struct CompareContext {
  std::size_t imprecise_ties = 0;
  bool imprecise() const noexcept { return imprecise_ties > 0; }
};

/// A value in a totally ordered codomain. Immutable; tuples share their
/// component storage, so copies are cheap.
class OrdValue {
 public:
  using Tuple = std::vector<OrdValue>;
  enum class Kind { Rational, Score, Rank, Tuple };

  static OrdValue rational(Rational q) { return OrdValue(Storage(std::move(q))); }
  static OrdValue score(Real value, unsigned digits = kDefaultPrecision) {
    return OrdValue(Storage(Score{std::move(value), digits}));
  }
  static OrdValue rank(std::int64_t r) { return OrdValue(Storage(Rank{r})); }

  Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }

  const Rational& as_rational() const { return get<Rational>("Rational"); }
  const Score& as_score() const { return get<Score>("Score"); }
  std::int64_t as_rank() const { return get<Rank>("Rank").value; }
  const Tuple& components() const { return *get<std::shared_ptr<const Tuple>>("Tuple"); }

  friend OrdValue lex_tuple(std::vector<OrdValue> components);

 private:
  using Storage = std::variant<Rational, Score, Rank, std::shared_ptr<const Tuple>>;
  explicit OrdValue(Storage s) : data_(std::move(s)) {}

  template <typename T>
  const T& get(const char* name) const {
    if (const T* p = std::get_if<T>(&data_)) return *p;
    throw Error(ErrorCode::ShapeMismatch, std::string("value is not a ") + name);
  }

  Storage data_;
};

/// Builds a tuple ordered lexicographically: the first unequal component
/// decides. Nested tuples order exactly like their flattening.
inline OrdValue lex_tuple(std::vector<OrdValue> components) {
  if (components.empty()) throw Error(ErrorCode::EmptyTuple, "lex_tuple needs at least one component");
  return OrdValue(OrdValue::Storage(std::make_shared<const OrdValue::Tuple>(std::move(components))));
}

inline bool same_shape(const OrdValue& a, const OrdValue& b) {
  if (a.kind() != b.kind()) return false;
  if (a.kind() != OrdValue::Kind::Tuple) return true;
  const auto& ca = a.components();
  const auto& cb = b.components();
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (!same_shape(ca[i], cb[i])) return false;
  }
  return true;
}

inline std::string shape_string(const OrdValue& v) {
  switch (v.kind()) {
    case OrdValue::Kind::Rational: return "Rational";
    case OrdValue::Kind::Score: return "Score";
    case OrdValue::Kind::Rank: return "Rank";
    case OrdValue::Kind::Tuple: {
      std::string s = "Tuple[";
      const auto& c = v.components();
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ", ";
        s += shape_string(c[i]);
      }
      return s + "]";
    }
  }
  return "?";
}

namespace detail {

/// 10^(2-digits), the relative tie tolerance for Scores. Cached per
/// (digits, working precision) pair on each thread.
inline const Real& score_tolerance(unsigned digits) {
  thread_local unsigned cached_digits = 0;
  thread_local unsigned cached_working = 0;
  thread_local Real cached;
  unsigned working = Real::default_precision();
  if (digits != cached_digits || working != cached_working) {
    cached = pow(Real(10), 2 - static_cast<int>(digits));
    cached_digits = digits;
    cached_working = working;
  }
  return cached;
}

inline Ordering compare_scores(const Score& a, const Score& b, CompareContext* ctx) {
  if (a.value == b.value) return Ordering::EQ;
  Real diff = abs(a.value - b.value);
  Real scale = abs(a.value);
  if (Real other = abs(b.value); other > scale) scale = other;
  if (scale < 1) scale = 1;
  if (diff <= score_tolerance(a.digits < b.digits ? a.digits : b.digits) * scale) {
    if (ctx) ++ctx->imprecise_ties;
    return Ordering::EQ;
  }
  return a.value < b.value ? Ordering::LT : Ordering::GT;
}

template <typename T>
Ordering three_way(const T& a, const T& b) {
  return a < b ? Ordering::LT : (b < a ? Ordering::GT : Ordering::EQ);
}

inline Ordering compare_unchecked(const OrdValue& a, const OrdValue& b, CompareContext* ctx) {
  switch (a.kind()) {
    case OrdValue::Kind::Rational: return three_way(a.as_rational(), b.as_rational());
    case OrdValue::Kind::Rank: return three_way(a.as_rank(), b.as_rank());
    case OrdValue::Kind::Score: return compare_scores(a.as_score(), b.as_score(), ctx);
    case OrdValue::Kind::Tuple: {
      const auto& ca = a.components();
      const auto& cb = b.components();
      for (std::size_t i = 0; i < ca.size(); ++i) {
        Ordering o = compare_unchecked(ca[i], cb[i], ctx);
        if (o != Ordering::EQ) return o;
      }
      return Ordering::EQ;
    }
  }
  return Ordering::EQ;
}

}  // namespace detail

/// Total order on values of one shape. Rationals and ranks compare exactly;
/// Scores within 10^(2-digits) relative distance (floored at absolute
/// distance 10^(2-digits)) compare EQ and are counted in `ctx`.
inline Ordering compare(const OrdValue& a, const OrdValue& b, CompareContext* ctx = nullptr) {
  if (!same_shape(a, b)) {
    throw Error(ErrorCode::ShapeMismatch, "cannot compare " + shape_string(a) + " with " + shape_string(b));
  }
  return detail::compare_unchecked(a, b, ctx);
}

/// Explicit conversion; there is no implicit coercion between shapes.
inline OrdValue rank_to_rational(const OrdValue& v) { return OrdValue::rational(Rational(v.as_rank())); }

/// Report form: "p/q" for rationals, integers for ranks, scientific
/// notation at the declared precision for scores, "(a, b, ...)" for tuples.
inline std::string to_string(const OrdValue& v) {
  switch (v.kind()) {
    case OrdValue::Kind::Rational: return to_string(v.as_rational());
    case OrdValue::Kind::Rank: return std::to_string(v.as_rank());
    case OrdValue::Kind::Score: return format_real(v.as_score().value, v.as_score().digits);
    case OrdValue::Kind::Tuple: {
      std::string s = "(";
      const auto& c = v.components();
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ", ";
        s += to_string(c[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

}  // namespace ordstat
