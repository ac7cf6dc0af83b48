#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ordstat/error.hpp"
#include "ordstat/real.hpp"

namespace ordstat {

/// Strictly increasing transformations of ranks 1..N.
enum class ScoreScheme {
  WilcoxonRanks,    ///< score(i) = i
  NormalScoresFYT,  ///< E[X_(i)] for N standard normal draws (Fisher-Yates-Terry)
  VanDerWaerden,    ///< standard normal quantile at i/(N+1)
  LaplaceScores,    ///< standard Laplace quantile at i/(N+1)
};

constexpr std::string_view scheme_name(ScoreScheme s) noexcept {
  switch (s) {
    case ScoreScheme::WilcoxonRanks: return "wilcoxon";
    case ScoreScheme::NormalScoresFYT: return "fyt";
    case ScoreScheme::VanDerWaerden: return "vdw";
    case ScoreScheme::LaplaceScores: return "laplace";
  }
  return "?";
}

inline std::optional<ScoreScheme> parse_scheme(std::string_view name) {
  for (auto s : {ScoreScheme::WilcoxonRanks, ScoreScheme::NormalScoresFYT, ScoreScheme::VanDerWaerden,
                 ScoreScheme::LaplaceScores}) {
    if (scheme_name(s) == name) return s;
  }
  return std::nullopt;
}

namespace detail {

// Expected value of the i-th smallest of N standard normals, for i in the
// upper half, integrated over [0, inf) after folding x -> -x:
//   x phi(x) [Phi^(i-1) (1-Phi)^(N-i) - Phi^(N-i) (1-Phi)^(i-1)]
inline Real expected_normal_order_statistic(unsigned i, unsigned n) {
  const Real root_two = boost::math::constants::root_two<Real>();
  const Real inv_root_two_pi = boost::math::constants::one_div_root_two_pi<Real>();
  const Real coefficient = boost::math::binomial_coefficient<Real>(n - 1, i - 1) * n;
  auto integrand = [&](const Real& x) -> Real {
    Real upper = boost::math::erfc(x / root_two) / 2;
    Real lower = 1 - upper;
    Real density = inv_root_two_pi * exp(-x * x / 2);
    return x * density *
           (pow(lower, i - 1) * pow(upper, n - i) - pow(lower, n - i) * pow(upper, i - 1));
  };
  boost::math::quadrature::exp_sinh<Real> quad;
  return coefficient * quad.integrate(integrand, boost::math::tools::epsilon<Real>());
}

inline Real normal_quantile(const Real& p) {
  return -boost::math::constants::root_two<Real>() * boost::math::erfc_inv(2 * p);
}

inline Real laplace_quantile(const Real& p) {
  if (p < Real(1) / 2) return log(2 * p);
  return -log(2 * (1 - p));
}

inline std::vector<Real> compute_scores(ScoreScheme scheme, unsigned n) {
  std::vector<Real> s(n);
  // Upper half only; the lower half is its exact negation.
  for (unsigned i = n; 2 * i >= n + 1; --i) {
    Real v;
    Real p = Real(i) / Real(n + 1);
    switch (scheme) {
      case ScoreScheme::WilcoxonRanks: v = Real(i); break;
      case ScoreScheme::NormalScoresFYT: v = 2 * i == n + 1 ? Real(0) : expected_normal_order_statistic(i, n); break;
      case ScoreScheme::VanDerWaerden: v = 2 * i == n + 1 ? Real(0) : normal_quantile(p); break;
      case ScoreScheme::LaplaceScores: v = 2 * i == n + 1 ? Real(0) : laplace_quantile(p); break;
    }
    s[i - 1] = v;
    if (scheme == ScoreScheme::WilcoxonRanks) {
      s[n - i] = Real(n + 1 - i);
    } else {
      s[n - i] = -v;
    }
    if (i == 1) break;
  }
  return s;
}

}  // namespace detail

/// Scores for ranks 1..N at `digits` significant digits (plus guard
/// digits), memoised per (scheme, N, digits).
inline std::shared_ptr<const std::vector<Real>> score_vector(ScoreScheme scheme, unsigned n, unsigned digits) {
  if (n == 0) throw Error(ErrorCode::InvalidSample, "score vector needs N >= 1");
  using Key = std::tuple<int, unsigned, unsigned>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const std::vector<Real>>> cache;
  Key key{static_cast<int>(scheme), n, digits};
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  PrecisionScope scope(digits);
  auto scores = std::make_shared<const std::vector<Real>>(detail::compute_scores(scheme, n));
  cache.emplace(key, scores);
  return scores;
}

}  // namespace ordstat
