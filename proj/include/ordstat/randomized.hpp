#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ordstat/error.hpp"
#include "ordstat/order.hpp"
#include "ordstat/rational.hpp"
#include "ordstat/trial.hpp"

namespace ordstat {

/// Per outcome: low = P[f < f(x)] and atom = P[f = f(x)]. The randomized
/// p-value at (x, r) is low + r * atom.
class RandomizedPFunction {
 public:
  struct Entry {
    std::string label;
    Rational low;
    Rational atom;
  };

  RandomizedPFunction() = default;
  explicit RandomizedPFunction(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  const std::vector<Entry>& entries() const noexcept { return entries_; }

  const Entry& at(const std::string& label) const {
    for (const auto& e : entries_) {
      if (e.label == label) return e;
    }
    throw Error(ErrorCode::UnknownOutcome, "no outcome labelled '" + label + "'");
  }

 private:
  std::vector<Entry> entries_;
};

inline RandomizedPFunction build_randomized(const FiniteTrial& trial, const Statistic& stat,
                                            CompareContext* ctx = nullptr) {
  detail::TailMasses t = detail::tail_masses(trial, stat, ctx);
  std::vector<RandomizedPFunction::Entry> entries;
  entries.reserve(trial.size());
  for (std::size_t i = 0; i < trial.size(); ++i) entries.push_back({trial[i].label, t.low[i], t.atom[i]});
  return RandomizedPFunction(std::move(entries));
}

inline Rational randomized_pvalue(const RandomizedPFunction& rpf, const std::string& label, const Rational& r) {
  if (r < 0 || r > 1) throw Error(ErrorCode::ROutOfRange, "r = " + to_string(r) + " is outside [0,1]");
  const auto& e = rpf.at(label);
  return e.low + r * e.atom;
}

inline Rational mid_pvalue(const RandomizedPFunction& rpf, const std::string& label) {
  const auto& e = rpf.at(label);
  return e.low + e.atom / 2;
}

inline PFunction midp_function(const RandomizedPFunction& rpf) {
  std::vector<PFunction::Entry> entries;
  entries.reserve(rpf.entries().size());
  for (const auto& e : rpf.entries()) entries.emplace_back(e.label, e.low + e.atom / 2);
  return PFunction(std::move(entries));
}

/// Classifies the mid-p-function of `stat`; NotPFunction is a legitimate
/// answer.
inline PFunctionClass midp_validity_check(const FiniteTrial& trial, const Statistic& stat,
                                          CompareContext* ctx = nullptr) {
  return classify_pfunction(trial, midp_function(build_randomized(trial, stat, ctx)));
}

/// P-bar[F-hat <= eps] under P x Uniform[0,1], computed in closed form. For
/// outcome x the set of r with low + r*atom <= eps has Lebesgue measure
/// clamp((eps - low)/atom, 0, 1); zero-atom outcomes contribute the
/// indicator of low <= eps.
inline Rational exactness_cdf(const RandomizedPFunction& rpf, const FiniteTrial& trial, const Rational& eps) {
  if (eps < 0 || eps > 1) throw Error(ErrorCode::EpsOutOfRange, "epsilon = " + to_string(eps) + " is outside [0,1]");
  Rational total = 0;
  for (const auto& o : trial.outcomes()) {
    const auto& e = rpf.at(o.label);
    Rational measure;
    if (e.atom > 0) {
      measure = (eps - e.low) / e.atom;
      if (measure < 0) measure = 0;
      if (measure > 1) measure = 1;
    } else {
      measure = e.low <= eps ? 1 : 0;
    }
    total += o.prob * measure;
  }
  return total;
}

/// Identifies the lexicographic refinement F(x, r) = (f(x), r) with the
/// closed form low + r*atom. The uniform component is discretised to
/// {1/N, ..., N/N} with weights 1/N; the induced p-function of F on the
/// product trial must equal the closed form at every grid point.
inline bool lex_equivalence_check(const FiniteTrial& trial, const Statistic& stat, unsigned grid_n,
                                  CompareContext* ctx = nullptr) {
  if (grid_n == 0) throw Error(ErrorCode::InvalidTrial, "grid size must be positive");
  RandomizedPFunction rpf = build_randomized(trial, stat, ctx);
  std::vector<OrdValue> base = stat.aligned(trial);

  std::vector<Outcome> outcomes;
  std::map<std::string, OrdValue> refined;
  std::vector<std::pair<std::size_t, Rational>> grid_point;
  outcomes.reserve(trial.size() * grid_n);
  for (std::size_t i = 0; i < trial.size(); ++i) {
    for (unsigned k = 1; k <= grid_n; ++k) {
      Rational r(k, grid_n);
      std::string label = std::to_string(i) + "#" + std::to_string(k);
      outcomes.push_back({label, trial[i].prob / grid_n});
      refined.emplace(label, lex_tuple({base[i], OrdValue::rational(r)}));
      grid_point.emplace_back(i, r);
    }
  }
  FiniteTrial product(std::move(outcomes));
  PFunction phat = induce_phat(product, Statistic(std::move(refined)), ctx);

  const auto& entries = phat.entries();
  for (std::size_t j = 0; j < entries.size(); ++j) {
    const auto& [i, r] = grid_point[j];
    if (entries[j].second != randomized_pvalue(rpf, trial[i].label, r)) return false;
  }
  return true;
}

/// Deterministic r = k / 2^64 from a 64-bit draw of mt19937_64 seeded with
/// `seed`. The engine's output sequence is fixed by the standard, so the
/// value is reproducible across platforms.
inline Rational draw_r(std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  Integer k(engine());
  Integer two64 = Integer(1) << 64;
  return Rational(k, two64);
}

}  // namespace ordstat
