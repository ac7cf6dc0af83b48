#pragma once

// Random trials and brute-force oracles shared by the property tests and
// the acceptance binary. The oracles use only pairwise compare() and plain
// summation, never the library's tie-class machinery.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ordstat/order.hpp"
#include "ordstat/trial.hpp"

namespace ordstat::testing {

struct GeneratedCase {
  FiniteTrial trial;
  Statistic stat;
};

inline OrdValue random_value(std::mt19937_64& rng, int shape) {
  std::uniform_int_distribution<int> small(0, 3);
  switch (shape) {
    case 0: return OrdValue::rank(small(rng));
    case 1: return OrdValue::rational(Rational(small(rng), 3));
    case 2: return lex_tuple({OrdValue::rank(small(rng)), OrdValue::rational(Rational(small(rng), 2))});
    case 3:
      return lex_tuple({lex_tuple({OrdValue::rank(small(rng) % 2), OrdValue::rank(small(rng))}),
                        OrdValue::rational(Rational(small(rng), 5))});
    default: return OrdValue::score(Real(small(rng)) / 4);
  }
}

/// A trial with 2..12 outcomes, random rational probabilities (some of them
/// zero) and a statistic of a random shape whose small value range forces
/// ties.
inline GeneratedCase random_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(2, 12), weight(0, 12), shape(0, 4);
  const int n = size(rng);
  std::vector<long> w(n);
  long total = 0;
  for (auto& x : w) total += (x = weight(rng));
  if (total == 0) total = w[0] = 1;
  const int sh = shape(rng);
  std::vector<Outcome> outcomes;
  std::map<std::string, OrdValue> values;
  for (int i = 0; i < n; ++i) {
    std::string label = "w" + std::to_string(i);
    outcomes.push_back({label, Rational(w[i], total)});
    values.emplace(label, random_value(rng, sh));
  }
  return {FiniteTrial(std::move(outcomes)), Statistic(std::move(values))};
}

inline std::vector<GeneratedCase> random_cases(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GeneratedCase> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_case(rng));
  return out;
}

struct LowAtom {
  Rational low, atom;
};

/// P[f < f(x)] and P[f = f(x)] by summing over every pair.
inline std::vector<LowAtom> oracle_low_atom(const FiniteTrial& trial, const Statistic& stat) {
  auto f = stat.aligned(trial);
  std::vector<LowAtom> out(trial.size());
  for (std::size_t x = 0; x < trial.size(); ++x) {
    for (std::size_t y = 0; y < trial.size(); ++y) {
      Ordering o = compare(f[y], f[x]);
      if (o == Ordering::LT) out[x].low += trial[y].prob;
      if (o == Ordering::EQ) out[x].atom += trial[y].prob;
    }
  }
  return out;
}

inline std::vector<Rational> oracle_phat(const FiniteTrial& trial, const Statistic& stat) {
  std::vector<Rational> out;
  for (const auto& la : oracle_low_atom(trial, stat)) out.push_back(la.low + la.atom);
  return out;
}

/// P[p <= eps] for p given per outcome in trial order.
inline Rational oracle_cdf(const FiniteTrial& trial, const std::vector<Rational>& p, const Rational& eps) {
  Rational s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= eps) s += trial[i].prob;
  }
  return s;
}

/// Measure of {(x, r) : low(x) + r atom(x) <= eps} under P x Uniform[0,1].
inline Rational oracle_randomized_cdf(const FiniteTrial& trial, const std::vector<LowAtom>& la, const Rational& eps) {
  Rational s = 0;
  for (std::size_t i = 0; i < la.size(); ++i) {
    Rational measure;
    if (la[i].atom == 0) {
      measure = la[i].low <= eps ? 1 : 0;
    } else {
      measure = (eps - la[i].low) / la[i].atom;
      if (measure < 0) measure = 0;
      if (measure > 1) measure = 1;
    }
    s += trial[i].prob * measure;
  }
  return s;
}

inline FiniteTrial make_trial(std::initializer_list<std::pair<const char*, Rational>> items) {
  std::vector<Outcome> v;
  for (const auto& [l, p] : items) v.push_back({l, p});
  return FiniteTrial(std::move(v));
}

inline Statistic make_ranks(std::initializer_list<std::pair<const char*, std::int64_t>> items) {
  std::map<std::string, OrdValue> m;
  for (const auto& [l, r] : items) m.emplace(l, OrdValue::rank(r));
  return Statistic(std::move(m));
}

}  // namespace ordstat::testing
