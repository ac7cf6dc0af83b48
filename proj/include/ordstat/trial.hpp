#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ordstat/error.hpp"
#include "ordstat/order.hpp"
#include "ordstat/rational.hpp"
#include "ordstat/tie_classes.hpp"

namespace ordstat {

struct Outcome {
  std::string label;
  Rational prob;
};

/// A finite probability space with the discrete sigma-algebra. Probabilities
/// are non-negative exact rationals summing to exactly one.
class FiniteTrial {
 public:
  explicit FiniteTrial(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
    if (outcomes_.empty()) throw Error(ErrorCode::InvalidTrial, "a trial needs at least one outcome");
    Rational total = 0;
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
      const auto& o = outcomes_[i];
      if (o.prob < 0) throw Error(ErrorCode::InvalidTrial, "negative probability for outcome '" + o.label + "'");
      if (!index_.emplace(o.label, i).second) {
        throw Error(ErrorCode::InvalidTrial, "duplicate outcome label '" + o.label + "'");
      }
      total += o.prob;
    }
    if (total != 1) throw Error(ErrorCode::InvalidTrial, "probabilities sum to " + to_string(total) + ", not 1");
  }

  std::size_t size() const noexcept { return outcomes_.size(); }
  const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
  const Outcome& operator[](std::size_t i) const { return outcomes_.at(i); }

  std::optional<std::size_t> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t index_of(const std::string& label) const {
    auto i = find(label);
    if (!i) throw Error(ErrorCode::UnknownOutcome, "no outcome labelled '" + label + "'");
    return *i;
  }

  /// Labels of outcomes with probability zero.
  std::vector<std::string> zero_probability_labels() const {
    std::vector<std::string> out;
    for (const auto& o : outcomes_) {
      if (o.prob == 0) out.push_back(o.label);
    }
    return out;
  }

 private:
  std::vector<Outcome> outcomes_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// A test statistic: a map from outcome labels to values of one shape.
class Statistic {
 public:
  Statistic() = default;
  explicit Statistic(std::map<std::string, OrdValue> values) : values_(std::move(values)) {
    if (values_.empty()) return;
    const OrdValue& first = values_.begin()->second;
    for (const auto& [label, v] : values_) {
      if (!same_shape(first, v)) {
        throw Error(ErrorCode::ShapeMismatch, "statistic value for '" + label + "' has shape " + shape_string(v) +
                                                  ", expected " + shape_string(first));
      }
    }
  }

  const std::map<std::string, OrdValue>& values() const noexcept { return values_; }

  /// Values in the trial's outcome order. The statistic must be defined on
  /// exactly the trial's outcomes.
  std::vector<OrdValue> aligned(const FiniteTrial& trial) const {
    std::vector<OrdValue> out;
    out.reserve(trial.size());
    for (const auto& o : trial.outcomes()) {
      auto it = values_.find(o.label);
      if (it == values_.end()) throw Error(ErrorCode::MissingOutcome, "statistic undefined on outcome '" + o.label + "'");
      out.push_back(it->second);
    }
    if (values_.size() != trial.size()) {
      for (const auto& [label, v] : values_) {
        if (!trial.find(label)) throw Error(ErrorCode::UnknownOutcome, "statistic defined on unknown outcome '" + label + "'");
      }
    }
    return out;
  }

 private:
  std::map<std::string, OrdValue> values_;
};

/// A [0,1]-valued function on outcomes, kept in trial order.
class PFunction {
 public:
  using Entry = std::pair<std::string, Rational>;

  PFunction() = default;
  explicit PFunction(std::vector<Entry> entries) : entries_(std::move(entries)) {
    for (const auto& [label, v] : entries_) {
      if (v < 0 || v > 1) {
        throw Error(ErrorCode::InvalidPFunction, "value " + to_string(v) + " for '" + label + "' is outside [0,1]");
      }
    }
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  const Rational& at(const std::string& label) const {
    for (const auto& [l, v] : entries_) {
      if (l == label) return v;
    }
    throw Error(ErrorCode::UnknownOutcome, "p-function undefined on '" + label + "'");
  }

  /// Values in the trial's outcome order.
  std::vector<Rational> aligned(const FiniteTrial& trial) const {
    std::unordered_map<std::string, const Rational*> by_label;
    for (const auto& [l, v] : entries_) by_label.emplace(l, &v);
    std::vector<Rational> out;
    out.reserve(trial.size());
    for (const auto& o : trial.outcomes()) {
      auto it = by_label.find(o.label);
      if (it == by_label.end()) throw Error(ErrorCode::MissingOutcome, "p-function undefined on outcome '" + o.label + "'");
      out.push_back(*it->second);
    }
    return out;
  }

  /// The same values viewed as a Rational-valued statistic.
  Statistic as_statistic() const {
    std::map<std::string, OrdValue> m;
    for (const auto& [l, v] : entries_) m.emplace(l, OrdValue::rational(v));
    return Statistic(std::move(m));
  }

  friend bool operator==(const PFunction& a, const PFunction& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<Entry> entries_;
};

struct PFunctionClass {
  enum class Kind { NotPFunction, Conservative, RangeExact };
  Kind kind = Kind::RangeExact;
  /// For NotPFunction: the smallest attained value v with P[f <= v] > v.
  std::optional<Rational> witness;
  /// P[f <= witness].
  std::optional<Rational> witness_mass;
};

constexpr const char* to_string(PFunctionClass::Kind k) noexcept {
  switch (k) {
    case PFunctionClass::Kind::NotPFunction: return "NotPFunction";
    case PFunctionClass::Kind::Conservative: return "Conservative";
    case PFunctionClass::Kind::RangeExact: return "RangeExact";
  }
  return "?";
}

namespace detail {

/// Per-outcome P[f < f(x)] and P[f = f(x)].
struct TailMasses {
  std::vector<Rational> low;
  std::vector<Rational> atom;
  TieClasses classes;
  std::vector<Rational> class_mass;
};

inline TailMasses tail_masses(const FiniteTrial& trial, const Statistic& stat, CompareContext* ctx) {
  std::vector<OrdValue> values = stat.aligned(trial);
  TailMasses t;
  t.classes = tie_classes(values, ctx);
  t.class_mass.assign(t.classes.count, Rational(0));
  for (std::size_t i = 0; i < trial.size(); ++i) t.class_mass[t.classes.class_of[i]] += trial[i].prob;
  std::vector<Rational> below(t.classes.count, Rational(0));
  for (std::size_t c = 1; c < t.classes.count; ++c) below[c] = below[c - 1] + t.class_mass[c - 1];
  t.low.reserve(trial.size());
  t.atom.reserve(trial.size());
  for (std::size_t i = 0; i < trial.size(); ++i) {
    t.low.push_back(below[t.classes.class_of[i]]);
    t.atom.push_back(t.class_mass[t.classes.class_of[i]]);
  }
  return t;
}

}  // namespace detail

/// The induced p-function: x -> P[f <= f(x)], in exact arithmetic.
inline PFunction induce_phat(const FiniteTrial& trial, const Statistic& stat, CompareContext* ctx = nullptr) {
  detail::TailMasses t = detail::tail_masses(trial, stat, ctx);
  std::vector<PFunction::Entry> entries;
  entries.reserve(trial.size());
  for (std::size_t i = 0; i < trial.size(); ++i) entries.emplace_back(trial[i].label, t.low[i] + t.atom[i]);
  return PFunction(std::move(entries));
}

/// Distinct values of f in ascending order with the probability of each
/// preimage. The representative of a tie class is its first outcome in
/// trial order.
inline std::vector<std::pair<OrdValue, Rational>> induced_measure(const FiniteTrial& trial, const Statistic& stat,
                                                                  CompareContext* ctx = nullptr) {
  std::vector<OrdValue> values = stat.aligned(trial);
  TieClasses classes = tie_classes(values, ctx);
  std::vector<std::optional<OrdValue>> reps(classes.count);
  std::vector<Rational> mass(classes.count, Rational(0));
  for (std::size_t i = 0; i < trial.size(); ++i) {
    std::size_t c = classes.class_of[i];
    if (!reps[c]) reps[c] = values[i];
    mass[c] += trial[i].prob;
  }
  std::vector<std::pair<OrdValue, Rational>> out;
  out.reserve(classes.count);
  for (std::size_t c = 0; c < classes.count; ++c) out.emplace_back(*reps[c], mass[c]);
  return out;
}

/// Recomputes the induced p-function of the induced p-function and checks
/// it reproduces the original exactly (an induced statistic is
/// self-induced).
inline bool check_idempotence(const FiniteTrial& trial, const Statistic& stat, CompareContext* ctx = nullptr) {
  PFunction once = induce_phat(trial, stat, ctx);
  PFunction twice = induce_phat(trial, once.as_statistic());
  return once == twice;
}

/// Checks P[f <= v] against v at each attained value v.
inline PFunctionClass classify_pfunction(const FiniteTrial& trial, const PFunction& pfunc) {
  std::vector<Rational> values = pfunc.aligned(trial);
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  PFunctionClass out;
  bool range_exact = true;
  Rational cumulative = 0;
  for (std::size_t k = 0; k < order.size();) {
    const Rational& v = values[order[k]];
    while (k < order.size() && values[order[k]] == v) cumulative += trial[order[k++]].prob;
    if (cumulative > v) {
      out.kind = PFunctionClass::Kind::NotPFunction;
      out.witness = v;
      out.witness_mass = cumulative;
      return out;
    }
    if (cumulative != v) range_exact = false;
  }
  out.kind = range_exact ? PFunctionClass::Kind::RangeExact : PFunctionClass::Kind::Conservative;
  return out;
}

/// P[f <= eps] for an arbitrary threshold, by direct summation.
inline Rational pfunction_cdf(const FiniteTrial& trial, const PFunction& pfunc, const Rational& eps) {
  std::vector<Rational> values = pfunc.aligned(trial);
  Rational mass = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= eps) mass += trial[i].prob;
  }
  return mass;
}

/// Per-outcome flag: whether P[F <= F(x)] = F(x), i.e. the p-value at x is
/// exact rather than conservative.
inline std::vector<bool> exact_pvalue_flags(const FiniteTrial& trial, const PFunction& pfunc) {
  std::vector<Rational> values = pfunc.aligned(trial);
  std::vector<bool> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(pfunction_cdf(trial, pfunc, v) == v);
  return out;
}

/// x -> min(1, c * f(x)).
inline PFunction scale_pfunction(const PFunction& pfunc, const Rational& c) {
  if (c < 1) throw Error(ErrorCode::ScaleBelowOne, "scale factor " + to_string(c) + " is below 1");
  std::vector<PFunction::Entry> entries;
  entries.reserve(pfunc.size());
  for (const auto& [label, v] : pfunc.entries()) {
    Rational scaled = c * v;
    entries.emplace_back(label, scaled > 1 ? Rational(1) : scaled);
  }
  return PFunction(std::move(entries));
}

/// Product measure. Labels are joined with `separator`; a collision between
/// joined labels is reported as an invalid trial.
inline FiniteTrial product_trial(const FiniteTrial& first, const FiniteTrial& second,
                                 const std::string& separator = "") {
  std::vector<Outcome> outcomes;
  outcomes.reserve(first.size() * second.size());
  for (const auto& a : first.outcomes()) {
    for (const auto& b : second.outcomes()) outcomes.push_back({a.label + separator + b.label, a.prob * b.prob});
  }
  return FiniteTrial(std::move(outcomes));
}

}  // namespace ordstat
