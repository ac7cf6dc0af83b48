#pragma once

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <iterator>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ordstat/combinations.hpp"
#include "ordstat/error.hpp"
#include "ordstat/order.hpp"
#include "ordstat/rational.hpp"
#include "ordstat/real.hpp"
#include "ordstat/scores.hpp"
#include "ordstat/tie_classes.hpp"

namespace ordstat {

/// Two groups of pairwise distinct real observations held as exact
/// rationals. The x group plays the role tested for being smaller.
class TwoSample {
 public:
  TwoSample(std::vector<Rational> xs, std::vector<Rational> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.empty() || ys_.empty()) throw Error(ErrorCode::InvalidSample, "both groups need at least one observation");
    std::vector<Rational> pooled = pooled_values();
    std::sort(pooled.begin(), pooled.end());
    auto dup = std::adjacent_find(pooled.begin(), pooled.end());
    if (dup != pooled.end()) {
      throw Error(ErrorCode::DuplicateObservations, "observation " + to_string(*dup) + " occurs more than once");
    }
  }

  const std::vector<Rational>& xs() const noexcept { return xs_; }
  const std::vector<Rational>& ys() const noexcept { return ys_; }
  unsigned m() const noexcept { return static_cast<unsigned>(xs_.size()); }
  unsigned n() const noexcept { return static_cast<unsigned>(ys_.size()); }
  unsigned size() const noexcept { return m() + n(); }

  TwoSample swapped() const { return TwoSample(ys_, xs_); }

  /// 1-based ranks of the xs among all m+n observations, ascending.
  std::vector<unsigned> x_ranks() const {
    std::vector<Rational> pooled = pooled_values();
    std::vector<unsigned> order(pooled.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](unsigned a, unsigned b) { return pooled[a] < pooled[b]; });
    std::vector<unsigned> ranks;
    ranks.reserve(m());
    for (unsigned r = 0; r < order.size(); ++r) {
      if (order[r] < m()) ranks.push_back(r + 1);
    }
    return ranks;
  }

 private:
  std::vector<Rational> pooled_values() const {
    std::vector<Rational> pooled = xs_;
    pooled.insert(pooled.end(), ys_.begin(), ys_.end());
    return pooled;
  }

  std::vector<Rational> xs_;
  std::vector<Rational> ys_;
};

struct CascadeComponent {
  bool student_t = false;
  ScoreScheme scheme = ScoreScheme::WilcoxonRanks;

  static CascadeComponent of(ScoreScheme s) { return {false, s}; }
  static CascadeComponent t() { return {true, ScoreScheme::WilcoxonRanks}; }

  std::string name() const { return student_t ? "t" : std::string(scheme_name(scheme)); }
};

/// An ordered list of two-sample statistics compared lexicographically:
/// later components only break ties left by earlier ones. Student's t, if
/// present, must come last.
class CascadeStatistic {
 public:
  explicit CascadeStatistic(std::vector<CascadeComponent> components) : components_(std::move(components)) {
    if (components_.empty()) throw Error(ErrorCode::InvalidCascade, "cascade must have at least one component");
    for (std::size_t i = 0; i + 1 < components_.size(); ++i) {
      if (components_[i].student_t) throw Error(ErrorCode::InvalidCascade, "'t' may only appear as the last component");
    }
  }

  /// Parses a comma-separated list of `wilcoxon`, `fyt`, `vdw`, `laplace`, `t`.
  static CascadeStatistic parse(std::string_view list) {
    std::vector<CascadeComponent> out;
    std::size_t start = 0;
    while (start <= list.size()) {
      std::size_t comma = list.find(',', start);
      std::string_view item = list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
      if (item == "t") {
        out.push_back(CascadeComponent::t());
      } else if (auto s = parse_scheme(item)) {
        out.push_back(CascadeComponent::of(*s));
      } else {
        throw Error(ErrorCode::InvalidCascade, "unknown cascade component '" + std::string(item) + "'");
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return CascadeStatistic(std::move(out));
  }

  const std::vector<CascadeComponent>& components() const noexcept { return components_; }
  bool has_student_t() const noexcept { return components_.back().student_t; }

  CascadeStatistic extended(CascadeComponent c) const {
    auto comps = components_;
    comps.push_back(c);
    return CascadeStatistic(std::move(comps));
  }

  std::string to_string() const {
    std::string s;
    for (const auto& c : components_) {
      if (!s.empty()) s += ",";
      s += c.name();
    }
    return s;
  }

 private:
  std::vector<CascadeComponent> components_;
};

struct EnumerationOptions {
  unsigned digits = kDefaultPrecision;
  std::uint64_t max_enum = 10'000'000;
  unsigned workers = 1;
};

inline std::int64_t rank_sum(const TwoSample& sample) {
  std::int64_t total = 0;
  for (unsigned r : sample.x_ranks()) total += r;
  return total;
}

/// Sum over the xs of the scheme's score at each x's rank.
inline OrdValue score_sum(const TwoSample& sample, ScoreScheme scheme, unsigned digits = kDefaultPrecision) {
  auto scores = score_vector(scheme, sample.size(), digits);
  PrecisionScope scope(digits);
  Real total = 0;
  for (unsigned r : sample.x_ranks()) total += (*scores)[r - 1];
  return OrdValue::score(std::move(total), digits);
}

/// t = (mean(x) - mean(y)) / S with S^2 the pooled sum of squared
/// deviations (no degrees-of-freedom factor). Means and S^2 are exact; only
/// the square root is rounded.
inline OrdValue student_t(const TwoSample& sample, unsigned digits = kDefaultPrecision) {
  if (sample.size() < 3) throw Error(ErrorCode::DegenerateSpread, "t needs at least 3 observations");
  auto mean = [](const std::vector<Rational>& v) -> Rational {
    Rational s = 0;
    for (const auto& x : v) s += x;
    return s / static_cast<long>(v.size());
  };
  Rational mx = mean(sample.xs());
  Rational my = mean(sample.ys());
  Rational ss = 0;
  for (const auto& x : sample.xs()) ss += (x - mx) * (x - mx);
  for (const auto& y : sample.ys()) ss += (y - my) * (y - my);
  if (ss == 0) throw Error(ErrorCode::DegenerateSpread, "pooled spread is zero");
  PrecisionScope scope(digits);
  Real spread = sqrt(to_real(ss));
  if (spread == 0) throw Error(ErrorCode::DegenerateSpread, "pooled spread underflows the working precision");
  return OrdValue::score(to_real(mx - my) / spread, digits);
}

/// Removes from sorted 0-based `ranks0` every complementary pair
/// {i, N-1-i} and the middle rank of odd N. Every score scheme here is odd
/// about the middle rank (and Wilcoxon is affinely so), hence two
/// equal-size assignments with the same reduction tie in every rank-based
/// cascade: a structural tie.
inline std::vector<unsigned> antisymmetric_reduction(std::span<const unsigned> ranks0, unsigned total) {
  std::vector<bool> present(total, false);
  for (unsigned r : ranks0) present[r] = true;
  std::vector<unsigned> out;
  out.reserve(ranks0.size());
  for (unsigned r : ranks0) {
    unsigned mirror = total - 1 - r;
    if (mirror == r || present[mirror]) continue;
    out.push_back(r);
  }
  return out;
}

namespace detail {

/// Evaluates the rank-based part of a cascade on a set of ranks for fixed
/// N = m + n. Wilcoxon components are exact integer Ranks; score components
/// are Scores. Evaluation is const and may run on several threads once the
/// evaluator is built.
class CascadeEvaluator {
 public:
  CascadeEvaluator(const CascadeStatistic& cascade, unsigned total, unsigned digits)
      : digits_(digits), total_(total) {
    for (const auto& c : cascade.components()) {
      if (c.student_t) break;
      kinds_.push_back(c.scheme);
      tables_.push_back(c.scheme == ScoreScheme::WilcoxonRanks ? nullptr : score_vector(c.scheme, total, digits));
    }
  }

  /// `ranks0` are sorted 0-based ranks. `tail`, if given, is appended
  /// (Student's t).
  OrdValue evaluate(std::span<const unsigned> ranks0, const std::optional<OrdValue>& tail = std::nullopt) const {
    std::vector<OrdValue> parts;
    parts.reserve(kinds_.size() + 1);
    std::vector<unsigned> reduced;
    bool have_reduced = false;
    for (std::size_t k = 0; k < kinds_.size(); ++k) {
      if (kinds_[k] == ScoreScheme::WilcoxonRanks) {
        std::int64_t s = 0;
        for (unsigned r : ranks0) s += r + 1;
        parts.push_back(OrdValue::rank(s));
      } else {
        // Complementary pairs and the middle rank cancel exactly; sum the rest.
        if (!have_reduced) {
          reduced = antisymmetric_reduction(ranks0, total_);
          have_reduced = true;
        }
        Real s = 0;
        for (unsigned r : reduced) s += (*tables_[k])[r];
        parts.push_back(OrdValue::score(std::move(s), digits_));
      }
    }
    if (tail) parts.push_back(*tail);
    return lex_tuple(std::move(parts));
  }

 private:
  unsigned digits_;
  unsigned total_;
  std::vector<ScoreScheme> kinds_;
  std::vector<std::shared_ptr<const std::vector<Real>>> tables_;
};

inline std::uint64_t checked_enumeration_size(unsigned m, unsigned n, std::uint64_t cap) {
  auto total = binomial(m + n, m);
  if (!total || *total > cap) {
    throw Error(ErrorCode::SizeLimit, "C(" + std::to_string(m + n) + "," + std::to_string(m) + ") exceeds the enumeration cap of " +
                                          std::to_string(cap));
  }
  return *total;
}

inline void require_rank_based(const CascadeStatistic& cascade) {
  if (cascade.has_student_t()) {
    throw Error(ErrorCode::TCascadeNotExact, "cascades ending in 't' are calibrated by Monte Carlo (mode mc)");
  }
}

}  // namespace detail

/// The cascade evaluated on the observed sample, as a lexicographic tuple.
inline OrdValue cascade_value(const TwoSample& sample, const CascadeStatistic& cascade,
                              unsigned digits = kDefaultPrecision) {
  detail::CascadeEvaluator eval(cascade, sample.size(), digits);
  std::optional<OrdValue> tail;
  if (cascade.has_student_t()) tail = student_t(sample, digits);
  std::vector<unsigned> ranks0 = sample.x_ranks();
  for (auto& r : ranks0) --r;
  PrecisionScope scope(digits);
  return eval.evaluate(ranks0, tail);
}

/// Values of a rank-based cascade over all C(m+n, m) ways of assigning m
/// of the pooled ranks to the x role, each with weight 1/C(m+n, m).
struct PermutationDistribution {
  unsigned m = 0;
  unsigned n = 0;
  std::vector<OrdValue> values;
  /// 1-based ranks, m per entry, in the same order as `values`.
  std::vector<unsigned> members;
  Rational weight;

  std::size_t size() const noexcept { return values.size(); }
  std::span<const unsigned> subset(std::size_t i) const { return {members.data() + i * m, m}; }
};

inline PermutationDistribution permutation_distribution(unsigned m, unsigned n, const CascadeStatistic& cascade,
                                                        const EnumerationOptions& opts = {}) {
  if (m == 0 || n == 0) throw Error(ErrorCode::InvalidSample, "m and n must be positive");
  detail::require_rank_based(cascade);
  const std::uint64_t total = detail::checked_enumeration_size(m, n, opts.max_enum);
  detail::CascadeEvaluator eval(cascade, m + n, opts.digits);

  PermutationDistribution dist;
  dist.m = m;
  dist.n = n;
  dist.weight = Rational(1, static_cast<long long>(total));
  dist.members.resize(total * m);
  std::vector<std::optional<OrdValue>> slots(total);
  PrecisionScope scope(opts.digits);
  parallel_ranges(total, opts.workers, [&](unsigned, std::uint64_t begin, std::uint64_t end) {
    if (begin == end) return;
    std::vector<unsigned> subset = unrank_combination(m + n, m, begin);
    for (std::uint64_t i = begin; i < end; ++i) {
      slots[i] = eval.evaluate(subset);
      for (unsigned j = 0; j < m; ++j) dist.members[i * m + j] = subset[j] + 1;
      next_combination(subset, m + n);
    }
  });
  dist.values.reserve(total);
  for (auto& s : slots) dist.values.push_back(std::move(*s));
  return dist;
}

/// Exact permutation p-value: the fraction of the C(m+n, m) rank
/// assignments whose cascade value is <= the observed one.
inline Rational exact_perm_pvalue(const TwoSample& sample, const CascadeStatistic& cascade,
                                  const EnumerationOptions& opts = {}) {
  detail::require_rank_based(cascade);
  const unsigned m = sample.m();
  const unsigned total_n = sample.size();
  const std::uint64_t total = detail::checked_enumeration_size(m, sample.n(), opts.max_enum);
  detail::CascadeEvaluator eval(cascade, total_n, opts.digits);
  std::vector<unsigned> observed_ranks = sample.x_ranks();
  for (auto& r : observed_ranks) --r;

  PrecisionScope scope(opts.digits);
  const OrdValue observed = eval.evaluate(observed_ranks);
  std::vector<std::uint64_t> counts(std::max(1u, opts.workers), 0);
  parallel_ranges(total, opts.workers, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
    if (begin == end) return;
    std::vector<unsigned> subset = unrank_combination(total_n, m, begin);
    std::uint64_t local = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      if (compare(eval.evaluate(subset), observed) != Ordering::GT) ++local;
      next_combination(subset, total_n);
    }
    counts[w] = local;
  });
  std::uint64_t at_most = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  return Rational(static_cast<long long>(at_most), static_cast<long long>(total));
}

/// A tie class of the permutation distribution with more than one member.
/// `structural` means every member has the same antisymmetric reduction,
/// which proves the tie exact for any rank-based cascade.
struct TieGroup {
  OrdValue value;
  Rational pvalue;
  std::vector<std::vector<unsigned>> subsets;
  bool structural = false;
};

/// Range of the induced p-function of a rank-based cascade, which does not
/// depend on the data.
struct AttainableSet {
  unsigned m = 0;
  unsigned n = 0;
  std::uint64_t total = 0;
  /// Ascending; pvalues[c] = P[V <= v_c] for tie class c.
  std::vector<Rational> pvalues;
  std::vector<std::uint64_t> class_sizes;
  /// Number of assignments with value <= v_c.
  std::vector<std::uint64_t> cumulative;
  /// P[p-hat <= eps] = eps verified at every attained eps.
  bool range_exact = false;
  std::size_t imprecise_ties = 0;
  std::vector<TieGroup> ties;
  PermutationDistribution distribution;
  TieClasses classes;
  /// Distribution indices grouped by class: members of class c are
  /// member_index[member_offset[c] .. member_offset[c+1]).
  std::vector<std::size_t> member_offset;
  std::vector<std::size_t> member_index;

  bool breaks_all_ties() const noexcept { return ties.empty(); }
  bool contains(const Rational& p) const { return std::binary_search(pvalues.begin(), pvalues.end(), p); }
  std::span<const std::size_t> members(std::size_t c) const {
    return {member_index.data() + member_offset[c], member_offset[c + 1] - member_offset[c]};
  }
};

namespace detail {

inline bool shares_reduction(const PermutationDistribution& dist, std::span<const std::size_t> members) {
  const unsigned total = dist.m + dist.n;
  auto reduction_of = [&](std::size_t i) {
    std::vector<unsigned> r0(dist.subset(i).begin(), dist.subset(i).end());
    for (auto& r : r0) --r;
    return antisymmetric_reduction(r0, total);
  };
  const auto first = reduction_of(members.front());
  for (std::size_t k = 1; k < members.size(); ++k) {
    if (reduction_of(members[k]) != first) return false;
  }
  return true;
}

}  // namespace detail

inline AttainableSet attainable_pvalues(unsigned m, unsigned n, const CascadeStatistic& cascade,
                                        const EnumerationOptions& opts = {}) {
  AttainableSet out;
  out.m = m;
  out.n = n;
  out.distribution = permutation_distribution(m, n, cascade, opts);
  const auto& dist = out.distribution;
  out.total = dist.size();

  CompareContext ctx;
  {
    PrecisionScope scope(opts.digits);
    out.classes = tie_classes(dist.values, &ctx);
  }
  out.imprecise_ties = ctx.imprecise_ties;
  const std::size_t k = out.classes.count;
  out.class_sizes.assign(k, 0);
  for (std::size_t c : out.classes.class_of) ++out.class_sizes[c];

  out.cumulative.resize(k);
  std::uint64_t running = 0;
  for (std::size_t c = 0; c < k; ++c) {
    running += out.class_sizes[c];
    out.cumulative[c] = running;
    out.pvalues.emplace_back(static_cast<long long>(running), static_cast<long long>(out.total));
  }

  // Range-exactness recomputed from per-assignment p-values: the number of
  // assignments with p-hat <= eps must equal eps * total at every eps.
  std::vector<std::uint64_t> phat_count(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) phat_count[i] = out.cumulative[out.classes.class_of[i]];
  std::sort(phat_count.begin(), phat_count.end());
  out.range_exact = true;
  for (std::uint64_t eps_count : out.cumulative) {
    auto at_most = static_cast<std::uint64_t>(
        std::upper_bound(phat_count.begin(), phat_count.end(), eps_count) - phat_count.begin());
    if (at_most != eps_count) out.range_exact = false;
  }

  out.member_offset.assign(k + 1, 0);
  for (std::size_t c = 0; c < k; ++c) out.member_offset[c + 1] = out.member_offset[c] + out.class_sizes[c];
  out.member_index.resize(dist.size());
  std::vector<std::size_t> fill(out.member_offset.begin(), out.member_offset.end() - 1);
  for (std::size_t i = 0; i < dist.size(); ++i) out.member_index[fill[out.classes.class_of[i]]++] = i;

  for (std::size_t c = 0; c < k; ++c) {
    if (out.class_sizes[c] < 2) continue;
    auto members = out.members(c);
    TieGroup g{dist.values[members.front()], out.pvalues[c], {}, detail::shares_reduction(dist, members)};
    for (std::size_t i : members) {
      auto s = dist.subset(i);
      g.subsets.emplace_back(s.begin(), s.end());
    }
    out.ties.push_back(std::move(g));
  }
  return out;
}

/// One tie class near a queried position, with its cascade value at the
/// computation precision.
struct ClassSummary {
  Rational pvalue;
  std::uint64_t first_position = 0;  ///< 1-based, inclusive
  std::uint64_t last_position = 0;   ///< 1-based, inclusive; pvalue = last/total
  OrdValue value;
  std::vector<std::vector<unsigned>> subsets;
  bool structural_tie = false;
};

/// What the permutation distribution looks like at cumulative position k
/// (the candidate p-value k/total). If k is attained it ends class c and the
/// summaries are c and c+1, the two values whose strict ordering creates
/// the point. Otherwise k lies inside a tie class, which is the only summary.
struct PositionReport {
  std::uint64_t position = 0;
  Rational pvalue;
  bool attained = false;
  std::vector<ClassSummary> classes;
};

inline PositionReport explain_position(const AttainableSet& set, std::uint64_t k) {
  if (k == 0 || k > set.total) throw Error(ErrorCode::InvalidSample, "position out of range");
  PositionReport rep;
  rep.position = k;
  rep.pvalue = Rational(static_cast<long long>(k), static_cast<long long>(set.total));
  auto it = std::lower_bound(set.cumulative.begin(), set.cumulative.end(), k);
  std::size_t c = static_cast<std::size_t>(it - set.cumulative.begin());
  rep.attained = *it == k;
  auto summarise = [&](std::size_t cls) {
    auto members = set.members(cls);
    ClassSummary s{set.pvalues[cls], set.cumulative[cls] - set.class_sizes[cls] + 1, set.cumulative[cls],
                   set.distribution.values[members.front()], {}, false};
    for (std::size_t i : members) {
      auto sub = set.distribution.subset(i);
      s.subsets.emplace_back(sub.begin(), sub.end());
    }
    s.structural_tie = members.size() > 1 && detail::shares_reduction(set.distribution, members);
    return s;
  };
  rep.classes.push_back(summarise(c));
  if (rep.attained && c + 1 < set.pvalues.size()) rep.classes.push_back(summarise(c + 1));
  return rep;
}

/// Compares the points a refined cascade adds over a base cascade, within
/// [0, upper], against a published list of added points.
struct ReferenceComparison {
  std::vector<Rational> computed_added;
  std::vector<Rational> missing;  ///< in the reference, not computed
  std::vector<Rational> extra;    ///< computed, not in the reference
  std::vector<PositionReport> explanations;
  bool superset = false;

  bool agrees() const noexcept { return missing.empty() && extra.empty(); }
};

inline ReferenceComparison compare_with_reference(const AttainableSet& refined, const AttainableSet& base,
                                                  std::span<const Rational> reference_added, const Rational& upper) {
  ReferenceComparison out;
  out.superset = std::includes(refined.pvalues.begin(), refined.pvalues.end(), base.pvalues.begin(), base.pvalues.end());
  for (const auto& p : refined.pvalues) {
    if (p <= upper && !base.contains(p)) out.computed_added.push_back(p);
  }
  std::vector<Rational> ref;
  for (const auto& p : reference_added) {
    if (p <= upper) ref.push_back(p);
  }
  std::sort(ref.begin(), ref.end());
  std::set_difference(ref.begin(), ref.end(), out.computed_added.begin(), out.computed_added.end(),
                      std::back_inserter(out.missing));
  std::set_difference(out.computed_added.begin(), out.computed_added.end(), ref.begin(), ref.end(),
                      std::back_inserter(out.extra));
  std::vector<Rational> all = out.missing;
  all.insert(all.end(), out.extra.begin(), out.extra.end());
  std::sort(all.begin(), all.end());
  for (const auto& p : all) {
    Rational position = p * static_cast<long long>(refined.total);
    if (denominator(position) != 1 || position <= 0) continue;
    out.explanations.push_back(
        explain_position(refined, numerator(position).convert_to<std::uint64_t>()));
  }
  return out;
}

struct McResult {
  std::uint64_t draws = 0;
  std::uint64_t at_most = 0;
  double estimate = 0;
  double std_error = 0;
  /// Wilson score 95% interval.
  double ci_low = 0;
  double ci_high = 0;
};

inline constexpr std::uint64_t kMcBlock = 1024;

/// Gaussian-null Monte Carlo p-value for cascades ending in Student's t:
/// the fraction of `draws` samples of m+n independent standard normals
/// (x role = first m) whose cascade value is <= the observed one. Draws are
/// generated in fixed blocks of kMcBlock, block b from its own mt19937_64
/// substream seeded by (seed, b), so the result does not depend on the
/// worker count.
inline McResult mc_gaussian_pvalue(const TwoSample& sample, const CascadeStatistic& cascade, std::uint64_t draws,
                                   std::uint64_t seed, const EnumerationOptions& opts = {}) {
  if (draws == 0) throw Error(ErrorCode::InvalidSample, "number of draws must be positive");
  const unsigned m = sample.m();
  const unsigned total_n = sample.size();
  if (cascade.has_student_t() && total_n < 3) throw Error(ErrorCode::DegenerateSpread, "t needs at least 3 observations");
  const OrdValue observed = cascade_value(sample, cascade, opts.digits);
  detail::CascadeEvaluator eval(cascade, total_n, opts.digits);

  const std::uint64_t blocks = (draws + kMcBlock - 1) / kMcBlock;
  std::vector<std::uint64_t> block_counts(blocks, 0);
  PrecisionScope scope(opts.digits);
  parallel_ranges(blocks, opts.workers, [&](unsigned, std::uint64_t begin, std::uint64_t end) {
    std::vector<double> z(total_n);
    std::vector<unsigned> order(total_n);
    std::vector<unsigned> ranks0;
    for (std::uint64_t b = begin; b < end; ++b) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
      std::mt19937_64 engine(seq);
      boost::random::normal_distribution<double> gauss(0.0, 1.0);
      const std::uint64_t last = std::min(draws, (b + 1) * kMcBlock);
      std::uint64_t local = 0;
      for (std::uint64_t d = b * kMcBlock; d < last; ++d) {
        for (auto& v : z) v = gauss(engine);
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(), [&](unsigned a, unsigned c) { return z[a] < z[c] || (z[a] == z[c] && a < c); });
        ranks0.clear();
        for (unsigned r = 0; r < total_n; ++r) {
          if (order[r] < m) ranks0.push_back(r);
        }
        std::sort(ranks0.begin(), ranks0.end());
        std::optional<OrdValue> tail;
        if (cascade.has_student_t()) {
          std::vector<Rational> xs, ys;
          for (unsigned i = 0; i < total_n; ++i) (i < m ? xs : ys).emplace_back(z[i]);
          Rational mx = 0, my = 0;
          for (const auto& x : xs) mx += x;
          for (const auto& y : ys) my += y;
          mx /= static_cast<long>(xs.size());
          my /= static_cast<long>(ys.size());
          Rational ss = 0;
          for (const auto& x : xs) ss += (x - mx) * (x - mx);
          for (const auto& y : ys) ss += (y - my) * (y - my);
          tail = OrdValue::score(to_real(mx - my) / sqrt(to_real(ss)), opts.digits);
        }
        if (compare(eval.evaluate(ranks0, tail), observed) != Ordering::GT) ++local;
      }
      block_counts[b] = local;
    }
  });

  McResult r;
  r.draws = draws;
  r.at_most = std::accumulate(block_counts.begin(), block_counts.end(), std::uint64_t{0});
  const double nd = static_cast<double>(draws);
  r.estimate = static_cast<double>(r.at_most) / nd;
  r.std_error = std::sqrt(r.estimate * (1 - r.estimate) / nd);
  const double z = 1.959963984540054;
  const double denom = 1 + z * z / nd;
  const double centre = (r.estimate + z * z / (2 * nd)) / denom;
  const double half = z / denom * std::sqrt(r.estimate * (1 - r.estimate) / nd + z * z / (4 * nd * nd));
  r.ci_low = std::max(0.0, centre - half);
  r.ci_high = std::min(1.0, centre + half);
  return r;
}

}  // namespace ordstat
