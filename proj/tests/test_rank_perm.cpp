#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "ordstat/rank_perm.hpp"

using namespace ordstat;

namespace {

std::vector<Rational> nums(std::initializer_list<long> v) {
  std::vector<Rational> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::ParseError;
}

// Number of m-subsets of {1..N} with each rank sum, by dynamic programming.
std::map<long, std::uint64_t> rank_sum_counts(unsigned m, unsigned n) {
  const unsigned N = m + n;
  const long max_sum = static_cast<long>(N * (N + 1) / 2);
  std::vector<std::vector<std::uint64_t>> ways(m + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
  ways[0][0] = 1;
  for (unsigned r = 1; r <= N; ++r) {
    for (unsigned k = std::min(r, m); k >= 1; --k) {
      for (long s = max_sum; s >= static_cast<long>(r); --s) ways[k][s] += ways[k - 1][s - r];
    }
  }
  std::map<long, std::uint64_t> out;
  for (long s = 0; s <= max_sum; ++s) {
    if (ways[m][s]) out[s] = ways[m][s];
  }
  return out;
}

std::vector<Rational> oracle_wilcoxon_set(unsigned m, unsigned n) {
  auto counts = rank_sum_counts(m, n);
  std::uint64_t total = 0, running = 0;
  for (const auto& [s, c] : counts) total += c;
  std::vector<Rational> out;
  for (const auto& [s, c] : counts) {
    running += c;
    out.emplace_back(static_cast<long long>(running), static_cast<long long>(total));
  }
  return out;
}

// Range-exactness straight from the values: p-hat by pairwise counting.
bool oracle_range_exact(const AttainableSet& set) {
  const auto& v = set.distribution.values;
  std::vector<std::uint64_t> phat(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) phat[i] += compare(v[j], v[i]) != Ordering::GT;
  }
  for (const auto& eps : set.pvalues) {
    std::uint64_t at_most = 0;
    for (auto p : phat) at_most += Rational(static_cast<long long>(p), static_cast<long long>(v.size())) <= eps;
    if (Rational(static_cast<long long>(at_most), static_cast<long long>(v.size())) != eps) return false;
  }
  return true;
}

TwoSample random_sample(std::mt19937_64& rng, unsigned m, unsigned n) {
  std::vector<long> pool(40);
  std::iota(pool.begin(), pool.end(), -20);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<Rational> xs, ys;
  for (unsigned i = 0; i < m; ++i) xs.emplace_back(pool[i], 4);
  for (unsigned i = 0; i < n; ++i) ys.emplace_back(pool[m + i], 4);
  return TwoSample(xs, ys);
}

}  // namespace

TEST(TwoSample, Validation) {
  EXPECT_EQ(code_of([] { TwoSample(nums({1, 2}), nums({2, 3})); }), ErrorCode::DuplicateObservations);
  EXPECT_EQ(code_of([] { TwoSample({}, nums({1})); }), ErrorCode::InvalidSample);
}

TEST(RankSum, Examples) {
  EXPECT_EQ(rank_sum(TwoSample(nums({1, 2, 3}), nums({10, 11}))), 6);
  EXPECT_EQ(rank_sum(TwoSample(nums({10, 11, 12}), nums({1, 2}))), 3 + 4 + 5);
  TwoSample s({Rational(1), Rational(3)}, {Rational(2), Rational(4)});
  EXPECT_EQ(s.x_ranks(), (std::vector<unsigned>{1, 3}));
  EXPECT_EQ(rank_sum(s), 4);
}

TEST(ScoreSum, Examples) {
  TwoSample s(nums({5, -1, 9}), nums({0, 2, 7, 8}));
  EXPECT_EQ(score_sum(s, ScoreScheme::WilcoxonRanks).as_score().value, Real(rank_sum(s)));
  TwoSample ends(nums({0, 9}), nums({1, 2, 3}));
  EXPECT_EQ(score_sum(ends, ScoreScheme::VanDerWaerden).as_score().value, Real(0));
  EXPECT_EQ(score_sum(ends, ScoreScheme::NormalScoresFYT).as_score().value, Real(0));
}

TEST(StudentT, Examples) {
  TwoSample s(nums({0, 2}), nums({1, 3}));
  EXPECT_EQ(student_t(s).as_score().value, Real(-1) / 2);
  EXPECT_EQ(student_t(TwoSample(nums({-1, 1}), nums({-3, 3}))).as_score().value, Real(0));
  TwoSample u(nums({1, 7, 2}), nums({4, 11}));
  EXPECT_EQ(student_t(u).as_score().value, -student_t(u.swapped()).as_score().value);
  EXPECT_EQ(code_of([] { student_t(TwoSample(nums({1}), nums({2}))); }), ErrorCode::DegenerateSpread);
}

TEST(StudentT, MatchesDoubleArithmetic) {
  TwoSample s({Rational(12, 10), Rational(27, 10), Rational(4, 10)}, {Rational(51, 10), Rational(44, 10)});
  double mx = (1.2 + 2.7 + 0.4) / 3, my = (5.1 + 4.4) / 2;
  double ss = 0;
  for (double x : {1.2, 2.7, 0.4}) ss += (x - mx) * (x - mx);
  for (double y : {5.1, 4.4}) ss += (y - my) * (y - my);
  EXPECT_NEAR(static_cast<double>(student_t(s).as_score().value), (mx - my) / std::sqrt(ss), 1e-13);
}

TEST(Cascade, ParseAndValidate) {
  EXPECT_EQ(CascadeStatistic::parse("wilcoxon, fyt,t").to_string(), "wilcoxon,fyt,t");
  EXPECT_EQ(code_of([] { CascadeStatistic::parse("t,wilcoxon"); }), ErrorCode::InvalidCascade);
  EXPECT_EQ(code_of([] { CascadeStatistic::parse("wilcoxon,median"); }), ErrorCode::InvalidCascade);
  EXPECT_EQ(code_of([] { CascadeStatistic::parse(""); }), ErrorCode::InvalidCascade);
  EXPECT_EQ(code_of([] { CascadeStatistic({}); }), ErrorCode::InvalidCascade);
}

TEST(ExactPValue, Examples) {
  auto w = CascadeStatistic::parse("wilcoxon");
  EXPECT_EQ(exact_perm_pvalue(TwoSample(nums({1}), nums({2})), w), Rational(1, 2));
  TwoSample smallest(nums({1, 2, 3, 4, 5, 6}), nums({7, 8, 9, 10, 11, 12}));
  EXPECT_EQ(exact_perm_pvalue(smallest, w), Rational(1, 924));
  EXPECT_EQ(exact_perm_pvalue(TwoSample(nums({1, 2}), nums({3, 4, 5})), w), Rational(1, 10));
}

TEST(ExactPValue, Errors) {
  TwoSample s(nums({1, 4, 6}), nums({2, 3, 5}));
  EXPECT_EQ(code_of([&] { exact_perm_pvalue(s, CascadeStatistic::parse("wilcoxon,t")); }),
            ErrorCode::TCascadeNotExact);
  EnumerationOptions small;
  small.max_enum = 19;
  EXPECT_EQ(code_of([&] { exact_perm_pvalue(s, CascadeStatistic::parse("wilcoxon"), small); }), ErrorCode::SizeLimit);
  small.max_enum = 20;
  EXPECT_NO_THROW(exact_perm_pvalue(s, CascadeStatistic::parse("wilcoxon"), small));
  EXPECT_EQ(code_of([] { attainable_pvalues(20, 20, CascadeStatistic::parse("wilcoxon")); }), ErrorCode::SizeLimit);
}

TEST(ExactPValue, RefinementNeverIncreases) {
  std::mt19937_64 rng(3);
  auto w = CascadeStatistic::parse("wilcoxon");
  auto wf = CascadeStatistic::parse("wilcoxon,fyt");
  for (int k = 0; k < 20; ++k) {
    TwoSample s = random_sample(rng, 4, 5);
    EXPECT_LE(exact_perm_pvalue(s, wf), exact_perm_pvalue(s, w));
  }
}

TEST(ExactPValue, InvariantUnderIncreasingTransforms) {
  std::mt19937_64 rng(9);
  for (const char* c : {"wilcoxon", "wilcoxon,fyt", "vdw,laplace"}) {
    auto cascade = CascadeStatistic::parse(c);
    for (int k = 0; k < 6; ++k) {
      TwoSample s = random_sample(rng, 3, 4);
      auto cube = [](const std::vector<Rational>& v) {
        std::vector<Rational> out;
        for (const auto& x : v) out.push_back(x * x * x * 5 + x - 7);
        return out;
      };
      EXPECT_EQ(exact_perm_pvalue(s, cascade), exact_perm_pvalue(TwoSample(cube(s.xs()), cube(s.ys())), cascade)) << c;
    }
  }
}

TEST(ExactPValue, WorkerCountDoesNotMatter) {
  std::mt19937_64 rng(5);
  auto cascade = CascadeStatistic::parse("wilcoxon,fyt,laplace");
  for (int k = 0; k < 4; ++k) {
    TwoSample s = random_sample(rng, 5, 6);
    EnumerationOptions one, four;
    four.workers = 4;
    EXPECT_EQ(exact_perm_pvalue(s, cascade, one), exact_perm_pvalue(s, cascade, four));
  }
}

TEST(Attainable, WilcoxonMatchesRankSumCounts) {
  for (unsigned m = 1; m <= 6; ++m) {
    for (unsigned n = 1; n <= 6; ++n) {
      auto set = attainable_pvalues(m, n, CascadeStatistic::parse("wilcoxon"));
      EXPECT_EQ(set.pvalues, oracle_wilcoxon_set(m, n)) << m << "," << n;
      EXPECT_TRUE(set.range_exact);
    }
  }
  auto one = attainable_pvalues(1, 1, CascadeStatistic::parse("wilcoxon"));
  EXPECT_EQ(one.pvalues, (std::vector<Rational>{Rational(1, 2), Rational(1)}));
}

TEST(Attainable, WilcoxonDistributionIsSymmetric) {
  for (unsigned m = 1; m <= 6; ++m) {
    for (unsigned n = 1; n <= 6; ++n) {
      auto dist = permutation_distribution(m, n, CascadeStatistic::parse("wilcoxon"));
      std::map<long, int> hist;
      for (const auto& v : dist.values) ++hist[v.components()[0].as_rank()];
      const long twice_centre = static_cast<long>(m * (m + n + 1));
      for (const auto& [s, c] : hist) EXPECT_EQ(hist[twice_centre - s], c) << m << "," << n << " sum " << s;
    }
  }
}

TEST(Attainable, RangeExactAgainstPairwiseOracle) {
  for (const char* c : {"wilcoxon", "wilcoxon,fyt", "fyt", "wilcoxon,vdw,laplace"}) {
    auto set = attainable_pvalues(4, 4, CascadeStatistic::parse(c));
    EXPECT_TRUE(set.range_exact) << c;
    EXPECT_TRUE(oracle_range_exact(set)) << c;
  }
}

TEST(Attainable, RefinementIsSuperset) {
  const char* chain[] = {"wilcoxon", "wilcoxon,fyt", "wilcoxon,fyt,vdw", "wilcoxon,fyt,vdw,laplace"};
  for (unsigned m = 2; m <= 5; ++m) {
    std::vector<Rational> prev;
    for (const char* c : chain) {
      auto set = attainable_pvalues(m, 5, CascadeStatistic::parse(c));
      EXPECT_TRUE(std::includes(set.pvalues.begin(), set.pvalues.end(), prev.begin(), prev.end())) << c;
      prev = set.pvalues;
    }
  }
}

TEST(Attainable, WorkerCountDoesNotMatter) {
  EnumerationOptions four;
  four.workers = 4;
  auto a = attainable_pvalues(5, 5, CascadeStatistic::parse("wilcoxon,fyt"));
  auto b = attainable_pvalues(5, 5, CascadeStatistic::parse("wilcoxon,fyt"), four);
  EXPECT_EQ(a.pvalues, b.pvalues);
  EXPECT_EQ(a.distribution.members, b.distribution.members);
}

TEST(Attainable, StructuralTiesAreExact) {
  // {1,2,3,5,7,10} and {1,2,4,5,7,9} of 12 both reduce to {1,2,5} after
  // removing pairs {i, 13-i}.
  std::vector<unsigned> a{0, 1, 2, 4, 6, 9}, b{0, 1, 3, 4, 6, 8};
  EXPECT_EQ(antisymmetric_reduction(a, 12), antisymmetric_reduction(b, 12));
  auto cascade = CascadeStatistic::parse("wilcoxon,fyt,vdw,laplace");
  detail::CascadeEvaluator eval(cascade, 12, 50);
  PrecisionScope scope(50);
  CompareContext ctx;
  EXPECT_EQ(compare(eval.evaluate(a), eval.evaluate(b), &ctx), Ordering::EQ);
  EXPECT_FALSE(ctx.imprecise());
}

TEST(Attainable, ExplainPosition) {
  auto set = attainable_pvalues(3, 3, CascadeStatistic::parse("wilcoxon"));
  auto rep = explain_position(set, 1);
  EXPECT_TRUE(rep.attained);
  ASSERT_EQ(rep.classes.size(), 2u);
  EXPECT_EQ(rep.classes[0].subsets, (std::vector<std::vector<unsigned>>{{1, 2, 3}}));
  // Rank sum 8 occurs twice (positions 3..4), so position 3 is not attained.
  auto inside = explain_position(set, 3);
  EXPECT_FALSE(inside.attained);
  EXPECT_EQ(inside.classes.size(), 1u);
}

TEST(MonteCarlo, DeterministicAcrossRunsAndWorkers) {
  TwoSample s(nums({1, 5, 9}), nums({2, 3, 4, 8}));
  auto cascade = CascadeStatistic::parse("wilcoxon,t");
  EnumerationOptions one, three;
  three.workers = 3;
  auto a = mc_gaussian_pvalue(s, cascade, 5000, 77, one);
  auto b = mc_gaussian_pvalue(s, cascade, 5000, 77, three);
  EXPECT_EQ(a.at_most, b.at_most);
  EXPECT_EQ(a.at_most, mc_gaussian_pvalue(s, cascade, 5000, 77, one).at_most);
  EXPECT_LE(a.ci_low, a.estimate);
  EXPECT_GE(a.ci_high, a.estimate);
}

TEST(MonteCarlo, HugeTIsInTheUpperTail) {
  TwoSample s(nums({100, 101, 102}), nums({0, 1, 2}));
  auto r = mc_gaussian_pvalue(s, CascadeStatistic::parse("t"), 4000, 1);
  EXPECT_GE(r.estimate, 0.999);
}

TEST(MonteCarlo, WilcoxonThenTBracketedByExactWilcoxon) {
  // P[R' < R] <= P[(R', t') <= (R, t)] <= P[R' <= R]; allow 3 standard errors.
  std::mt19937_64 rng(21);
  auto w = CascadeStatistic::parse("wilcoxon");
  for (unsigned m = 2; m <= 4; ++m) {
    for (int k = 0; k < 3; ++k) {
      TwoSample s = random_sample(rng, m, 4);
      Rational at_most = exact_perm_pvalue(s, w);
      auto dist = permutation_distribution(m, 4, w);
      long observed = rank_sum(s);
      long below = 0;
      for (const auto& v : dist.values) below += v.components()[0].as_rank() < observed;
      const double lo = static_cast<double>(below) / dist.size();
      const double hi = static_cast<double>(at_most);
      const std::uint64_t draws = 20000;
      auto r = mc_gaussian_pvalue(s, CascadeStatistic::parse("wilcoxon,t"), draws, 1000 + k);
      const double se = std::sqrt(std::max(lo * (1 - lo), hi * (1 - hi)) / draws) + 1e-12;
      EXPECT_GE(r.estimate, lo - 3 * se);
      EXPECT_LE(r.estimate, hi + 3 * se);
    }
  }
}

TEST(MonteCarlo, UniqueMaximalRankSumAgreesWithExactWilcoxon) {
  // xs take the top ranks, which only one assignment does, and t is huge.
  TwoSample s(nums({1000, 1001, 1002}), nums({1, 2, 3, 4}));
  Rational exact = exact_perm_pvalue(s, CascadeStatistic::parse("wilcoxon"));
  EXPECT_EQ(exact, Rational(1));
  auto r = mc_gaussian_pvalue(s, CascadeStatistic::parse("wilcoxon,t"), 20000, 5);
  EXPECT_LE(std::abs(r.estimate - 1.0), 3 * std::sqrt((1.0 / 35) * (34.0 / 35) / 20000) + 1e-12);
}
