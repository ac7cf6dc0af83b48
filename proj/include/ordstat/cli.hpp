#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ordstat/error.hpp"
#include "ordstat/io.hpp"
#include "ordstat/randomized.hpp"
#include "ordstat/rank_perm.hpp"
#include "ordstat/trial.hpp"

namespace ordstat::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 2,
  kSizeCap = 3,
  kTheoremCheckFailed = 4,
};

/// Result of one CLI run. `doc` is the machine-readable report; `plain` is
/// the `--plain` human summary. Both are deterministic functions of the
/// inputs and seed.
struct RunReport {
  Json doc;
  std::string plain;
  int exit_code = kOk;

  std::string render(bool plain_mode) const { return plain_mode ? plain : doc.dump(2) + "\n"; }
};

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

namespace detail {

inline Json start_report(const std::string& command, const Json& args, const std::string& input_bytes) {
  Json doc;
  doc["command"] = command;
  doc["arguments"] = args;
  doc["inputs_digest"] = sha256_hex(args.dump() + "\n" + input_bytes);
  doc["results"] = Json::object();
  doc["warnings"] = Json::array();
  return doc;
}

inline Json class_json(const PFunctionClass& c) {
  Json j;
  j["class"] = to_string(c.kind);
  if (c.witness) {
    j["witness"] = to_string(*c.witness);
    j["witness_mass"] = to_string(*c.witness_mass);
  }
  return j;
}

inline std::string class_text(const PFunctionClass& c) {
  std::string s = to_string(c.kind);
  if (c.witness) s += " (witness eps=" + to_string(*c.witness) + ", P[f<=eps]=" + to_string(*c.witness_mass) + ")";
  return s;
}

inline void trial_warnings(Json& doc, const FiniteTrial& trial, const CompareContext& ctx) {
  for (const auto& label : trial.zero_probability_labels()) {
    doc["warnings"].push_back("outcome '" + label + "' has probability zero");
  }
  if (ctx.imprecise()) {
    doc["warnings"].push_back(std::to_string(ctx.imprecise_ties) +
                              " score comparison(s) tied within precision tolerance (imprecise ties)");
  }
}

inline TrialDocument load_trial(const std::string& path, const std::string& bytes, unsigned digits) {
  TrialDocument d = parse_trial_json(bytes, digits);
  if (!d.statistic) throw Error(ErrorCode::ParseError, "field 'statistic': missing in '" + path + "'");
  return d;
}

inline std::string subset_text(const std::vector<unsigned>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

}  // namespace detail

/// Induced p-function of the trial file's statistic, its classification
/// and the idempotence check.
inline RunReport cmd_induce(const std::string& trial_file, unsigned digits = kDefaultPrecision) {
  const std::string bytes = read_file(trial_file);
  TrialDocument d = detail::load_trial(trial_file, bytes, digits);
  RunReport rep;
  rep.doc = detail::start_report("induce", {{"trial", trial_file}, {"precision", digits}}, bytes);

  CompareContext ctx;
  PFunction phat = induce_phat(d.trial, *d.statistic, &ctx);
  PFunctionClass cls = classify_pfunction(d.trial, phat);
  bool idempotent = check_idempotence(d.trial, *d.statistic);
  std::vector<bool> exact = exact_pvalue_flags(d.trial, phat);

  Json& res = rep.doc["results"];
  res["phat"] = Json::object();
  res["exact_pvalue"] = Json::object();
  std::ostringstream plain;
  plain << "outcome\tp-hat\texact\n";
  for (std::size_t i = 0; i < phat.size(); ++i) {
    const auto& [label, v] = phat.entries()[i];
    res["phat"][label] = to_string(v);
    res["exact_pvalue"][label] = static_cast<bool>(exact[i]);
    plain << label << "\t" << to_string(v) << "\t" << (exact[i] ? "yes" : "no") << "\n";
  }
  res["classification"] = detail::class_json(cls);
  res["idempotent"] = idempotent;
  detail::trial_warnings(rep.doc, d.trial, ctx);
  plain << "class: " << detail::class_text(cls) << "\n";
  plain << "idempotent: " << (idempotent ? "true" : "false") << "\n";
  if (!idempotent || cls.kind != PFunctionClass::Kind::RangeExact) rep.exit_code = kTheoremCheckFailed;
  rep.plain = plain.str();
  return rep;
}

/// Randomized p-value low + r*atom at one outcome, with r given or drawn
/// from `seed`. With `verify_exact`, also checks P[F-hat <= eps] = eps on
/// the grid {k/97}.
inline RunReport cmd_randomize(const std::string& trial_file, const std::string& outcome,
                               const std::optional<Rational>& r, const std::optional<std::uint64_t>& seed,
                               bool verify_exact, unsigned digits = kDefaultPrecision) {
  if (r.has_value() == seed.has_value()) {
    throw Error(ErrorCode::ParseError, "exactly one of --r and --seed must be given");
  }
  const std::string bytes = read_file(trial_file);
  TrialDocument d = detail::load_trial(trial_file, bytes, digits);
  Json args = {{"trial", trial_file}, {"outcome", outcome}, {"precision", digits}, {"verify_exact", verify_exact}};
  if (r) args["r"] = to_string(*r);
  if (seed) args["seed"] = *seed;
  RunReport rep;
  rep.doc = detail::start_report("randomize", args, bytes);
  if (seed) rep.doc["seed"] = *seed;

  d.trial.index_of(outcome);
  CompareContext ctx;
  RandomizedPFunction rpf = build_randomized(d.trial, *d.statistic, &ctx);
  const Rational rv = r ? *r : draw_r(*seed);
  const auto& e = rpf.at(outcome);
  const Rational value = randomized_pvalue(rpf, outcome, rv);

  Json& res = rep.doc["results"];
  res["outcome"] = outcome;
  res["low"] = to_string(e.low);
  res["atom"] = to_string(e.atom);
  res["r"] = to_string(rv);
  res["value"] = to_string(value);
  std::ostringstream plain;
  plain << "outcome " << outcome << ": low=" << to_string(e.low) << " atom=" << to_string(e.atom)
        << " r=" << to_string(rv) << " value=" << to_string(value) << "\n";
  if (verify_exact) {
    constexpr int kGrid = 97;
    Json failures = Json::array();
    for (int k = 0; k <= kGrid; ++k) {
      Rational eps(k, kGrid);
      Rational got = exactness_cdf(rpf, d.trial, eps);
      if (got != eps) failures.push_back({{"eps", to_string(eps)}, {"cdf", to_string(got)}});
    }
    res["verify_exact"] = {{"grid", "k/97, k=0..97"}, {"passed", failures.empty()}, {"failures", failures}};
    plain << "exactness on k/97 grid: " << (failures.empty() ? "pass" : "FAIL") << "\n";
    if (!failures.empty()) rep.exit_code = kTheoremCheckFailed;
  }
  detail::trial_warnings(rep.doc, d.trial, ctx);
  rep.plain = plain.str();
  return rep;
}

/// Mid-p-values per outcome and the classification of the mid-p-function.
inline RunReport cmd_midp(const std::string& trial_file, unsigned digits = kDefaultPrecision) {
  const std::string bytes = read_file(trial_file);
  TrialDocument d = detail::load_trial(trial_file, bytes, digits);
  RunReport rep;
  rep.doc = detail::start_report("midp", {{"trial", trial_file}, {"precision", digits}}, bytes);

  CompareContext ctx;
  RandomizedPFunction rpf = build_randomized(d.trial, *d.statistic, &ctx);
  PFunctionClass cls = classify_pfunction(d.trial, midp_function(rpf));
  Json& res = rep.doc["results"];
  res["midp"] = Json::object();
  std::ostringstream plain;
  plain << "outcome\tmid-p\n";
  for (const auto& e : rpf.entries()) {
    Rational mid = mid_pvalue(rpf, e.label);
    res["midp"][e.label] = to_string(mid);
    plain << e.label << "\t" << to_string(mid) << "\n";
  }
  res["classification"] = detail::class_json(cls);
  plain << "class: " << detail::class_text(cls) << "\n";
  detail::trial_warnings(rep.doc, d.trial, ctx);
  rep.plain = plain.str();
  return rep;
}

enum class Mode { Exact, MonteCarlo };

/// Two-sample cascade test on the given sample. `input_bytes` is what gets
/// digested (the data file contents, or the flat lists).
inline RunReport cmd_twosample(const TwoSample& sample, const std::string& input_bytes,
                               const CascadeStatistic& cascade, Mode mode, std::optional<std::uint64_t> seed,
                               std::uint64_t draws, const EnumerationOptions& opts) {
  Json args = {{"cascade", cascade.to_string()},
               {"mode", mode == Mode::Exact ? "exact" : "mc"},
               {"precision", opts.digits},
               {"max_enum", opts.max_enum}};
  if (mode == Mode::MonteCarlo) {
    args["draws"] = draws;
    args["seed"] = seed.value_or(0);
  }
  RunReport rep;
  rep.doc = detail::start_report("twosample", args, input_bytes);
  Json& res = rep.doc["results"];
  res["m"] = sample.m();
  res["n"] = sample.n();
  std::ostringstream plain;
  plain << "m=" << sample.m() << " n=" << sample.n() << " cascade=" << cascade.to_string() << "\n";

  if (mode == Mode::Exact) {
    ordstat::detail::require_rank_based(cascade);
    OrdValue observed = cascade_value(sample, cascade, opts.digits);
    Rational p = exact_perm_pvalue(sample, cascade, opts);
    std::uint64_t size = *binomial(sample.size(), sample.m());
    res["observed"] = to_string(observed);
    res["pvalue"] = to_string(p);
    res["enumeration_size"] = size;
    plain << "observed: " << to_string(observed) << "\n"
          << "p-value: " << to_string(p) << " (exact, " << size << " assignments)\n";
  } else {
    const std::uint64_t s = seed.value_or(0);
    rep.doc["seed"] = s;
    OrdValue observed = cascade_value(sample, cascade, opts.digits);
    McResult mc = mc_gaussian_pvalue(sample, cascade, draws, s, opts);
    std::ostringstream est, lo, hi, se;
    est << std::setprecision(10) << mc.estimate;
    lo << std::setprecision(10) << mc.ci_low;
    hi << std::setprecision(10) << mc.ci_high;
    se << std::setprecision(10) << mc.std_error;
    res["observed"] = to_string(observed);
    res["pvalue_estimate"] = est.str();
    res["count_at_most"] = mc.at_most;
    res["draws"] = mc.draws;
    res["std_error"] = se.str();
    res["ci95"] = {lo.str(), hi.str()};
    plain << "observed: " << to_string(observed) << "\n"
          << "p-value estimate: " << est.str() << " (" << mc.at_most << "/" << mc.draws << "), 95% CI [" << lo.str()
          << ", " << hi.str() << "], seed " << s << "\n";
  }
  rep.plain = plain.str();
  return rep;
}

/// Attainable p-value set of a rank-based cascade, with the range-exactness
/// verification and any residual ties. When `reference` is given (points a
/// published table says the last component adds over the cascade without
/// it), mismatches are listed with the competing cascade values.
inline RunReport cmd_table(unsigned m, unsigned n, const CascadeStatistic& cascade, const EnumerationOptions& opts,
                           const std::optional<std::vector<Rational>>& reference = std::nullopt,
                           const std::optional<Rational>& reference_upper = std::nullopt) {
  Json args = {{"m", m}, {"n", n}, {"cascade", cascade.to_string()}, {"precision", opts.digits}, {"max_enum", opts.max_enum}};
  if (reference) {
    Json ref = Json::array();
    for (const auto& p : *reference) ref.push_back(to_string(p));
    args["reference"] = ref;
    if (reference_upper) args["reference_upper"] = to_string(*reference_upper);
  }
  RunReport rep;
  rep.doc = detail::start_report("table", args, "");
  AttainableSet set = attainable_pvalues(m, n, cascade, opts);

  Json& res = rep.doc["results"];
  Json values = Json::array();
  for (const auto& p : set.pvalues) values.push_back(to_string(p));
  res["enumeration_size"] = set.total;
  res["attainable_count"] = set.pvalues.size();
  res["attainable"] = values;
  res["range_exact"] = set.range_exact;
  res["breaks_all_ties"] = set.breaks_all_ties();
  std::size_t structural = 0;
  Json ties = Json::array();
  for (const auto& t : set.ties) {
    structural += t.structural;
    Json subsets = Json::array();
    for (const auto& s : t.subsets) subsets.push_back(s);
    ties.push_back({{"pvalue", to_string(t.pvalue)}, {"value", to_string(t.value)}, {"structural", t.structural}, {"subsets", subsets}});
  }
  res["residual_ties"] = {{"groups", set.ties.size()}, {"structural_groups", structural}, {"detail", ties}};
  if (set.imprecise_ties > 0) {
    rep.doc["warnings"].push_back(std::to_string(set.imprecise_ties) +
                                  " score value pair(s) merged within precision tolerance (imprecise ties)");
  }

  std::ostringstream plain;
  plain << "m=" << m << " n=" << n << " cascade=" << cascade.to_string() << " assignments=" << set.total << "\n";
  plain << "attainable p-values (" << set.pvalues.size() << "):";
  for (const auto& p : set.pvalues) plain << " " << to_string(p);
  plain << "\nrange-exact: " << (set.range_exact ? "verified" : "FAILED") << "\n";
  plain << "residual tie groups: " << set.ties.size() << " (" << structural << " structural)\n";

  if (reference && cascade.components().size() > 1) {
    auto base_components = cascade.components();
    base_components.pop_back();
    AttainableSet base = attainable_pvalues(m, n, CascadeStatistic(base_components), opts);
    ReferenceComparison cmp =
        compare_with_reference(set, base, *reference, reference_upper.value_or(Rational(1)));
    Json added = Json::array(), missing = Json::array(), extra = Json::array(), explain = Json::array();
    for (const auto& p : cmp.computed_added) added.push_back(to_string(p));
    for (const auto& p : cmp.missing) missing.push_back(to_string(p));
    for (const auto& p : cmp.extra) extra.push_back(to_string(p));
    plain << "reference comparison: " << (cmp.agrees() ? "agrees" : "differs") << "\n";
    for (const auto& e : cmp.explanations) {
      Json classes = Json::array();
      plain << "  " << to_string(e.pvalue) << (e.attained ? " computed, not in reference" : " in reference, not computed") << "\n";
      for (const auto& c : e.classes) {
        Json subsets = Json::array();
        for (const auto& s : c.subsets) subsets.push_back(s);
        classes.push_back({{"positions", {c.first_position, c.last_position}},
                           {"pvalue", to_string(c.pvalue)},
                           {"value", to_string(c.value)},
                           {"structural_tie", c.structural_tie},
                           {"subsets", subsets}});
        plain << "    positions " << c.first_position << ".." << c.last_position << " value " << to_string(c.value)
              << (c.structural_tie ? " [exact structural tie]" : "") << "\n";
        for (const auto& s : c.subsets) plain << "      x-ranks " << detail::subset_text(s) << "\n";
      }
      explain.push_back({{"pvalue", to_string(e.pvalue)}, {"attained", e.attained}, {"classes", classes}});
    }
    res["reference_comparison"] = {{"superset_of_base", cmp.superset},
                                   {"computed_added", added},
                                   {"missing_from_computed", missing},
                                   {"extra_in_computed", extra},
                                   {"explanations", explain}};
  }
  if (!set.range_exact) rep.exit_code = kTheoremCheckFailed;
  rep.plain = plain.str();
  return rep;
}

struct DemoOptions {
  /// Largest observed inclination in degrees (Bernoulli); default 7 deg 30'.
  Rational theta_degrees = Rational(15, 2);
  unsigned planets = 6;
  unsigned years = 82;
};

/// Two historical p-values. bernoulli1735: the maximum of k independent
/// uniform inclinations on [0, 90] is at most theta with probability
/// (theta/90)^k. arbuthnott1710: the number of male-majority years out of
/// 82 under a fair coin, computed as the induced p-value of the statistic
/// -count on the binomial trial.
inline RunReport cmd_demo(const std::string& name, const DemoOptions& opt = {}) {
  RunReport rep;
  std::ostringstream plain;
  if (name == "bernoulli1735") {
    if (opt.theta_degrees < 0 || opt.theta_degrees > 90) {
      throw Error(ErrorCode::ParseError, "theta must be within [0, 90] degrees");
    }
    rep.doc = detail::start_report(
        "demo", {{"name", name}, {"theta_degrees", to_string(opt.theta_degrees)}, {"planets", opt.planets}}, "");
    const Rational base = opt.theta_degrees / 90;
    Rational p = 1;
    for (unsigned i = 0; i < opt.planets; ++i) p *= base;
    rep.doc["results"]["pvalue"] = to_string(p);
    plain << "max of " << opt.planets << " uniform inclinations <= " << to_string(opt.theta_degrees)
          << " deg: p-value " << to_string(p) << "\n";
    if (p > 0) {
      Rational odds = (1 - p) / p;
      rep.doc["results"]["odds_against"] = to_string(odds) + " to 1";
      plain << "odds against: " << to_string(odds) << " to 1\n";
    }
  } else if (name == "arbuthnott1710") {
    rep.doc = detail::start_report("demo", {{"name", name}, {"years", opt.years}}, "");
    std::vector<Outcome> outcomes;
    std::map<std::string, OrdValue> stat;
    const Integer denom = Integer(1) << opt.years;
    for (unsigned k = 0; k <= opt.years; ++k) {
      Integer ways = 1;
      for (unsigned i = 0; i < k; ++i) ways = ways * (opt.years - i) / (i + 1);
      std::string label = std::to_string(k);
      outcomes.push_back({label, Rational(ways, denom)});
      stat.emplace(label, OrdValue::rank(-static_cast<std::int64_t>(k)));
    }
    FiniteTrial trial(std::move(outcomes));
    PFunction phat = induce_phat(trial, Statistic(std::move(stat)));
    const Rational& p = phat.at(std::to_string(opt.years));
    rep.doc["results"]["pvalue"] = to_string(p);
    plain << opt.years << " of " << opt.years << " years with more male births: p-value " << to_string(p) << "\n";
  } else {
    throw Error(ErrorCode::UnknownDemo, "unknown demo '" + name + "' (bernoulli1735, arbuthnott1710)");
  }
  rep.plain = plain.str();
  return rep;
}

/// Maps library errors to exit codes and an error report.
inline RunReport run_guarded(const std::function<RunReport()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    RunReport rep;
    rep.doc["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    rep.plain = std::string("error: ") + e.what() + "\n";
    rep.exit_code = e.code() == ErrorCode::SizeLimit ? kSizeCap : kInvalidInput;
    return rep;
  }
}

}  // namespace ordstat::cli
