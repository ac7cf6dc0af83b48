#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "ordstat/cli.hpp"

using namespace ordstat;

int main(int argc, char** argv) {
  CLI::App app{"ordstat: exact p-functions, randomized p-values and rank cascade tests"};
  app.require_subcommand(1);

  long precision = kDefaultPrecision;
  bool plain = false;
  app.add_option("--precision", precision, "working precision in decimal digits")
      ->envname("ORDSTAT_PRECISION")
      ->check(CLI::Range(static_cast<long>(kMinPrecision), static_cast<long>(kMaxPrecision)));
  app.add_flag("--plain", plain, "human-readable summary instead of the JSON report");

  std::string trial_file, outcome, r_text, data_file, xs_text, ys_text, cascade_text = "wilcoxon", mode = "exact";
  std::string reference_text, reference_upper_text, theta_text = "15/2", demo_name;
  std::optional<std::uint64_t> seed;
  std::uint64_t draws = 10000, max_enum = 10'000'000;
  unsigned workers = 1, m = 0, n = 0, planets = 6;
  bool verify_exact = false;

  auto* induce = app.add_subcommand("induce", "induced p-function of a trial's statistic");
  induce->add_option("--trial", trial_file, "trial JSON file")->required();

  auto* randomize = app.add_subcommand("randomize", "randomized p-value at one outcome");
  randomize->add_option("--trial", trial_file, "trial JSON file")->required();
  randomize->add_option("--outcome", outcome, "outcome label")->required();
  auto* r_opt = randomize->add_option("--r", r_text, "randomization value p/q in [0,1]");
  randomize->add_option("--seed", seed, "draw r from this seed")->excludes(r_opt);
  randomize->add_flag("--verify-exact", verify_exact, "check P[p<=eps]=eps on the grid k/97");

  auto* midp = app.add_subcommand("midp", "mid-p-values and their classification");
  midp->add_option("--trial", trial_file, "trial JSON file")->required();

  auto* twosample = app.add_subcommand("twosample", "two-sample cascade test");
  auto* data_opt = twosample->add_option("--data", data_file, "two-column file: value group");
  twosample->add_option("--xs", xs_text, "comma-separated x observations")->excludes(data_opt);
  twosample->add_option("--ys", ys_text, "comma-separated y observations")->excludes(data_opt);
  twosample->add_option("--cascade", cascade_text, "components: wilcoxon,fyt,vdw,laplace,t");
  twosample->add_option("--mode", mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
  twosample->add_option("--seed", seed, "Monte Carlo seed");
  twosample->add_option("--draws", draws, "Monte Carlo draws")->check(CLI::PositiveNumber);
  twosample->add_option("--max-enum", max_enum, "enumeration cap");
  twosample->add_option("--workers", workers, "enumeration threads")->check(CLI::Range(1u, 256u));

  auto* table = app.add_subcommand("table", "attainable p-value set of a rank cascade");
  table->add_option("m", m, "size of the first group")->required()->check(CLI::PositiveNumber);
  table->add_option("n", n, "size of the second group")->required()->check(CLI::PositiveNumber);
  table->add_option("cascade", cascade_text, "components: wilcoxon,fyt,vdw,laplace");
  table->add_option("--max-enum", max_enum, "enumeration cap");
  table->add_option("--workers", workers, "enumeration threads")->check(CLI::Range(1u, 256u));
  table->add_option("--reference", reference_text, "published added points, comma-separated p/q");
  table->add_option("--reference-upper", reference_upper_text, "upper end of the published range");

  auto* demo = app.add_subcommand("demo", "historical p-values");
  demo->add_option("name", demo_name, "bernoulli1735 or arbuthnott1710")->required();
  demo->add_option("--theta", theta_text, "bernoulli1735: largest inclination in degrees, p/q");
  demo->add_option("--k", planets, "bernoulli1735: number of planets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kInvalidInput;
  }

  const unsigned digits = static_cast<unsigned>(precision);
  PrecisionScope scope(digits);
  auto opts = [&] {
    EnumerationOptions o;
    o.digits = digits;
    o.max_enum = max_enum;
    o.workers = workers;
    return o;
  };

  cli::RunReport report = cli::run_guarded([&]() -> cli::RunReport {
    if (*induce) return cli::cmd_induce(trial_file, digits);
    if (*randomize) {
      std::optional<Rational> r;
      if (!r_text.empty()) r = parse_rational(r_text);
      return cli::cmd_randomize(trial_file, outcome, r, seed, verify_exact, digits);
    }
    if (*midp) return cli::cmd_midp(trial_file, digits);
    if (*twosample) {
      std::string bytes;
      std::optional<TwoSample> sample;
      if (!data_file.empty()) {
        bytes = read_file(data_file);
        sample.emplace(parse_two_sample(bytes));
      } else {
        if (xs_text.empty() || ys_text.empty()) {
          throw Error(ErrorCode::ParseError, "give --data FILE or both --xs and --ys");
        }
        bytes = "xs=" + xs_text + "\nys=" + ys_text + "\n";
        sample.emplace(parse_decimal_list(xs_text), parse_decimal_list(ys_text));
      }
      return cli::cmd_twosample(*sample, bytes, CascadeStatistic::parse(cascade_text),
                                mode == "exact" ? cli::Mode::Exact : cli::Mode::MonteCarlo, seed, draws, opts());
    }
    if (*table) {
      std::optional<std::vector<Rational>> reference;
      std::optional<Rational> upper;
      if (!reference_text.empty()) {
        reference.emplace();
        std::istringstream in(reference_text);
        std::string item;
        while (std::getline(in, item, ',')) reference->push_back(parse_rational(item));
      }
      if (!reference_upper_text.empty()) upper = parse_rational(reference_upper_text);
      return cli::cmd_table(m, n, CascadeStatistic::parse(cascade_text), opts(), reference, upper);
    }
    cli::DemoOptions d;
    d.theta_degrees = parse_rational(theta_text);
    d.planets = planets;
    return cli::cmd_demo(demo_name, d);
  });

  if (report.doc.contains("error")) {
    std::cerr << report.plain;
    if (!plain) std::cout << report.doc.dump(2) << "\n";
  } else {
    std::cout << report.render(plain);
  }
  return report.exit_code;
}
