#include <iostream>

#include "ordstat/randomized.hpp"

using namespace ordstat;

int main() {
  FiniteTrial trial({{"a", Rational(1, 2)}, {"b", Rational(1, 4)}, {"c", Rational(1, 4)}});
  Statistic f({{"a", OrdValue::rank(1)}, {"b", OrdValue::rank(2)}, {"c", OrdValue::rank(3)}});

  PFunction p = induce_phat(trial, f);
  for (const auto& [label, v] : p.entries()) std::cout << label << " " << to_string(v) << "\n";
  std::cout << to_string(classify_pfunction(trial, p).kind) << "\n";

  auto rpf = build_randomized(trial, f);
  std::cout << to_string(randomized_pvalue(rpf, "b", Rational(1, 3))) << "\n";
}
