#pragma once

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ordstat/error.hpp"
#include "ordstat/order.hpp"
#include "ordstat/rank_perm.hpp"
#include "ordstat/rational.hpp"
#include "ordstat/trial.hpp"

// Trial documents are JSON:
//
//   {
//     "outcomes":  [ {"label": "a", "prob": "1/2"}, ... ],
//     "statistic": { "a": <value>, ... }
//   }
//
// where <value> is
//   "p/q" or "p"          exact Rational
//   integer               Rank
//   {"score": "1.25e-3"}  Score (decimal text, held at the working precision)
//   [<value>, ...]        lexicographic Tuple
//
// Probabilities must be strings in rational form; "0.33" or 0.33 is rejected.
//
// Two-sample data files have one observation per line, "<value> <group>",
// separated by whitespace, a comma, a tab or a semicolon. '#' starts a comment. Exactly two
// group labels must occur; the group labelled "x" takes the x role if
// present, otherwise the first label seen does.

namespace ordstat {

using Json = nlohmann::ordered_json;

struct TrialDocument {
  FiniteTrial trial;
  std::optional<Statistic> statistic;
};

namespace detail {

[[noreturn]] inline void field_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, "field '" + path + "': " + what);
}

inline Rational rational_field(const Json& j, const std::string& path) {
  if (!j.is_string()) field_error(path, "expected a rational string such as \"1/3\", got " + j.dump());
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    field_error(path, e.what());
  }
}

inline OrdValue value_field(const Json& j, const std::string& path, unsigned digits) {
  if (j.is_string()) return OrdValue::rational(rational_field(j, path));
  if (j.is_number_integer()) return OrdValue::rank(j.get<std::int64_t>());
  if (j.is_array()) {
    std::vector<OrdValue> parts;
    for (std::size_t i = 0; i < j.size(); ++i) parts.push_back(value_field(j[i], path + "[" + std::to_string(i) + "]", digits));
    if (parts.empty()) field_error(path, "empty tuple");
    return lex_tuple(std::move(parts));
  }
  if (j.is_object() && j.size() == 1 && j.contains("score") && j["score"].is_string()) {
    Rational q;
    try {
      q = parse_decimal(j["score"].get<std::string>());
    } catch (const Error& e) {
      field_error(path + ".score", e.what());
    }
    PrecisionScope scope(digits);
    return OrdValue::score(to_real(q), digits);
  }
  field_error(path, "expected a rational string, integer rank, {\"score\": \"...\"} or array, got " + j.dump());
}

}  // namespace detail

inline TrialDocument parse_trial_json(const std::string& text, unsigned digits = kDefaultPrecision) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "trial document must be a JSON object");
  if (!doc.contains("outcomes") || !doc["outcomes"].is_array()) detail::field_error("outcomes", "missing or not an array");

  std::vector<Outcome> outcomes;
  const Json& list = doc["outcomes"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "outcomes[" + std::to_string(i) + "]";
    const Json& o = list[i];
    if (!o.is_object()) detail::field_error(path, "expected an object");
    if (!o.contains("label") || !o["label"].is_string()) detail::field_error(path + ".label", "missing or not a string");
    if (!o.contains("prob")) detail::field_error(path + ".prob", "missing");
    outcomes.push_back({o["label"].get<std::string>(), detail::rational_field(o["prob"], path + ".prob")});
  }
  TrialDocument out{FiniteTrial(std::move(outcomes)), std::nullopt};

  if (doc.contains("statistic")) {
    const Json& s = doc["statistic"];
    if (!s.is_object()) detail::field_error("statistic", "expected an object mapping labels to values");
    std::map<std::string, OrdValue> values;
    for (const auto& [label, v] : s.items()) values.emplace(label, detail::value_field(v, "statistic." + label, digits));
    out.statistic = Statistic(std::move(values));
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json to_json(const OrdValue& v) {
  switch (v.kind()) {
    case OrdValue::Kind::Rational: return to_string(v.as_rational());
    case OrdValue::Kind::Rank: return v.as_rank();
    case OrdValue::Kind::Score: return Json{{"score", to_string(v)}};
    case OrdValue::Kind::Tuple: {
      Json arr = Json::array();
      for (const auto& c : v.components()) arr.push_back(to_json(c));
      return arr;
    }
  }
  return nullptr;
}

inline Json trial_to_json(const FiniteTrial& trial, const Statistic* stat = nullptr) {
  Json doc;
  doc["outcomes"] = Json::array();
  for (const auto& o : trial.outcomes()) doc["outcomes"].push_back({{"label", o.label}, {"prob", to_string(o.prob)}});
  if (stat) {
    doc["statistic"] = Json::object();
    for (const auto& o : trial.outcomes()) {
      auto it = stat->values().find(o.label);
      if (it != stat->values().end()) doc["statistic"][o.label] = to_json(it->second);
    }
  }
  return doc;
}

inline TwoSample parse_two_sample(const std::string& text) {
  std::vector<std::pair<std::string, std::vector<Rational>>> groups;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',' || c == '\t' || c == ';' || c == '\r') c = ' ';
    }
    std::istringstream fields(line);
    std::string value, group, rest;
    if (!(fields >> value)) continue;
    if (!(fields >> group) || (fields >> rest)) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected '<value> <group>'");
    }
    Rational q;
    try {
      q = parse_decimal(value);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
    }
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == group; });
    if (it == groups.end()) {
      if (groups.size() == 2) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": third group label '" + group + "'");
      }
      groups.push_back({group, {}});
      it = groups.end() - 1;
    }
    it->second.push_back(std::move(q));
  }
  if (groups.size() != 2) throw Error(ErrorCode::ParseError, "data must contain exactly two group labels");
  if (groups[1].first == "x") std::swap(groups[0], groups[1]);
  return TwoSample(std::move(groups[0].second), std::move(groups[1].second));
}

/// Parses a comma-separated list of decimals, e.g. "1.0,3.5,-2".
inline std::vector<Rational> parse_decimal_list(const std::string& text) {
  std::vector<Rational> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_decimal(item));
  return out;
}

}  // namespace ordstat
