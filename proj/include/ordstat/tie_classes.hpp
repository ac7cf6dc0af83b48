#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <variant>
#include <vector>

#include "ordstat/order.hpp"

namespace ordstat {

/// Dense ranking of a collection of same-shape values: `class_of[i]` is the
/// 0-based index of value i's tie class in ascending order.
struct TieClasses {
  std::vector<std::size_t> class_of;
  std::size_t count = 0;
};

namespace detail {

using LeafKey = std::variant<Rational, std::int64_t>;

inline void flatten_leaves(const OrdValue& v, std::vector<const OrdValue*>& out) {
  if (v.kind() == OrdValue::Kind::Tuple) {
    for (const auto& c : v.components()) flatten_leaves(c, out);
  } else {
    out.push_back(&v);
  }
}

}  // namespace detail

/// Ranks `values` into tie classes. Rational and Rank leaves are compared
/// exactly. Score leaves at each tuple position are first clustered: sorted
/// by value, with a new cluster started whenever compare() separates a value
/// from its predecessor. Merged-but-unequal scores count as imprecise ties in
/// `ctx`. After clustering the order is an exact lexicographic one, so the
/// classes are a genuine partition even when tolerance would not be
/// transitive.
inline TieClasses tie_classes(std::span<const OrdValue> values, CompareContext* ctx = nullptr) {
  TieClasses out;
  const std::size_t n = values.size();
  out.class_of.assign(n, 0);
  if (n == 0) return out;
  for (std::size_t i = 1; i < n; ++i) {
    if (!same_shape(values[0], values[i])) {
      throw Error(ErrorCode::ShapeMismatch, "mixed shapes " + shape_string(values[0]) + " and " +
                                                shape_string(values[i]));
    }
  }

  std::vector<std::vector<const OrdValue*>> leaves(n);
  for (std::size_t i = 0; i < n; ++i) detail::flatten_leaves(values[i], leaves[i]);
  const std::size_t width = leaves[0].size();

  std::vector<std::vector<detail::LeafKey>> keys(n, std::vector<detail::LeafKey>(width));
  std::vector<std::size_t> order(n);
  for (std::size_t pos = 0; pos < width; ++pos) {
    switch (leaves[0][pos]->kind()) {
      case OrdValue::Kind::Rational:
        for (std::size_t i = 0; i < n; ++i) keys[i][pos] = leaves[i][pos]->as_rational();
        break;
      case OrdValue::Kind::Rank:
        for (std::size_t i = 0; i < n; ++i) keys[i][pos] = leaves[i][pos]->as_rank();
        break;
      case OrdValue::Kind::Score: {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return leaves[a][pos]->as_score().value < leaves[b][pos]->as_score().value;
        });
        std::int64_t cluster = 0;
        keys[order[0]][pos] = cluster;
        for (std::size_t k = 1; k < n; ++k) {
          const Score& prev = leaves[order[k - 1]][pos]->as_score();
          const Score& cur = leaves[order[k]][pos]->as_score();
          if (detail::compare_scores(prev, cur, ctx) != Ordering::EQ) ++cluster;
          keys[order[k]][pos] = cluster;
        }
        break;
      }
      case OrdValue::Kind::Tuple:
        break;
    }
  }

  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::size_t cls = 0;
  out.class_of[order[0]] = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (keys[order[k - 1]] != keys[order[k]]) ++cls;
    out.class_of[order[k]] = cls;
  }
  out.count = cls + 1;
  return out;
}

}  // namespace ordstat
