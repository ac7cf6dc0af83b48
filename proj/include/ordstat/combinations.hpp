#pragma once

#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

namespace ordstat {

/// C(n, k), or nullopt if it does not fit in 64 bits.
inline std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(result);
}

/// The `index`-th k-subset of {0..n-1} in lexicographic order.
inline std::vector<unsigned> unrank_combination(unsigned n, unsigned k, std::uint64_t index) {
  std::vector<unsigned> out;
  out.reserve(k);
  unsigned next = 0;
  for (unsigned slot = 0; slot < k; ++slot) {
    for (unsigned v = next;; ++v) {
      std::uint64_t with_v = *binomial(n - v - 1, k - slot - 1);
      if (index < with_v) {
        out.push_back(v);
        next = v + 1;
        break;
      }
      index -= with_v;
    }
  }
  return out;
}

/// Advances to the next k-subset in lexicographic order; false after the last.
inline bool next_combination(std::vector<unsigned>& c, unsigned n) {
  const unsigned k = static_cast<unsigned>(c.size());
  for (unsigned i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (unsigned j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

/// Splits [0, total) into `workers` contiguous ranges and calls
/// body(worker, begin, end) for each, in parallel when workers > 1.
template <typename Body>
void parallel_ranges(std::uint64_t total, unsigned workers, Body&& body) {
  if (workers <= 1 || total < 2) {
    body(0u, std::uint64_t{0}, total);
    return;
  }
  if (workers > total) workers = static_cast<unsigned>(total);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      std::uint64_t begin = total * w / workers;
      std::uint64_t end = total * (w + 1) / workers;
      threads.emplace_back([&body, &errors, w, begin, end] {
        try {
          body(w, begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace ordstat
