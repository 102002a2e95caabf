#pragma once

// Independent test-side oracles. Deliberately naive: brute-force minors,
// cofactor expansion, exhaustive search. Nothing here shares code with the
// elimination routines under test.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "uod/znf.hpp"

namespace oracle {

using uod::IntMatrix;
using uod::Integer;

inline Integer cofactor_determinant(const IntMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  Integer det = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (m(0, j) == 0) continue;
    IntMatrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t k = 0, c = 0; k < n; ++k)
        if (k != j) minor(i - 1, c++) = m(i, k);
    Integer term = m(0, j) * cofactor_determinant(minor);
    det += (j % 2 ? -term : term);
  }
  return det;
}

inline void for_each_subset(std::size_t n, std::size_t k,
                            const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(k);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == k) {
      fn(idx);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

/// Invariant factors from determinantal divisors: D_k = gcd of all k x k minors, d_k = D_k / D_{k-1}.
inline std::vector<Integer> determinantal_invariants(const IntMatrix& m) {
  const std::size_t k_max = std::min(m.rows(), m.cols());
  std::vector<Integer> out;
  Integer prev = 1;
  for (std::size_t k = 1; k <= k_max; ++k) {
    Integer g = 0;
    for_each_subset(m.rows(), k, [&](const std::vector<std::size_t>& rs) {
      for_each_subset(m.cols(), k, [&](const std::vector<std::size_t>& cs) {
        Integer d = cofactor_determinant(m.select_rows(rs).select_cols(cs));
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      });
    });
    if (g == 0) {
      while (out.size() < k_max) out.emplace_back(0);
      break;
    }
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

/// Primitive kernel vectors with entries in [-bound, bound], one per ray (first nonzero positive).
inline std::vector<std::vector<Integer>> kernel_by_search(const IntMatrix& m, long bound) {
  std::vector<std::vector<Integer>> found;
  const std::size_t n = m.cols();
  std::vector<long> v(n, -bound);
  for (;;) {
    bool nonzero = std::any_of(v.begin(), v.end(), [](long x) { return x != 0; });
    if (nonzero) {
      long first = *std::find_if(v.begin(), v.end(), [](long x) { return x != 0; });
      long g = 0;
      for (long x : v) g = std::gcd(g, std::labs(x));
      bool ok = first > 0 && g == 1;
      for (std::size_t i = 0; ok && i < m.rows(); ++i) {
        Integer s = 0;
        for (std::size_t j = 0; j < n; ++j) s += m(i, j) * v[j];
        ok = s == 0;
      }
      if (ok) found.emplace_back(v.begin(), v.end());
    }
    std::size_t i = 0;
    while (i < n && v[i] == bound) v[i++] = -bound;
    if (i == n) break;
    ++v[i];
  }
  return found;
}

}  // namespace oracle
