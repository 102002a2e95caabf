#pragma once

// The double complex SK(f) on symbols [a, g, n] over Q, truncated at level f^N, its
// quotients by N and by SK', and the comparison with KT(Z, {0}^r, [2; 0]).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uod/arith.hpp"
#include "uod/chainkit.hpp"

namespace uod {

struct SkSymbol {
  std::int64_t a = 0;  // numerator of a over F = f^N, in [0, F)
  std::int64_t g = 1;  // squarefree divisor of f
  int n = 0;
};

/// SK(f) at level F = f^N: symbols [a, g, n] with a of order dividing F/g. They span a
/// subcomplex: every preimage term of the horizontal differential stays inside.
class SkComplex {
 public:
  SkComplex(std::int64_t f, int level, Window window) : f_(f), level_(level), window_(window), L_(Archimedean{}, 1) {
    const Archimedean Z;
    if (f < 2) throw Error(ErrorKind::InvalidArgument, "f must exceed 1");
    if (!is_squarefree(Z, f)) throw Error(ErrorKind::NotSquarefree, std::to_string(f) + " is not squarefree");
    if (level < 1) throw Error(ErrorKind::InvalidArgument, "level must be at least 1");
    for (const auto& pp : Z.factor(f)) primes_.push_back(pp.prime);
    require_window(window_, primes_.size());
    F_ = power(Z, f, level);
    L_ = XiLevel<Archimedean>(Z, F_);
    const std::size_t r = primes_.size();
    gs_.assign(r + 1, {});
    for (auto g : divisors(Z, f)) gs_[Z.factor(g).size()].push_back(g);
    symbols_.assign(r + 1, {});
    for (std::size_t m = 0; m <= r; ++m)
      for (auto g : gs_[m])
        for (std::int64_t x = 0; x < F_; x += g) {
          index_[key(x, g)] = symbols_[m].size();
          symbols_[m].push_back({x, g, 0});
        }
    dc_ = DoubleComplex(0, static_cast<int>(r), window_.lo, window_.hi);
    for (int m = 0; m <= static_cast<int>(r); ++m) {
      IntMatrix h = m > 0 ? partial(m) : IntMatrix();
      for (int n = window_.lo; n <= window_.hi; ++n) {
        dc_.set_rank(m, n, symbols_[m].size());
        if (m > 0) dc_.set_horizontal(m, n, h);
        if (n > window_.lo) dc_.set_vertical(m, n, delta(m, n));
      }
    }
    dc_.validate();
  }

  std::int64_t f() const { return f_; }
  int level() const { return level_; }
  std::int64_t modulus() const { return F_; }
  const Window& window() const { return window_; }
  std::size_t koszul_length() const { return primes_.size(); }
  const DoubleComplex& double_complex() const { return dc_; }
  const std::vector<std::int64_t>& divisors_with(std::size_t m) const { return gs_.at(m); }

  /// Symbols of bidegree (m, n); the n field is set from the argument.
  std::vector<SkSymbol> symbols(std::size_t m, int n) const {
    auto out = symbols_.at(m);
    for (auto& s : out) s.n = n;
    return out;
  }
  std::size_t symbol_count() const {
    std::size_t per_row = 0;
    for (const auto& v : symbols_) per_row += v.size();
    return per_row * static_cast<std::size_t>(window_.length());
  }
  std::size_t position(const SkSymbol& s) const { return index_.at(key(s.a, s.g)); }

  std::string format(const SkSymbol& s) const {
    return "[" + format_xi(Archimedean{}, xi_reduce(Archimedean{}, s.a, F_)) + "," + std::to_string(s.g) + "," +
           std::to_string(s.n) + "]";
  }

  /// d : SK_{m,n} -> SK_{m-1,n}.
  IntMatrix partial(int m) const {
    const auto& src = symbols_.at(static_cast<std::size_t>(m));
    IntMatrix d(symbols_.at(static_cast<std::size_t>(m - 1)).size(), src.size());
    for (std::size_t j = 0; j < src.size(); ++j) {
      const auto& s = src[j];
      int i = 0;
      for (auto p : primes_) {
        if (s.g % p) continue;
        const int sign = (i++ % 2 == 0) ? 1 : -1;
        const std::int64_t h = s.g / p;
        d(index_.at(key(s.a, h)), j) += sign;
        for (auto y : L_.preimages(p, static_cast<std::size_t>(s.a)))
          d(index_.at(key(static_cast<std::int64_t>(y), h)), j) -= sign;
      }
    }
    return d;
  }

  /// delta : SK_{m,n} -> SK_{m,n-1}, [a,g,n] -> (-1)^m ([a,g,n-1] + (-1)^n [-a,g,n-1]).
  IntMatrix delta(int m, int n) const {
    const auto& src = symbols_.at(static_cast<std::size_t>(m));
    IntMatrix d(src.size(), src.size());
    const int sm = (m % 2 == 0) ? 1 : -1;
    const int sn = (n % 2 == 0) ? 1 : -1;
    for (std::size_t j = 0; j < src.size(); ++j) {
      const auto& s = src[j];
      d(j, j) += sm;
      d(index_.at(key((F_ - s.a) % F_, s.g)), j) += sm * sn;
    }
    return d;
  }

  /// Quotient by SK': the symbols with a = 0.
  ChainComplex quotient_skprime() const {
    const int r = static_cast<int>(primes_.size());
    DoubleComplex q(0, r, window_.lo, window_.hi);
    for (int m = 0; m <= r; ++m) {
      std::vector<std::size_t> zero;
      for (std::size_t j = 0; j < symbols_[static_cast<std::size_t>(m)].size(); ++j)
        if (symbols_[static_cast<std::size_t>(m)][j].a == 0) zero.push_back(j);
      std::vector<std::size_t> below;
      if (m > 0)
        for (std::size_t j = 0; j < symbols_[static_cast<std::size_t>(m - 1)].size(); ++j)
          if (symbols_[static_cast<std::size_t>(m - 1)][j].a == 0) below.push_back(j);
      for (int n = window_.lo; n <= window_.hi; ++n) {
        q.set_rank(m, n, zero.size());
        if (m > 0) q.set_horizontal(m, n, dc_.horizontal(m, n).select_rows(below).select_cols(zero));
        if (n > window_.lo) q.set_vertical(m, n, dc_.vertical(m, n).select_rows(zero).select_cols(zero));
      }
    }
    q.validate();
    return q.total();
  }

  /// Quotient by N: the row m = 0 modulo the images d[a, p, n] of the prime symbols.
  PresentedComplex quotient_n() const {
    std::vector<std::size_t> ranks;
    std::vector<IntMatrix> diffs;
    std::map<int, IntMatrix> rel;
    const IntMatrix d1 = primes_.empty() ? IntMatrix(symbols_[0].size(), 0) : partial(1);
    for (int n = window_.lo; n <= window_.hi; ++n) {
      ranks.push_back(symbols_[0].size());
      if (n > window_.lo) diffs.push_back(dc_.vertical(0, n));
      rel[n] = d1;
    }
    return make_presented(make_complex(window_.lo, std::move(ranks), std::move(diffs)), std::move(rel));
  }

  std::vector<int> interior() const { return interior_degrees(window_, primes_.size()); }

 private:
  static std::uint64_t key(std::int64_t a, std::int64_t g) {
    return (static_cast<std::uint64_t>(a) << 24) ^ static_cast<std::uint64_t>(g);
  }

  std::int64_t f_;
  int level_;
  Window window_;
  std::int64_t F_ = 1;
  XiLevel<Archimedean> L_;
  std::vector<std::int64_t> primes_;
  std::vector<std::vector<std::int64_t>> gs_;
  std::vector<std::vector<SkSymbol>> symbols_;
  std::map<std::uint64_t, std::size_t> index_;
  DoubleComplex dc_;
};

inline SkComplex build_sk(std::int64_t f, int level, std::optional<Window> window = std::nullopt) {
  const Archimedean Z;
  const std::size_t r = f >= 2 ? Z.factor(f).size() : 0;
  return SkComplex(f, level, window.value_or(default_window(r)));
}

struct SkComparison {
  HomologyTable via_n;
  HomologyTable via_skprime;
  HomologyTable kt_reference;
  bool agree = false;
};

inline SkComparison sk_quotients_homology(const SkComplex& sk) {
  SkComparison c;
  const auto degrees = sk.interior();
  c.via_n = homology(sk.quotient_n(), degrees);
  c.via_skprime = homology(sk.quotient_skprime(), degrees);
  KtComplex kt = build_kt_scalar(std::vector<Integer>(sk.koszul_length(), Integer(0)), 2, 0);
  c.kt_reference = kt.interior_homology(Companion::KTtot, sk.window());
  c.agree = c.via_n == c.via_skprime && c.via_skprime == c.kt_reference;
  return c;
}

struct SkInclusionReport {
  std::int64_t f = 1, g = 1;
  HomologyTable source, target;
  bool injective = false;
  std::size_t corank = 0;  // in torsion cyclic factors, at the first interior degree
};

/// SK(f)/SK' -> SK(g)/SK' on total homology, for f | g squarefree, both on the window of g.
inline SkInclusionReport sk_inclusion_check(std::int64_t f, std::int64_t g, int level,
                                            std::optional<Window> window = std::nullopt) {
  if (f < 2 || g % f) throw Error(ErrorKind::NotDivisible, std::to_string(f) + " does not divide " + std::to_string(g));
  SkComplex big = build_sk(g, level, window);
  SkComplex small(f, level, big.window());
  ChainComplex src = small.quotient_skprime(), dst = big.quotient_skprime();
  const auto& dsrc = small.double_complex();
  const auto& ddst = big.double_complex();
  std::map<int, IntMatrix> comps;
  for (int t = src.lo(); t <= src.hi(); ++t) {
    IntMatrix c(dst.rank(t), src.rank(t));
    std::size_t off_src = 0;
    for (std::size_t m = 0; m <= small.koszul_length(); ++m) {
      const int n = t - static_cast<int>(m);
      if (!dsrc.contains(static_cast<int>(m), n)) continue;
      std::size_t off_dst = 0;
      for (std::size_t k = 0; k < m; ++k)
        if (ddst.contains(static_cast<int>(k), t - static_cast<int>(k))) off_dst += big.divisors_with(k).size();
      const auto& hs = small.divisors_with(m);
      const auto& hg = big.divisors_with(m);
      for (std::size_t j = 0; j < hs.size(); ++j) {
        auto pos = static_cast<std::size_t>(std::find(hg.begin(), hg.end(), hs[j]) - hg.begin());
        c(off_dst + pos, off_src + j) = 1;
      }
      off_src += hs.size();
    }
    comps.emplace(t, std::move(c));
  }
  ChainMap map = make_chain_map(src, dst, std::move(comps));
  SkInclusionReport rep;
  rep.f = f;
  rep.g = g;
  const auto degrees = big.interior();
  rep.source = homology(src, degrees);
  rep.target = homology(dst, degrees);
  rep.injective = true;
  for (int t : degrees)
    if (!induced_map_injective(map, t)) rep.injective = false;
  const auto& a = rep.source.at(degrees.front());
  const auto& b = rep.target.at(degrees.front());
  rep.corank = b.torsion.size() + b.free_rank - a.torsion.size() - a.free_rank;
  return rep;
}

}  // namespace uod
