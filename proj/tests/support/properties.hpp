#pragma once

// Property harness shared by test_properties (gtest) and the acceptance binary.
// Each property runs an exhaustive small-parameter sweep; matrix fuzzing uses fixed seeds.

#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "uod/cli.hpp"
#include "uod/distmod.hpp"
#include "uod/ftate.hpp"
#include "uod/iwasawa.hpp"
#include "uod/signh.hpp"
#include "uod/skcx.hpp"

namespace props {

using namespace uod;

struct Outcome {
  std::size_t cases = 0;
  std::vector<std::string> failures;
  bool passed() const { return cases > 0 && failures.empty(); }
};

class Recorder {
 public:
  void check(bool ok, const std::string& what) {
    ++out_.cases;
    if (!ok && out_.failures.size() < 8) out_.failures.push_back(what);
  }
  Outcome take() { return std::move(out_); }

 private:
  Outcome out_;
};

struct Property {
  std::string module;
  std::string name;
  std::function<Outcome()> run;
};

// ---------------------------------------------------------------------------
// Generators

inline IntMatrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols, int bound) {
  std::uniform_int_distribution<int> d(-bound, bound);
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = d(rng);
  return m;
}

/// Product of random elementary row operations and sign flips.
inline IntMatrix random_unimodular(std::mt19937& rng, std::size_t n, int steps = 12) {
  IntMatrix u = IntMatrix::identity(n);
  if (n == 0) return u;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<int> coef(-2, 2);
  for (int s = 0; s < steps; ++s) {
    std::size_t i = pick(rng), j = pick(rng);
    IntMatrix e = IntMatrix::identity(n);
    if (i == j)
      e(i, i) = -1;
    else
      e(i, j) = coef(rng);
    u = e * u;
  }
  return u;
}

inline IntMatrix permutation_matrix(const std::vector<std::size_t>& p) {
  IntMatrix m(p.size(), p.size());
  for (std::size_t j = 0; j < p.size(); ++j) m(p[j], j) = 1;
  return m;
}

inline IntMatrix block_diagonal(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, a.cols() + j) = b(i, j);
  return m;
}

/// Invariants of A (+) B, normalized through SNF of the diagonal relation matrix.
inline AbGroupInvariants direct_sum(const AbGroupInvariants& a, const AbGroupInvariants& b) {
  std::vector<Integer> t = a.torsion;
  t.insert(t.end(), b.torsion.begin(), b.torsion.end());
  const std::size_t n = t.size() + a.free_rank + b.free_rank;
  IntMatrix rel(n, t.size());
  for (std::size_t i = 0; i < t.size(); ++i) rel(i, i) = t[i];
  return cokernel(rel).invariants;
}

/// Monic polynomials over F_q of degree 1..max_degree, in code order.
inline std::vector<FqPoly> monic_polys(const FunctionField& F, int max_degree) {
  std::vector<FqPoly> out;
  std::size_t bound = 1;
  for (int d = 0; d <= max_degree; ++d) bound *= static_cast<std::size_t>(F.q());
  for (std::size_t c = static_cast<std::size_t>(F.q()); c < bound; ++c) {
    auto f = F.from_code(c);
    if (f.lead() == 1) out.push_back(f);
  }
  return out;
}

inline int euler_characteristic(const HomologyTable& t) {
  int chi = 0;
  for (const auto& [n, g] : t) chi += (n % 2 == 0 ? 1 : -1) * static_cast<int>(g.free_rank);
  return chi;
}

// ---------------------------------------------------------------------------
// znf

inline Outcome znf_snf_transforms() {
  Recorder r;
  std::mt19937 rng(1001);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t rows = rng() % 6, cols = rng() % 6;
    IntMatrix m = random_matrix(rng, rows, cols, 9);
    auto s = snf(m);
    IntMatrix d(rows, cols);
    for (std::size_t i = 0; i < s.invariants.size(); ++i) d(i, i) = s.invariants[i];
    const bool diag = s.left * m * s.right == d;
    const bool unimod = is_unit(oracle::cofactor_determinant(s.left)) && is_unit(oracle::cofactor_determinant(s.right));
    bool divides = true;
    for (std::size_t i = 0; i + 1 < s.invariants.size(); ++i)
      if (s.invariants[i] != 0 && s.invariants[i + 1] % s.invariants[i] != 0) divides = false;
    r.check(diag && unimod && divides, "snf contract for " + m.str());
  }
  return r.take();
}

inline Outcome znf_cokernel_permutation_invariance() {
  Recorder r;
  std::mt19937 rng(1002);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t rows = 1 + rng() % 5, cols = 1 + rng() % 5;
    IntMatrix m = random_matrix(rng, rows, cols, 6);
    std::vector<std::size_t> pr(rows), pc(cols);
    std::iota(pr.begin(), pr.end(), 0);
    std::iota(pc.begin(), pc.end(), 0);
    std::shuffle(pr.begin(), pr.end(), rng);
    std::shuffle(pc.begin(), pc.end(), rng);
    auto a = cokernel(m).invariants;
    auto b = cokernel(m.select_rows(pr).select_cols(pc)).invariants;
    r.check(a == b, "permuted cokernel of " + m.str());
  }
  return r.take();
}

inline Outcome znf_kernel_basis() {
  Recorder r;
  std::mt19937 rng(1003);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t rows = 1 + rng() % 4, cols = 1 + rng() % 6;
    IntMatrix m = random_matrix(rng, rows, cols, 4);
    if (trial % 3 == 0 && rows > 1)  // force dependent rows
      for (std::size_t j = 0; j < cols; ++j) m(rows - 1, j) = 2 * m(0, j);
    IntMatrix k = kernel_basis(m);
    bool saturated = true;
    for (const auto& d : snf_invariants(k))
      if (d != 1) saturated = false;
    r.check((m * k).is_zero() && rank(k) == k.cols() && k.cols() + rank(m) == cols && saturated,
            "kernel basis of " + m.str());
  }
  return r.take();
}

// ---------------------------------------------------------------------------
// chainkit

inline bool anticommutes(const DoubleComplex& dc) {
  for (int m = dc.m_lo(); m <= dc.m_hi(); ++m)
    for (int n = dc.n_lo(); n <= dc.n_hi(); ++n)
      if (!(dc.horizontal(m, n - 1) * dc.vertical(m, n) + dc.vertical(m - 1, n) * dc.horizontal(m, n)).is_zero())
        return false;
  return true;
}

inline Outcome chainkit_anticommutation() {
  Recorder r;
  std::mt19937 rng(2001);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> d(-3, 3);
    std::vector<Integer> fs(1 + rng() % 3);
    for (auto& f : fs) f = d(rng);
    const long m = 1 + static_cast<long>(rng() % 4);
    auto kt = build_kt_scalar(fs, m, 0);
    r.check(anticommutes(kt.rectangle(default_window(fs.size()))), "scalar KT");
  }
  // KT over A(F) with Koszul maps X_p and [N; 1 - gamma0]
  for (std::int64_t F : {3, 12, 15}) {
    auto af = build_af(Archimedean{}, F);
    auto ops = af.module.operators;
    const IntMatrix& g = af.module.op(kGamma0);
    ops["N"] = norm_operator(g, 2);
    ops["1-g"] = IntMatrix::identity(af.rank()) - g;
    auto mod = make_action_module(af.rank(), ops, af.module.nu);
    auto kt = build_kt(mod, af.x_names(), "N", "1-g");
    r.check(anticommutes(kt.rectangle(default_window(af.primes.size()))), "KT over A(" + std::to_string(F) + ")");
  }
  for (std::int64_t f : {3, 15, 21}) {
    auto sk = build_sk(f, 1);
    r.check(anticommutes(sk.double_complex()), "SK(" + std::to_string(f) + ")");
  }
  auto sk2 = build_sk(15, 2);
  r.check(anticommutes(sk2.double_complex()), "SK(15) at level 2");
  return r.take();
}

/// Chain maps X -> X of the form k + d h + h d for a random homotopy h.
inline Outcome chainkit_cone_euler() {
  Recorder r;
  std::mt19937 rng(2002);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t a = rng() % 4, b = 1 + rng() % 4, c = rng() % 4;
    IntMatrix d1 = random_matrix(rng, a, b, 3);
    IntMatrix d2(b, c);
    // d1 d2 = 0: take d2 from the kernel of d1
    IntMatrix k = kernel_basis(d1);
    std::uniform_int_distribution<int> co(-2, 2);
    for (std::size_t j = 0; j < c; ++j) {
      IntMatrix col(k.cols(), 1);
      for (std::size_t i = 0; i < k.cols(); ++i) col(i, 0) = co(rng);
      IntMatrix v = k * col;
      for (std::size_t i = 0; i < b; ++i) d2(i, j) = v(i, 0);
    }
    ChainComplex x = make_complex(0, {a, b, c}, {d1, d2});
    const Integer s = co(rng);
    IntMatrix h0 = random_matrix(rng, b, a, 2), h1 = random_matrix(rng, c, b, 2);
    std::map<int, IntMatrix> comps;
    comps[0] = IntMatrix::scalar(a, s) + d1 * h0;
    comps[1] = IntMatrix::scalar(b, s) + h0 * d1 + d2 * h1;
    comps[2] = IntMatrix::scalar(c, s) + h1 * d2;
    ChainMap f = make_chain_map(x, x, std::move(comps));
    auto cone = mapping_cone(f);
    const int lhs = euler_characteristic(homology(cone.complex));
    const int rhs = euler_characteristic(homology(twist(x, 1))) + euler_characteristic(homology(x));
    r.check(lhs == rhs, "cone Euler characteristic, trial " + std::to_string(trial));
  }
  return r.take();
}

inline Outcome chainkit_unimodular_k_acyclic() {
  Recorder r;
  std::mt19937 rng(2003);
  for (int trial = 0; trial < 50; ++trial) {
    IntMatrix g = random_unimodular(rng, 2);
    auto mod = make_action_module(2, {{"f", g}, {"plus", IntMatrix::zero(2, 2)}, {"minus", IntMatrix::zero(2, 2)}});
    auto kt = build_kt(mod, {"f"}, "plus", "minus");
    bool acyclic = true;
    for (const auto& [n, h] : homology(kt.companion(Companion::K)))
      if (!h.is_zero()) acyclic = false;
    r.check(acyclic, "K for unimodular " + g.str());
  }
  return r.take();
}

inline Outcome chainkit_window_independence() {
  Recorder r;
  std::mt19937 rng(2004);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> d(-2, 3);
    std::vector<Integer> fs(rng() % 3);
    for (auto& f : fs) f = d(rng);
    const long m = 1 + static_cast<long>(rng() % 4);
    auto kt = build_kt_scalar(fs, m, 0);
    const int len = minimum_window_length(fs.size());
    auto small = kt.interior_homology(Companion::KTtot, centered_window(len + 1));
    auto large = kt.interior_homology(Companion::KTtot, Window{-len - 2, len + 2});
    bool same = !small.empty();
    for (const auto& [n, g] : small)
      if (!large.count(n) || !(large.at(n) == g)) same = false;
    r.check(same, "window independence, trial " + std::to_string(trial));
  }
  return r.take();
}

// ---------------------------------------------------------------------------
// arith

template <class B>
void y_composition(Recorder& r, const B& b, const std::vector<typename B::Elem>& levels,
                   const std::vector<typename B::Elem>& gs) {
  for (const auto& F : levels)
    for (const auto& x : xi_classes(b, F))
      for (const auto& f : gs)
        for (const auto& g : gs)
          r.check(same_class(b, y_map(b, f, y_map(b, g, x)), y_map(b, b.mul(f, g), x)),
                  "Y composition at " + format_xi(b, x));
}

template <class B>
void y_equivariance(Recorder& r, const B& b, const std::vector<typename B::Elem>& levels,
                    const std::vector<typename B::Elem>& gs) {
  for (const auto& F : levels)
    for (const auto& s : gf_group(b, F))
      for (const auto& x : xi_classes(b, F))
        for (const auto& g : gs)
          r.check(same_class(b, g_action(b, s, y_map(b, g, x)), y_map(b, g, g_action(b, s, x))),
                  "equivariance at " + format_xi(b, x));
}

template <class B>
void torsor(Recorder& r, const B& b, const typename B::Elem& F) {
  std::map<std::string, std::size_t> seen;
  for (const auto& x : xi_classes(b, F)) ++seen[format_xi(b, x)];
  bool distinct = seen.size() == b.norm(F);
  std::size_t total = 0;
  for (const auto& g : divisors(b, F)) {
    std::size_t exact = 0;
    for (const auto& x : xi_classes(b, F))
      if (b.equal(x.level, b.canonical(g))) ++exact;
    r.check(exact == gf_group(b, g).size(), "|Xi^x(" + b.format(g) + ")| = |G|");
    total += exact;
  }
  r.check(distinct && total == b.norm(F), "Xi(" + b.format(F) + ") is the disjoint union over divisors");
}

template <class B>
void sign_order(Recorder& r, const B& b, const typename B::Elem& F) {
  const int m = b.sign_order();
  bool moved_by_all_proper = false;
  for (const auto& x : xi_classes(b, F)) {
    auto cur = x;
    int first_return = 0;
    for (int j = 1; j <= m; ++j) {
      cur = sign_action(b, cur);
      if (!first_return && same_class(b, cur, x)) first_return = j;
    }
    r.check(same_class(b, cur, x), "gamma0^m fixes " + format_xi(b, x));
    const bool fixed = first_return == 1;
    const auto killed = b.mod(b.mul(b.sub(b.sign_numerator(), b.one()), x.numerator), x.level);
    r.check(fixed == b.is_zero(killed), "fixed classes of gamma0 at " + format_xi(b, x));
    if (first_return == m) moved_by_all_proper = true;
  }
  if (b.norm(F) > 2 || m == 1) r.check(moved_by_all_proper, "gamma0 has exact order m on Xi(" + b.format(F) + ")");
}

inline Outcome arith_y_composition() {
  Recorder r;
  const Archimedean Z;
  y_composition(r, Z, {12, 18, 24}, {1, 2, 3, 4, 5, 6});
  FunctionField F(3);
  y_composition(r, F, {F.parse("T^2+T"), F.parse("T^2")}, {F.parse("T"), F.parse("T+1"), F.parse("T^2+1")});
  return r.take();
}

inline Outcome arith_equivariance() {
  Recorder r;
  const Archimedean Z;
  y_equivariance(r, Z, {12, 15, 20}, {2, 3, 5});
  FunctionField F(3);
  y_equivariance(r, F, {F.parse("T^2+T")}, {F.parse("T"), F.parse("T+1")});
  return r.take();
}

inline Outcome arith_disjoint_union() {
  Recorder r;
  const Archimedean Z;
  for (std::int64_t F = 1; F <= 40; ++F) torsor(r, Z, F);
  FunctionField F3(3);
  for (const auto& f : monic_polys(F3, 2)) torsor(r, F3, f);
  return r.take();
}

inline Outcome arith_sign_order() {
  Recorder r;
  const Archimedean Z;
  for (std::int64_t F = 1; F <= 30; ++F) sign_order(r, Z, F);
  for (int q : {2, 3, 4, 5, 7}) {
    FunctionField Fq(q);
    for (const auto& f : monic_polys(Fq, q <= 3 ? 2 : 1)) sign_order(r, Fq, f);
  }
  return r.take();
}

// ---------------------------------------------------------------------------
// distmod

template <class B>
void fiber_property(Recorder& r, const B& b, const typename B::Elem& F) {
  Partition<B> part(b);
  XiLevel<B> L(b, F);
  for (std::size_t c = 0; c < L.size(); ++c) {
    auto xi = L.xi(c);
    auto t = part.tag(xi);
    if (t.depth == 0) continue;
    bool some_prime = false;
    for (const auto& pp : b.factor(xi.level)) {
      const auto fp = b.exact_div(xi.level, pp.prime);
      bool ok = true;
      for (auto y : L.preimages(pp.prime, L.scale(c, pp.prime))) {
        if (y == c) continue;
        auto eta = L.xi(y);
        if (!b.divides(eta.level, fp) && part.tag(eta).depth != t.depth - 1) ok = false;
      }
      some_prime = some_prime || ok;
    }
    r.check(some_prime, "property (I) at " + format_xi(b, xi));
  }
}

template <class B>
void gamma_free(Recorder& r, const B& b, const typename B::Elem& f, int N) {
  Partition<B> part(b);
  XiLevel<B> L(b, power(b, f, N));
  for (std::size_t c = 0; c < L.size(); ++c) {
    if (L.in_level(c, f)) continue;
    auto xi = L.xi(c);
    if (!part.in_xi0(xi)) continue;
    auto cur = xi;
    bool ok = true;
    for (int j = 1; j <= b.sign_order(); ++j) {
      cur = sign_action(b, cur);
      if (!part.in_xi0(cur)) ok = false;
      if (j < b.sign_order() && same_class(b, cur, xi)) ok = false;
    }
    r.check(ok && same_class(b, cur, xi), "property (II) at " + format_xi(b, xi));
  }
}

inline Outcome distmod_fiber_property() {
  Recorder r;
  const Archimedean Z;
  for (std::int64_t F : {4, 8, 9, 12, 18, 24, 27, 30, 36, 60, 72}) fiber_property(r, Z, F);
  FunctionField F3(3);
  for (const char* s : {"T^2", "T^3", "T^2*(T+1)", "T*(T+1)*(T+2)"}) fiber_property(r, F3, F3.parse(s));
  return r.take();
}

inline Outcome distmod_gamma_free() {
  Recorder r;
  const Archimedean Z;
  for (std::int64_t f : {3, 4, 5, 7, 9, 12, 15})
    for (int N = 2; N <= 3; ++N)
      if (power(Z, f, N) <= 3375) gamma_free(r, Z, f, N);
  FunctionField F3(3), F5(5);
  for (int N = 2; N <= 3; ++N) {
    gamma_free(r, F3, F3.parse("T"), N);
    gamma_free(r, F3, F3.parse("T+1"), N);
    gamma_free(r, F5, F5.parse("T"), N);
  }
  gamma_free(r, F3, F3.parse("T^2+T"), 2);
  return r.take();
}

inline Outcome distmod_xi0_counts() {
  Recorder r;
  const Archimedean Z;
  Partition<Archimedean> part(Z);
  for (std::int64_t F = 1; F <= 72; ++F)
    r.check(part.xi0_codes(XiLevel<Archimedean>(Z, F)).size() == gf_group(Z, F).size(), "|Xi0| at " + std::to_string(F));
  FunctionField F3(3);
  Partition<FunctionField> pf(F3);
  for (const auto& f : monic_polys(F3, 3))
    r.check(pf.xi0_codes(XiLevel<FunctionField>(F3, f)).size() == gf_group(F3, f).size(), "|Xi0| at " + F3.format(f));
  return r.take();
}

template <class B>
void general_nu_relations(Recorder& r, const B& b, const typename B::Elem& F, const std::map<std::string, Integer>& nu) {
  auto u = u_module(build_af(b, F, nu));
  const auto& L = u.af.level;
  for (const auto& g : divisors(b, F)) {
    Integer nug = 1;
    for (const auto& pp : b.factor(g))
      for (int e = 0; e < pp.exponent; ++e) nug *= nu.at(b.format(pp.prime));
    for (std::size_t x = 0; x < L.size(); ++x) {
      if (!b.divides(g, L.elem(x))) continue;
      IntMatrix v(L.size(), 1);
      v(x, 0) += nug;
      for (auto y : L.preimages(g, x)) v(y, 0) -= 1;
      r.check(u.project(v).is_zero(), "relation g=" + b.format(g) + " at level " + b.format(F));
    }
  }
}

inline Outcome distmod_general_nu() {
  Recorder r;
  const Archimedean Z;
  general_nu_relations(r, Z, std::int64_t{12}, {{"2", 3}, {"3", -2}});
  general_nu_relations(r, Z, std::int64_t{36}, {{"2", -1}, {"3", 5}});
  general_nu_relations(r, Z, std::int64_t{30}, {{"2", 2}, {"3", 0}, {"5", -3}});
  FunctionField F3(3);
  general_nu_relations(r, F3, F3.parse("T^2*(T+1)"), {{"T", 2}, {"T+1", -1}});
  return r.take();
}

inline Outcome distmod_free_rank() {
  Recorder r;
  const Archimedean Z;
  for (std::int64_t F = 1; F <= 48; ++F)
    r.check(u_module(build_af(Z, F)).rank() == gf_group(Z, F).size(), "rank of U(" + std::to_string(F) + ")");
  for (std::int64_t F : {12, 18})
    for (Integer nu : {Integer(2), Integer(-1), Integer(0)})
      r.check(u_module(build_af(Z, F, {{"2", nu}, {"3", nu}})).rank() == gf_group(Z, F).size(), "general nu rank");
  for (int q : {2, 3, 4, 5}) {
    FunctionField Fq(q);
    for (const auto& f : monic_polys(Fq, q <= 3 ? 2 : 1))
      r.check(u_module(build_af(Fq, f)).rank() == gf_group(Fq, f).size(), "rank over F_" + std::to_string(q));
  }
  return r.take();
}

// ---------------------------------------------------------------------------
// signh

/// gamma permuting k free Z[C_m]-orbits of basis vectors.
inline TateInput induced_input(std::size_t k, int m) {
  IntMatrix g(k * static_cast<std::size_t>(m), k * static_cast<std::size_t>(m));
  for (std::size_t b = 0; b < k; ++b)
    for (int i = 0; i < m; ++i) g(b * m + static_cast<std::size_t>((i + 1) % m), b * m + static_cast<std::size_t>(i)) = 1;
  return make_tate_input(g, m);
}

inline Outcome signh_induced_vanishes() {
  Recorder r;
  for (int m = 1; m <= 6; ++m)
    for (std::size_t k = 1; k <= 3; ++k) {
      auto h = tate_homology(induced_input(k, m));
      r.check(h.even.is_zero() && h.odd.is_zero(), "induced module m=" + std::to_string(m));
    }
  return r.take();
}

inline Outcome signh_additivity() {
  Recorder r;
  std::mt19937 rng(4001);
  // building blocks for m = 2: trivial, sign, induced, and U(f) samples
  std::vector<TateInput> blocks{make_tate_input(IntMatrix::identity(1), 2), make_tate_input(IntMatrix::scalar(1, -1), 2),
                                induced_input(1, 2)};
  for (std::int64_t f : {3, 5, 12, 15}) blocks.push_back(tate_input(u_module(build_af(Archimedean{}, f))));
  for (int trial = 0; trial < 40; ++trial) {
    const auto& a = blocks[rng() % blocks.size()];
    const auto& b = blocks[rng() % blocks.size()];
    IntMatrix sum = block_diagonal(a.gamma, b.gamma);
    IntMatrix p = random_unimodular(rng, sum.rows());
    auto h = tate_homology(make_tate_input(p * sum * unimodular_inverse(p), 2));
    auto ha = tate_homology(a), hb = tate_homology(b);
    r.check(h.even == direct_sum(ha.even, hb.even) && h.odd == direct_sum(ha.odd, hb.odd),
            "additivity, trial " + std::to_string(trial));
  }
  return r.take();
}

inline Outcome signh_basis_invariance() {
  Recorder r;
  std::mt19937 rng(4002);
  auto run = [&](const auto& b, const auto& f) {
    auto u = u_module(build_af(b, f));
    auto t = tate_input(u);
    auto base = tate_homology(t);
    for (int k = 0; k < 4; ++k) {
      IntMatrix p = random_unimodular(rng, t.rank, 20);
      auto h = tate_homology(make_tate_input(p * t.gamma * unimodular_inverse(p), t.m));
      r.check(h == base, "basis change on U(" + b.format(f) + ")");
    }
    // the Xi0 coordinates are another free-basis section
    Partition part(b);
    auto cert = xi0_basis(u, part);
    IntMatrix g = in_xi0_basis(u, cert.codes, u.induced.op(kGamma0));
    r.check(tate_homology(make_tate_input(g, t.m)) == base, "Xi0 section on U(" + b.format(f) + ")");
  };
  const Archimedean Z;
  for (std::int64_t f : {3, 4, 12, 15, 21}) run(Z, f);
  FunctionField F3(3), F5(5);
  run(F3, F3.parse("T^2+T"));
  run(F5, F5.parse("T"));
  return r.take();
}

inline Outcome signh_parity_orders() {
  Recorder r;
  const Archimedean Z;
  std::string why;
  for (std::int64_t f = 1; f <= 40; ++f) {
    if (!rank_theorem_applies(Z, f, why)) continue;
    auto h = sign_homology_U(Z, f).h;
    r.check(h.even.is_finite() && h.even.torsion_order() == h.odd.torsion_order(), "|H_even| = |H_odd| for " + std::to_string(f));
  }
  for (int q : {2, 3, 5}) {
    FunctionField Fq(q);
    for (const auto& f : monic_polys(Fq, q == 5 ? 1 : 2)) {
      if (!rank_theorem_applies(Fq, f, why)) continue;
      auto h = sign_homology_U(Fq, f).h;
      r.check(h.even.is_finite() && h.even.torsion_order() == h.odd.torsion_order(), "|H_even| = |H_odd| over F_q");
    }
  }
  return r.take();
}

// ---------------------------------------------------------------------------
// ftate

inline Outcome ftate_grid() {
  Recorder r;
  for (std::size_t rk = 1; rk <= 6; ++rk)
    for (long m = 1; m <= 6; ++m)
      for (const auto& [n, g] : ftate_via_kt({rk, m}))
        r.check(g == ftate_closed_form({rk, m}, n), "r=" + std::to_string(rk) + " m=" + std::to_string(m));
  return r.take();
}

inline Outcome ftate_thm442_matches() {
  Recorder r;
  const Archimedean Z;
  // f exactly divisible by 2 is excluded: its tower does not stabilize at level 1
  for (std::int64_t f : {3, 5, 7, 11, 13, 15, 21, 33, 35, 105}) {
    auto direct = sign_homology_U(Z, f).h;
    for (const auto& [n, g] : thm442_lhs(Z, f))
      r.check(g == direct.even && g == direct.odd, "thm442 at f=" + std::to_string(f));
  }
  for (int q : {2, 3, 5}) {
    FunctionField Fq(q);
    for (const auto& f : monic_polys(Fq, 2)) {
      if (!is_squarefree(Fq, f)) continue;
      auto direct = sign_homology_U(Fq, f).h;
      for (const auto& [n, g] : thm442_lhs(Fq, f)) r.check(g == direct.even && g == direct.odd, "thm442 over F_q");
    }
  }
  return r.take();
}

inline Outcome ftate_degree_independence() {
  Recorder r;
  for (std::size_t rk = 1; rk <= 5; ++rk)
    for (long m = 1; m <= 5; ++m) r.check(degree_independent(ftate_via_kt({rk, m})), "ftate table");
  const Archimedean Z;
  for (std::int64_t f : {3, 15, 105}) r.check(degree_independent(thm442_lhs(Z, f)), "thm442 table");
  r.check(degree_independent(thm442_lhs(Z, std::int64_t{15}, {{"3", -1}, {"5", -1}})), "thm442 table, nu = -1");
  return r.take();
}

// ---------------------------------------------------------------------------
// skcx

inline Outcome skcx_vian_matches_direct() {
  Recorder r;
  for (std::int64_t f : {3, 5, 6, 7, 15, 21}) {
    auto direct = sign_homology_U(Archimedean{}, f).h;
    for (int N = 1; N <= 2; ++N) {
      if (f % 2 == 0 && N > 1) continue;
      auto sk = build_sk(f, N);
      auto direct_n = sign_homology_U(Archimedean{}, f, {}, N).h;
      for (const auto& [n, g] : homology(sk.quotient_n(), sk.interior()))
        r.check(g == direct_n.even && g == direct_n.odd && (f % 4 == 2 || g == direct.even),
                "viaN at f=" + std::to_string(f) + " N=" + std::to_string(N));
    }
  }
  return r.take();
}

inline Outcome skcx_level_stabilization() {
  Recorder r;
  for (std::int64_t f : {3, 5, 7, 15}) {
    const Window w = default_window(Archimedean{}.factor(f).size());
    auto one = sk_quotients_homology(build_sk(f, 1, w));
    auto two = sk_quotients_homology(build_sk(f, 2, w));
    r.check(one.agree && two.agree && one.via_n == two.via_n, "N=1 vs N=2 at f=" + std::to_string(f));
  }
  return r.take();
}

/// sigma_t on the viaN route: scaling of the symbols in rows 0 and 1, checked to act as the
/// identity on interior homology through the free realization.
inline bool vian_action_trivial(const SkComplex& sk, std::int64_t t) {
  const auto p = sk.quotient_n();
  const auto real = free_realization(p);
  const Archimedean Z;
  XiLevel<Archimedean> L(Z, sk.modulus());
  const auto row0 = sk.symbols(0, 0);
  IntMatrix s0(row0.size(), row0.size());
  for (std::size_t j = 0; j < row0.size(); ++j) {
    SkSymbol img{Z.mulmod(row0[j].a, t, sk.modulus()), row0[j].g, 0};
    s0(sk.position(img), j) = 1;
  }
  std::map<int, IntMatrix> comps;
  for (int n = real.lo(); n <= real.hi(); ++n) {
    const auto q = cokernel(p.relation(n));
    comps[n] = q.projection * (s0 - IntMatrix::identity(row0.size())) * q.section;
  }
  ChainMap diff = make_chain_map(real, real, std::move(comps));
  for (int n : sk.interior())
    if (!induced_map_zero(diff, n)) return false;
  return true;
}

inline Outcome skcx_group_acts_trivially() {
  Recorder r;
  const Archimedean Z;
  for (std::int64_t f : {3, 5, 15}) {
    auto sk = build_sk(f, 1);
    for (const auto& s : gf_group(Z, sk.modulus())) {
      bool fixes = true;
      for (std::size_t m = 0; m <= sk.koszul_length(); ++m)
        for (const auto& sym : sk.symbols(m, 0))
          if (sym.a == 0 && Z.mulmod(sym.a, s.residue, sk.modulus()) != 0) fixes = false;
      r.check(fixes, "sigma fixes SK' symbols");
      r.check(vian_action_trivial(sk, s.residue), "sigma trivial on viaN homology, f=" + std::to_string(f));
    }
  }
  return r.take();
}

// ---------------------------------------------------------------------------
// iwasawa

inline Outcome iwasawa_distribution() {
  Recorder r;
  UFunction u;
  for (std::int64_t f = 1; f <= 24; ++f) {
    auto d = u_distribution_check(f, u);
    r.check(d.passed && d.relations_checked > 0, "distribution relations at f=" + std::to_string(f));
  }
  return r.take();
}

inline Outcome iwasawa_trivial_character_sum() {
  Recorder r;
  for (std::int64_t f = 3; f <= 40; ++f) {
    auto v = u_values(f, true);
    Rational total = 0, pair_total = 0;
    for (const auto& [x, q] : v.values)
      if (std::gcd(x, f) == 1) {
        total += q;
        if (2 * x < f) pair_total += q + v.values.at(f - x);
      }
    // with G_f = {1, -1} the single pair is forced to cancel
    const bool pairs = pair_total == 0 && (v.values.size() != 2 || v.values.at(1) + v.values.at(f - 1) == 0);
    r.check(total == 0 && pairs && v.resubstituted, "trivial character sum at f=" + std::to_string(f));
  }
  return r.take();
}

inline Outcome iwasawa_equivariance() {
  Recorder r;
  UFunction u;
  for (std::int64_t f : {3, 4, 5, 7, 8, 12, 15, 16}) {
    auto rep = uprime_compare(f, u);
    r.check(rep.equivariant && rep.relations_killed, "U' comparison at f=" + std::to_string(f));
  }
  return r.take();
}

// ---------------------------------------------------------------------------
// cli

inline std::string run_cli(const std::vector<std::string>& args, int& code) {
  std::ostringstream out, err;
  code = cli::run(args, out, err);
  return out.str();
}

inline Outcome cli_determinism() {
  Recorder r;
  const std::vector<std::vector<std::string>> cmds{
      {"verify", "kubert", "--f", "3,4,5,15,105"},
      {"verify", "yin", "--q", "3", "--f", "T,T+1,T*(T+1)"},
      {"sk", "compare", "--f", "3,15", "--level", "2"},
      {"ftate", "--r", "1,2,3", "--m", "2,3"},
      {"structure", "--f", "12,15", "--csv"},
  };
  const char* saved = std::getenv("UOD_THREADS");
  const std::string restore = saved ? saved : "";
  for (const auto& c : cmds) {
    int c1 = 0, c2 = 0, c3 = 0;
    setenv("UOD_THREADS", "1", 1);
    auto a = run_cli(c, c1);
    setenv("UOD_THREADS", "4", 1);
    auto b = run_cli(c, c2);
    auto d = run_cli(c, c3);
    r.check(c1 == 0 && a == b && b == d && !a.empty(), "byte-identical output for " + c[0]);
  }
  if (saved)
    setenv("UOD_THREADS", restore.c_str(), 1);
  else
    unsetenv("UOD_THREADS");
  return r.take();
}

inline Outcome cli_routes() {
  Recorder r;
  const std::set<std::string> known{cli::route::kDirectTate, cli::route::kKtLhs, cli::route::kSkViaN,
                                    cli::route::kSkViaSkPrime, cli::route::kClosedForm};
  const std::vector<std::vector<std::string>> cmds{
      {"verify", "kubert", "--f", "3,15"},       {"verify", "thm442", "--f", "15"},
      {"sign-homology", "--f", "12"},            {"sk", "compare", "--f", "15"},
      {"ftate", "--r", "2", "--m", "3"},         {"tower", "--f", "3", "--level", "2"},
      {"verify", "thm442", "--q", "3", "--f", "T*(T+1)"},
  };
  for (const auto& c : cmds) {
    int code = 0;
    auto j = nlohmann::json::parse(run_cli(c, code));
    for (const auto& chk : j["checks"]) {
      std::set<std::string> routes(chk["routes"].begin(), chk["routes"].end());
      std::set<std::string> tables;
      for (const auto& [k, v] : chk["tables"].items()) tables.insert(k);
      bool ok = routes == tables && !routes.empty();
      for (const auto& rt : routes) ok = ok && known.count(rt);
      r.check(ok, "routes for " + c[0]);
    }
  }
  return r.take();
}

// ---------------------------------------------------------------------------

inline const std::vector<Property>& all() {
  static const std::vector<Property> props{
      {"znf", "snf_transforms", znf_snf_transforms},
      {"znf", "cokernel_permutation_invariance", znf_cokernel_permutation_invariance},
      {"znf", "kernel_basis", znf_kernel_basis},
      {"chainkit", "anticommutation", chainkit_anticommutation},
      {"chainkit", "cone_euler_characteristic", chainkit_cone_euler},
      {"chainkit", "unimodular_k_acyclic", chainkit_unimodular_k_acyclic},
      {"chainkit", "window_independence", chainkit_window_independence},
      {"arith", "y_composition", arith_y_composition},
      {"arith", "y_equivariance", arith_equivariance},
      {"arith", "disjoint_union_torsor", arith_disjoint_union},
      {"arith", "sign_order", arith_sign_order},
      {"distmod", "fiber_property", distmod_fiber_property},
      {"distmod", "gamma_free_above_f", distmod_gamma_free},
      {"distmod", "xi0_counts", distmod_xi0_counts},
      {"distmod", "general_nu_relations", distmod_general_nu},
      {"distmod", "free_rank", distmod_free_rank},
      {"signh", "induced_vanishes", signh_induced_vanishes},
      {"signh", "additivity", signh_additivity},
      {"signh", "basis_invariance", signh_basis_invariance},
      {"signh", "parity_orders", signh_parity_orders},
      {"ftate", "grid", ftate_grid},
      {"ftate", "thm442_matches_sign_homology", ftate_thm442_matches},
      {"ftate", "degree_independence", ftate_degree_independence},
      {"skcx", "vian_matches_direct", skcx_vian_matches_direct},
      {"skcx", "level_stabilization", skcx_level_stabilization},
      {"skcx", "group_acts_trivially", skcx_group_acts_trivially},
      {"iwasawa", "distribution", iwasawa_distribution},
      {"iwasawa", "trivial_character_sum", iwasawa_trivial_character_sum},
      {"iwasawa", "uprime_equivariance", iwasawa_equivariance},
      {"cli", "determinism", cli_determinism},
      {"cli", "routes", cli_routes},
  };
  return props;
}

}  // namespace props
