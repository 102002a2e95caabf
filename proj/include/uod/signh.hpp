#pragma once

// Sign-homology: Tate homology of the cyclic group generated by gamma0 acting on a
// free module, applied to U^(nu)(f). Rank-theorem and functoriality verifiers.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "uod/chainkit.hpp"
#include "uod/distmod.hpp"

namespace uod {

struct TateInput {
  std::size_t rank = 0;
  IntMatrix gamma;
  int m = 1;
};

/// Validates gamma^m = 1; OrderViolation otherwise.
inline TateInput make_tate_input(IntMatrix gamma, int m) {
  if (gamma.rows() != gamma.cols()) throw Error(ErrorKind::ShapeMismatch, "gamma0 must be square");
  if (m < 1) throw Error(ErrorKind::OrderViolation, "order must be positive");
  IntMatrix p = IntMatrix::identity(gamma.rows());
  for (int i = 0; i < m; ++i) p = p * gamma;
  if (!(p == IntMatrix::identity(gamma.rows())))
    throw Error(ErrorKind::OrderViolation, "gamma0^" + std::to_string(m) + " is not the identity");
  const std::size_t n = gamma.rows();
  return {n, std::move(gamma), m};
}

inline IntMatrix tate_norm(const TateInput& t) { return norm_operator(t.gamma, t.m); }

/// Degrees -1..2 with d_0 = N, d_1 = 1 - gamma, d_2 = N; H_1 is the even part, H_0 the odd part.
inline ChainComplex tate_complex(const TateInput& t) {
  IntMatrix n = tate_norm(t);
  IntMatrix a = IntMatrix::identity(t.rank) - t.gamma;
  return make_complex(-1, {t.rank, t.rank, t.rank, t.rank}, {n, a, n});
}

struct TateHomology {
  AbGroupInvariants even;  // ker(1 - gamma) / im N
  AbGroupInvariants odd;   // ker N / im(1 - gamma)

  bool operator==(const TateHomology& o) const { return even == o.even && odd == o.odd; }
  HomologyTable table() const { return {{0, even}, {1, odd}}; }
};

inline TateHomology tate_homology(const TateInput& t) {
  auto h = homology(tate_complex(t), {0, 1});
  return {h.at(1), h.at(0)};
}

// ---------------------------------------------------------------------------
// U^(nu)(f^N)

template <class B>
struct SignHomology {
  typename B::Elem modulus;  // f^N
  std::size_t rank = 0;
  TateHomology h;
};

template <class B>
TateInput tate_input(const UModule<B>& u) {
  return make_tate_input(u.induced.op(kGamma0), u.af.backend().sign_order());
}

template <class B>
SignHomology<B> sign_homology(const UModule<B>& u) {
  return {u.af.modulus(), u.rank(), tate_homology(tate_input(u))};
}

template <class B>
SignHomology<B> sign_homology_U(const B& b, const typename B::Elem& f, const std::map<std::string, Integer>& nu = {},
                                int level = 1) {
  if (level < 1) throw Error(ErrorKind::InvalidArgument, "level must be at least 1");
  return sign_homology(u_module(build_af(b, power(b, f, level), nu)));
}

// ---------------------------------------------------------------------------
// Rank theorems

enum class Verdict { Pass, Fail, NotApplicable };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::NotApplicable: return "NOT_APPLICABLE";
  }
  return "?";
}

template <class B>
struct RankTheoremReport {
  typename B::Elem f;
  Verdict verdict = Verdict::NotApplicable;
  std::size_t primes = 0;                   // r
  int coefficient_order = 1;                // m'
  AbGroupInvariants expected;
  std::optional<TateHomology> computed;
  std::string reason;
};

inline bool rank_theorem_applies(const Archimedean&, std::int64_t f, std::string& why) {
  if (f == 1) {
    why = "f = 1";
    return false;
  }
  if (f % 4 == 2) {
    why = "f = 2 mod 4";
    return false;
  }
  return true;
}

inline bool rank_theorem_applies(const FunctionField& b, const FqPoly& f, std::string& why) {
  if (b.norm(f) == 1) {
    why = "f is a unit";
    return false;
  }
  return true;
}

/// Each parity should be free over Z/m' of rank 2^{r-1}; m' = 2 over Q and q - 1 over F_q(T).
template <class B>
RankTheoremReport<B> verify_rank_theorem(const B& b, const typename B::Elem& f) {
  RankTheoremReport<B> rep;
  rep.f = b.canonical(f);
  rep.coefficient_order = b.sign_order();
  if (!rank_theorem_applies(b, rep.f, rep.reason)) return rep;
  rep.primes = b.factor(rep.f).size();
  rep.expected = AbGroupInvariants::free_cyclic(rep.coefficient_order, std::size_t{1} << (rep.primes - 1));
  rep.computed = sign_homology_U(b, rep.f).h;
  const bool ok = rep.computed->even == rep.expected && rep.computed->odd == rep.expected;
  rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
  return rep;
}

// ---------------------------------------------------------------------------
// Functoriality

/// Matrix of U(f) -> U(g) induced by Xi(f) inside Xi(g), in the quotient bases.
template <class B>
IntMatrix level_inclusion(const UModule<B>& uf, const UModule<B>& ug) {
  const B& b = uf.af.backend();
  const auto cof = b.exact_div(ug.af.modulus(), uf.af.modulus());
  const auto& Lf = uf.af.level;
  const auto& Lg = ug.af.level;
  IntMatrix e(Lg.size(), Lf.size());
  for (std::size_t x = 0; x < Lf.size(); ++x) e(Lg.code_of(b.mul(Lf.elem(x), cof)), x) = 1;
  if (uf.relations.cols() && !(ug.quotient.projection * (e * uf.relations)).is_zero())
    throw Error(ErrorKind::RelationNotKilled, "inclusion does not respect the distribution relations");
  return ug.quotient.projection * e * uf.quotient.section;
}

inline ChainMap tate_chain_map(const TateInput& s, const TateInput& t, const IntMatrix& m) {
  std::map<int, IntMatrix> comps;
  for (int n = -1; n <= 2; ++n) comps.emplace(n, m);
  return make_chain_map(tate_complex(s), tate_complex(t), std::move(comps));
}

template <class B>
struct FunctorialityReport {
  typename B::Elem f, g;
  TateHomology source, target;
  bool injective_even = false, injective_odd = false;
  bool group_acts_trivially = false;
  std::size_t group_elements_checked = 0;
  bool passed() const { return injective_even && injective_odd && group_acts_trivially; }
};

/// (a) H(U(f)) -> H(U(g)) is injective; (b) every element of G_g acts as the identity on H(U(g)).
template <class B>
FunctorialityReport<B> functoriality_report(const B& b, const typename B::Elem& f, const typename B::Elem& g) {
  if (!b.divides(f, g)) throw Error(ErrorKind::NotDivisible, b.format(f) + " does not divide " + b.format(g));
  FunctorialityReport<B> rep{b.canonical(f), b.canonical(g), {}, {}};
  auto uf = u_module(build_af(b, f));
  auto ug = u_module(build_af(b, g));
  auto tf = tate_input(uf), tg = tate_input(ug);
  rep.source = tate_homology(tf);
  rep.target = tate_homology(tg);
  auto inc = tate_chain_map(tf, tg, level_inclusion(uf, ug));
  rep.injective_even = induced_map_injective(inc, 1);
  rep.injective_odd = induced_map_injective(inc, 0);
  rep.group_acts_trivially = true;
  const IntMatrix id = IntMatrix::identity(ug.rank());
  for (const auto& s : gf_group(b, ug.af.modulus())) {
    IntMatrix sig = induced_operator(ug.quotient, ug.relations, scale_matrix(ug.af.level, s.residue), "sigma");
    auto diff = tate_chain_map(tg, tg, sig - id);
    if (!induced_map_zero(diff, 0) || !induced_map_zero(diff, 1)) rep.group_acts_trivially = false;
    ++rep.group_elements_checked;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Towers

template <class B>
struct TowerReport {
  std::vector<TateHomology> levels;  // sign-homology of U(f^k), k = 1..N
  bool stabilizes = false;
  bool exceptional = false;          // archimedean f exactly divisible by 2: no claim
  bool transitions_are_inclusions = false;
};

template <class B>
TowerReport<B> tower_report(const Tower<B>& t) {
  TowerReport<B> rep;
  for (const auto& lvl : t.levels) rep.levels.push_back(sign_homology(lvl.u).h);
  rep.stabilizes = true;
  for (const auto& h : rep.levels)
    if (!(h == rep.levels.front())) rep.stabilizes = false;
  rep.exceptional = t.exceptional;
  rep.transitions_are_inclusions = t.transitions_are_inclusions;
  return rep;
}

}  // namespace uod
