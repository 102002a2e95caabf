#pragma once

// The free module A(F) on Xi(F) with its operators X_p, G_F and gamma0; the
// universal ordinary distribution U^(nu)(F); the partition Xi = disjoint union of
// Xi_k and the Xi_0 bases.

#include <algorithm>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "uod/arith.hpp"
#include "uod/chainkit.hpp"

namespace uod {

inline std::string x_operator_name(const std::string& prime) { return "X[" + prime + "]"; }
inline std::string sigma_operator_name(const std::string& rep) { return "sigma[" + rep + "]"; }

/// Generators of (A/f)^x chosen greedily in code order.
template <class B>
std::vector<typename B::Elem> unit_generators(const B& b, const typename B::Elem& f) {
  using Elem = typename B::Elem;
  std::vector<Elem> gens;
  if (b.norm(f) <= 2) return gens;
  std::set<std::size_t> generated{b.code(b.mod(b.one(), f))};
  for (const auto& u : gf_group(b, f)) {
    if (generated.count(b.code(u.residue))) continue;
    gens.push_back(u.residue);
    std::vector<std::size_t> frontier(generated.begin(), generated.end());
    while (!frontier.empty()) {
      std::vector<std::size_t> next;
      for (std::size_t c : frontier)
        for (const auto& g : gens) {
          std::size_t d = b.code(b.mulmod(b.from_code(c), g, f));
          if (generated.insert(d).second) next.push_back(d);
        }
      frontier = std::move(next);
    }
  }
  return gens;
}

// ---------------------------------------------------------------------------
// A(F)

template <class B>
struct AfModule {
  using Elem = typename B::Elem;
  XiLevel<B> level;
  std::vector<Elem> primes;                 // maximal ideals dividing F, canonical order
  std::vector<std::string> prime_names;     // formatted primes
  std::vector<Elem> group_generators;       // residues generating G_F
  std::map<std::string, Integer> nu;        // by formatted prime
  ActionModule module;                      // X[p], sigma[u], gamma0

  const B& backend() const { return level.backend(); }
  const Elem& modulus() const { return level.modulus(); }
  std::size_t rank() const { return level.size(); }
  Integer nu_of(std::size_t i) const { return nu.at(prime_names[i]); }

  std::vector<std::string> x_names() const {
    std::vector<std::string> out;
    for (const auto& p : prime_names) out.push_back(x_operator_name(p));
    return out;
  }
  std::vector<std::string> group_names() const {
    std::vector<std::string> out;
    for (const auto& [name, op] : module.operators)
      if (name.rfind("sigma[", 0) == 0) out.push_back(name);
    return out;
  }
};

/// Matrix of the truncated X_g on A(F): e_x -> sum of e_y with g y = x (zero unless g | x).
template <class B>
IntMatrix x_matrix(const XiLevel<B>& L, const typename B::Elem& g) {
  IntMatrix m(L.size(), L.size());
  for (std::size_t x = 0; x < L.size(); ++x)
    for (std::size_t y : L.preimages(g, x)) m(y, x) += 1;
  return m;
}

/// Permutation matrix of multiplication by a unit u on A(F).
template <class B>
IntMatrix scale_matrix(const XiLevel<B>& L, const typename B::Elem& u) {
  IntMatrix m(L.size(), L.size());
  for (std::size_t x = 0; x < L.size(); ++x) m(L.scale(x, u), x) = 1;
  return m;
}

/// nu defaults to 1 at every prime; keys are formatted primes. Unknown keys are rejected.
template <class B>
AfModule<B> build_af(const B& b, const typename B::Elem& F, const std::map<std::string, Integer>& nu = {}) {
  XiLevel<B> L(b, F);
  AfModule<B> af{L, {}, {}, {}, {}, {}};
  for (const auto& pp : L.primes()) {
    af.primes.push_back(pp.prime);
    af.prime_names.push_back(b.format(pp.prime));
  }
  for (const auto& [key, v] : nu)
    if (std::find(af.prime_names.begin(), af.prime_names.end(), key) == af.prime_names.end())
      throw Error(ErrorKind::InvalidArgument, "nu given for " + key + ", which does not divide " + b.format(F));
  std::map<std::string, IntMatrix> ops;
  for (std::size_t i = 0; i < af.primes.size(); ++i) {
    auto it = nu.find(af.prime_names[i]);
    af.nu[af.prime_names[i]] = it == nu.end() ? Integer(1) : it->second;
    ops.emplace(x_operator_name(af.prime_names[i]), x_matrix(L, af.primes[i]));
  }
  af.group_generators = unit_generators(b, L.modulus());
  for (const auto& u : af.group_generators)
    ops.emplace(sigma_operator_name(b.format(b.positive_representative(u, L.modulus()))), scale_matrix(L, u));
  ops.emplace(kGamma0, scale_matrix(L, b.sign_numerator()));
  af.module = make_action_module(L.size(), std::move(ops), af.nu, std::max(2, b.sign_order()));
  return af;
}

// ---------------------------------------------------------------------------
// U^(nu)(F)

template <class B>
struct UModule {
  AfModule<B> af;
  IntMatrix relations;    // columns nu_p e_x - X_p e_x, p | F, x in Xi(F/p)
  Cokernel quotient;      // free of rank |G_F|
  ActionModule induced;   // sigma[u] and gamma0 on the free quotient

  std::size_t rank() const { return quotient.invariants.free_rank; }
  /// Coordinates in the quotient basis of the image of a vector of A(F).
  IntMatrix project(const IntMatrix& v) const { return quotient.projection * v; }
};

template <class B>
IntMatrix relation_matrix(const AfModule<B>& af) {
  const auto& L = af.level;
  std::vector<IntMatrix> blocks;
  for (std::size_t i = 0; i < af.primes.size(); ++i) {
    const auto& p = af.primes[i];
    const Integer nu = af.nu_of(i);
    std::vector<std::size_t> cols;
    for (std::size_t x = 0; x < L.size(); ++x)
      if (L.backend().divides(p, L.elem(x))) cols.push_back(x);
    IntMatrix blk(L.size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      blk(cols[j], j) += nu;
      for (std::size_t y : L.preimages(p, cols[j])) blk(y, j) -= 1;
    }
    blocks.push_back(std::move(blk));
  }
  return hstack(blocks, L.size());
}

/// Induced endomorphism pi T s of the free quotient; InducedOperatorUndefined if T does not
/// preserve the relations.
inline IntMatrix induced_operator(const Cokernel& q, const IntMatrix& relations, const IntMatrix& t,
                                  const std::string& name) {
  if (relations.cols() && !(q.projection * (t * relations)).is_zero())
    throw Error(ErrorKind::InducedOperatorUndefined, name + " does not preserve the relations");
  return q.projection * t * q.section;
}

template <class B>
UModule<B> u_module(const AfModule<B>& af) {
  UModule<B> u{af, relation_matrix(af), {}, {}};
  u.quotient = cokernel(u.relations);
  const std::size_t expected = gf_group(af.backend(), af.modulus()).size();
  if (!u.quotient.invariants.torsion.empty() || u.quotient.invariants.free_rank != expected)
    throw Error(ErrorKind::StructureViolation, "U(" + af.backend().format(af.modulus()) + ") is " +
                                                   u.quotient.invariants.str() + ", expected Z^" +
                                                   std::to_string(expected));
  std::map<std::string, IntMatrix> ops;
  for (const auto& [name, t] : af.module.operators) {
    if (name.rfind("X[", 0) == 0) continue;  // X_p acts as nu_p only in the limit
    ops.emplace(name, induced_operator(u.quotient, u.relations, t, name));
  }
  u.induced = make_action_module(u.rank(), std::move(ops), af.nu, std::max(2, af.backend().sign_order()));
  return u;
}

// ---------------------------------------------------------------------------
// The partition Xi = disjoint union of Xi_k

template <class B>
struct PartitionTag {
  using Elem = typename B::Elem;
  XiClass<B> xi;
  int depth = 0;                              // k
  Elem sigma;                                 // s(g mod f/sqrt f), a residue mod f
  std::vector<std::pair<Elem, Elem>> kappa;   // (p, kappa_p mod f)
};

/// The section s : G_{f/sqrt f} -> G_f and the tags built from it. Sections are cached per level.
template <class B>
class Partition {
 public:
  using Elem = typename B::Elem;

  explicit Partition(B backend) : b_(std::move(backend)) {}

  const B& backend() const { return b_; }

  /// Tag of xi; OrderMismatch unless the order of xi divides F.
  PartitionTag<B> tag(const XiClass<B>& xi, const Elem& F) const {
    if (!b_.divides(xi.level, F))
      throw Error(ErrorKind::OrderMismatch, format_xi(b_, xi) + " does not have order dividing " + b_.format(F));
    return tag(xi);
  }

  PartitionTag<B> tag(const XiClass<B>& xi) const {
    PartitionTag<B> t{xi, 0, b_.zero(), {}};
    const Elem& f = xi.level;
    if (b_.norm(f) == 1) return t;
    const Elem& g = xi.numerator;
    const Section& s = section(f);
    const Elem lift = s.lift.at(b_.code(b_.mod(g, s.inner)));
    t.sigma = lift;
    const Elem h = b_.mulmod(g, *inverse_mod(b_, lift, f), f);
    for (const auto& pp : b_.factor(f)) {
      const Elem pn = power(b_, pp.prime, pp.exponent);
      const Elem c = b_.exact_div(f, pn);
      const Elem kappa = b_.norm(c) == 1 ? b_.mod(h, f) : crt(b_, b_.mod(h, pn), pn, b_.one(), c);
      if (b_.equal(kappa, b_.mod(b_.one(), f))) ++t.depth;
      t.kappa.emplace_back(pp.prime, kappa);
    }
    return t;
  }

  bool in_xi0(const XiClass<B>& xi) const { return tag(xi).depth == 0; }

  /// Codes of Xi_0 inside Xi(F) for a code level L.
  std::vector<std::size_t> xi0_codes(const XiLevel<B>& L) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < L.size(); ++c)
      if (in_xi0(L.xi(c))) out.push_back(c);
    return out;
  }

  /// True when the section at level f was built gamma0-equivariantly.
  bool equivariant_at(const Elem& f) const { return section(f).equivariant; }

 private:
  struct Section {
    Elem inner;                            // f / sqrt f
    std::map<std::size_t, Elem> lift;      // code mod inner -> residue mod f
    bool equivariant = false;
  };

  const Section& section(const Elem& f) const {
    const std::string key = b_.format(f);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, build_section(f)).first->second;
  }

  Section build_section(const Elem& f) const {
    Section s;
    s.inner = b_.exact_div(f, radical(b_, f));
    const Elem& inner = s.inner;
    const Elem zeta_inv = b_.sign_numerator();
    const int m = b_.sign_order();
    // gamma0 injects into G_inner iff zeta^{-j} != 1 mod inner for 0 < j < m
    bool injective = true;
    Elem z = b_.mod(b_.one(), inner);
    for (int j = 1; j < m; ++j) {
      z = b_.mulmod(z, zeta_inv, inner);
      if (b_.equal(z, b_.mod(b_.one(), inner))) injective = false;
    }
    s.equivariant = injective && m > 1;
    auto least_lift = [&](const Elem& r) {
      std::optional<Elem> best;
      const std::size_t n = b_.norm(radical(b_, f));
      for (std::size_t t = 0; t < n; ++t) {
        Elem cand = b_.mod(b_.add(r, b_.mul(b_.from_code(t), inner)), f);
        if (!b_.equal(b_.canonical(b_.gcd(cand, f)), b_.one())) continue;
        if (!best || b_.less(cand, *best)) best = cand;
      }
      return *best;
    };
    for (const auto& u : gf_group(b_, inner)) {
      const std::size_t code = b_.code(u.residue);
      if (s.lift.count(code)) continue;
      const Elem base = least_lift(u.residue);
      if (!s.equivariant) {
        s.lift.emplace(code, base);
        continue;
      }
      Elem r = u.residue, l = base;
      for (int j = 0; j < m; ++j) {
        s.lift.emplace(b_.code(r), l);
        r = b_.mulmod(r, zeta_inv, inner);
        l = b_.mulmod(l, zeta_inv, f);
      }
    }
    return s;
  }

  B b_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, Section> cache_;
};

template <class B>
PartitionTag<B> partition_tag(const B& b, const XiClass<B>& xi, const typename B::Elem& F) {
  return Partition<B>(b).tag(xi, F);
}

// ---------------------------------------------------------------------------
// Xi_0 bases

template <class B>
struct Xi0Certificate {
  std::vector<XiClass<B>> basis;     // Xi_0 inside Xi(F), code order
  std::vector<std::size_t> codes;
  std::size_t group_order = 0;       // |G_F|
  Integer lambda_determinant;        // det of {X_g xi} in A(F)
  Integer quotient_determinant;      // det of the images of Xi_0 in U(F)
  bool passed = false;
};

/// Certifies that {X_g xi : g | F, xi in Xi_0 and Xi(F/g)} is a Z-basis of A(F) and that
/// Xi_0 and Xi(F) gives a Z-basis of U(F). BasisCertificateFailed otherwise.
template <class B>
Xi0Certificate<B> xi0_basis(const UModule<B>& u, const Partition<B>& part) {
  const auto& L = u.af.level;
  const B& b = L.backend();
  Xi0Certificate<B> cert;
  cert.codes = part.xi0_codes(L);
  for (auto c : cert.codes) cert.basis.push_back(L.xi(c));
  cert.group_order = gf_group(b, L.modulus()).size();
  if (cert.codes.size() != cert.group_order)
    throw Error(ErrorKind::BasisCertificateFailed, "|Xi_0 in Xi(" + b.format(L.modulus()) + ")| = " +
                                                       std::to_string(cert.codes.size()) + " but |G| = " +
                                                       std::to_string(cert.group_order));
  std::vector<IntMatrix> cols;
  for (const auto& g : divisors(b, L.modulus())) {
    const typename B::Elem inner = b.exact_div(L.modulus(), g);
    IntMatrix xg = x_matrix(L, g);
    std::vector<std::size_t> pick;
    for (auto c : cert.codes)
      if (L.in_level(c, inner)) pick.push_back(c);
    cols.push_back(xg.select_cols(pick));
  }
  IntMatrix m = hstack(cols, L.size());
  if (m.cols() != L.size())
    throw Error(ErrorKind::BasisCertificateFailed, "the X_g xi family has " + std::to_string(m.cols()) +
                                                       " members, expected " + std::to_string(L.size()));
  cert.lambda_determinant = determinant(m);
  IntMatrix img = u.quotient.projection.select_cols(cert.codes);
  cert.quotient_determinant = determinant(img);
  cert.passed = is_unit(cert.lambda_determinant) && is_unit(cert.quotient_determinant);
  if (!cert.passed)
    throw Error(ErrorKind::BasisCertificateFailed, "determinants " + cert.lambda_determinant.get_str() + " and " +
                                                       cert.quotient_determinant.get_str());
  return cert;
}

/// Matrix of an induced operator of U(F) in the Xi_0 basis.
template <class B>
IntMatrix in_xi0_basis(const UModule<B>& u, const std::vector<std::size_t>& xi0_codes, const IntMatrix& op) {
  IntMatrix basis = u.quotient.projection.select_cols(xi0_codes);
  IntMatrix inv = unimodular_inverse(basis);
  return inv * op * basis;
}

// ---------------------------------------------------------------------------
// Sum over a Y_p fiber as a sum over a kernel plus a correction term

template <class B>
struct Lemma411Report {
  std::vector<std::size_t> lhs;  // multiplicities over codes of Xi(f)
  std::vector<std::size_t> rhs;
  bool equal = false;
};

/// Both sides of  sum_{Y_p eta = Y_p xi} eta = sum_{sigma in ker(G_f -> G_{f/p})} sigma xi + [n = 1] phi^{-1} Y_p xi,
/// evaluated in A(f) for xi of exact order f.
template <class B>
Lemma411Report<B> lemma411_check(const B& b, const typename B::Elem& p, const typename B::Elem& f,
                                 const XiClass<B>& xi) {
  using Elem = typename B::Elem;
  if (!b.equal(xi.level, b.canonical(f)))
    throw Error(ErrorKind::OrderMismatch, format_xi(b, xi) + " is not of exact order " + b.format(f));
  if (!b.divides(p, f)) throw Error(ErrorKind::InvalidArgument, b.format(p) + " does not divide " + b.format(f));
  XiLevel<B> L(b, f);
  const std::size_t x = L.code_of(xi);
  Lemma411Report<B> r;
  r.lhs.assign(L.size(), 0);
  r.rhs.assign(L.size(), 0);
  const std::size_t yx = L.scale(x, p);
  for (auto y : L.preimages(p, yx)) ++r.lhs[y];
  const Elem fp = b.exact_div(f, p);
  for (const auto& s : gf_group(b, f))
    if (b.equal(b.mod(s.residue, fp), b.mod(b.one(), fp))) ++r.rhs[L.scale(x, s.residue)];
  int n = 0;
  Elem c = f;
  while (b.divides(p, c)) {
    c = b.exact_div(c, p);
    ++n;
  }
  if (n == 1) {
    // phi projects to the class of p in G_c: multiply the numerator of Y_p xi by p^{-1} mod c
    const Elem u = b.norm(c) == 1 ? b.one() : *inverse_mod(b, b.mod(p, c), c);
    ++r.rhs[L.scale(yx, u)];
  }
  r.equal = r.lhs == r.rhs;
  return r;
}

// ---------------------------------------------------------------------------
// Towers U(f), U(f^2), ..., U(f^N)

template <class B>
struct TowerLevel {
  typename B::Elem modulus;
  UModule<B> u;
  std::vector<std::size_t> xi0;  // codes at this level
};

template <class B>
struct Tower {
  std::vector<TowerLevel<B>> levels;
  std::vector<IntMatrix> transitions;  // level i -> i+1 in Xi_0 bases
  bool transitions_are_inclusions = false;
  bool exceptional = false;            // archimedean f exactly divisible by 2
};

template <class B>
bool exactly_divisible_by_two(const B& b, const typename B::Elem& f);

template <>
inline bool exactly_divisible_by_two<Archimedean>(const Archimedean&, const std::int64_t& f) {
  return f % 2 == 0 && f % 4 != 0;
}
template <>
inline bool exactly_divisible_by_two<FunctionField>(const FunctionField&, const FqPoly&) {
  return false;
}

template <class B>
Tower<B> u_tower(const B& b, const typename B::Elem& f, int N, const std::map<std::string, Integer>& nu = {}) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "tower height must be at least 1");
  Tower<B> t;
  t.exceptional = exactly_divisible_by_two(b, f);
  Partition<B> part(b);
  for (int k = 1; k <= N; ++k) {
    auto F = power(b, f, k);
    auto u = u_module(build_af(b, F, nu));
    auto codes = part.xi0_codes(u.af.level);
    t.levels.push_back({F, std::move(u), std::move(codes)});
  }
  t.transitions_are_inclusions = true;
  for (std::size_t i = 0; i + 1 < t.levels.size(); ++i) {
    const auto& lo = t.levels[i];
    const auto& hi = t.levels[i + 1];
    const auto& Lhi = hi.u.af.level;
    const auto cof = b.exact_div(hi.modulus, lo.modulus);
    // the inclusion A(f^i) -> A(f^{i+1}) followed by projection, on the Xi_0 basis of level i
    IntMatrix incl(Lhi.size(), lo.xi0.size());
    for (std::size_t j = 0; j < lo.xi0.size(); ++j)
      incl(Lhi.code_of(b.mul(lo.u.af.level.elem(lo.xi0[j]), cof)), j) = 1;
    IntMatrix basis_hi = hi.u.quotient.projection.select_cols(hi.xi0);
    auto coords = solve(basis_hi, hi.u.quotient.projection * incl);
    if (!coords) throw Error(ErrorKind::StructureViolation, "transition map does not land in the Xi_0 lattice");
    for (std::size_t j = 0; j < lo.xi0.size(); ++j) {
      const std::size_t target = Lhi.code_of(b.mul(lo.u.af.level.elem(lo.xi0[j]), cof));
      auto pos = std::find(hi.xi0.begin(), hi.xi0.end(), target);
      for (std::size_t r = 0; r < hi.xi0.size(); ++r) {
        const bool expect_one = pos != hi.xi0.end() && static_cast<std::size_t>(pos - hi.xi0.begin()) == r;
        if ((*coords)(r, j) != (expect_one ? 1 : 0)) t.transitions_are_inclusions = false;
      }
    }
    t.transitions.push_back(std::move(*coords));
  }
  return t;
}

}  // namespace uod
