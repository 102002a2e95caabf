#pragma once

// The u-function over Q by character inversion in exact cyclotomic arithmetic, Iwasawa's
// lattice U'(f) inside Q[G_f], and the comparison U(f) -> U'(f).

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <vector>

#include "uod/arith.hpp"
#include "uod/distmod.hpp"

namespace uod {

using Rational = mpq_class;

/// Coefficients of the n-th cyclotomic polynomial, low degree first.
inline std::vector<Integer> cyclotomic_polynomial(int n) {
  static std::mutex mutex;
  static std::map<int, std::vector<Integer>> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  // x^n - 1 divided by Phi_d for every proper divisor d
  std::vector<Integer> p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = -1;
  p[static_cast<std::size_t>(n)] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d) continue;
    auto q = cyclotomic_polynomial(d);
    // exact division by the monic q
    std::vector<Integer> quot(p.size() - q.size() + 1, 0);
    for (std::size_t i = quot.size(); i-- > 0;) {
      quot[i] = p[i + q.size() - 1];
      for (std::size_t j = 0; j < q.size(); ++j) p[i + j] -= quot[i] * q[j];
    }
    p = std::move(quot);
  }
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(n, p);
  return p;
}

/// Elements of Q(zeta_n) as polynomials in zeta_n reduced modulo Phi_n.
class CycloNumber {
 public:
  CycloNumber() = default;
  explicit CycloNumber(int n) : n_(n), c_(static_cast<std::size_t>(n), 0) {}

  /// sum_i c_i zeta_n^i for i < n.
  static CycloNumber from_coefficients(int n, const std::vector<long>& c) {
    CycloNumber z(n);
    for (std::size_t i = 0; i < c.size(); ++i) z.c_[i % z.c_.size()] += c[i];
    return z;
  }
  static CycloNumber rational(int n, const Rational& v) {
    CycloNumber z(n);
    z.c_[0] = v;
    return z;
  }
  /// zeta_n^k.
  static CycloNumber root(int n, long k) {
    CycloNumber z(n);
    z.c_[static_cast<std::size_t>(((k % n) + n) % n)] = 1;
    return z;
  }

  int order() const { return n_; }

  CycloNumber& operator+=(const CycloNumber& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  CycloNumber& operator-=(const CycloNumber& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  friend CycloNumber operator+(CycloNumber a, const CycloNumber& b) { return a += b; }
  friend CycloNumber operator-(CycloNumber a, const CycloNumber& b) { return a -= b; }
  friend CycloNumber operator*(const CycloNumber& a, const CycloNumber& b) {
    CycloNumber out(a.n_);
    const std::size_t n = a.c_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (b.c_[j] != 0) out.c_[(i + j) % n] += a.c_[i] * b.c_[j];
    }
    return out;
  }
  friend CycloNumber operator*(const Rational& s, CycloNumber a) {
    for (auto& x : a.c_) x *= s;
    return a;
  }

  /// Canonical coefficients: the remainder modulo Phi_n (degree < phi(n)).
  std::vector<Rational> reduced() const {
    auto phi = cyclotomic_polynomial(n_);
    const std::size_t deg = phi.size() - 1;
    std::vector<Rational> r = c_;
    for (std::size_t i = r.size(); i-- > deg;) {
      if (r[i] == 0) continue;
      const Rational lead = r[i];
      for (std::size_t j = 0; j <= deg; ++j) r[i - deg + j] -= lead * Rational(phi[j]);
    }
    r.resize(deg);
    return r;
  }
  bool is_rational() const {
    auto r = reduced();
    for (std::size_t i = 1; i < r.size(); ++i)
      if (r[i] != 0) return false;
    return true;
  }
  Rational rational_part() const { return reduced()[0]; }
  bool operator==(const CycloNumber& o) const { return n_ == o.n_ && reduced() == o.reduced(); }

 private:
  int n_ = 1;
  std::vector<Rational> c_{0};
};

// ---------------------------------------------------------------------------
// (Z/f)^x and its characters

struct UnitGroup {
  std::int64_t f = 1;
  std::vector<std::int64_t> generators;  // residues mod f
  std::vector<int> orders;
  int exponent = 1;
  std::map<std::int64_t, std::vector<int>> log;  // residue -> exponents on the generators
};

inline UnitGroup unit_group(std::int64_t f) {
  const Archimedean Z;
  UnitGroup G;
  G.f = f;
  auto lift = [&](std::int64_t r, std::int64_t pk) {
    return pk == f ? Z.mod(r, f) : crt(Z, Z.mod(r, pk), pk, std::int64_t{1}, f / pk);
  };
  auto order_mod = [&](std::int64_t a, std::int64_t m) {
    int k = 1;
    for (std::int64_t x = Z.mod(a, m); x != 1 % m; x = Z.mulmod(x, a, m)) ++k;
    return k;
  };
  if (f > 1)
    for (const auto& pp : Z.factor(f)) {
      const std::int64_t pk = power(Z, pp.prime, pp.exponent);
      if (pp.prime == 2) {
        if (pp.exponent == 2) {
          G.generators.push_back(lift(3, pk));
          G.orders.push_back(2);
        } else if (pp.exponent >= 3) {
          G.generators.push_back(lift(-1, pk));
          G.orders.push_back(2);
          G.generators.push_back(lift(5, pk));
          G.orders.push_back(static_cast<int>(pk / 4));
        }
        continue;
      }
      const std::int64_t phi = pk / pp.prime * (pp.prime - 1);
      std::int64_t g = 2;
      while (order_mod(g, pk) != phi) ++g;
      G.generators.push_back(lift(g, pk));
      G.orders.push_back(static_cast<int>(phi));
    }
  for (int o : G.orders) G.exponent = std::lcm(G.exponent, o);
  // enumerate all exponent vectors
  std::vector<int> e(G.orders.size(), 0);
  for (;;) {
    std::int64_t x = 1 % f;
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) x = Z.mulmod(x, G.generators[i], f);
    G.log[x] = e;
    std::size_t i = 0;
    while (i < e.size() && ++e[i] == G.orders[i]) e[i++] = 0;
    if (i == e.size()) break;
  }
  if (f == 1) G.log = {{0, {}}};
  return G;
}

struct DirichletChar {
  std::int64_t modulus = 1;
  std::vector<int> exponents;  // chi(generator_i) = zeta_{order_i}^{exponents_i}
  std::int64_t conductor = 1;
  int order = 1;               // values live in Q(zeta_order), order = exponent of the group

  /// k with chi(x) = zeta_order^k, for x prime to the modulus.
  long log_value(const UnitGroup& G, std::int64_t x) const {
    const auto& l = G.log.at(Archimedean{}.mod(x, G.f));
    long k = 0;
    for (std::size_t i = 0; i < l.size(); ++i) k += static_cast<long>(exponents[i]) * l[i] * (order / G.orders[i]);
    return k % order;
  }
  CycloNumber value(const UnitGroup& G, std::int64_t x) const { return CycloNumber::root(order, log_value(G, x)); }

  /// chi(p) for a prime p | modulus: zero when p divides the conductor, else chi of any unit
  /// congruent to p modulo the conductor.
  std::optional<long> log_value_at_prime(const UnitGroup& G, std::int64_t p) const {
    if (conductor % p == 0) return std::nullopt;
    const Archimedean Z;
    // split the modulus into the part supported on primes of the conductor and the rest
    std::int64_t head = 1, tail = modulus;
    for (const auto& pp : Z.factor(conductor)) {
      while (tail % pp.prime == 0) {
        tail /= pp.prime;
        head *= pp.prime;
      }
    }
    const std::int64_t y = head == 1 ? 1 % modulus : (tail == 1 ? Z.mod(p, head) : crt(Z, Z.mod(p, head), head, std::int64_t{1}, tail));
    return log_value(G, y);
  }
  CycloNumber value_at_prime(const UnitGroup& G, std::int64_t p) const {
    auto k = log_value_at_prime(G, p);
    return k ? CycloNumber::root(order, *k) : CycloNumber(order);
  }
};

/// All phi(f) characters, trivial first, exponent vectors in lexicographic order.
inline std::vector<DirichletChar> characters(const UnitGroup& G) {
  const Archimedean Z;
  std::vector<DirichletChar> out;
  std::vector<int> e(G.orders.size(), 0);
  const auto divs = divisors(Z, G.f);
  for (;;) {
    DirichletChar chi{G.f, e, G.f, G.exponent};
    for (auto c : divs) {
      bool trivial = true;
      for (const auto& [x, l] : G.log)
        if (Z.mod(x - 1, c) == 0 && chi.log_value(G, x) != 0) {
          trivial = false;
          break;
        }
      if (trivial) {
        chi.conductor = c;
        break;
      }
    }
    out.push_back(chi);
    std::size_t i = e.size();
    while (i > 0 && ++e[i - 1] == G.orders[i - 1]) e[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

inline std::vector<DirichletChar> characters(std::int64_t f) { return characters(unit_group(f)); }

// ---------------------------------------------------------------------------
// u(x/f)

struct UValues {
  std::int64_t f = 1;
  std::map<std::int64_t, Rational> values;  // x prime to f (x = 0 when f = 1)
  bool resubstituted = false;
};

/// Product over p | f of (1 - chi(p)) as a polynomial in zeta of length order.
inline std::vector<long> character_product(const UnitGroup& G, const DirichletChar& chi) {
  std::vector<long> p(static_cast<std::size_t>(chi.order), 0);
  p[0] = 1;
  if (G.f == 1) return p;
  for (const auto& pp : Archimedean{}.factor(G.f)) {
    auto k = chi.log_value_at_prime(G, pp.prime);
    if (!k) continue;
    std::vector<long> q = p;
    for (std::size_t i = 0; i < p.size(); ++i) q[(i + static_cast<std::size_t>(*k)) % p.size()] -= p[i];
    p = std::move(q);
  }
  return p;
}

/// u(x/f) = (1/phi(f)) sum_chi conj(chi(x)) prod_{p | f}(1 - chi(p)); RationalityFailure if a
/// cyclotomic component survives. With verify, the defining identity is re-checked for every chi.
inline UValues u_values(std::int64_t f, bool verify = true) {
  if (f < 1) throw Error(ErrorKind::InvalidArgument, "f must be positive");
  UValues out;
  out.f = f;
  const UnitGroup G = unit_group(f);
  const auto chars = characters(G);
  const int E = G.exponent;
  std::vector<std::vector<long>> products;
  for (const auto& chi : chars) products.push_back(character_product(G, chi));
  const Rational phi(static_cast<long>(chars.size()));
  for (const auto& [x, l] : G.log) {
    std::vector<long> sum(static_cast<std::size_t>(E), 0);
    for (std::size_t c = 0; c < chars.size(); ++c) {
      const long k = chars[c].log_value(G, x);
      for (std::size_t i = 0; i < sum.size(); ++i)
        sum[(i + static_cast<std::size_t>(E - k)) % sum.size()] += products[c][i];
    }
    const CycloNumber acc = CycloNumber::from_coefficients(E, sum);
    if (!acc.is_rational())
      throw Error(ErrorKind::RationalityFailure, "u(" + std::to_string(x) + "/" + std::to_string(f) + ") is not rational");
    out.values[x] = acc.rational_part() / phi;
  }
  if (verify) {
    for (std::size_t c = 0; c < chars.size(); ++c) {
      CycloNumber lhs(E);
      for (const auto& [x, v] : out.values) lhs += v * chars[c].value(G, x);
      const CycloNumber rhs = CycloNumber::from_coefficients(E, products[c]);
      if (!(lhs == rhs))
        throw Error(ErrorKind::RationalityFailure, "u does not satisfy the character identity at level " + std::to_string(f));
    }
    out.resubstituted = true;
  }
  return out;
}

/// u on Q/Z, cached per reduced denominator.
class UFunction {
 public:
  Rational operator()(std::int64_t num, std::int64_t den) const {
    const Archimedean Z;
    num = Z.mod(num, den);
    const std::int64_t g = std::gcd(num, den);
    const std::int64_t d = den / g, x = num / g;
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(d);
    if (it == cache_.end()) it = cache_.emplace(d, u_values(d, false)).first;
    return it->second.values.at(d == 1 ? 0 : x);
  }

 private:
  mutable std::mutex mutex_;
  mutable std::map<std::int64_t, UValues> cache_;
};

struct DistributionCheck {
  std::int64_t f = 1;
  std::size_t relations_checked = 0;
  bool passed = false;
};

/// u(a) = sum_{i < g} u((a + i)/g) for every g | f^2 and a in (g/f^2)Z/Z.
inline DistributionCheck u_distribution_check(std::int64_t f, const UFunction& u) {
  const Archimedean Z;
  DistributionCheck rep;
  rep.f = f;
  rep.passed = true;
  const std::int64_t F = f * f;
  for (auto g : divisors(Z, F))
    for (std::int64_t j = 0; j < F / g; ++j) {
      // a = j g / F and (a + i)/g = (j + i F/g) / F
      Rational rhs = 0;
      for (std::int64_t i = 0; i < g; ++i) rhs += u(j + i * (F / g), F);
      if (u(j * g, F) != rhs) rep.passed = false;
      ++rep.relations_checked;
    }
  return rep;
}

// ---------------------------------------------------------------------------
// U'(f)

struct UPrimeReport {
  std::int64_t f = 1;
  std::size_t lattice_rank = 0;
  Integer denominator = 1;            // common denominator of all u values used
  Integer lattice_determinant = 0;    // of a Z-basis of denominator * U'(f)
  Integer image_determinant = 0;      // of the images of the Xi_0 basis
  bool relations_killed = false;
  bool equivariant = false;
  bool isomorphism = false;
};

/// The map e_[a/f] -> sum_{y in G_f} u(y^{-1} a / f) sigma_y, scaled by a common denominator.
inline IntMatrix uprime_map(std::int64_t f, const UFunction& u, Integer& denominator) {
  const Archimedean Z;
  const auto G = gf_group(Z, f);
  std::vector<std::int64_t> inv;
  for (const auto& y : G) inv.push_back(*inverse_mod(Z, y.residue, f));
  std::vector<std::vector<Rational>> cols;
  denominator = 1;
  for (std::int64_t a = 0; a < f; ++a) {
    std::vector<Rational> c;
    for (auto yi : inv) {
      c.push_back(u(Z.mulmod(yi, a, f), f));
      denominator = lcm(denominator, Integer(c.back().get_den()));
    }
    cols.push_back(std::move(c));
  }
  IntMatrix m(G.size(), static_cast<std::size_t>(f));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < G.size(); ++i) {
      Rational v = cols[j][i] * Rational(denominator);
      m(i, j) = v.get_num();
    }
  return m;
}

inline UPrimeReport uprime_compare(std::int64_t f, const UFunction& u) {
  const Archimedean Z;
  if (f < 2) throw Error(ErrorKind::InvalidArgument, "f must exceed 1");
  UPrimeReport rep;
  rep.f = f;
  IntMatrix phi = uprime_map(f, u, rep.denominator);
  const std::size_t n = gf_group(Z, f).size();
  rep.lattice_rank = rank(phi);
  if (rep.lattice_rank != n)
    throw Error(ErrorKind::RankMismatch, "U'(" + std::to_string(f) + ") has rank " + std::to_string(rep.lattice_rank));
  auto um = u_module(build_af(Z, f));
  rep.relations_killed = (phi * um.relations).is_zero();
  if (!rep.relations_killed) throw Error(ErrorKind::RelationNotKilled, "u does not kill the distribution relations");
  // G_f acts on Q[G_f] by sigma_t e_y = e_{t y}
  const auto G = gf_group(Z, f);
  std::map<std::int64_t, std::size_t> pos;
  for (std::size_t i = 0; i < G.size(); ++i) pos[G[i].residue] = i;
  rep.equivariant = true;
  for (auto t : unit_generators(Z, f)) {
    IntMatrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) p(pos.at(Z.mulmod(t, G[i].residue, f)), i) = 1;
    if (!(phi * scale_matrix(um.af.level, t) == p * phi)) rep.equivariant = false;
  }
  Partition<Archimedean> part(Z);
  auto xi0 = part.xi0_codes(um.af.level);
  rep.image_determinant = determinant(phi.select_cols(xi0));
  rep.lattice_determinant = determinant(lattice_basis(phi));
  rep.isomorphism = rep.image_determinant != 0 && cmp_abs(rep.image_determinant, rep.lattice_determinant) == 0;
  return rep;
}

}  // namespace uod
