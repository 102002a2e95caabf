#pragma once

// The two class-number-one backends (Z with x/|x|, F_q[T] with the leading
// coefficient) and the finite-level arithmetic of torsion translates:
// Xi(f) = f^{-1}A/A, the maps Y_g, the groups G_f = (A/f)^x and the sign group.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uod/error.hpp"
#include "uod/fq.hpp"

namespace uod {

template <class E>
struct PrimePower {
  E prime;
  int exponent;
};

// ---------------------------------------------------------------------------
// Backends

class Archimedean {
 public:
  using Elem = std::int64_t;

  static constexpr const char* kind() { return "q"; }
  int q() const { return 0; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem add(Elem a, Elem b) const { return a + b; }
  Elem sub(Elem a, Elem b) const { return a - b; }
  Elem neg(Elem a) const { return -a; }
  Elem mul(Elem a, Elem b) const { return static_cast<Elem>(static_cast<__int128>(a) * b); }
  bool is_zero(Elem a) const { return a == 0; }
  bool equal(Elem a, Elem b) const { return a == b; }

  Elem mod(Elem a, Elem f) const {
    Elem r = a % f;
    return r < 0 ? r + f : r;
  }
  Elem mulmod(Elem a, Elem b, Elem f) const {
    return mod(static_cast<Elem>((static_cast<__int128>(a) * b) % f), f);
  }
  bool divides(Elem d, Elem a) const { return d != 0 ? a % d == 0 : a == 0; }
  Elem exact_div(Elem a, Elem d) const {
    if (!divides(d, a)) throw Error(ErrorKind::NotDivisible, format(d) + " does not divide " + format(a));
    return a / d;
  }
  Elem gcd(Elem a, Elem b) const {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b) {
      Elem t = a % b;
      a = b;
      b = t;
    }
    return a;
  }
  /// (g, s) with s*a = g mod f, g = gcd(a, f).
  std::pair<Elem, Elem> gcd_cofactor(Elem a, Elem f) const {
    Elem r0 = mod(a, f), r1 = f, s0 = 1, s1 = 0;
    while (r1) {
      Elem qt = r0 / r1;
      Elem t = r0 - qt * r1;
      r0 = r1;
      r1 = t;
      t = s0 - qt * s1;
      s0 = s1;
      s1 = t;
    }
    return {r0, s0};
  }
  Elem canonical(Elem a) const { return a < 0 ? -a : a; }
  bool is_canonical_ideal(Elem a) const { return a > 0; }
  /// |A/f|.
  std::size_t norm(Elem f) const { return static_cast<std::size_t>(f); }
  /// Residues are coded by their value; codes run over [0, norm(f)).
  std::size_t code(Elem residue) const { return static_cast<std::size_t>(residue); }
  Elem from_code(std::size_t c) const { return static_cast<Elem>(c); }
  bool less(Elem a, Elem b) const { return a < b; }

  std::vector<PrimePower<Elem>> factor(Elem f) const {
    if (f <= 0) throw Error(ErrorKind::InvalidArgument, "factor expects a positive integer");
    std::vector<PrimePower<Elem>> out;
    for (Elem p = 2; p * p <= f; ++p) {
      if (f % p) continue;
      int e = 0;
      while (f % p == 0) {
        f /= p;
        ++e;
      }
      out.push_back({p, e});
    }
    if (f > 1) out.push_back({f, 1});
    return out;
  }

  /// Number of roots of unity of the completion.
  int sign_order() const { return 2; }
  /// (sgn gamma0)^{-1}: gamma0 acts on numerators by this scalar.
  Elem sign_numerator() const { return -1; }
  std::string sign_label() const { return "-1"; }

  /// Least positive integer in the residue class (the ideal representing a unit of A/f).
  Elem positive_representative(Elem residue, Elem f) const {
    Elem r = mod(residue, f);
    return r == 0 ? f : r;
  }

  std::string format(Elem a) const { return std::to_string(a); }
  Elem parse(const std::string& s) const {
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = s.size();
    while (j > i && s[j - 1] == ' ') --j;
    if (i == j) throw Error(ErrorKind::ParseError, "empty integer");
    Elem v = 0;
    for (std::size_t k = i; k < j; ++k) {
      if (s[k] < '0' || s[k] > '9') throw Error(ErrorKind::ParseError, "not a positive integer: \"" + s + "\"");
      v = v * 10 + (s[k] - '0');
      if (v > (Elem(1) << 40)) throw Error(ErrorKind::ParseError, "integer too large: \"" + s + "\"");
    }
    if (v == 0) throw Error(ErrorKind::ParseError, "ideal must be nonzero: \"" + s + "\"");
    return v;
  }
};

class FunctionField {
 public:
  using Elem = FqPoly;

  explicit FunctionField(int q) : ring_(q) {}

  static constexpr const char* kind() { return "fq"; }
  int q() const { return ring_.q(); }
  const FqPolyRing& ring() const { return ring_; }
  const FiniteField& field() const { return ring_.field(); }

  Elem zero() const { return {}; }
  Elem one() const { return FqPoly::constant(1); }
  Elem add(const Elem& a, const Elem& b) const { return ring_.add(a, b); }
  Elem sub(const Elem& a, const Elem& b) const { return ring_.sub(a, b); }
  Elem neg(const Elem& a) const { return ring_.neg(a); }
  Elem mul(const Elem& a, const Elem& b) const { return ring_.mul(a, b); }
  bool is_zero(const Elem& a) const { return a.is_zero(); }
  bool equal(const Elem& a, const Elem& b) const { return a == b; }

  Elem mod(const Elem& a, const Elem& f) const { return ring_.mod(a, f); }
  Elem mulmod(const Elem& a, const Elem& b, const Elem& f) const { return ring_.mod(ring_.mul(a, b), f); }
  bool divides(const Elem& d, const Elem& a) const {
    if (d.is_zero()) return a.is_zero();
    return ring_.mod(a, d).is_zero();
  }
  Elem exact_div(const Elem& a, const Elem& d) const {
    auto [qt, r] = ring_.divmod(a, d);
    if (!r.is_zero()) throw Error(ErrorKind::NotDivisible, format(d) + " does not divide " + format(a));
    return qt;
  }
  Elem gcd(const Elem& a, const Elem& b) const { return ring_.gcd(a, b); }
  std::pair<Elem, Elem> gcd_cofactor(const Elem& a, const Elem& f) const {
    auto [g, s, t] = ring_.xgcd(ring_.mod(a, f), f);
    (void)t;
    return {g, ring_.mod(s, f)};
  }
  Elem canonical(const Elem& a) const { return ring_.monic(a); }
  bool is_canonical_ideal(const Elem& a) const { return !a.is_zero() && a.lead() == 1; }
  std::size_t norm(const Elem& f) const {
    std::size_t n = 1;
    for (int i = 0; i < f.degree(); ++i) n *= static_cast<std::size_t>(q());
    return n;
  }
  /// Base-q digits, constant term least significant: codes grow with degree.
  std::size_t code(const Elem& residue) const {
    std::size_t c = 0;
    for (std::size_t i = residue.c.size(); i-- > 0;) c = c * static_cast<std::size_t>(q()) + residue.c[i];
    return c;
  }
  Elem from_code(std::size_t c) const {
    std::vector<int> v;
    for (; c; c /= static_cast<std::size_t>(q())) v.push_back(static_cast<int>(c % static_cast<std::size_t>(q())));
    return FqPoly(std::move(v));
  }
  bool less(const Elem& a, const Elem& b) const { return code(a) < code(b); }

  std::vector<PrimePower<Elem>> factor(Elem f) const {
    if (f.is_zero()) throw Error(ErrorKind::InvalidArgument, "factor of zero polynomial");
    f = ring_.monic(f);
    std::vector<PrimePower<Elem>> out;
    // trial division by monic polynomials in code order; the first divisor found is irreducible
    for (int d = 1; 2 * d <= f.degree(); ++d) {
      const std::size_t base = norm(FqPoly::monomial(1, static_cast<std::size_t>(d)));
      for (std::size_t c = base; c < 2 * base && 2 * d <= f.degree(); ++c) {
        Elem p = from_code(c);
        int e = 0;
        while (divides(p, f)) {
          f = exact_div(f, p);
          ++e;
        }
        if (e) out.push_back({p, e});
      }
    }
    if (f.degree() > 0) out.push_back({f, 1});
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return less(a.prime, b.prime); });
    // merge a leftover factor equal to one already found
    std::vector<PrimePower<Elem>> merged;
    for (auto& pp : out) {
      if (!merged.empty() && merged.back().prime == pp.prime)
        merged.back().exponent += pp.exponent;
      else
        merged.push_back(pp);
    }
    return merged;
  }

  int sign_order() const { return q() - 1; }
  Elem sign_numerator() const { return FqPoly::constant(field().inv(field().primitive())); }
  std::string sign_label() const { return field().format(field().primitive()); }

  /// Monic representative of least degree in the residue class.
  Elem positive_representative(const Elem& residue, const Elem& f) const {
    Elem r = ring_.mod(residue, f);
    if (r.is_zero()) return one();
    if (r.lead() == 1) return r;
    return ring_.add(r, f);
  }

  std::string format(const Elem& a) const { return ring_.format(a); }
  Elem parse(const std::string& s) const {
    Elem v = ring_.parse(s);
    if (v.is_zero()) throw Error(ErrorKind::ParseError, "ideal must be nonzero: \"" + s + "\"");
    if (v.lead() != 1) throw Error(ErrorKind::ParseError, "ideal generator must be monic: \"" + s + "\"");
    return v;
  }

 private:
  FqPolyRing ring_;
};

// ---------------------------------------------------------------------------
// Ideal arithmetic

template <class B>
typename B::Elem ideal_multiply(const B& b, const typename B::Elem& x, const typename B::Elem& y) {
  return b.canonical(b.mul(x, y));
}

template <class B>
typename B::Elem ideal_divide(const B& b, const typename B::Elem& x, const typename B::Elem& y) {
  return b.canonical(b.exact_div(x, y));
}

template <class B>
typename B::Elem ideal_gcd(const B& b, const typename B::Elem& x, const typename B::Elem& y) {
  return b.canonical(b.gcd(x, y));
}

template <class B>
typename B::Elem radical(const B& b, const typename B::Elem& f) {
  typename B::Elem r = b.one();
  for (const auto& pp : b.factor(f)) r = b.mul(r, pp.prime);
  return b.canonical(r);
}

template <class B>
bool is_squarefree(const B& b, const typename B::Elem& f) {
  for (const auto& pp : b.factor(f))
    if (pp.exponent > 1) return false;
  return true;
}

template <class B>
typename B::Elem power(const B& b, typename B::Elem x, int k) {
  typename B::Elem r = b.one();
  for (int i = 0; i < k; ++i) r = b.mul(r, x);
  return r;
}

/// Monic / positive divisors of f in canonical order.
template <class B>
std::vector<typename B::Elem> divisors(const B& b, const typename B::Elem& f) {
  std::vector<typename B::Elem> out{b.one()};
  for (const auto& pp : b.factor(f)) {
    const std::size_t n = out.size();
    typename B::Elem pk = b.one();
    for (int e = 1; e <= pp.exponent; ++e) {
      pk = b.mul(pk, pp.prime);
      for (std::size_t i = 0; i < n; ++i) out.push_back(b.mul(out[i], pk));
    }
  }
  std::sort(out.begin(), out.end(), [&](const auto& x, const auto& y) { return b.less(x, y); });
  return out;
}

/// Inverse of a modulo f, or nullopt when a is not a unit mod f.
template <class B>
std::optional<typename B::Elem> inverse_mod(const B& b, const typename B::Elem& a, const typename B::Elem& f) {
  if (b.norm(f) == 1) return b.zero();
  auto [g, s] = b.gcd_cofactor(a, f);
  if (!b.equal(b.canonical(g), b.one())) return std::nullopt;
  // normalize: g may be -1 in the archimedean case
  return b.mod(b.mul(s, g), f);
}

/// x = a1 mod m1, x = a2 mod m2 for coprime m1, m2; canonical residue mod m1*m2.
template <class B>
typename B::Elem crt(const B& b, const typename B::Elem& a1, const typename B::Elem& m1, const typename B::Elem& a2,
                     const typename B::Elem& m2) {
  auto inv = inverse_mod(b, b.mod(m1, m2), m2);
  if (!inv) throw Error(ErrorKind::InvalidArgument, "moduli are not coprime");
  auto t = b.mulmod(b.sub(a2, a1), *inv, m2);
  return b.mod(b.add(a1, b.mul(m1, t)), b.mul(m1, m2));
}

// ---------------------------------------------------------------------------
// Torsion translates and the groups G_f

/// The class [a/f + A] with f its exact order: f canonical, a a residue prime to f
/// (for f = 1, a = 0).
template <class B>
struct XiClass {
  typename B::Elem level;
  typename B::Elem numerator;
};

template <class B>
bool same_class(const B& b, const XiClass<B>& x, const XiClass<B>& y) {
  return b.equal(x.level, y.level) && b.equal(x.numerator, y.numerator);
}

/// Reduces [a/f] to lowest terms.
template <class B>
XiClass<B> xi_reduce(const B& b, const typename B::Elem& a, const typename B::Elem& f) {
  typename B::Elem r = b.mod(a, f);
  typename B::Elem g = b.canonical(b.gcd(r, f));
  if (b.is_zero(r)) return {b.one(), b.zero()};
  typename B::Elem level = b.exact_div(f, g);
  return {b.canonical(level), b.mod(b.exact_div(r, g), level)};
}

/// Numerator of the class over the common denominator F (requires order | F).
template <class B>
typename B::Elem xi_numerator_at(const B& b, const XiClass<B>& x, const typename B::Elem& F) {
  if (!b.divides(x.level, F))
    throw Error(ErrorKind::LevelMismatch, "class of order " + b.format(x.level) + " is not killed by " + b.format(F));
  return b.mod(b.mul(x.numerator, b.exact_div(F, x.level)), F);
}

template <class B>
std::string format_xi(const B& b, const XiClass<B>& x) {
  if (b.is_zero(x.numerator)) return "0";
  return "[" + b.format(x.numerator) + "/" + b.format(x.level) + "]";
}

/// Xi(f) in numerator-code order.
template <class B>
std::vector<XiClass<B>> xi_classes(const B& b, const typename B::Elem& f) {
  std::vector<XiClass<B>> out;
  const std::size_t n = b.norm(f);
  for (std::size_t c = 0; c < n; ++c) out.push_back(xi_reduce(b, b.from_code(c), f));
  return out;
}

/// Y_g [a/f] = [g a / f].
template <class B>
XiClass<B> y_map(const B& b, const typename B::Elem& g, const XiClass<B>& x) {
  return xi_reduce(b, b.mul(g, x.numerator), x.level);
}

/// All eta in Xi(level) with Y_g eta = xi; requires xi in Xi(level / g).
template <class B>
std::vector<XiClass<B>> y_fiber(const B& b, const typename B::Elem& g, const XiClass<B>& x,
                                const typename B::Elem& level) {
  if (!b.divides(g, level)) throw Error(ErrorKind::LevelMismatch, b.format(g) + " does not divide " + b.format(level));
  const typename B::Elem inner = b.exact_div(level, g);
  const typename B::Elem a = xi_numerator_at(b, x, inner);  // xi = [a / inner] = [a / (level/g)]
  std::vector<XiClass<B>> out;
  const std::size_t n = b.norm(g);
  for (std::size_t t = 0; t < n; ++t) out.push_back(xi_reduce(b, b.add(a, b.mul(b.from_code(t), inner)), level));
  return out;
}

template <class B>
struct GfElement {
  typename B::Elem level;
  typename B::Elem residue;
};

/// (A/f)^x in code order.
template <class B>
std::vector<GfElement<B>> gf_group(const B& b, const typename B::Elem& f) {
  std::vector<GfElement<B>> out;
  const std::size_t n = b.norm(f);
  if (n == 1) return {GfElement<B>{f, b.zero()}};
  for (std::size_t c = 0; c < n; ++c) {
    auto r = b.from_code(c);
    if (b.equal(b.canonical(b.gcd(r, f)), b.one())) out.push_back({f, r});
  }
  return out;
}

template <class B>
GfElement<B> gf_multiply(const B& b, const GfElement<B>& x, const GfElement<B>& y) {
  return {x.level, b.mulmod(x.residue, y.residue, x.level)};
}

/// Image under G_f -> G_g for g | f.
template <class B>
GfElement<B> gf_reduce(const B& b, const GfElement<B>& x, const typename B::Elem& g) {
  if (!b.divides(g, x.level)) throw Error(ErrorKind::LevelMismatch, "reduction to a non-divisor");
  return {g, b.mod(x.residue, g)};
}

/// sigma [a/g] = [u a / g] where u represents sigma; needs g | level(sigma).
template <class B>
XiClass<B> g_action(const B& b, const GfElement<B>& s, const XiClass<B>& x) {
  if (!b.divides(x.level, s.level))
    throw Error(ErrorKind::LevelMismatch,
                "element of G_" + b.format(s.level) + " cannot act on a class of order " + b.format(x.level));
  return xi_reduce(b, b.mul(s.residue, x.numerator), x.level);
}

template <class B>
struct SignGroup {
  int order = 1;                 // m
  GfElement<B> generator;        // image of gamma0 in G_f
  std::string sgn_value;         // sgn(gamma0), a generator of the roots of unity
};

template <class B>
SignGroup<B> sign_group(const B& b, const typename B::Elem& f) {
  return {b.sign_order(), GfElement<B>{f, b.mod(b.sign_numerator(), f)}, b.sign_label()};
}

/// gamma0 [a/f] = [(sgn gamma0)^{-1} a / f].
template <class B>
XiClass<B> sign_action(const B& b, const XiClass<B>& x) {
  return xi_reduce(b, b.mul(b.sign_numerator(), x.numerator), x.level);
}

// ---------------------------------------------------------------------------
// Xi(F) as codes 0..|A/F|-1; the class with code c is [elem(c) / F].

template <class B>
class XiLevel {
 public:
  using Elem = typename B::Elem;

  XiLevel(B backend, Elem F) : b_(std::move(backend)), F_(b_.canonical(F)) {
    n_ = b_.norm(F_);
    elems_.reserve(n_);
    for (std::size_t c = 0; c < n_; ++c) elems_.push_back(b_.from_code(c));
    primes_ = b_.factor(F_);
  }

  const B& backend() const { return b_; }
  const Elem& modulus() const { return F_; }
  std::size_t size() const { return n_; }
  const Elem& elem(std::size_t c) const { return elems_[c]; }
  std::size_t code_of(const Elem& a) const { return b_.code(b_.mod(a, F_)); }
  const std::vector<PrimePower<Elem>>& primes() const { return primes_; }

  XiClass<B> xi(std::size_t c) const { return xi_reduce(b_, elems_[c], F_); }
  std::size_t code_of(const XiClass<B>& x) const { return code_of(xi_numerator_at(b_, x, F_)); }

  /// Exact order F / gcd(x, F).
  Elem order(std::size_t c) const {
    if (c == 0) return b_.one();
    return b_.canonical(b_.exact_div(F_, b_.gcd(elems_[c], F_)));
  }
  /// The code of x * u.
  std::size_t scale(std::size_t c, const Elem& u) const { return code_of(b_.mul(elems_[c], u)); }
  /// True iff the class lies in Xi(f), i.e. (F/f) | x.
  bool in_level(std::size_t c, const Elem& f) const { return b_.divides(b_.exact_div(F_, f), elems_[c]); }
  /// Codes of Xi(f) in numerator-code order of level f.
  std::vector<std::size_t> level_codes(const Elem& f) const {
    const Elem cof = b_.exact_div(F_, f);
    std::vector<std::size_t> out;
    const std::size_t n = b_.norm(f);
    for (std::size_t t = 0; t < n; ++t) out.push_back(code_of(b_.mul(b_.from_code(t), cof)));
    return out;
  }
  /// Y_g-preimages of the class c inside Xi(F); requires g | x.
  std::vector<std::size_t> preimages(const Elem& g, std::size_t c) const {
    if (!b_.divides(g, elems_[c])) return {};
    const Elem base = b_.exact_div(elems_[c], g);
    const Elem step = b_.exact_div(F_, g);
    std::vector<std::size_t> out;
    const std::size_t n = b_.norm(g);
    for (std::size_t t = 0; t < n; ++t) out.push_back(code_of(b_.add(base, b_.mul(b_.from_code(t), step))));
    return out;
  }

 private:
  B b_;
  Elem F_;
  std::size_t n_ = 0;
  std::vector<Elem> elems_;
  std::vector<PrimePower<Elem>> primes_;
};

}  // namespace uod
