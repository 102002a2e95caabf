#pragma once

// Finite fields F_q (table driven) and dense univariate polynomials over them.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "uod/error.hpp"

namespace uod {

/// F_q with q = p^e. Elements are the integers 0..q-1; the base-p digits of an
/// element are the coefficients (low to high) of a polynomial in the generator a
/// of F_q over F_p, reduced modulo a fixed monic irreducible of degree e.
class FiniteField {
 public:
  static constexpr int kMaxOrder = 256;

  explicit FiniteField(int q) : q_(q) {
    if (q < 2 || q > kMaxOrder) throw Error(ErrorKind::InvalidArgument, "field order out of range: " + std::to_string(q));
    p_ = smallest_prime_factor(q);
    e_ = 0;
    for (int t = q; t > 1; t /= p_) {
      if (t % p_ != 0) throw Error(ErrorKind::InvalidArgument, std::to_string(q) + " is not a prime power");
      ++e_;
    }
    modulus_ = least_irreducible();
    build_tables();
    zeta_ = least_primitive();
  }

  int order() const noexcept { return q_; }
  int characteristic() const noexcept { return p_; }
  int degree() const noexcept { return e_; }
  /// Coefficients (low to high, monic) of the defining polynomial of a over F_p.
  const std::vector<int>& modulus() const noexcept { return modulus_; }
  /// Least element (as an integer) generating the multiplicative group.
  int primitive() const noexcept { return zeta_; }

  int add(int a, int b) const { return add_[idx(a, b)]; }
  int mul(int a, int b) const { return mul_[idx(a, b)]; }
  int neg(int a) const { return neg_[static_cast<std::size_t>(a)]; }
  int sub(int a, int b) const { return add(a, neg(b)); }
  int inv(int a) const {
    if (a == 0) throw Error(ErrorKind::InvalidArgument, "inverse of zero in F_q");
    return inv_[static_cast<std::size_t>(a)];
  }
  int pow(int a, long k) const {
    if (k < 0) return pow(inv(a), -k);
    int r = 1;
    for (long i = 0; i < k; ++i) r = mul(r, a);
    return r;
  }
  /// The image of an integer under Z -> F_p -> F_q.
  int from_integer(long n) const {
    long r = n % p_;
    if (r < 0) r += p_;
    return static_cast<int>(r);
  }
  /// The generator a itself (equal to p when e > 1, and to 0 ... p-1 digits otherwise).
  int generator() const {
    if (e_ == 1) throw Error(ErrorKind::InvalidArgument, "prime field has no adjoined generator");
    return p_;
  }

  std::string format(int c) const {
    if (e_ == 1) return std::to_string(c);
    std::string out;
    for (int i = e_ - 1; i >= 0; --i) {
      int d = digit(c, i);
      if (d == 0) continue;
      if (!out.empty()) out += "+";
      if (i == 0) {
        out += std::to_string(d);
        continue;
      }
      if (d != 1) out += std::to_string(d) + "*";
      out += i == 1 ? "a" : "a^" + std::to_string(i);
    }
    return out.empty() ? "0" : out;
  }

 private:
  static int smallest_prime_factor(int n) {
    for (int d = 2; d * d <= n; ++d)
      if (n % d == 0) return d;
    return n;
  }
  std::size_t idx(int a, int b) const { return static_cast<std::size_t>(a) * static_cast<std::size_t>(q_) + b; }
  int digit(int c, int i) const {
    for (int k = 0; k < i; ++k) c /= p_;
    return c % p_;
  }

  // Monic polynomials over F_p of degree e enumerated by increasing code; first one without roots
  // in any extension of lower degree, i.e. with no monic factor of degree <= e/2.
  std::vector<int> least_irreducible() const {
    if (e_ == 1) return {0, 1};
    int count = 1;
    for (int i = 0; i < e_; ++i) count *= p_;
    for (int c = 0; c < count; ++c) {
      std::vector<int> f(static_cast<std::size_t>(e_) + 1, 0);
      for (int i = 0, t = c; i < e_; ++i, t /= p_) f[static_cast<std::size_t>(i)] = t % p_;
      f[static_cast<std::size_t>(e_)] = 1;
      if (prime_irreducible(f)) return f;
    }
    throw Error(ErrorKind::StructureViolation, "no irreducible polynomial found");
  }

  bool prime_irreducible(const std::vector<int>& f) const {
    const int n = static_cast<int>(f.size()) - 1;
    for (int d = 1; 2 * d <= n; ++d) {
      int count = 1;
      for (int i = 0; i < d; ++i) count *= p_;
      for (int c = 0; c < count; ++c) {
        std::vector<int> g(static_cast<std::size_t>(d) + 1, 0);
        for (int i = 0, t = c; i < d; ++i, t /= p_) g[static_cast<std::size_t>(i)] = t % p_;
        g[static_cast<std::size_t>(d)] = 1;
        if (prime_remainder_zero(f, g)) return false;
      }
    }
    return true;
  }

  bool prime_remainder_zero(std::vector<int> f, const std::vector<int>& g) const {
    const std::size_t dg = g.size() - 1;
    for (std::size_t top = f.size() - 1; top >= dg; --top) {
      int c = f[top];
      if (c != 0)
        for (std::size_t i = 0; i <= dg; ++i)
          f[top - dg + i] = ((f[top - dg + i] - c * g[i]) % p_ + p_) % p_;
      if (top == 0) break;
    }
    for (std::size_t i = 0; i < dg; ++i)
      if (f[i] != 0) return false;
    return true;
  }

  void build_tables() {
    const std::size_t n = static_cast<std::size_t>(q_);
    add_.assign(n * n, 0);
    mul_.assign(n * n, 0);
    neg_.assign(n, 0);
    inv_.assign(n, 0);
    auto digits = [&](int c) {
      std::vector<int> d(static_cast<std::size_t>(e_));
      for (int i = 0; i < e_; ++i, c /= p_) d[static_cast<std::size_t>(i)] = c % p_;
      return d;
    };
    auto encode = [&](const std::vector<int>& d) {
      int c = 0;
      for (int i = e_ - 1; i >= 0; --i) c = c * p_ + d[static_cast<std::size_t>(i)];
      return c;
    };
    for (int a = 0; a < q_; ++a) {
      auto da = digits(a);
      for (int b = 0; b < q_; ++b) {
        auto db = digits(b);
        std::vector<int> s(static_cast<std::size_t>(e_));
        for (int i = 0; i < e_; ++i) s[i] = (da[i] + db[i]) % p_;
        add_[idx(a, b)] = encode(s);
        std::vector<int> prod(static_cast<std::size_t>(2 * e_ - 1), 0);
        for (int i = 0; i < e_; ++i)
          for (int j = 0; j < e_; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
        for (int k = 2 * e_ - 2; k >= e_; --k) {
          int c = prod[k];
          if (c == 0) continue;
          for (int i = 0; i <= e_; ++i) prod[k - e_ + i] = ((prod[k - e_ + i] - c * modulus_[i]) % p_ + p_) % p_;
        }
        prod.resize(static_cast<std::size_t>(e_));
        mul_[idx(a, b)] = encode(prod);
      }
    }
    for (int a = 0; a < q_; ++a)
      for (int b = 0; b < q_; ++b) {
        if (add_[idx(a, b)] == 0) neg_[a] = b;
        if (mul_[idx(a, b)] == 1) inv_[a] = b;
      }
  }

  int least_primitive() const {
    if (q_ == 2) return 1;
    for (int z = 1; z < q_; ++z) {
      int x = z, ord = 1;
      while (x != 1) {
        x = mul(x, z);
        ++ord;
      }
      if (ord == q_ - 1) return z;
    }
    throw Error(ErrorKind::StructureViolation, "no primitive element");
  }

  int q_, p_, e_;
  std::vector<int> modulus_;
  std::vector<int> add_, mul_, neg_, inv_;
  int zeta_ = 1;
};

/// Polynomial over F_q, coefficients low to high, no trailing zeros (zero polynomial is empty).
struct FqPoly {
  std::vector<int> c;

  FqPoly() = default;
  explicit FqPoly(std::vector<int> coeffs) : c(std::move(coeffs)) { trim(); }
  static FqPoly constant(int a) { return FqPoly(std::vector<int>{a}); }
  static FqPoly monomial(int a, std::size_t deg) {
    std::vector<int> v(deg + 1, 0);
    v[deg] = a;
    return FqPoly(std::move(v));
  }

  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
  int lead() const { return c.empty() ? 0 : c.back(); }
  int coeff(std::size_t i) const { return i < c.size() ? c[i] : 0; }
  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  friend bool operator==(const FqPoly& a, const FqPoly& b) { return a.c == b.c; }
  friend bool operator!=(const FqPoly& a, const FqPoly& b) { return a.c != b.c; }
};

/// Ring operations of F_q[T].
class FqPolyRing {
 public:
  explicit FqPolyRing(int q) : field_(std::make_shared<FiniteField>(q)) {}

  const FiniteField& field() const { return *field_; }
  int q() const { return field_->order(); }

  FqPoly add(const FqPoly& a, const FqPoly& b) const {
    std::vector<int> r(std::max(a.c.size(), b.c.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = field_->add(a.coeff(i), b.coeff(i));
    return FqPoly(std::move(r));
  }
  FqPoly neg(const FqPoly& a) const {
    std::vector<int> r(a.c.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = field_->neg(a.c[i]);
    return FqPoly(std::move(r));
  }
  FqPoly sub(const FqPoly& a, const FqPoly& b) const { return add(a, neg(b)); }
  FqPoly scale(const FqPoly& a, int s) const {
    std::vector<int> r(a.c.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = field_->mul(a.c[i], s);
    return FqPoly(std::move(r));
  }
  FqPoly mul(const FqPoly& a, const FqPoly& b) const {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<int> r(a.c.size() + b.c.size() - 1, 0);
    for (std::size_t i = 0; i < a.c.size(); ++i) {
      if (a.c[i] == 0) continue;
      for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] = field_->add(r[i + j], field_->mul(a.c[i], b.c[j]));
    }
    return FqPoly(std::move(r));
  }

  std::pair<FqPoly, FqPoly> divmod(const FqPoly& a, const FqPoly& b) const {
    if (b.is_zero()) throw Error(ErrorKind::InvalidArgument, "polynomial division by zero");
    if (a.degree() < b.degree()) return {FqPoly{}, a};
    std::vector<int> r = a.c;
    std::vector<int> qt(a.c.size() - b.c.size() + 1, 0);
    const int inv_lead = field_->inv(b.lead());
    const std::size_t db = b.c.size() - 1;
    for (std::size_t top = r.size() - 1;; --top) {
      int coef = field_->mul(r[top], inv_lead);
      if (coef != 0) {
        qt[top - db] = coef;
        for (std::size_t i = 0; i <= db; ++i) r[top - db + i] = field_->sub(r[top - db + i], field_->mul(coef, b.c[i]));
      }
      if (top == db) break;
    }
    return {FqPoly(std::move(qt)), FqPoly(std::move(r))};
  }
  FqPoly mod(const FqPoly& a, const FqPoly& b) const { return divmod(a, b).second; }

  FqPoly monic(const FqPoly& a) const { return a.is_zero() ? a : scale(a, field_->inv(a.lead())); }

  FqPoly gcd(FqPoly a, FqPoly b) const {
    while (!b.is_zero()) {
      FqPoly r = mod(a, b);
      a = std::move(b);
      b = std::move(r);
    }
    return monic(a);
  }

  /// (g, s, t) with s*a + t*b = g monic.
  std::tuple<FqPoly, FqPoly, FqPoly> xgcd(const FqPoly& a, const FqPoly& b) const {
    FqPoly r0 = a, r1 = b, s0 = FqPoly::constant(1), s1, t0, t1 = FqPoly::constant(1);
    while (!r1.is_zero()) {
      auto [qt, r] = divmod(r0, r1);
      r0 = std::move(r1);
      r1 = std::move(r);
      FqPoly s = sub(s0, mul(qt, s1));
      s0 = std::move(s1);
      s1 = std::move(s);
      FqPoly t = sub(t0, mul(qt, t1));
      t0 = std::move(t1);
      t1 = std::move(t);
    }
    if (r0.is_zero()) return {r0, s0, t0};
    const int inv = field_->inv(r0.lead());
    return {scale(r0, inv), scale(s0, inv), scale(t0, inv)};
  }

  std::string format(const FqPoly& a) const {
    if (a.is_zero()) return "0";
    std::string out;
    for (int i = a.degree(); i >= 0; --i) {
      int c = a.c[static_cast<std::size_t>(i)];
      if (c == 0) continue;
      std::string coef = field_->format(c);
      const bool compound = coef.find('+') != std::string::npos;
      if (!out.empty()) out += "+";
      if (i == 0) {
        out += compound ? "(" + coef + ")" : coef;
        continue;
      }
      if (c != 1) out += (compound ? "(" + coef + ")" : coef) + "*";
      out += i == 1 ? "T" : "T^" + std::to_string(i);
    }
    return out;
  }

  /// Parses expressions in T (and a, the generator of F_q over F_p) with + - * ^ and parentheses.
  /// Integer literals are reduced modulo p; juxtaposition means multiplication.
  FqPoly parse(const std::string& text) const {
    Parser ps{*this, text, 0};
    FqPoly v = ps.expr();
    ps.skip();
    if (ps.pos != text.size()) ps.fail("unexpected '" + std::string(1, text[ps.pos]) + "'");
    return v;
  }

 private:
  struct Parser {
    const FqPolyRing& ring;
    const std::string& s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw Error(ErrorKind::ParseError, "polynomial \"" + s + "\" at offset " + std::to_string(pos) + ": " + what);
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char ch) {
      skip();
      if (pos < s.size() && s[pos] == ch) {
        ++pos;
        return true;
      }
      return false;
    }
    FqPoly expr() {
      const bool negate = eat('-');
      if (!negate) eat('+');
      FqPoly acc = term();
      if (negate) acc = ring.neg(acc);
      for (;;) {
        if (eat('+'))
          acc = ring.add(acc, term());
        else if (eat('-'))
          acc = ring.sub(acc, term());
        else
          break;
      }
      return acc;
    }
    bool starts_factor() {
      skip();
      if (pos >= s.size()) return false;
      char ch = s[pos];
      return std::isdigit(static_cast<unsigned char>(ch)) || ch == 'T' || ch == 'a' || ch == '(';
    }
    FqPoly term() {
      FqPoly acc = factor();
      for (;;) {
        if (eat('*')) {
          acc = ring.mul(acc, factor());
        } else if (starts_factor()) {
          acc = ring.mul(acc, factor());
        } else {
          break;
        }
      }
      return acc;
    }
    FqPoly factor() {
      FqPoly base = primary();
      if (eat('^')) {
        skip();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (start == pos) fail("expected exponent");
        if (pos - start > 4) fail("exponent too large");
        const int k = std::stoi(s.substr(start, pos - start));
        FqPoly r = FqPoly::constant(1);
        for (int i = 0; i < k; ++i) r = ring.mul(r, base);
        return r;
      }
      return base;
    }
    FqPoly primary() {
      skip();
      if (pos >= s.size()) fail("unexpected end of input");
      char ch = s[pos];
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        long v = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
          v = (v * 10 + (s[pos] - '0')) % ring.field().characteristic();
          ++pos;
        }
        return FqPoly::constant(ring.field().from_integer(v));
      }
      if (ch == 'T') {
        ++pos;
        return FqPoly::monomial(1, 1);
      }
      if (ch == 'a') {
        ++pos;
        if (ring.field().degree() == 1) fail("'a' is only available when q is not prime");
        return FqPoly::constant(ring.field().generator());
      }
      if (ch == '(') {
        ++pos;
        FqPoly v = expr();
        if (!eat(')')) fail("expected ')'");
        return v;
      }
      fail("unexpected '" + std::string(1, ch) + "'");
    }
  };

  std::shared_ptr<const FiniteField> field_;
};

}  // namespace uod
