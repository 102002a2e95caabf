#pragma once

// Chain complexes of finitely generated free abelian groups, chain maps,
// twist and mapping cone, double complexes, and the Koszul-Tate double
// complex KT(M, {f_s}, [f+; f-]) with its companions.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uod/znf.hpp"

namespace uod {

using HomologyTable = std::map<int, AbGroupInvariants>;

// ---------------------------------------------------------------------------
// Chain complexes

/// Free chain complex concentrated in degrees [lo, lo + ranks.size()).
/// diffs[i] is the differential out of degree lo + i + 1.
class ChainComplex {
 public:
  ChainComplex() = default;

  int lo() const noexcept { return lo_; }
  int hi() const noexcept { return lo_ + static_cast<int>(ranks_.size()) - 1; }
  bool empty() const noexcept { return ranks_.empty(); }

  std::size_t rank(int n) const {
    if (n < lo_ || n > hi()) return 0;
    return ranks_[static_cast<std::size_t>(n - lo_)];
  }

  /// d_n : C_n -> C_{n-1}, a rank(n-1) x rank(n) matrix (zero outside the support).
  IntMatrix d(int n) const {
    if (n <= lo_ || n > hi()) return IntMatrix(rank(n - 1), rank(n));
    return diffs_[static_cast<std::size_t>(n - lo_ - 1)];
  }

  friend ChainComplex make_complex(int lo, std::vector<std::size_t> ranks, std::vector<IntMatrix> diffs);

 private:
  int lo_ = 0;
  std::vector<std::size_t> ranks_;
  std::vector<IntMatrix> diffs_;
};

/// Validated complex; throws ShapeMismatch or NotAComplex (naming the degree).
inline ChainComplex make_complex(int lo, std::vector<std::size_t> ranks, std::vector<IntMatrix> diffs) {
  if (ranks.empty() && !diffs.empty()) throw Error(ErrorKind::ShapeMismatch, "differentials without terms");
  if (!ranks.empty() && diffs.size() + 1 != ranks.size())
    throw Error(ErrorKind::ShapeMismatch, "expected one differential between each pair of adjacent terms");
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i].rows() != ranks[i] || diffs[i].cols() != ranks[i + 1])
      throw Error(ErrorKind::ShapeMismatch, "differential out of degree " + std::to_string(lo + int(i) + 1) +
                                                " has shape " + std::to_string(diffs[i].rows()) + "x" +
                                                std::to_string(diffs[i].cols()));
  }
  for (std::size_t i = 1; i < diffs.size(); ++i)
    if (!(diffs[i - 1] * diffs[i]).is_zero())
      throw Error(ErrorKind::NotAComplex, "d^2 != 0 at degree " + std::to_string(lo + int(i) + 1));
  ChainComplex c;
  c.lo_ = lo;
  c.ranks_ = std::move(ranks);
  c.diffs_ = std::move(diffs);
  return c;
}

/// The complex restricted to degrees [a, b] (a brutal truncation on both sides).
inline ChainComplex restrict_degrees(const ChainComplex& c, int a, int b) {
  std::vector<std::size_t> ranks;
  std::vector<IntMatrix> diffs;
  for (int n = a; n <= b; ++n) {
    ranks.push_back(c.rank(n));
    if (n > a) diffs.push_back(c.d(n));
  }
  return make_complex(a, std::move(ranks), std::move(diffs));
}

/// X[k]_n = X_{n-k}, with differential scaled by (-1)^k.
inline ChainComplex twist(const ChainComplex& c, int k) {
  if (c.empty()) return c;
  std::vector<std::size_t> ranks;
  std::vector<IntMatrix> diffs;
  const bool odd = (k % 2) != 0;
  for (int n = c.lo(); n <= c.hi(); ++n) {
    ranks.push_back(c.rank(n));
    if (n > c.lo()) diffs.push_back(odd ? -c.d(n) : c.d(n));
  }
  return make_complex(c.lo() + k, std::move(ranks), std::move(diffs));
}

namespace detail {

inline AbGroupInvariants homology_from(std::size_t dim, const std::vector<Integer>& out_inv,
                                       const std::vector<Integer>& in_inv) {
  AbGroupInvariants h;
  const std::size_t r_out = rank_from_invariants(out_inv);
  const std::size_t r_in = rank_from_invariants(in_inv);
  h.free_rank = dim - r_out - r_in;
  h.torsion = nontrivial_torsion(in_inv);
  return h;
}

}  // namespace detail

/// Homology in the requested degrees (all supported degrees when `degrees` is empty).
inline HomologyTable homology(const ChainComplex& c, std::vector<int> degrees = {}) {
  HomologyTable out;
  if (c.empty() && degrees.empty()) return out;
  if (degrees.empty())
    for (int n = c.lo(); n <= c.hi(); ++n) degrees.push_back(n);
  std::map<int, std::vector<Integer>> inv;
  auto invariants_of = [&](int n) -> const std::vector<Integer>& {
    auto it = inv.find(n);
    if (it == inv.end()) it = inv.emplace(n, snf_invariants(c.d(n))).first;
    return it->second;
  };
  for (int n : degrees) out[n] = detail::homology_from(c.rank(n), invariants_of(n), invariants_of(n + 1));
  return out;
}

// ---------------------------------------------------------------------------
// Chain maps and the mapping cone

class ChainMap {
 public:
  ChainMap() = default;
  const ChainComplex& source() const { return source_; }
  const ChainComplex& target() const { return target_; }

  IntMatrix component(int n) const {
    auto it = components_.find(n);
    if (it == components_.end()) return IntMatrix(target_.rank(n), source_.rank(n));
    return it->second;
  }

  friend ChainMap make_chain_map(ChainComplex source, ChainComplex target, std::map<int, IntMatrix> components);

 private:
  ChainComplex source_, target_;
  std::map<int, IntMatrix> components_;
};

/// Validated chain map; throws ShapeMismatch or NotAChainMap.
inline ChainMap make_chain_map(ChainComplex source, ChainComplex target, std::map<int, IntMatrix> components) {
  for (const auto& [n, m] : components)
    if (m.rows() != target.rank(n) || m.cols() != source.rank(n))
      throw Error(ErrorKind::ShapeMismatch, "chain map component in degree " + std::to_string(n));
  ChainMap f;
  f.source_ = std::move(source);
  f.target_ = std::move(target);
  f.components_ = std::move(components);
  if (f.source_.empty()) return f;
  for (int n = f.source_.lo(); n <= f.source_.hi() + 1; ++n) {
    IntMatrix lhs = f.component(n - 1) * f.source_.d(n);
    IntMatrix rhs = f.target_.d(n) * f.component(n);
    if (!(lhs == rhs)) throw Error(ErrorKind::NotAChainMap, "square fails to commute at degree " + std::to_string(n));
  }
  return f;
}

struct Cone {
  ChainComplex complex;
  ChainMap inclusion;   // Y -> Cone(f)
  ChainMap projection;  // Cone(f) -> X[1]
};

/// Cone(f)_n = X_{n-1} (+) Y_n with differential [[-d_X, 0], [f, d_Y]].
inline Cone mapping_cone(const ChainMap& f) {
  const ChainComplex& x = f.source();
  const ChainComplex& y = f.target();
  int lo = 0, hi = -1;
  if (!x.empty()) {
    lo = x.lo() + 1;
    hi = x.hi() + 1;
  }
  if (!y.empty()) {
    lo = hi < lo ? y.lo() : std::min(lo, y.lo());
    hi = std::max(hi, y.hi());
  }
  std::vector<std::size_t> ranks;
  std::vector<IntMatrix> diffs;
  for (int n = lo; n <= hi; ++n) {
    ranks.push_back(x.rank(n - 1) + y.rank(n));
    if (n == lo) continue;
    const std::size_t xs = x.rank(n - 1), ys = y.rank(n), xt = x.rank(n - 2), yt = y.rank(n - 1);
    IntMatrix d(xt + yt, xs + ys);
    IntMatrix dx = x.d(n - 1), fx = f.component(n - 1), dy = y.d(n);
    for (std::size_t i = 0; i < xt; ++i)
      for (std::size_t j = 0; j < xs; ++j) d(i, j) = -dx(i, j);
    for (std::size_t i = 0; i < yt; ++i) {
      for (std::size_t j = 0; j < xs; ++j) d(xt + i, j) = fx(i, j);
      for (std::size_t j = 0; j < ys; ++j) d(xt + i, xs + j) = dy(i, j);
    }
    diffs.push_back(std::move(d));
  }
  Cone out;
  out.complex = make_complex(lo, std::move(ranks), std::move(diffs));
  std::map<int, IntMatrix> inc, proj;
  for (int n = lo; n <= hi; ++n) {
    const std::size_t xs = x.rank(n - 1), ys = y.rank(n);
    IntMatrix i_n(xs + ys, ys), p_n(xs, xs + ys);
    for (std::size_t j = 0; j < ys; ++j) i_n(xs + j, j) = 1;
    for (std::size_t j = 0; j < xs; ++j) p_n(j, j) = 1;
    inc.emplace(n, std::move(i_n));
    proj.emplace(n, std::move(p_n));
  }
  out.inclusion = make_chain_map(y, out.complex, std::move(inc));
  out.projection = make_chain_map(out.complex, twist(x, 1), std::move(proj));
  return out;
}

// ---------------------------------------------------------------------------
// Induced maps on homology

namespace detail {

// Coordinates y (columns) of the lattice {y : a*y in span(b)}.
inline IntMatrix preimage_coordinates(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix k = kernel_basis(hstack({a, b}, a.rows()));
  return k.row_range(0, a.cols());
}

}  // namespace detail

/// True iff H_n(source) -> H_n(target) induced by the chain map is injective.
inline bool induced_map_injective(const ChainMap& f, int n) {
  const ChainComplex& c = f.source();
  const ChainComplex& d = f.target();
  IntMatrix cycles = kernel_basis(c.d(n));
  if (cycles.cols() == 0) return true;
  IntMatrix image = f.component(n) * cycles;
  IntMatrix coords = detail::preimage_coordinates(image, d.d(n + 1));
  return lattice_contains(c.d(n + 1), cycles * coords);
}

/// True iff the induced map H_n(source) -> H_n(target) is zero.
inline bool induced_map_zero(const ChainMap& f, int n) {
  IntMatrix cycles = kernel_basis(f.source().d(n));
  if (cycles.cols() == 0) return true;
  return lattice_contains(f.target().d(n + 1), f.component(n) * cycles);
}

// ---------------------------------------------------------------------------
// Complexes of presented groups Z^{r_n} / span(R_n)

struct PresentedComplex {
  ChainComplex cover;                  // differentials on the free covers
  std::map<int, IntMatrix> relations;  // R_n, r_n x (number of relations); absent = none
  IntMatrix relation(int n) const {
    auto it = relations.find(n);
    if (it == relations.end()) return IntMatrix(cover.rank(n), 0);
    return it->second;
  }
};

/// Checks that every differential maps relations into relations and d^2 lands in relations.
inline PresentedComplex make_presented(ChainComplex cover, std::map<int, IntMatrix> relations) {
  PresentedComplex p{std::move(cover), std::move(relations)};
  for (const auto& [n, r] : p.relations)
    if (r.rows() != p.cover.rank(n)) throw Error(ErrorKind::ShapeMismatch, "relations in degree " + std::to_string(n));
  if (p.cover.empty()) return p;
  for (int n = p.cover.lo() + 1; n <= p.cover.hi(); ++n) {
    IntMatrix r = p.relation(n);
    if (r.cols() && !lattice_contains(p.relation(n - 1), p.cover.d(n) * r))
      throw Error(ErrorKind::NotAComplex, "differential does not preserve relations at degree " + std::to_string(n));
  }
  return p;
}

/// H_n = {x : d x in R_{n-1}} / (R_n + im d_{n+1}).
inline HomologyTable homology(const PresentedComplex& p, std::vector<int> degrees = {}) {
  HomologyTable out;
  if (degrees.empty())
    for (int n = p.cover.lo(); n <= p.cover.hi(); ++n) degrees.push_back(n);
  for (int n : degrees) {
    const std::size_t dim = p.cover.rank(n);
    IntMatrix gens = detail::preimage_coordinates(p.cover.d(n), p.relation(n - 1));
    IntMatrix basis = lattice_basis(gens);
    IntMatrix bounds = hstack({p.relation(n), p.cover.d(n + 1)}, dim);
    auto coords = solve(basis, bounds);
    if (!coords) throw Error(ErrorKind::StructureViolation, "boundaries are not cycles at degree " + std::to_string(n));
    out[n] = cokernel(*coords).invariants;
  }
  return out;
}

/// Realizes a presented complex with torsion-free terms as a free complex.
inline ChainComplex free_realization(const PresentedComplex& p) {
  if (p.cover.empty()) return p.cover;
  std::map<int, Cokernel> q;
  for (int n = p.cover.lo(); n <= p.cover.hi(); ++n) {
    q[n] = cokernel(p.relation(n));
    if (!q[n].invariants.torsion.empty())
      throw Error(ErrorKind::QuotientNotFree, "quotient term in degree " + std::to_string(n) + " is " +
                                                  q[n].invariants.str());
  }
  std::vector<std::size_t> ranks;
  std::vector<IntMatrix> diffs;
  for (int n = p.cover.lo(); n <= p.cover.hi(); ++n) {
    ranks.push_back(q[n].invariants.free_rank);
    if (n > p.cover.lo()) diffs.push_back(q[n - 1].projection * p.cover.d(n) * q[n].section);
  }
  return make_complex(p.cover.lo(), std::move(ranks), std::move(diffs));
}

// ---------------------------------------------------------------------------
// Double complexes

/// Finite rectangle of a double complex: bidegrees m in [m_lo, m_hi], n in [n_lo, n_hi].
/// horizontal(m, n): (m, n) -> (m-1, n); vertical(m, n): (m, n) -> (m, n-1).
class DoubleComplex {
 public:
  DoubleComplex() = default;
  DoubleComplex(int m_lo, int m_hi, int n_lo, int n_hi)
      : m_lo_(m_lo), m_hi_(m_hi), n_lo_(n_lo), n_hi_(n_hi),
        ranks_(cells(), 0), horizontal_(cells()), vertical_(cells()) {}

  int m_lo() const { return m_lo_; }
  int m_hi() const { return m_hi_; }
  int n_lo() const { return n_lo_; }
  int n_hi() const { return n_hi_; }
  bool contains(int m, int n) const { return m >= m_lo_ && m <= m_hi_ && n >= n_lo_ && n <= n_hi_; }

  std::size_t rank(int m, int n) const { return contains(m, n) ? ranks_[index(m, n)] : 0; }
  void set_rank(int m, int n, std::size_t r) { ranks_.at(index(m, n)) = r; }

  IntMatrix horizontal(int m, int n) const {
    if (!contains(m, n) || !contains(m - 1, n)) return IntMatrix(rank(m - 1, n), rank(m, n));
    const IntMatrix& h = horizontal_[index(m, n)];
    return h.rows() == rank(m - 1, n) && h.cols() == rank(m, n) ? h : IntMatrix(rank(m - 1, n), rank(m, n));
  }
  IntMatrix vertical(int m, int n) const {
    if (!contains(m, n) || !contains(m, n - 1)) return IntMatrix(rank(m, n - 1), rank(m, n));
    const IntMatrix& v = vertical_[index(m, n)];
    return v.rows() == rank(m, n - 1) && v.cols() == rank(m, n) ? v : IntMatrix(rank(m, n - 1), rank(m, n));
  }
  void set_horizontal(int m, int n, IntMatrix h) { horizontal_.at(index(m, n)) = std::move(h); }
  void set_vertical(int m, int n, IntMatrix v) { vertical_.at(index(m, n)) = std::move(v); }

  /// Throws NotAComplex unless d^2 = 0, delta^2 = 0 and d delta + delta d = 0 on the rectangle.
  void validate() const {
    for (int m = m_lo_; m <= m_hi_; ++m)
      for (int n = n_lo_; n <= n_hi_; ++n) {
        auto where = " at bidegree (" + std::to_string(m) + "," + std::to_string(n) + ")";
        if (!(horizontal(m - 1, n) * horizontal(m, n)).is_zero())
          throw Error(ErrorKind::NotAComplex, "horizontal d^2 != 0" + where);
        if (!(vertical(m, n - 1) * vertical(m, n)).is_zero())
          throw Error(ErrorKind::NotAComplex, "vertical d^2 != 0" + where);
        if (!(horizontal(m, n - 1) * vertical(m, n) + vertical(m - 1, n) * horizontal(m, n)).is_zero())
          throw Error(ErrorKind::NotAComplex, "differentials do not anticommute" + where);
      }
  }

  /// Offset of bidegree (m, t - m) inside the total-degree-t term.
  std::size_t total_offset(int t, int m) const {
    std::size_t off = 0;
    for (int k = m_lo_; k < m; ++k) off += rank(k, t - k);
    return off;
  }

  /// Total complex with differential horizontal + vertical, in total degrees [m_lo+n_lo, m_hi+n_hi].
  ChainComplex total() const {
    const int lo = m_lo_ + n_lo_, hi = m_hi_ + n_hi_;
    std::vector<std::size_t> ranks;
    std::vector<IntMatrix> diffs;
    for (int t = lo; t <= hi; ++t) {
      ranks.push_back(total_offset(t, m_hi_ + 1));
      if (t == lo) continue;
      IntMatrix d(total_offset(t - 1, m_hi_ + 1), ranks.back());
      for (int m = m_lo_; m <= m_hi_; ++m) {
        const int n = t - m;
        if (!contains(m, n) || rank(m, n) == 0) continue;
        const std::size_t col0 = total_offset(t, m);
        auto place = [&](const IntMatrix& blk, std::size_t row0) {
          for (std::size_t i = 0; i < blk.rows(); ++i)
            for (std::size_t j = 0; j < blk.cols(); ++j)
              if (blk(i, j) != 0) d(row0 + i, col0 + j) = blk(i, j);
        };
        if (contains(m - 1, n)) place(horizontal(m, n), total_offset(t - 1, m - 1));
        if (contains(m, n - 1)) place(vertical(m, n), total_offset(t - 1, m));
      }
      diffs.push_back(std::move(d));
    }
    return make_complex(lo, std::move(ranks), std::move(diffs));
  }

 private:
  std::size_t cells() const {
    return static_cast<std::size_t>(std::max(0, m_hi_ - m_lo_ + 1) * std::max(0, n_hi_ - n_lo_ + 1));
  }
  std::size_t index(int m, int n) const {
    return static_cast<std::size_t>((m - m_lo_) * (n_hi_ - n_lo_ + 1) + (n - n_lo_));
  }

  int m_lo_ = 0, m_hi_ = -1, n_lo_ = 0, n_hi_ = -1;
  std::vector<std::size_t> ranks_;
  std::vector<IntMatrix> horizontal_, vertical_;
};

// ---------------------------------------------------------------------------
// Windows over the periodic direction

struct Window {
  int lo = 0;
  int hi = -1;
  int length() const { return hi - lo + 1; }
};

/// Window of the given length placed around zero: lo = -(length/2).
inline Window centered_window(int length) {
  Window w;
  w.lo = -(length / 2);
  w.hi = w.lo + length - 1;
  return w;
}

inline int minimum_window_length(std::size_t koszul_length) { return 2 * static_cast<int>(koszul_length) + 4; }
inline Window default_window(std::size_t koszul_length) {
  return centered_window(minimum_window_length(koszul_length) + 2);
}

inline void require_window(const Window& w, std::size_t koszul_length) {
  if (w.length() < minimum_window_length(koszul_length))
    throw Error(ErrorKind::WindowTooSmall, "window [" + std::to_string(w.lo) + "," + std::to_string(w.hi) +
                                               "] has length " + std::to_string(w.length()) + ", need at least " +
                                               std::to_string(minimum_window_length(koszul_length)));
}

/// Total degrees whose homology is unaffected by cutting the periodic direction to the window.
inline std::vector<int> interior_degrees(const Window& w, std::size_t koszul_length) {
  require_window(w, koszul_length);
  const int r = static_cast<int>(koszul_length);
  std::vector<int> out;
  for (int t = w.lo + r + 1; t <= w.hi - r - 1; ++t) out.push_back(t);
  return out;
}

// ---------------------------------------------------------------------------
// Modules with commuting operators

struct ActionModule {
  std::size_t rank = 0;
  std::map<std::string, IntMatrix> operators;
  std::map<std::string, Integer> nu;

  const IntMatrix& op(const std::string& name) const {
    auto it = operators.find(name);
    if (it == operators.end()) throw Error(ErrorKind::InvalidArgument, "no operator named " + name);
    return it->second;
  }
  bool has(const std::string& name) const { return operators.count(name) != 0; }
};

inline constexpr const char* kGamma0 = "gamma0";

/// Multiplicative order of a square matrix, or nullopt if it exceeds `bound`.
inline std::optional<int> matrix_order(const IntMatrix& g, int bound) {
  const IntMatrix id = IntMatrix::identity(g.rows());
  IntMatrix p = g;
  for (int k = 1; k <= bound; ++k) {
    if (p == id) return k;
    p = p * g;
  }
  return std::nullopt;
}

/// Validates shapes, pairwise commutation and (when present) finite order of gamma0.
inline ActionModule make_action_module(std::size_t rank, std::map<std::string, IntMatrix> operators,
                                       std::map<std::string, Integer> nu = {}, int order_bound = 64) {
  ActionModule m{rank, std::move(operators), std::move(nu)};
  for (const auto& [name, op] : m.operators)
    if (op.rows() != rank || op.cols() != rank)
      throw Error(ErrorKind::ShapeMismatch, "operator " + name + " is not " + std::to_string(rank) + "x" +
                                                std::to_string(rank));
  for (auto a = m.operators.begin(); a != m.operators.end(); ++a)
    for (auto b = std::next(a); b != m.operators.end(); ++b)
      if (!(a->second * b->second == b->second * a->second))
        throw Error(ErrorKind::NonCommutingOperators, a->first + " and " + b->first);
  if (m.has(kGamma0) && !matrix_order(m.op(kGamma0), order_bound))
    throw Error(ErrorKind::OrderViolation, "gamma0 has no finite order up to " + std::to_string(order_bound));
  return m;
}

/// N = 1 + g + ... + g^{m-1}.
inline IntMatrix norm_operator(const IntMatrix& g, int m) {
  IntMatrix acc(g.rows(), g.cols());
  IntMatrix p = IntMatrix::identity(g.rows());
  for (int i = 0; i < m; ++i) {
    acc = acc + p;
    p = p * g;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// The KT double complex

enum class Companion { K, Kbar, T, Tbar, KTtot, KTplus, Window };

inline const char* to_string(Companion c) {
  switch (c) {
    case Companion::K: return "K";
    case Companion::Kbar: return "Kbar";
    case Companion::T: return "T";
    case Companion::Tbar: return "Tbar";
    case Companion::KTtot: return "KTtot";
    case Companion::KTplus: return "KTplus";
    case Companion::Window: return "window";
  }
  return "?";
}

/// KT(M, {f_s}, [f+; f-]) over a free module M of finite rank. Symbols M (x) [I, k];
/// subsets I of the ordered index set are listed by size, then lexicographically.
class KtComplex {
 public:
  KtComplex(std::size_t rank, std::vector<IntMatrix> fs, IntMatrix plus, IntMatrix minus)
      : rank_(rank), fs_(std::move(fs)), plus_(std::move(plus)), minus_(std::move(minus)) {
    auto check = [&](const IntMatrix& a, const char* what) {
      if (a.rows() != rank_ || a.cols() != rank_) throw Error(ErrorKind::ShapeMismatch, what);
    };
    check(plus_, "f+");
    check(minus_, "f-");
    for (const auto& f : fs_) check(f, "f_s");
    if (!(plus_ * minus_).is_zero()) throw Error(ErrorKind::PlusMinusNotZero, "f+ f- != 0");
    std::vector<const IntMatrix*> all{&plus_, &minus_};
    for (const auto& f : fs_) all.push_back(&f);
    for (std::size_t a = 0; a < all.size(); ++a)
      for (std::size_t b = a + 1; b < all.size(); ++b)
        if (!(*all[a] * *all[b] == *all[b] * *all[a]))
          throw Error(ErrorKind::NonCommutingOperators, "KT input operators must commute");
    const std::size_t r = fs_.size();
    subsets_.assign(r + 1, {});
    std::vector<std::size_t> cur;
    enumerate(0, r, cur);
    for (auto& v : subsets_) std::sort(v.begin(), v.end());
    for (std::size_t m = 0; m <= r; ++m)
      for (std::size_t i = 0; i < subsets_[m].size(); ++i) position_[mask(subsets_[m][i])] = i;
  }

  std::size_t module_rank() const { return rank_; }
  std::size_t koszul_length() const { return fs_.size(); }
  const std::vector<std::vector<std::size_t>>& subsets(std::size_t m) const { return subsets_.at(m); }

  /// rank(M) * C(r, m); independent of k.
  std::size_t rank(int m) const {
    if (m < 0 || m > static_cast<int>(fs_.size())) return 0;
    return rank_ * subsets_[static_cast<std::size_t>(m)].size();
  }

  /// d : KT_{m,k} -> KT_{m-1,k} (independent of k).
  IntMatrix koszul(int m) const {
    IntMatrix d(rank(m - 1), rank(m));
    if (m <= 0 || m > static_cast<int>(fs_.size())) return d;
    const auto& src = subsets_[static_cast<std::size_t>(m)];
    for (std::size_t s = 0; s < src.size(); ++s) {
      const auto& set = src[s];
      for (std::size_t pos = 0; pos < set.size(); ++pos) {
        std::vector<std::size_t> smaller = set;
        smaller.erase(smaller.begin() + static_cast<long>(pos));
        const std::size_t t = position_.at(mask(smaller));
        const IntMatrix& f = fs_[set[pos]];
        const int sign = (pos % 2 == 0) ? 1 : -1;  // pos = #{j in I : j < i}
        for (std::size_t a = 0; a < rank_; ++a)
          for (std::size_t b = 0; b < rank_; ++b)
            if (f(a, b) != 0) d(t * rank_ + a, s * rank_ + b) = sign * f(a, b);
      }
    }
    return d;
  }

  /// delta : KT_{m,k} -> KT_{m,k-1} = (-1)^m (f+ if k even, f- if k odd).
  IntMatrix tate(int m, int k) const {
    IntMatrix d(rank(m), rank(m));
    if (rank(m) == 0) return d;
    const IntMatrix& f = (k % 2 == 0) ? plus_ : minus_;
    const int sign = (m % 2 == 0) ? 1 : -1;
    const std::size_t blocks = subsets_[static_cast<std::size_t>(m)].size();
    for (std::size_t s = 0; s < blocks; ++s)
      for (std::size_t a = 0; a < rank_; ++a)
        for (std::size_t b = 0; b < rank_; ++b)
          if (f(a, b) != 0) d(s * rank_ + a, s * rank_ + b) = sign * f(a, b);
    return d;
  }

  /// Rectangle m in [0, r], k in [w.lo, w.hi].
  DoubleComplex rectangle(const Window& w) const {
    const int r = static_cast<int>(fs_.size());
    DoubleComplex dc(0, r, w.lo, w.hi);
    for (int m = 0; m <= r; ++m) {
      IntMatrix h = koszul(m);
      for (int k = w.lo; k <= w.hi; ++k) {
        dc.set_rank(m, k, rank(m));
        if (m > 0) dc.set_horizontal(m, k, h);
        if (k > w.lo) dc.set_vertical(m, k, tate(m, k));
      }
    }
    dc.validate();
    return dc;
  }

  /// Companions on free terms. Kbar and Tbar are realized freely when their quotient
  /// module is torsion-free (QuotientNotFree otherwise; see presented_companion).
  ChainComplex companion(Companion which, std::optional<Window> window = std::nullopt) const {
    switch (which) {
      case Companion::K: return koszul_complex();
      case Companion::Kbar:
      case Companion::Tbar: return free_realization(presented_companion(which, window));
      case Companion::T: return tate_complex(need(window));
      case Companion::KTtot: {
        Window w = need(window);
        require_window(w, fs_.size());
        return rectangle(w).total();
      }
      case Companion::KTplus: {
        Window w = need(window);
        require_window(w, fs_.size());
        w.lo = std::max(w.lo, 0);
        return rectangle(w).total();
      }
      case Companion::Window: {
        Window w = need(window);
        auto degrees = interior_degrees(w, fs_.size());
        return restrict_degrees(rectangle(w).total(), degrees.front() - 1, degrees.back() + 1);
      }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown companion");
  }

  /// Every companion as a complex of presented groups (relations empty for the free ones).
  PresentedComplex presented_companion(Companion which, std::optional<Window> window = std::nullopt) const {
    if (which == Companion::Kbar) {
      ChainComplex k = companion(Companion::K);
      std::map<int, IntMatrix> rel;
      for (int m = 0; m <= static_cast<int>(fs_.size()); ++m) rel[m] = block_diagonal(minus_, m);
      return make_presented(std::move(k), std::move(rel));
    }
    if (which == Companion::Tbar) {
      ChainComplex t = tate_complex(need(window));
      IntMatrix sum = hstack(std::vector<IntMatrix>(fs_.begin(), fs_.end()), rank_);
      std::map<int, IntMatrix> rel;
      for (int k = t.lo(); k <= t.hi(); ++k) rel[k] = sum;
      return make_presented(std::move(t), std::move(rel));
    }
    return make_presented(companion(which, window), {});
  }

  /// Homology of a companion in the degrees where the window does not interfere.
  HomologyTable interior_homology(Companion which, const Window& w) const {
    auto degrees = interior_degrees(w, fs_.size());
    if (which == Companion::Kbar || which == Companion::Tbar)
      return homology(presented_companion(which, w), degrees);
    return homology(companion(which, w), degrees);
  }

 private:
  static Window need(const std::optional<Window>& w) {
    if (!w) throw Error(ErrorKind::InvalidArgument, "companion requires a window");
    return *w;
  }
  static unsigned mask(const std::vector<std::size_t>& s) {
    unsigned b = 0;
    for (auto i : s) b |= 1u << i;
    return b;
  }
  void enumerate(std::size_t start, std::size_t r, std::vector<std::size_t>& cur) {
    subsets_[cur.size()].push_back(cur);
    for (std::size_t i = start; i < r; ++i) {
      cur.push_back(i);
      enumerate(i + 1, r, cur);
      cur.pop_back();
    }
  }
  IntMatrix block_diagonal(const IntMatrix& a, int m) const {
    const std::size_t blocks = subsets_[static_cast<std::size_t>(m)].size();
    IntMatrix out(rank_ * blocks, rank_ * blocks);
    for (std::size_t s = 0; s < blocks; ++s)
      for (std::size_t i = 0; i < rank_; ++i)
        for (std::size_t j = 0; j < rank_; ++j) out(s * rank_ + i, s * rank_ + j) = a(i, j);
    return out;
  }
  ChainComplex koszul_complex() const {
    std::vector<std::size_t> ranks;
    std::vector<IntMatrix> diffs;
    for (int m = 0; m <= static_cast<int>(fs_.size()); ++m) {
      ranks.push_back(rank(m));
      if (m > 0) diffs.push_back(koszul(m));
    }
    return make_complex(0, std::move(ranks), std::move(diffs));
  }
  ChainComplex tate_complex(const Window& w) const {
    std::vector<std::size_t> ranks;
    std::vector<IntMatrix> diffs;
    for (int k = w.lo; k <= w.hi; ++k) {
      ranks.push_back(rank_);
      if (k > w.lo) diffs.push_back(tate(0, k));
    }
    return make_complex(w.lo, std::move(ranks), std::move(diffs));
  }

  std::size_t rank_;
  std::vector<IntMatrix> fs_;
  IntMatrix plus_, minus_;
  std::vector<std::vector<std::vector<std::size_t>>> subsets_;
  std::map<unsigned, std::size_t> position_;
};

/// KT over a named action module: f_s, f+ and f- are looked up by operator name.
inline KtComplex build_kt(const ActionModule& m, const std::vector<std::string>& ideal_names,
                          const std::string& plus_name, const std::string& minus_name) {
  std::vector<IntMatrix> fs;
  for (const auto& n : ideal_names) fs.push_back(m.op(n));
  return KtComplex(m.rank, std::move(fs), m.op(plus_name), m.op(minus_name));
}

/// KT over the rank-one module Z with scalar operators.
inline KtComplex build_kt_scalar(const std::vector<Integer>& fs, const Integer& plus, const Integer& minus) {
  std::vector<IntMatrix> ms;
  for (const auto& f : fs) ms.push_back(IntMatrix::scalar(1, f));
  return KtComplex(1, std::move(ms), IntMatrix::scalar(1, plus), IntMatrix::scalar(1, minus));
}

}  // namespace uod
