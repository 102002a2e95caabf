#pragma once

// Exact linear algebra over Z: dense integer matrices, Smith normal form,
// kernels, cokernels, lattice membership and integral solving.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "uod/error.hpp"

namespace uod {

using Integer = mpz_class;

inline int cmp_abs(const Integer& a, const Integer& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }
inline bool is_unit(const Integer& a) { return mpz_cmpabs_ui(a.get_mpz_t(), 1) == 0; }

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw Error(ErrorKind::ShapeMismatch, "ragged initializer");
      for (long v : row) data_.emplace_back(v);
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static IntMatrix zero(std::size_t rows, std::size_t cols) { return IntMatrix(rows, cols); }
  static IntMatrix scalar(std::size_t n, const Integer& s) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = s;
    return m;
  }
  static IntMatrix column(const std::vector<Integer>& v) {
    IntMatrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Integer& v) { return v == 0; });
  }
  std::size_t nonzeros() const {
    return static_cast<std::size_t>(
        std::count_if(data_.begin(), data_.end(), [](const Integer& v) { return v != 0; }));
  }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  IntMatrix col_range(std::size_t begin, std::size_t end) const {
    IntMatrix out(rows_, end - begin);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = begin; j < end; ++j) out(i, j - begin) = (*this)(i, j);
    return out;
  }
  IntMatrix row_range(std::size_t begin, std::size_t end) const {
    IntMatrix out(end - begin, cols_);
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i - begin, j) = (*this)(i, j);
    return out;
  }
  IntMatrix select_cols(const std::vector<std::size_t>& idx) const {
    IntMatrix out(rows_, idx.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = (*this)(i, idx[j]);
    return out;
  }
  IntMatrix select_rows(const std::vector<std::size_t>& idx) const {
    IntMatrix out(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(idx[i], j);
    return out;
  }

  std::string str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
      os << (i ? ", [" : "[");
      for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << (*this)(i, j);
      os << ']';
    }
    os << ']';
    return os.str();
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

inline IntMatrix operator+(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorKind::ShapeMismatch, "add");
  IntMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

inline IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorKind::ShapeMismatch, "sub");
  IntMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

inline IntMatrix operator-(const IntMatrix& a) {
  IntMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = -a(i, j);
  return c;
}

inline IntMatrix operator*(const Integer& s, const IntMatrix& a) {
  IntMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

// Skips zero entries on both sides; the matrices met here are very sparse.
inline IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::ShapeMismatch, "mul");
  std::vector<std::vector<std::size_t>> b_nz(b.rows());
  for (std::size_t k = 0; k < b.rows(); ++k)
    for (std::size_t j = 0; j < b.cols(); ++j)
      if (b(k, j) != 0) b_nz[k].push_back(j);
  IntMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Integer& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j : b_nz[k]) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline IntMatrix hstack(const std::vector<IntMatrix>& blocks, std::size_t rows) {
  std::size_t cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows && !(b.cols() == 0)) throw Error(ErrorKind::ShapeMismatch, "hstack");
    cols += b.cols();
  }
  IntMatrix out(rows, cols);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, off + j) = b(i, j);
    off += b.cols();
  }
  return out;
}

inline IntMatrix vstack(const std::vector<IntMatrix>& blocks, std::size_t cols) {
  std::size_t rows = 0;
  for (const auto& b : blocks) {
    if (b.cols() != cols && !(b.rows() == 0)) throw Error(ErrorKind::ShapeMismatch, "vstack");
    rows += b.rows();
  }
  IntMatrix out(rows, cols);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) out(off + i, j) = b(i, j);
    off += b.rows();
  }
  return out;
}

/// Fraction-free (Bareiss) determinant.
inline Integer determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::ShapeMismatch, "determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t r = k + 1;
      while (r < n && a(r, k) == 0) ++r;
      if (r == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(r, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer t = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        a(i, j) = t;
      }
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

// ---------------------------------------------------------------------------
// Abelian group invariants

struct AbGroupInvariants {
  std::size_t free_rank = 0;
  std::vector<Integer> torsion;  // each >= 2, each divides the next

  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  bool is_finite() const { return free_rank == 0; }

  /// Order of the torsion part.
  Integer torsion_order() const {
    Integer o = 1;
    for (const auto& t : torsion) o *= t;
    return o;
  }

  friend bool operator==(const AbGroupInvariants& a, const AbGroupInvariants& b) {
    return a.free_rank == b.free_rank && a.torsion == b.torsion;
  }

  std::string str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    if (free_rank) {
      os << "Z";
      if (free_rank > 1) os << "^" << free_rank;
      first = false;
    }
    // group equal factors: (Z/2)^3
    for (std::size_t i = 0; i < torsion.size();) {
      std::size_t j = i;
      while (j < torsion.size() && torsion[j] == torsion[i]) ++j;
      os << (first ? "" : " + ") << "(Z/" << torsion[i] << ")";
      if (j - i > 1) os << "^" << (j - i);
      first = false;
      i = j;
    }
    return os.str();
  }

  /// Free (Z/m)-module of the given rank; the zero group when m == 1 or rank == 0.
  static AbGroupInvariants free_cyclic(const Integer& m, std::size_t rank) {
    AbGroupInvariants g;
    if (m == 0) {
      g.free_rank = rank;
    } else if (m > 1) {
      g.torsion.assign(rank, m);
    }
    return g;
  }
};

/// Keeps invariant factors > 1 and checks the divisibility chain.
inline std::vector<Integer> nontrivial_torsion(const std::vector<Integer>& invariants) {
  std::vector<Integer> t;
  for (const auto& d : invariants)
    if (d > 1) t.push_back(d);
  return t;
}

inline std::size_t rank_from_invariants(const std::vector<Integer>& invariants) {
  return static_cast<std::size_t>(
      std::count_if(invariants.begin(), invariants.end(), [](const Integer& d) { return d != 0; }));
}

// ---------------------------------------------------------------------------
// Smith normal form

struct SnfResult {
  std::vector<Integer> invariants;  // length min(rows, cols); zeros trail
  IntMatrix left;                   // rows x rows, unimodular
  IntMatrix right;                  // cols x cols, unimodular
  std::size_t rank() const { return rank_from_invariants(invariants); }
};

namespace detail {

// Dense Smith reduction. With Transforms = false the unimodular matrices are not tracked.
template <bool Transforms>
class SmithReducer {
 public:
  explicit SmithReducer(IntMatrix m) : d_(std::move(m)) {
    if constexpr (Transforms) {
      left_ = IntMatrix::identity(d_.rows());
      right_ = IntMatrix::identity(d_.cols());
    }
  }

  std::vector<Integer> run() {
    const std::size_t r = d_.rows(), c = d_.cols();
    const std::size_t k = std::min(r, c);
    std::vector<Integer> inv;
    inv.reserve(k);
    std::size_t t = 0;
    for (; t < k; ++t) {
      if (!select_pivot(t, t, t)) break;
      for (;;) {
        bool dirty = clear_column(t);
        dirty = clear_row(t) || dirty;
        if (dirty) {
          select_pivot_cross(t);
          continue;
        }
        // The pivot must divide every remaining entry.
        std::optional<std::size_t> bad_row;
        for (std::size_t i = t + 1; i < r && !bad_row; ++i)
          for (std::size_t j = t + 1; j < c; ++j)
            if (d_(i, j) != 0 && !mpz_divisible_p(d_(i, j).get_mpz_t(), d_(t, t).get_mpz_t())) {
              bad_row = i;
              break;
            }
        if (!bad_row) break;
        add_row(t, *bad_row, Integer(1));
      }
      if (d_(t, t) < 0) negate_row(t);
      inv.push_back(d_(t, t));
    }
    for (; t < k; ++t) inv.emplace_back(0);
    return inv;
  }

  IntMatrix& left() { return left_; }
  IntMatrix& right() { return right_; }

 private:
  // Smallest nonzero |entry| in the lower-right block starting at (t0,t0), ties broken by sparsity.
  bool select_pivot(std::size_t t, std::size_t r0, std::size_t c0) {
    const std::size_t r = d_.rows(), c = d_.cols();
    std::optional<std::pair<std::size_t, std::size_t>> best;
    Integer best_abs;
    for (std::size_t i = r0; i < r; ++i)
      for (std::size_t j = c0; j < c; ++j) {
        const Integer& v = d_(i, j);
        if (v == 0) continue;
        if (!best || cmp_abs(v, best_abs) < 0) {
          best = {i, j};
          best_abs = abs(v);
          if (best_abs == 1) goto found;
        }
      }
    if (!best) return false;
  found:
    swap_rows(t, best->first);
    swap_cols(t, best->second);
    return true;
  }

  void select_pivot_cross(std::size_t t) {
    const std::size_t r = d_.rows(), c = d_.cols();
    std::size_t bi = t, bj = t;
    Integer best = abs(d_(t, t));
    for (std::size_t i = t + 1; i < r; ++i)
      if (d_(i, t) != 0 && (best == 0 || cmp_abs(d_(i, t), best) < 0)) {
        best = abs(d_(i, t));
        bi = i;
        bj = t;
      }
    for (std::size_t j = t + 1; j < c; ++j)
      if (d_(t, j) != 0 && (best == 0 || cmp_abs(d_(t, j), best) < 0)) {
        best = abs(d_(t, j));
        bi = t;
        bj = j;
      }
    swap_rows(t, bi);
    swap_cols(t, bj);
  }

  // Returns true if some remainder stayed nonzero.
  bool clear_column(std::size_t t) {
    bool dirty = false;
    Integer q;
    for (std::size_t i = t + 1; i < d_.rows(); ++i) {
      if (d_(i, t) == 0) continue;
      mpz_tdiv_q(q.get_mpz_t(), d_(i, t).get_mpz_t(), d_(t, t).get_mpz_t());
      if (q != 0) add_row(i, t, -q);
      if (d_(i, t) != 0) dirty = true;
    }
    return dirty;
  }

  bool clear_row(std::size_t t) {
    bool dirty = false;
    Integer q;
    for (std::size_t j = t + 1; j < d_.cols(); ++j) {
      if (d_(t, j) == 0) continue;
      mpz_tdiv_q(q.get_mpz_t(), d_(t, j).get_mpz_t(), d_(t, t).get_mpz_t());
      if (q != 0) add_col(j, t, -q);
      if (d_(t, j) != 0) dirty = true;
    }
    return dirty;
  }

  // row_dst += s * row_src
  void add_row(std::size_t dst, std::size_t src, const Integer& s) {
    for (std::size_t j = 0; j < d_.cols(); ++j)
      if (d_(src, j) != 0) d_(dst, j) += s * d_(src, j);
    if constexpr (Transforms)
      for (std::size_t j = 0; j < left_.cols(); ++j)
        if (left_(src, j) != 0) left_(dst, j) += s * left_(src, j);
  }

  // col_dst += s * col_src
  void add_col(std::size_t dst, std::size_t src, const Integer& s) {
    for (std::size_t i = 0; i < d_.rows(); ++i)
      if (d_(i, src) != 0) d_(i, dst) += s * d_(i, src);
    if constexpr (Transforms)
      for (std::size_t i = 0; i < right_.rows(); ++i)
        if (right_(i, src) != 0) right_(i, dst) += s * right_(i, src);
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < d_.cols(); ++j) std::swap(d_(a, j), d_(b, j));
    if constexpr (Transforms)
      for (std::size_t j = 0; j < left_.cols(); ++j) std::swap(left_(a, j), left_(b, j));
  }

  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < d_.rows(); ++i) std::swap(d_(i, a), d_(i, b));
    if constexpr (Transforms)
      for (std::size_t i = 0; i < right_.rows(); ++i) std::swap(right_(i, a), right_(i, b));
  }

  void negate_row(std::size_t t) {
    for (std::size_t j = 0; j < d_.cols(); ++j) d_(t, j) = -d_(t, j);
    if constexpr (Transforms)
      for (std::size_t j = 0; j < left_.cols(); ++j) left_(t, j) = -left_(t, j);
  }

  IntMatrix d_;
  IntMatrix left_, right_;
};

// Sparse elimination on unit pivots (Markowitz order), then dense reduction of the remainder.
inline std::vector<Integer> sparse_invariants(const IntMatrix& m) {
  using Entry = std::pair<std::uint32_t, Integer>;
  using Row = std::vector<Entry>;
  const std::size_t nr = m.rows(), nc = m.cols();
  const std::size_t k = std::min(nr, nc);
  std::vector<Row> rows(nr);
  std::vector<std::size_t> col_count(nc, 0);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j)
      if (m(i, j) != 0) {
        rows[i].emplace_back(static_cast<std::uint32_t>(j), m(i, j));
        ++col_count[j];
      }
  std::vector<char> row_alive(nr, 1), col_alive(nc, 1);
  std::size_t ones = 0;

  auto find_in = [](const Row& row, std::uint32_t col) -> const Integer* {
    auto it = std::lower_bound(row.begin(), row.end(), col,
                               [](const Entry& e, std::uint32_t c) { return e.first < c; });
    return (it != row.end() && it->first == col) ? &it->second : nullptr;
  };

  for (;;) {
    std::size_t best_i = nr, best_j = 0, best_cost = SIZE_MAX;
    for (std::size_t i = 0; i < nr && best_cost > 0; ++i) {
      if (!row_alive[i]) continue;
      const std::size_t rn = rows[i].size();
      for (const auto& [j, v] : rows[i]) {
        if (!is_unit(v)) continue;
        const std::size_t cost = (rn - 1) * (col_count[j] - 1);
        if (cost < best_cost) {
          best_cost = cost;
          best_i = i;
          best_j = j;
          if (cost == 0) break;
        }
      }
    }
    if (best_i == nr) break;
    const Row pivot = rows[best_i];
    const Integer pv = *find_in(pivot, static_cast<std::uint32_t>(best_j));
    for (std::size_t i = 0; i < nr; ++i) {
      if (!row_alive[i] || i == best_i) continue;
      const Integer* e = find_in(rows[i], static_cast<std::uint32_t>(best_j));
      if (!e) continue;
      const Integer factor = (*e) * pv;  // pv = ±1, so e/pv = e*pv
      Row merged;
      merged.reserve(rows[i].size() + pivot.size());
      std::size_t a = 0, b = 0;
      const Row& ri = rows[i];
      while (a < ri.size() || b < pivot.size()) {
        if (b == pivot.size() || (a < ri.size() && ri[a].first < pivot[b].first)) {
          merged.push_back(ri[a++]);
        } else if (a == ri.size() || pivot[b].first < ri[a].first) {
          merged.emplace_back(pivot[b].first, -factor * pivot[b].second);
          ++col_count[pivot[b].first];
          ++b;
        } else {
          Integer v = ri[a].second - factor * pivot[b].second;
          if (v != 0)
            merged.emplace_back(ri[a].first, std::move(v));
          else
            --col_count[ri[a].first];
          ++a;
          ++b;
        }
      }
      rows[i] = std::move(merged);
    }
    for (const auto& [j, v] : rows[best_i]) --col_count[j];
    rows[best_i].clear();
    row_alive[best_i] = 0;
    col_alive[best_j] = 0;
    ++ones;
  }

  std::vector<std::size_t> live_rows, live_cols;
  std::vector<std::size_t> col_pos(nc, SIZE_MAX);
  for (std::size_t i = 0; i < nr; ++i)
    if (row_alive[i] && !rows[i].empty()) live_rows.push_back(i);
  for (std::size_t j = 0; j < nc; ++j)
    if (col_alive[j] && col_count[j] > 0) {
      col_pos[j] = live_cols.size();
      live_cols.push_back(j);
    }
  IntMatrix rest(live_rows.size(), live_cols.size());
  for (std::size_t a = 0; a < live_rows.size(); ++a)
    for (const auto& [j, v] : rows[live_rows[a]]) rest(a, col_pos[j]) = v;

  std::vector<Integer> inv(ones, Integer(1));
  if (!rest.empty()) {
    SmithReducer<false> red(std::move(rest));
    for (auto& d : red.run())
      if (d != 0) inv.push_back(std::move(d));
  }
  while (inv.size() < k) inv.emplace_back(0);
  return inv;
}

}  // namespace detail

/// Smith normal form with unimodular transforms: left * m * right = diag(invariants).
inline SnfResult snf(const IntMatrix& m) {
  detail::SmithReducer<true> red(m);
  SnfResult out;
  out.invariants = red.run();
  out.left = std::move(red.left());
  out.right = std::move(red.right());
  return out;
}

/// Invariant factors only. Uses sparse unit-pivot elimination before the dense pass.
inline std::vector<Integer> snf_invariants(const IntMatrix& m) {
  if (m.empty()) return std::vector<Integer>(std::min(m.rows(), m.cols()));
  return detail::sparse_invariants(m);
}

inline std::size_t rank(const IntMatrix& m) { return rank_from_invariants(snf_invariants(m)); }

// ---------------------------------------------------------------------------
// Derived operations

/// Inverse of a unimodular matrix (throws if not unimodular).
inline IntMatrix unimodular_inverse(const IntMatrix& u) {
  if (u.rows() != u.cols()) throw Error(ErrorKind::ShapeMismatch, "inverse of non-square matrix");
  auto s = snf(u);
  for (const auto& d : s.invariants)
    if (d != 1) throw Error(ErrorKind::InconsistentSystem, "matrix is not unimodular");
  // L U R = I  =>  U^{-1} = R L
  return s.right * s.left;
}

struct Cokernel {
  AbGroupInvariants invariants;
  IntMatrix section;     // n x free_rank: images form a basis of a complement to the saturation
  IntMatrix projection;  // free_rank x n: Z^n -> free part of the quotient; projection * section = I
};

/// Presentation of Z^n / (column span of relations), n = relations.rows().
inline Cokernel cokernel(const IntMatrix& relations) {
  const std::size_t n = relations.rows();
  Cokernel out;
  if (relations.cols() == 0) {
    out.invariants.free_rank = n;
    out.section = IntMatrix::identity(n);
    out.projection = IntMatrix::identity(n);
    return out;
  }
  auto s = snf(relations);
  const std::size_t r = s.rank();
  out.invariants.free_rank = n - r;
  out.invariants.torsion = nontrivial_torsion(s.invariants);
  IntMatrix linv = unimodular_inverse(s.left);
  out.section = linv.col_range(r, n);
  out.projection = s.left.row_range(r, n);
  return out;
}

/// Saturated basis (as columns) of the integer kernel of m.
inline IntMatrix kernel_basis(const IntMatrix& m) {
  if (m.rows() == 0) return IntMatrix::identity(m.cols());
  auto s = snf(m);
  return s.right.col_range(s.rank(), m.cols());
}

/// Basis (columns) of the lattice spanned by the columns of generators.
inline IntMatrix lattice_basis(const IntMatrix& generators) {
  if (generators.cols() == 0) return IntMatrix(generators.rows(), 0);
  auto s = snf(generators);
  const std::size_t r = s.rank();
  IntMatrix linv = unimodular_inverse(s.left);
  IntMatrix basis(generators.rows(), r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < generators.rows(); ++i) basis(i, j) = linv(i, j) * s.invariants[j];
  return basis;
}

/// Integral solution x of a * x = b, or nullopt. Columns of b are solved independently.
inline std::optional<IntMatrix> solve(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::ShapeMismatch, "solve");
  auto s = snf(a);
  IntMatrix lb = s.left * b;
  const std::size_t r = s.rank();
  IntMatrix y(a.cols(), b.cols());
  for (std::size_t i = 0; i < lb.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      if (i < r) {
        if (!mpz_divisible_p(lb(i, j).get_mpz_t(), s.invariants[i].get_mpz_t())) return std::nullopt;
        y(i, j) = lb(i, j) / s.invariants[i];
      } else if (lb(i, j) != 0) {
        return std::nullopt;
      }
    }
  return s.right * y;
}

/// True iff every column of v lies in the lattice spanned by the columns of a.
inline bool lattice_contains(const IntMatrix& a, const IntMatrix& v) {
  if (v.cols() == 0) return true;
  auto ia = snf_invariants(a.cols() ? a : IntMatrix(v.rows(), 0));
  auto iav = snf_invariants(hstack({a, v}, v.rows()));
  if (rank_from_invariants(ia) != rank_from_invariants(iav)) return false;
  Integer pa = 1, pav = 1;
  for (const auto& d : ia)
    if (d != 0) pa *= d;
  for (const auto& d : iav)
    if (d != 0) pav *= d;
  return pa == pav;
}

}  // namespace uod
