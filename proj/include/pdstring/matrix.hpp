#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pdstring/integers.hpp"

namespace pd {

// Dense matrix over Z (arbitrary precision). Desk-scale: boundary matrices and
// window systems stay in the hundreds of rows/columns.
class IntegerMatrix {
 public:
  IntegerMatrix() : rows_(0), cols_(0) {}
  IntegerMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}

  static IntegerMatrix identity(int n) {
    IntegerMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Integer& at(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const Integer& at(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  IntegerMatrix operator*(const IntegerMatrix& o) const {
    PD_CHECK(cols_ == o.rows_, "matrix product shape");
    IntegerMatrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const Integer& v = at(i, k);
        if (v == 0) continue;
        for (int j = 0; j < o.cols_; ++j)
          if (o.at(k, j) != 0) r.at(i, j) += v * o.at(k, j);
      }
    return r;
  }

  bool operator==(const IntegerMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

  std::vector<Integer> apply(const std::vector<Integer>& x) const {
    PD_CHECK((int)x.size() == cols_, "matrix apply shape");
    std::vector<Integer> y(rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (at(i, j) != 0 && x[j] != 0) y[i] += at(i, j) * x[j];
    return y;
  }

  IntegerMatrix column(int j) const {
    IntegerMatrix c(rows_, 1);
    for (int i = 0; i < rows_; ++i) c.at(i, 0) = at(i, j);
    return c;
  }

  bool is_zero() const {
    for (const auto& v : a_)
      if (v != 0) return false;
    return true;
  }

 private:
  int rows_, cols_;
  std::vector<Integer> a_;
};

// U*A*V = D with U,V unimodular and D diagonal, d_i >= 0, d_i | d_{i+1}.
// u_inv/v_inv accumulate the inverse transforms (needed to change basis along
// the diagonalization without a separate inversion).
struct SmithForm {
  IntegerMatrix u, v, d, u_inv, v_inv;
  int rank = 0;  // number of nonzero diagonal entries
};

namespace detail {

inline void row_add(IntegerMatrix& m, int dst, int src, const Integer& c) {
  for (int j = 0; j < m.cols(); ++j) m.at(dst, j) += c * m.at(src, j);
}
inline void col_add(IntegerMatrix& m, int dst, int src, const Integer& c) {
  for (int i = 0; i < m.rows(); ++i) m.at(i, dst) += c * m.at(i, src);
}
inline void row_swap(IntegerMatrix& m, int a, int b) {
  for (int j = 0; j < m.cols(); ++j) std::swap(m.at(a, j), m.at(b, j));
}
inline void col_swap(IntegerMatrix& m, int a, int b) {
  for (int i = 0; i < m.rows(); ++i) std::swap(m.at(i, a), m.at(i, b));
}
inline void row_neg(IntegerMatrix& m, int r) {
  for (int j = 0; j < m.cols(); ++j) m.at(r, j) = -m.at(r, j);
}

}  // namespace detail

inline SmithForm smith_normal_form(const IntegerMatrix& a) {
  using namespace detail;
  SmithForm s;
  s.d = a;
  const int R = a.rows(), C = a.cols();
  s.u = IntegerMatrix::identity(R);
  s.u_inv = IntegerMatrix::identity(R);
  s.v = IntegerMatrix::identity(C);
  s.v_inv = IntegerMatrix::identity(C);
  IntegerMatrix& m = s.d;

  // Row op m <- L*m is mirrored as u <- L*u, u_inv <- u_inv*L^{-1}; same for
  // columns on the right.
  auto urow_add = [&](int dst, int src, const Integer& c) {
    row_add(m, dst, src, c);
    row_add(s.u, dst, src, c);
    col_add(s.u_inv, src, dst, -c);
  };
  auto vcol_add = [&](int dst, int src, const Integer& c) {
    col_add(m, dst, src, c);
    col_add(s.v, dst, src, c);
    row_add(s.v_inv, src, dst, -c);
  };
  auto urow_swap = [&](int x, int y) {
    row_swap(m, x, y);
    row_swap(s.u, x, y);
    col_swap(s.u_inv, x, y);
  };
  auto vcol_swap = [&](int x, int y) {
    col_swap(m, x, y);
    col_swap(s.v, x, y);
    row_swap(s.v_inv, x, y);
  };
  auto urow_neg = [&](int r) {
    row_neg(m, r);
    row_neg(s.u, r);
    for (int i = 0; i < R; ++i) s.u_inv.at(i, r) = -s.u_inv.at(i, r);
  };

  int t = 0;
  const int lim = std::min(R, C);
  while (t < lim) {
    // Deterministic pivot: smallest |value| in the trailing block, ties by
    // (row, col).
    int pi = -1, pj = -1;
    for (int i = t; i < R; ++i)
      for (int j = t; j < C; ++j) {
        const Integer& v = m.at(i, j);
        if (v == 0) continue;
        if (pi < 0 || abs(v) < abs(m.at(pi, pj))) {
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;
    if (pi != t) urow_swap(pi, t);
    if (pj != t) vcol_swap(pj, t);

    for (bool dirty = true; dirty;) {
      dirty = false;
      // Clear column t below the pivot.
      for (int i = t + 1; i < R; ++i) {
        if (m.at(i, t) == 0) continue;
        Integer q = nearest_quotient(m.at(i, t), m.at(t, t));
        if (q != 0) urow_add(i, t, -q);
        if (m.at(i, t) != 0) {  // remainder strictly smaller: swap up, redo
          urow_swap(i, t);
          dirty = true;
        }
      }
      // Clear row t right of the pivot.
      for (int j = t + 1; j < C; ++j) {
        if (m.at(t, j) == 0) continue;
        Integer q = nearest_quotient(m.at(t, j), m.at(t, t));
        if (q != 0) vcol_add(j, t, -q);
        if (m.at(t, j) != 0) {
          vcol_swap(j, t);
          dirty = true;
        }
      }
      if (dirty) continue;
      // Divisibility sweep: pivot must divide the trailing block.
      for (int i = t + 1; i < R && !dirty; ++i)
        for (int j = t + 1; j < C && !dirty; ++j)
          if (m.at(i, j) % m.at(t, t) != 0) {
            urow_add(t, i, 1);
            dirty = true;
          }
    }
    if (m.at(t, t) < 0) urow_neg(t);
    ++t;
  }
  s.rank = 0;
  for (int i = 0; i < lim; ++i)
    if (m.at(i, i) != 0) ++s.rank;
  return s;
}

inline IntegerMatrix transpose(const IntegerMatrix& a) {
  IntegerMatrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t.at(j, i) = a.at(i, j);
  return t;
}

// Row-style Hermite basis of the row space: full-row-rank echelon matrix with
// positive pivots and entries above each pivot reduced into [0, pivot). The
// result is the unique canonical basis of the integer row span.
inline IntegerMatrix hermite_row_basis(const IntegerMatrix& a) {
  const int m = a.rows(), n = a.cols();
  std::vector<std::vector<Integer>> rows(static_cast<size_t>(m),
                                         std::vector<Integer>(static_cast<size_t>(n)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) rows[size_t(i)][size_t(j)] = a.at(i, j);
  auto sub_mult = [&](int dst, int src, const Integer& q) {
    if (q == 0) return;
    for (int j = 0; j < n; ++j) rows[size_t(dst)][size_t(j)] -= q * rows[size_t(src)][size_t(j)];
  };
  int r = 0;
  for (int col = 0; col < n && r < m; ++col) {
    for (;;) {
      int piv = -1;
      for (int i = r; i < m; ++i) {
        const Integer& v = rows[size_t(i)][size_t(col)];
        if (v == 0) continue;
        if (piv < 0 || abs(v) < abs(rows[size_t(piv)][size_t(col)])) piv = i;
      }
      if (piv < 0) break;
      std::swap(rows[size_t(piv)], rows[size_t(r)]);
      bool leftover = false;
      for (int i = r + 1; i < m; ++i) {
        const Integer& v = rows[size_t(i)][size_t(col)];
        if (v == 0) continue;
        sub_mult(i, r, nearest_quotient(v, rows[size_t(r)][size_t(col)]));
        if (rows[size_t(i)][size_t(col)] != 0) leftover = true;
      }
      if (!leftover) break;
    }
    Integer& p = rows[size_t(r)][size_t(col)];
    if (p == 0) continue;
    if (p < 0)
      for (int j = 0; j < n; ++j) rows[size_t(r)][size_t(j)] = -rows[size_t(r)][size_t(j)];
    for (int i = 0; i < r; ++i)
      sub_mult(i, r, floor_quotient(rows[size_t(i)][size_t(col)], rows[size_t(r)][size_t(col)]));
    ++r;
  }
  IntegerMatrix h(r, n);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < n; ++j) h.at(i, j) = rows[size_t(i)][size_t(j)];
  return h;
}

// One integral solution of A x = b, or nullopt when none exists. Free
// coordinates are fixed to 0 (deterministic representative).
inline std::optional<std::vector<Integer>> solve_integer_linear(
    const IntegerMatrix& a, const std::vector<Integer>& b) {
  PD_CHECK((int)b.size() == a.rows(), "solve shape");
  SmithForm s = smith_normal_form(a);
  std::vector<Integer> ub = s.u.apply(b);
  std::vector<Integer> y(a.cols());
  const int lim = std::min(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const Integer di = (i < lim) ? s.d.at(i, i) : Integer(0);
    if (di == 0) {
      if (ub[i] != 0) return std::nullopt;
    } else {
      if (ub[i] % di != 0) return std::nullopt;
      if (i < a.cols()) y[i] = ub[i] / di;
    }
  }
  return s.v.apply(y);
}

}  // namespace pd
