#pragma once

#include <optional>
#include <vector>

#include "pdstring/matrix.hpp"

namespace pd {

// Finitely generated abelian group presented as ker(d_out)/im(d_in), with a
// frozen basis of representative cycles and exact coordinatization.
//
// Basis order: free generators first, then torsion generators in ascending
// invariant-factor order. reduce() is total on cycles, Z-linear in the free
// coordinates, and reduces torsion coordinates into [0, d).
class FGAbelianGroup {
 public:
  // d_out : C_p -> C_{p-1}, d_in : C_{p+1} -> C_p (columns = source basis).
  FGAbelianGroup(const IntegerMatrix& d_in, const IntegerMatrix& d_out) {
    PD_CHECK(d_out.cols() == d_in.rows(), "chain degrees mismatch");
    ambient_dim_ = d_out.cols();
    PD_CHECK((d_out * d_in).is_zero(), "d_out * d_in != 0");

    // Kernel of d_out: trailing columns of V form a basis of a direct summand.
    SmithForm so = smith_normal_form(d_out);
    const int k = ambient_dim_ - so.rank;
    IntegerMatrix kernel(ambient_dim_, k);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < ambient_dim_; ++i)
        kernel.at(i, j) = so.v.at(i, so.rank + j);

    // Express the boundaries in kernel coordinates: kernel * Y = d_in.
    kernel_dim_ = k;
    kernel_snf_ = smith_normal_form(kernel);
    IntegerMatrix y(k, d_in.cols());
    for (int j = 0; j < d_in.cols(); ++j) {
      auto col = solve_in_kernel(d_in.column(j));
      PD_CHECK(col.has_value(), "boundary is not a cycle");
      for (int i = 0; i < k; ++i) y.at(i, j) = (*col)[i];
    }

    // Diagonalize the inclusion of boundaries: new kernel basis kernel*Uy^{-1}
    // sees im(d_in) as span{ d_i * basis_i }.
    SmithForm sy = smith_normal_form(y);
    basis_all_ = kernel * sy.u_inv;
    uy_ = sy.u;
    factors_.assign(k, Integer(0));
    for (int i = 0; i < std::min(k, y.cols()); ++i) factors_[i] = sy.d.at(i, i);

    for (int i = 0; i < k; ++i) {
      if (factors_[i] == 0)
        free_cols_.push_back(i);
      else if (factors_[i] > 1)
        torsion_cols_.push_back(i);
    }
  }

  int free_rank() const { return (int)free_cols_.size(); }

  std::vector<Integer> torsion() const {
    std::vector<Integer> t;
    for (int c : torsion_cols_) t.push_back(factors_[c]);
    return t;
  }

  int rank() const { return free_rank() + (int)torsion_cols_.size(); }
  int ambient_dim() const { return ambient_dim_; }

  // Representative cycle of basis element i (free first, then torsion).
  std::vector<Integer> basis_vector(int i) const {
    const int c = col_of(i);
    std::vector<Integer> v(ambient_dim_);
    for (int r = 0; r < ambient_dim_; ++r) v[r] = basis_all_.at(r, c);
    return v;
  }

  // Representative cycle of the class with the given coordinates.
  std::vector<Integer> combination(const std::vector<Integer>& coords) const {
    PD_CHECK((int)coords.size() == rank(), "combination coordinate count");
    std::vector<Integer> out(size_t(ambient_dim_), 0);
    for (int i = 0; i < rank(); ++i) {
      if (coords[size_t(i)] == 0) continue;
      const std::vector<Integer> b = basis_vector(i);
      for (int r = 0; r < ambient_dim_; ++r) out[size_t(r)] += coords[size_t(i)] * b[size_t(r)];
    }
    return out;
  }

  // Coordinates of a cycle; zero exactly on boundaries.
  std::vector<Integer> reduce(const std::vector<Integer>& cycle) const {
    auto yk = solve_in_kernel(column_of(cycle));
    PD_CHECK(yk.has_value(), "reduce: not a cycle");
    std::vector<Integer> yp = uy_.apply(*yk);
    std::vector<Integer> out;
    out.reserve(rank());
    for (int c : free_cols_) out.push_back(yp[c]);
    for (int c : torsion_cols_) {
      Integer r;
      mpz_fdiv_r(r.get_mpz_t(), yp[c].get_mpz_t(), factors_[c].get_mpz_t());
      out.push_back(r);
    }
    return out;
  }

  bool is_trivial_class(const std::vector<Integer>& cycle) const {
    for (const auto& v : reduce(cycle))
      if (v != 0) return false;
    return true;
  }

 private:
  int col_of(int i) const {
    PD_CHECK(i >= 0 && i < rank(), "basis index");
    return i < free_rank() ? free_cols_[i] : torsion_cols_[i - free_rank()];
  }

  static IntegerMatrix column_of(const std::vector<Integer>& v) {
    IntegerMatrix c((int)v.size(), 1);
    for (int i = 0; i < (int)v.size(); ++i) c.at(i, 0) = v[i];
    return c;
  }

  // Solve kernel * y = col using the cached SNF of the kernel matrix.
  std::optional<std::vector<Integer>> solve_in_kernel(const IntegerMatrix& col) const {
    PD_CHECK(col.rows() == ambient_dim_, "kernel solve shape");
    std::vector<Integer> b(ambient_dim_);
    for (int i = 0; i < ambient_dim_; ++i) b[i] = col.at(i, 0);
    std::vector<Integer> ub = kernel_snf_.u.apply(b);
    std::vector<Integer> y(kernel_dim_);
    for (int i = 0; i < ambient_dim_; ++i) {
      const Integer di = (i < std::min(ambient_dim_, kernel_dim_)) ? kernel_snf_.d.at(i, i) : Integer(0);
      if (di == 0) {
        if (ub[i] != 0) return std::nullopt;
      } else {
        if (ub[i] % di != 0) return std::nullopt;
        y[i] = ub[i] / di;
      }
    }
    return kernel_snf_.v.apply(y);
  }

  int ambient_dim_ = 0, kernel_dim_ = 0;
  SmithForm kernel_snf_;      // SNF of the kernel inclusion (full column rank)
  IntegerMatrix basis_all_;   // ambient_dim x kernel_dim, columns = adapted cycles
  IntegerMatrix uy_;          // kernel coords -> adapted coords
  std::vector<Integer> factors_;  // invariant factor per adapted column (0 = free)
  std::vector<int> free_cols_, torsion_cols_;
};

inline FGAbelianGroup homology_of_pair(const IntegerMatrix& d_in, const IntegerMatrix& d_out) {
  return FGAbelianGroup(d_in, d_out);
}

}  // namespace pd
