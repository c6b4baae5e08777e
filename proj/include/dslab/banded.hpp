#pragma once

#include <vector>

#include "dslab/common.hpp"

namespace dslab {

// Square complex band matrix with kl sub- and ku super-diagonals.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int n, int kl, int ku);

  int size() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }
  cplx& at(int i, int j) { return data_[idx(i, j)]; }
  cplx get(int i, int j) const { return in_band(i, j) ? data_[idx(i, j)] : cplx{}; }

  VecC multiply(const VecC& v) const;
  VecC adjoint_multiply(const VecC& v) const;
  MatC to_dense() const;
  BandedMatrix adjoint() const;
  void add_diagonal(const VecC& d);
  // max |M_ij - conj(M_ji)|
  double hermitian_defect() const;

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * (kl_ + ku_ + 1) + (j - i + kl_);
  }
  int n_ = 0, kl_ = 0, ku_ = 0;
  std::vector<cplx> data_;
};

// LU factorisation of (A - z) with partial pivoting (LAPACK gbtrf).
class BandedLU {
 public:
  BandedLU(const BandedMatrix& a, cplx shift);
  VecC solve(const VecC& b) const;
  // Solves (A - z)^* x = b.
  VecC solve_adjoint(const VecC& b) const;
  int size() const { return n_; }

 private:
  VecC run(const VecC& b, char trans) const;
  int n_, kl_, ku_, ldab_;
  std::vector<cplx> ab_;
  std::vector<int> ipiv_;
};

}  // namespace dslab
