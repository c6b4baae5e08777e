#include "dslab/banded.hpp"

#include <algorithm>

extern "C" {
void zgbtrf_(const int* m, const int* n, const int* kl, const int* ku, std::complex<double>* ab,
             const int* ldab, int* ipiv, int* info);
void zgbtrs_(const char* trans, const int* n, const int* kl, const int* ku, const int* nrhs,
             const std::complex<double>* ab, const int* ldab, const int* ipiv,
             std::complex<double>* b, const int* ldb, int* info);
}

namespace dslab {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), data_(static_cast<std::size_t>(n) * (kl + ku + 1)) {}

VecC BandedMatrix::multiply(const VecC& v) const {
  VecC out = VecC::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - kl_), j1 = std::min(n_ - 1, i + ku_);
    cplx acc{};
    for (int j = j0; j <= j1; ++j) acc += data_[idx(i, j)] * v[j];
    out[i] = acc;
  }
  return out;
}

VecC BandedMatrix::adjoint_multiply(const VecC& v) const {
  VecC out = VecC::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - kl_), j1 = std::min(n_ - 1, i + ku_);
    for (int j = j0; j <= j1; ++j) out[j] += std::conj(data_[idx(i, j)]) * v[i];
  }
  return out;
}

MatC BandedMatrix::to_dense() const {
  MatC m = MatC::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) m(i, j) = get(i, j);
  return m;
}

BandedMatrix BandedMatrix::adjoint() const {
  BandedMatrix out(n_, ku_, kl_);
  for (int i = 0; i < n_; ++i)
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j)
      out.at(j, i) = std::conj(get(i, j));
  return out;
}

void BandedMatrix::add_diagonal(const VecC& d) {
  for (int i = 0; i < n_; ++i) at(i, i) += d[i];
}

double BandedMatrix::hermitian_defect() const {
  double worst = 0.0;
  const int b = std::max(kl_, ku_);
  for (int i = 0; i < n_; ++i)
    for (int j = std::max(0, i - b); j <= std::min(n_ - 1, i + b); ++j)
      worst = std::max(worst, std::abs(get(i, j) - std::conj(get(j, i))));
  return worst;
}

BandedLU::BandedLU(const BandedMatrix& a, cplx shift)
    : n_(a.size()), kl_(a.kl()), ku_(a.ku()), ldab_(2 * a.kl() + a.ku() + 1) {
  ab_.assign(static_cast<std::size_t>(ldab_) * n_, cplx{});
  ipiv_.assign(n_, 0);
  // LAPACK band storage: A(i,j) -> AB(kl+ku+i-j, j), column-major.
  for (int j = 0; j < n_; ++j)
    for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) {
      cplx v = a.get(i, j);
      if (i == j) v -= shift;
      ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)] = v;
    }
  int info = 0;
  zgbtrf_(&n_, &n_, &kl_, &ku_, ab_.data(), &ldab_, ipiv_.data(), &info);
  if (info != 0)
    throw SingularSystem("zero pivot at row " + std::to_string(info) + " of " +
                         std::to_string(n_));
}

VecC BandedLU::run(const VecC& b, char trans) const {
  VecC x = b;
  int info = 0, nrhs = 1;
  zgbtrs_(&trans, &n_, &kl_, &ku_, &nrhs, ab_.data(), &ldab_, ipiv_.data(), x.data(), &n_, &info);
  if (info != 0) throw SingularSystem("gbtrs info=" + std::to_string(info));
  return x;
}

VecC BandedLU::solve(const VecC& b) const { return run(b, 'N'); }
VecC BandedLU::solve_adjoint(const VecC& b) const { return run(b, 'C'); }

}  // namespace dslab
