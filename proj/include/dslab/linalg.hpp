#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dslab/common.hpp"

namespace dslab {

// Matrix-free operator with its adjoint.
struct LinearMap {
  int rows = 0;
  int cols = 0;
  std::function<VecC(const VecC&)> apply;
  std::function<VecC(const VecC&)> apply_adjoint;
};

struct SvdOptions {
  double tol = 1e-8;
  int max_basis = 80;
  int max_restarts = 6;
  std::uint64_t seed = 12345;
};

struct TopSingular {
  double value = 0.0;
  VecC right;  // unit vector v with ||M v|| = value
  VecC left;
  int iterations = 0;
};

// Largest singular value via Golub-Kahan-Lanczos bidiagonalisation (a Krylov
// accelerated power iteration on M*M) with full reorthogonalisation and
// restarts. Throws PowerIterationStall when it does not settle.
TopSingular top_singular(const LinearMap& m, const SvdOptions& opt = {});

double dense_norm2(const MatC& m);

// Deterministic complex gaussian vector.
VecC random_vector(int n, std::uint64_t seed);

// exp(-i tau K) v for hermitian K with spectrum inside [lo, hi], by Chebyshev
// expansion. apply must compute K v.
VecC chebyshev_expm(const std::function<VecC(const VecC&)>& apply, double lo, double hi,
                    double tau, const VecC& v, double tol = 1e-15);

// Bessel J_0..J_kmax at x via Miller's backward recurrence.
std::vector<double> bessel_j_sequence(int kmax, double x);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dslab
