#include "dslab/linalg.hpp"

#include <cmath>
#include <random>

namespace dslab {

VecC random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  VecC v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
  return v;
}

double dense_norm2(const MatC& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<MatC> svd(m);
  return svd.singularValues()(0);
}

namespace {

void reorthogonalize(VecC& w, const std::vector<VecC>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) w -= b * b.dot(w);
}

}  // namespace

TopSingular top_singular(const LinearMap& m, const SvdOptions& opt) {
  VecC start = random_vector(m.cols, opt.seed);
  double prev = -1.0;
  TopSingular best;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    std::vector<VecC> V, U;
    std::vector<double> alpha, beta;
    VecC v = start.normalized();
    V.push_back(v);
    VecC p = m.apply(v);
    double a = p.norm();
    if (a == 0.0) {
      // v lies in the kernel; the norm may still be positive elsewhere
      start = random_vector(m.cols, opt.seed + 7919 * (restart + 1));
      if (restart == opt.max_restarts) return best;
      continue;
    }
    alpha.push_back(a);
    U.push_back(p / a);
    for (int k = 1; k <= opt.max_basis; ++k) {
      best.iterations++;
      VecC r = m.apply_adjoint(U.back()) - alpha.back() * V.back();
      reorthogonalize(r, V);
      const double b = r.norm();
      // Ritz value from the current k x k upper bidiagonal block.
      MatR B = MatR::Zero(k, k);
      for (int i = 0; i < k; ++i) {
        B(i, i) = alpha[i];
        if (i + 1 < k) B(i, i + 1) = beta[i];
      }
      Eigen::JacobiSVD<MatR> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const double sigma = svd.singularValues()(0);
      const double resid = b * std::abs(svd.matrixU()(k - 1, 0));
      auto ritz = [&]() {
        VecC right = VecC::Zero(m.cols), left = VecC::Zero(m.rows);
        for (int i = 0; i < k; ++i) {
          right += svd.matrixV()(i, 0) * V[i];
          left += svd.matrixU()(i, 0) * U[i];
        }
        best.value = sigma;
        best.right = right.normalized();
        best.left = left.normalized();
      };
      const bool invariant = b <= 1e-14 * sigma;
      if (resid <= opt.tol * sigma || invariant ||
          (prev > 0 && std::abs(sigma - prev) <= 1e-3 * opt.tol * sigma && k > 3)) {
        ritz();
        return best;
      }
      prev = sigma;
      if (k == opt.max_basis) {
        ritz();
        start = best.right;
        break;
      }
      beta.push_back(b);
      V.push_back(r / b);
      VecC q = m.apply(V.back()) - b * U.back();
      reorthogonalize(q, U);
      const double an = q.norm();
      if (an <= 1e-14 * sigma) {
        // exact invariant subspace: the block is complete
        alpha.push_back(0.0);
        MatR B2 = MatR::Zero(k + 1, k + 1);
        for (int i = 0; i <= k; ++i) {
          B2(i, i) = alpha[i];
          if (i < k) B2(i, i + 1) = beta[i];
        }
        Eigen::JacobiSVD<MatR> s2(B2, Eigen::ComputeFullU | Eigen::ComputeFullV);
        VecC right = VecC::Zero(m.cols), left = VecC::Zero(m.rows);
        for (int i = 0; i <= k; ++i) right += s2.matrixV()(i, 0) * V[i];
        for (int i = 0; i < k; ++i) left += s2.matrixU()(i, 0) * U[i];
        best.value = s2.singularValues()(0);
        best.right = right.normalized();
        best.left = left.norm() > 0 ? VecC(left.normalized()) : left;
        return best;
      }
      alpha.push_back(an);
      U.push_back(q / an);
    }
  }
  throw PowerIterationStall("no convergence after " + std::to_string(best.iterations) +
                            " Lanczos steps (last estimate " + std::to_string(best.value) + ")");
}

std::vector<double> bessel_j_sequence(int kmax, double x) {
  std::vector<double> j(kmax + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  const double ax = std::abs(x);
  int start = std::max(kmax, static_cast<int>(ax)) + 40 + static_cast<int>(std::sqrt(40.0 * ax));
  start += start % 2;
  double jp1 = 0.0, jk = 1e-300, sum;
  std::vector<double> tmp(start + 1, 0.0);
  tmp[start] = jk;
  for (int k = start; k >= 1; --k) {
    const double jm1 = 2.0 * k / ax * jk - jp1;
    jp1 = jk;
    jk = jm1;
    tmp[k - 1] = jk;
    if (std::abs(jk) > 1e250) {
      for (int i = k - 1; i <= start; ++i) tmp[i] *= 1e-250;
      jk *= 1e-250;
      jp1 *= 1e-250;
    }
  }
  // normalisation J0 + 2 sum J_2k = 1
  sum = tmp[0];
  for (int k = 2; k <= start; k += 2) sum += 2.0 * tmp[k];
  for (int k = 0; k <= kmax; ++k) {
    double v = tmp[k] / sum;
    if (x < 0 && (k % 2 == 1)) v = -v;
    j[k] = v;
  }
  return j;
}

VecC chebyshev_expm(const std::function<VecC(const VecC&)>& apply, double lo, double hi,
                    double tau, const VecC& v, double tol) {
  const double c = 0.5 * (hi + lo), r = 0.5 * (hi - lo);
  if (r <= 0.0) return std::exp(-I * tau * c) * v;
  const double x = tau * r;
  const int kmax = static_cast<int>(x + 12.0 * std::cbrt(x) + 40.0);
  const auto J = bessel_j_sequence(kmax, x);
  auto op = [&](const VecC& u) -> VecC { return (apply(u) - c * u) / r; };
  VecC t0 = v, t1 = op(v);
  VecC acc = J[0] * t0 + 2.0 * std::pow(-I, 1) * J[1] * t1;
  cplx phase = -I;
  for (int k = 2; k <= kmax; ++k) {
    VecC t2 = 2.0 * op(t1) - t0;
    phase *= -I;
    acc += 2.0 * phase * J[k] * t2;
    t0 = std::move(t1);
    t1 = std::move(t2);
    if (k > x && std::abs(J[k]) < tol && std::abs(J[k - 1]) < tol) break;
  }
  return std::exp(-I * tau * c) * acc;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
  }
  f.rms_residual = n ? std::sqrt(ss / n) : 0.0;
  return f;
}

}  // namespace dslab
