#include "dslab/resolvent.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>

#include "dslab/lapack.hpp"
#include "dslab/workers.hpp"

namespace dslab {

SolveAudit& SolveAudit::global() {
  static SolveAudit audit;
  return audit;
}

void SolveAudit::record(double ratio) {
  ++solves_;
  if (ratio > 1.0 + 1e-10) ++violations_;
  std::lock_guard<std::mutex> lk(mu_);
  worst_ = std::max(worst_, ratio);
}

void SolveAudit::reset() {
  solves_ = 0;
  violations_ = 0;
  std::lock_guard<std::mutex> lk(mu_);
  worst_ = 0.0;
}

double SolveAudit::worst_ratio() const {
  std::lock_guard<std::mutex> lk(mu_);
  return worst_;
}

namespace {

const BandedMatrix& banded_of(const DiscreteOperator& H) {
  if (H.is_dense) throw PreconditionViolated("banded operator expected");
  return H.band;
}

}  // namespace

Resolvent::Resolvent(const DiscreteOperator& H, cplx z, bool dissipative)
    : lu_(banded_of(H), z), z_(z), dissipative_(dissipative) {}

void Resolvent::audit(const VecC& f, const VecC& u) const {
  if (!dissipative_ || z_.imag() <= 0) return;
  const double nf = f.norm();
  if (nf == 0.0) return;
  SolveAudit::global().record(z_.imag() * u.norm() / nf);
}

VecC Resolvent::solve(const VecC& f) const {
  VecC u = lu_.solve(f);
  audit(f, u);
  return u;
}

VecC Resolvent::solve_adjoint(const VecC& f) const {
  // (H - z)^* = H^* - conj(z) obeys the same bound
  VecC u = lu_.solve_adjoint(f);
  audit(f, u);
  return u;
}

SolveResult solve(const DiscreteOperator& H, cplx z, const VecC& f) {
  const bool dissipative = dissipativity_check(H) <= 1e-12;
  Resolvent R(H, z, dissipative);
  SolveResult out;
  out.u = R.solve(f);
  const VecC r = H.apply(out.u) - z * out.u - f;
  const double nf = f.norm();
  out.relative_residual = nf > 0 ? r.norm() / nf : r.norm();
  if (out.relative_residual > 1e-10)
    throw ToleranceExceeded("relative residual " + std::to_string(out.relative_residual));
  return out;
}

NormResult weighted_norm(const DiscreteOperator& H, cplx z, const VecR& w, const SvdOptions& opt) {
  const Resolvent R(H, z);
  const int n = R.size();
  LinearMap m;
  m.rows = m.cols = n;
  m.apply = [&](const VecC& v) -> VecC {
    return w.cwiseProduct(R.solve(w.cwiseProduct(v).eval()));
  };
  m.apply_adjoint = [&](const VecC& v) -> VecC {
    return w.cwiseProduct(R.solve_adjoint(w.cwiseProduct(v).eval()));
  };
  NormResult out;
  try {
    const TopSingular t = top_singular(m, opt);
    out.norm = t.value;
    out.iterations = t.iterations;
    out.method = "lanczos";
  } catch (const PowerIterationStall&) {
    if (n > 2048) throw;
    MatC M(n, n);
    for (int j = 0; j < n; ++j) {
      VecC e = VecC::Zero(n);
      e[j] = 1.0;
      M.col(j) = m.apply(e);
    }
    out.norm = dense_norm2(M);
    out.method = "dense-svd";
  }
  return out;
}

NormResult weighted_norm(const DiscreteOperator& H, cplx z, const Grid& grid, double s,
                         const SvdOptions& opt) {
  return weighted_norm(H, z, weight_diagonal(grid, s), opt);
}

namespace {


double min_eigenvalue(const MatC& A) {
  Eigen::SelfAdjointEigenSolver<MatC> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

QuadraticCheck quadratic_estimate_check(const MatC& T_R, const MatC& T_I, const MatC& B,
                                        const MatC& Q, cplx z) {
  if (!(z.imag() > 0)) throw PreconditionViolated("Im z must be positive");
  const double tol = 1e-10;
  const double ti = min_eigenvalue(0.5 * (T_I + T_I.adjoint()));
  if (ti < -tol) throw PreconditionViolated("T_I has eigenvalue " + std::to_string(ti));
  const MatC gap = T_I - B.adjoint() * B;
  const double g = min_eigenvalue(0.5 * (gap + gap.adjoint()));
  if (g < -tol) throw PreconditionViolated("T_I - B*B has eigenvalue " + std::to_string(g));
  if ((Q - Q.adjoint()).cwiseAbs().maxCoeff() > tol * std::max(1.0, Q.cwiseAbs().maxCoeff()))
    throw PreconditionViolated("Q is not hermitian");
  const int n = static_cast<int>(T_R.rows());
  const MatC T = T_R - I * T_I;
  const MatC shifted = T - z * MatC::Identity(n, n);
  Eigen::PartialPivLU<MatC> lu(shifted);
  const MatC RQ = lu.solve(Q);
  // every column is one solve; record the contraction bound for each
  const bool dissipative = ti >= -tol;
  if (dissipative)
    for (int j = 0; j < n; ++j) {
      const double nf = Q.col(j).norm();
      if (nf > 0) SolveAudit::global().record(z.imag() * RQ.col(j).norm() / nf);
    }
  QuadraticCheck out;
  out.lhs = dense_norm2(B * RQ);
  out.rhs = std::sqrt(dense_norm2(Q * RQ));
  out.holds = out.lhs <= out.rhs + tol;
  return out;
}

namespace {

// Lagrange weights for extrapolating samples at mu_i to mu = 0.
std::vector<double> extrapolation_weights(const std::vector<double>& mu) {
  std::vector<double> c(mu.size(), 1.0);
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < mu.size(); ++j)
      if (i != j) c[i] *= mu[j] / (mu[j] - mu[i]);
  return c;
}

struct Combination {
  std::vector<std::shared_ptr<Resolvent>> parts;
  std::vector<double> coef;
};

LinearMap weighted_combination(const std::vector<Combination>& terms, const VecR& w) {
  LinearMap m;
  m.rows = m.cols = static_cast<int>(w.size());
  m.apply = [terms, w](const VecC& v) {
    const VecC wv = w.cwiseProduct(v);
    VecC acc = VecC::Zero(v.size());
    for (const auto& t : terms)
      for (std::size_t k = 0; k < t.parts.size(); ++k) acc += t.coef[k] * t.parts[k]->solve(wv);
    return VecC(w.cwiseProduct(acc));
  };
  m.apply_adjoint = [terms, w](const VecC& v) {
    const VecC wv = w.cwiseProduct(v);
    VecC acc = VecC::Zero(v.size());
    for (const auto& t : terms)
      for (std::size_t k = 0; k < t.parts.size(); ++k)
        acc += t.coef[k] * t.parts[k]->solve_adjoint(wv);
    return VecC(w.cwiseProduct(acc));
  };
  return m;
}

}  // namespace

LimitingAbsorptionReport limiting_absorption_scan(const DiscreteOperator& H, const Grid& grid,
                                                  double lambda, double s,
                                                  const std::vector<double>& mu_sequence,
                                                  const std::vector<double>& holder_offsets) {
  if (mu_sequence.size() < 3) throw PreconditionViolated("need at least three mu values");
  for (std::size_t k = 0; k + 1 < mu_sequence.size(); ++k)
    if (!(mu_sequence[k + 1] < mu_sequence[k]) || !(mu_sequence[k + 1] > 0))
      throw PreconditionViolated("mu sequence must decrease and stay positive");
  const VecR w = weight_diagonal(grid, s);
  LimitingAbsorptionReport rep;
  rep.mu = mu_sequence;
  rep.holder_target = (2.0 * s - 1.0) / (2.0 * s + 1.0);

  std::vector<std::shared_ptr<Resolvent>> Rs;
  for (double mu : mu_sequence) Rs.push_back(std::make_shared<Resolvent>(H, cplx(lambda, mu)));
  for (std::size_t k = 0; k < Rs.size(); ++k) {
    rep.norms.push_back(top_singular(weighted_combination({{{Rs[k]}, {1.0}}}, w)).value);
    if (k + 1 < Rs.size())
      rep.increments.push_back(
          top_singular(weighted_combination({{{Rs[k], Rs[k + 1]}, {1.0, -1.0}}}, w)).value);
  }
  rep.increments_decreasing = true;
  for (std::size_t k = 0; k + 1 < rep.increments.size(); ++k)
    if (!(rep.increments[k + 1] < rep.increments[k])) rep.increments_decreasing = false;

  // extrapolate with the three smallest mu
  const std::size_t m = mu_sequence.size();
  const std::vector<double> tail(mu_sequence.end() - 3, mu_sequence.end());
  const std::vector<double> c = extrapolation_weights(tail);
  auto limit_at = [&](double lam) {
    Combination comb;
    for (int k = 0; k < 3; ++k) {
      comb.parts.push_back(lam == lambda ? Rs[m - 3 + k]
                                         : std::make_shared<Resolvent>(H, cplx(lam, tail[k])));
      comb.coef.push_back(c[k]);
    }
    return comb;
  };
  const Combination base = limit_at(lambda);
  rep.limit_norm = top_singular(weighted_combination({base}, w)).value;

  if (!holder_offsets.empty()) {
    std::vector<double> lx, ly;
    for (double d : holder_offsets) {
      Combination shifted = limit_at(lambda + d);
      Combination neg = base;
      for (auto& x : neg.coef) x = -x;
      const double diff = top_singular(weighted_combination({shifted, neg}, w)).value;
      rep.holder_offsets.push_back(d);
      rep.holder_differences.push_back(diff);
      if (diff > 0) {
        lx.push_back(std::log(d));
        ly.push_back(std::log(diff));
      }
    }
    rep.holder_exponent = lx.size() >= 2 ? fit_line(lx, ly).slope : 0.0;
  }
  if (!rep.increments_decreasing)
    throw NoConvergence("Cauchy increments are not decreasing along the mu sequence");
  return rep;
}

SupResult weighted_sup(const DiscreteOperator& H, const VecR& w, double I_lo, double I_hi,
                       double mu_min, double re_step, int candidates) {
  SupResult best;
  auto eval = [&](double re, double mu) {
    ++best.evaluations;
    const double v = weighted_norm(H, cplx(re, mu), w).norm;
    if (v > best.norm) {
      best.norm = v;
      best.z = cplx(re, mu);
    }
    return v;
  };
  const int n = std::max(2, static_cast<int>(std::ceil((I_hi - I_lo) / re_step - 1e-9)) + 1);
  std::vector<double> re(n), vals(n);
  for (int k = 0; k < n; ++k) {
    re[k] = I_lo + (I_hi - I_lo) * k / (n - 1);
    vals[k] = eval(re[k], mu_min);
  }
  // local maxima, best first
  std::vector<int> peaks;
  for (int k = 0; k < n; ++k) {
    const bool left = k == 0 || vals[k] >= vals[k - 1];
    const bool right = k == n - 1 || vals[k] >= vals[k + 1];
    if (left && right) peaks.push_back(k);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return vals[a] > vals[b]; });
  if (static_cast<int>(peaks.size()) > candidates) peaks.resize(candidates);
  for (int k : peaks) {
    const double lo = re[std::max(0, k - 1)], hi = re[std::min(n - 1, k + 1)];
    if (hi <= lo) continue;
    std::uintmax_t iters = 60;
    boost::math::tools::brent_find_minima([&](double x) { return -eval(x, mu_min); }, lo, hi, 30,
                                          iters);
  }
  // fixed 15-point reference grid
  for (int a = 0; a < 5; ++a)
    for (double f : {1.0, 2.0, 4.0}) eval(I_lo + (I_hi - I_lo) * a / 4.0, f * mu_min);
  return best;
}

SweepResult scaling_sweep(const SweepSetup& setup, const std::vector<double>& h_list,
                          int workers) {
  if (h_list.size() < 2) throw PreconditionViolated("need at least two h values");
  SweepResult res;
  res.rows.resize(h_list.size());
  parallel_for(static_cast<int>(h_list.size()), workers, [&](int idx) {
    const double h = h_list[idx];
    const SemiclassicalParams par = make_params(h, setup.nu_law);
    HamiltonianOptions ho = setup.ham;
    ho.e_max = std::max(ho.e_max, setup.I_hi);
    const Hamiltonian ham = build_hamiltonian(setup.grid, setup.pot, par, ho);
    const VecR w = weight_diagonal(setup.grid, setup.s);
    const double step = std::min(setup.re_step_max, par.nu() / 4.0);
    const SupResult sup = weighted_sup(ham.H, w, setup.I_lo, setup.I_hi, setup.mu_min, step,
                                       setup.refine_candidates);
    SweepRow row;
    row.h = h;
    row.nu = par.nu();
    row.nu_tilde = par.nu_tilde();
    row.re_z = sup.z.real();
    row.im_z = sup.z.imag();
    row.s = setup.s;
    row.norm = sup.norm;
    row.z_evaluations = sup.evaluations;
    if (setup.grid_gate) {
      const Grid fine = make_grid(setup.grid.x_min, setup.grid.x_max, 2 * setup.grid.n_points - 1);
      const Hamiltonian hf = build_hamiltonian(fine, setup.pot, par, ho);
      const VecR wf = weight_diagonal(fine, setup.s);
      // resonance peaks move with the grid; compare sup against sup
      const SupResult fs = weighted_sup(hf.H, wf, setup.I_lo, setup.I_hi, setup.mu_min, step,
                                        setup.refine_candidates);
      row.refined_norm = fs.norm;
      row.grid_converged = std::abs(fs.norm - sup.norm) <= setup.gate_tol * sup.norm;
    } else {
      row.refined_norm = row.norm;
      row.grid_converged = true;
    }
    res.rows[idx] = row;
  });
  std::vector<double> x, y;
  for (const auto& r : res.rows) {
    x.push_back(std::log(1.0 / (r.h * r.nu_tilde)));
    y.push_back(std::log(r.norm));
  }
  res.fit = fit_line(x, y);
  res.grid_converged = true;
  for (std::size_t k = 0; k < res.rows.size(); ++k) {
    res.rows[k].residual = y[k] - (res.fit.intercept + res.fit.slope * x[k]);
    res.grid_converged = res.grid_converged && res.rows[k].grid_converged;
  }
  return res;
}

double negative_projection_estimate(const DiscreteOperator& H, const DiscreteOperator& A, cplx z,
                                    double s) {
  const MatC Ad = A.to_dense();
  if ((Ad - Ad.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw PreconditionViolated("A must be hermitian");
  VecR lam;
  MatC V;
  lapack::heevd(0.5 * (Ad + Ad.adjoint()), lam, V);
  const int n = static_cast<int>(lam.size());
  VecC neg(n), bracket(n);
  for (int i = 0; i < n; ++i) {
    neg[i] = lam[i] < 0 ? 1.0 : 0.0;
    bracket[i] = std::pow(1.0 + lam[i] * lam[i], -s / 2.0);
  }
  if (neg.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const MatC P = V * neg.asDiagonal() * V.adjoint();
  const MatC Bk = V * bracket.asDiagonal() * V.adjoint();
  const MatC Hd = H.to_dense();
  Eigen::PartialPivLU<MatC> lu(Hd - z * MatC::Identity(n, n));
  const MatC RB = lu.solve(Bk);
  return dense_norm2(P * RB);
}

}  // namespace dslab
