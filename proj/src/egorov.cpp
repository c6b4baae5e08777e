#include "dslab/egorov.hpp"

#include <algorithm>
#include <cmath>

#include "dslab/lapack.hpp"
#include "dslab/workers.hpp"

namespace dslab {

Propagator::Propagator(const DiscreteOperator& H, const PropagatorPlan& plan) : plan_(plan) {
  if (plan.method == PropagatorMethod::Eigendecomposition) {
    if (H.size() > 2048) throw PreconditionViolated("eigendecomposition capped at 2048 points");
    const MatC M = H.to_dense();
    if (H.hermitian) {
      VecR ev;
      lapack::heevd(0.5 * (M + M.adjoint()), ev, V_);
      lam_ = ev.cast<cplx>();
      unitary_basis_ = true;
    } else {
      lapack::geev(M, lam_, V_);
      Vlu_ = std::make_unique<Eigen::PartialPivLU<MatC>>(V_);
    }
  } else {
    if (H.is_dense) throw PreconditionViolated("implicit midpoint needs a banded operator");
    if (!(plan.dt_quantum > 0)) throw ConfigError("dt_quantum must be positive");
    band_ = H.band;
  }
}

MatC Propagator::apply(double t, const MatC& psi) const {
  if (t < 0) throw PreconditionViolated("propagation requires t >= 0");
  if (t == 0) return psi;
  if (plan_.method == PropagatorMethod::Eigendecomposition) {
    MatC c = unitary_basis_ ? MatC(V_.adjoint() * psi) : MatC(Vlu_->solve(psi));
    for (Eigen::Index i = 0; i < c.rows(); ++i) c.row(i) *= std::exp(-I * t * lam_[i] / plan_.h);
    return V_ * c;
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(t / plan_.dt_quantum - 1e-9)));
  const double tau = (t / steps) / (2.0 * plan_.h);
  // I + i tau H = i tau (H - (i/tau))
  const BandedLU lu(band_, I / tau);
  MatC out = psi;
  for (Eigen::Index c = 0; c < psi.cols(); ++c) {
    VecC v = psi.col(c);
    for (int k = 0; k < steps; ++k) {
      const VecC rhs = v - I * tau * band_.multiply(v);
      v = lu.solve(rhs) / (I * tau);
    }
    out.col(c) = v;
  }
  return out;
}

VecC Propagator::apply(double t, const VecC& psi) const {
  MatC m = psi;
  return apply(t, m).col(0);
}

MatC Propagator::matrix(double t) const {
  if (plan_.method != PropagatorMethod::Eigendecomposition)
    throw PreconditionViolated("dense propagator needs the eigendecomposition method");
  const int n = static_cast<int>(V_.rows());
  return apply(t, MatC(MatC::Identity(n, n)));
}

VecC propagate(const DiscreteOperator& H, const PropagatorPlan& plan, const VecC& psi0) {
  return Propagator(H, plan).apply(plan.t_final, psi0);
}

MatC heisenberg(const DiscreteOperator& H, const PropagatorPlan& plan, const Grid& grid,
                const Symbol& a, double t) {
  const MatC A = weyl_quantize(grid, a, plan.h).dense;
  const MatC U = Propagator(H, plan).matrix(t);
  return U.adjoint() * A * U;
}

ClassicalSymbolTable::ClassicalSymbolTable(const Potential& pot, const Symbol& a, double t,
                                           const Lattice& lat, double flow_dt, int workers)
    : t_(t), lat_(lat) {
  nx_ = static_cast<int>(std::llround((lat.x_hi - lat.x_lo) / lat.spacing)) + 1;
  nxi_ = static_cast<int>(std::llround((lat.xi_hi - lat.xi_lo) / lat.spacing)) + 1;
  bq_.assign(static_cast<std::size_t>(nx_) * nxi_, 0.0);
  bq1_ = bq_;
  parallel_for(nx_, workers, [&](int i) {
    const double x = lat.x_lo + i * lat.spacing;
    for (int j = 0; j < nxi_; ++j) {
      const double xi = lat.xi_lo + j * lat.spacing;
      const FlowEnd e = flow_to(PhasePoint{x, xi}, pot, t, flow_dt, 4);
      const double av = a.f(e.w.x, e.w.xi);
      bq_[static_cast<std::size_t>(i) * nxi_ + j] = av * std::exp(-2.0 * e.damping_integral);
      bq1_[static_cast<std::size_t>(i) * nxi_ + j] = av * std::exp(-e.damping_integral);
    }
  });
}

double ClassicalSymbolTable::sample(const std::vector<double>& tab, int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= nxi_) return 0.0;
  return tab[static_cast<std::size_t>(i) * nxi_ + j];
}

namespace {

inline void catmull_rom(double f, double w[4]) {
  const double f2 = f * f, f3 = f2 * f;
  w[0] = -0.5 * f3 + f2 - 0.5 * f;
  w[1] = 1.5 * f3 - 2.5 * f2 + 1.0;
  w[2] = -1.5 * f3 + 2.0 * f2 + 0.5 * f;
  w[3] = 0.5 * f3 - 0.5 * f2;
}

}  // namespace

double ClassicalSymbolTable::eval(double x, double xi, bool mixed) const {
  const std::vector<double>& tab = mixed ? bq1_ : bq_;
  const double u = (x - lat_.x_lo) / lat_.spacing, v = (xi - lat_.xi_lo) / lat_.spacing;
  if (u < -1 || v < -1 || u > nx_ || v > nxi_) return 0.0;
  const int i = static_cast<int>(std::floor(u)), j = static_cast<int>(std::floor(v));
  double wx[4], wy[4];
  catmull_rom(u - i, wx);
  catmull_rom(v - j, wy);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double row = 0.0;
    for (int b = 0; b < 4; ++b) row += wy[b] * sample(tab, i - 1 + a, j - 1 + b);
    acc += wx[a] * row;
  }
  return acc;
}

void ClassicalSymbolTable::eval_row(double x, const std::vector<double>& xi, bool mixed,
                                    std::vector<double>& out) const {
  for (std::size_t m = 0; m < xi.size(); ++m) out[m] = eval(x, xi[m], mixed);
}

MatC test_subspace(const Grid& grid, double lo, double hi, double xi_band, double h) {
  const double ell = hi - lo;
  const int modes = static_cast<int>(std::floor(xi_band * ell / (kPi * h)));
  if (modes < 1) throw PreconditionViolated("test subspace is empty");
  MatC B = MatC::Zero(grid.n_points, modes);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.node(i);
    if (x <= lo || x >= hi) continue;
    for (int m = 1; m <= modes; ++m) B(i, m - 1) = std::sin(kPi * m * (x - lo) / ell);
  }
  Eigen::HouseholderQR<MatC> qr(B);
  return qr.householderQ() * MatC::Identity(grid.n_points, modes);
}

EgorovResult egorov_compare(const EgorovSetup& setup, const std::vector<double>& h_list,
                            int workers) {
  if (h_list.empty()) throw PreconditionViolated("empty h list");
  const ClassicalSymbolTable table(setup.pot, setup.a, setup.t, setup.lattice, setup.flow_dt,
                                   workers);
  EgorovResult res;
  res.rows.resize(h_list.size());
  parallel_for(static_cast<int>(h_list.size()), workers, [&](int k) {
    const double h = h_list[k];
    const SemiclassicalParams par = make_params(h, NuLaw::parse("h"));
    const Hamiltonian ham = build_hamiltonian(setup.grid, setup.pot, par, setup.ham);
    PropagatorPlan plan;
    plan.h = h;
    plan.t_final = setup.t;
    const MatC P = test_subspace(setup.grid, setup.window_lo, setup.window_hi, setup.xi_band, h);
    const MatC UP = Propagator(ham.H, plan).apply(setup.t, P);
    const MatC U1P = Propagator(ham.H1, plan).apply(setup.t, P);
    const MatC A = weyl_quantize(setup.grid, setup.a, h).dense;
    auto quantise = [&](bool mixed) {
      return weyl_quantize_batch(
          setup.grid,
          [&](double x, const std::vector<double>& xi, std::vector<double>& out) {
            table.eval_row(x, xi, mixed, out);
          },
          h);
    };
    const MatC AUP = A * UP;
    const MatC Bq = quantise(false), Bq1 = quantise(true);
    EgorovRow row;
    row.h = h;
    row.subspace_dim = static_cast<int>(P.cols());
    row.error = dense_norm2(UP.adjoint() * AUP - P.adjoint() * Bq * P);
    row.mixed_error = dense_norm2(U1P.adjoint() * AUP - P.adjoint() * Bq1 * P);
    res.rows[k] = row;
  });
  std::vector<double> lx, ly, ly1;
  for (const auto& r : res.rows) {
    lx.push_back(std::log(r.h));
    ly.push_back(std::log(r.error));
    ly1.push_back(std::log(r.mixed_error));
  }
  if (lx.size() >= 2) {
    res.fit = fit_line(lx, ly);
    res.mixed_fit = fit_line(lx, ly1);
  }
  return res;
}

double smooth_window(double E, double lo, double hi, double ramp) {
  auto step = [](double u) {  // C-infinity step, 0 for u<=0, 1 for u>=1
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
  };
  return step((E - lo) / ramp) * step((hi - E) / ramp);
}

VecC coherent_state(const Grid& grid, double x0, double xi0, double sigma, double h) {
  VecC psi(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.node(i);
    psi[i] = std::exp(-(x - x0) * (x - x0) / (2 * sigma * sigma) + I * xi0 * x / h);
  }
  return psi / std::sqrt(psi.squaredNorm() * grid.spacing());
}

SmoothingRow smoothing_integral_single(const SmoothingSetup& setup, double h, const VecC& psi0) {
  const SemiclassicalParams par = make_params(h, setup.nu_law);
  const Hamiltonian ham = build_hamiltonian(setup.grid, setup.pot, par, setup.ham);
  const int n = setup.grid.n_points;
  MatR H1r(n, n);
  const MatC H1c = ham.H1.to_dense();
  H1r = H1c.real();
  VecR lam;
  MatR V;
  lapack::syevd(H1r, lam, V);
  VecR chi(n);
  for (int i = 0; i < n; ++i) chi[i] = smooth_window(lam[i], setup.chi_lo, setup.chi_hi, setup.chi_ramp);
  // restrict to the eigenvectors in the window
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (chi[i] > 0) keep.push_back(i);
  MatR Vk(n, keep.size());
  VecR chik(keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    Vk.col(c) = V.col(keep[c]);
    chik[c] = chi[keep[c]];
  }
  const VecR w = weight_diagonal(setup.grid, setup.s);
  const double dx = setup.grid.spacing();
  const double psi_norm2 = psi0.squaredNorm() * dx;

  const int per_sample = std::max(1, static_cast<int>(std::llround(setup.sample_every / setup.dt)));
  const double dt = setup.sample_every / per_sample;
  const double tau = dt / (2.0 * h);
  const BandedLU lu(ham.H.band, I / tau);
  const int block = 128;

  std::vector<double> f;  // integrand samples
  VecC psi = psi0;
  double t = 0.0, below_since = -1.0;
  SmoothingRow row;
  row.h = h;
  bool done = false;
  MatC buf(n, block);
  int filled = 0;
  auto flush = [&]() {
    if (filled == 0) return;
    const MatC Y = Vk * (chik.asDiagonal() * (Vk.transpose() * buf.leftCols(filled)));
    for (int c = 0; c < filled; ++c) f.push_back((w.asDiagonal() * Y.col(c)).squaredNorm() * dx);
    filled = 0;
  };
  buf.col(filled++) = psi;
  while (!done) {
    for (int k = 0; k < per_sample; ++k) {
      const VecC rhs = psi - I * tau * ham.H.band.multiply(psi);
      psi = lu.solve(rhs) / (I * tau);
    }
    t += setup.sample_every;
    buf.col(filled++) = psi;
    if (filled == block) {
      flush();
      // look at the samples just produced
      for (std::size_t k = f.size() - block; k < f.size(); ++k) {
        const double tk = k * setup.sample_every;
        if (f[k] < setup.tail_threshold * psi_norm2) {
          if (below_since < 0) below_since = tk;
        } else {
          below_since = -1.0;
        }
      }
      const double mass = psi.squaredNorm() * dx;
      if (mass < setup.tail_threshold * psi_norm2 ||
          (below_since >= 0 && t - below_since >= 5.0))
        done = true;
      else if (t >= setup.T_max)
        throw TailNotNegligible("integrand " + std::to_string(f.back()) + " at T=" +
                                std::to_string(t));
    }
  }
  flush();
  // composite Simpson (trapezoid on a trailing odd interval)
  const std::size_t K = f.size() - 1;
  const double ds = setup.sample_every;
  double acc = 0.0;
  std::size_t even = K - (K % 2);
  for (std::size_t k = 0; k + 2 <= even; k += 2) acc += ds / 3.0 * (f[k] + 4 * f[k + 1] + f[k + 2]);
  if (K % 2) acc += 0.5 * ds * (f[K - 1] + f[K]);
  row.value = acc;
  row.T = K * ds;
  row.tail = f.back() / psi_norm2;
  return row;
}

SmoothingResult smoothing_integral(const SmoothingSetup& setup, const std::vector<double>& h_list,
                                   int workers) {
  SmoothingResult res;
  res.rows.resize(h_list.size());
  parallel_for(static_cast<int>(h_list.size()), workers, [&](int k) {
    const double h = h_list[k];
    const VecC psi = coherent_state(setup.grid, setup.x0, setup.xi0, setup.sigma, h);
    res.rows[k] = smoothing_integral_single(setup, h, psi);
  });
  double lo = 1e300, hi = 0.0;
  for (const auto& r : res.rows) lo = std::min(lo, r.value), hi = std::max(hi, r.value);
  res.max_min_ratio = lo > 0 ? hi / lo : INFINITY;
  return res;
}

}  // namespace dslab
