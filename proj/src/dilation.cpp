#include "dslab/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dslab/egorov.hpp"
#include "dslab/linalg.hpp"

namespace dslab {

int DilationSystem::channel_points() const {
  return static_cast<int>(std::llround(L / spacing)) + 1;
}

MatC DilationSystem::dissipative_part() const {
  MatC H = H1;
  for (int f = 0; f < fibres(); ++f) H(omega[f], omega[f]) -= I * 0.5 * W[f] * W[f];
  return H;
}

DilationSystem make_dilation_system(const MatC& H1, const VecR& v2, double h, double nu, double L,
                                    double spacing, double threshold) {
  if (!(L > 0) || !(spacing > 0)) throw ConfigError("channel length and spacing must be positive");
  if (H1.rows() != v2.size()) throw ConfigError("H1 and V2 sizes differ");
  if ((H1 - H1.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw PreconditionViolated("interior H1 must be hermitian");
  DilationSystem s;
  s.H1 = H1;
  s.v2 = v2;
  s.h = h;
  s.nu = nu;
  s.L = L;
  s.spacing = spacing;
  std::vector<double> w;
  for (int i = 0; i < v2.size(); ++i) {
    if (v2[i] < 0) throw PreconditionViolated("V2 must be nonnegative");
    if (v2[i] > threshold) {
      s.omega.push_back(i);
      w.push_back(std::sqrt(2.0 * nu * v2[i]));
    }
  }
  s.W = Eigen::Map<VecR>(w.data(), static_cast<Eigen::Index>(w.size()));
  return s;
}

DilationSystem make_dilation_system(const Grid& grid, const Potential& pot, double h, double nu,
                                    double L, double spacing, int stencil_order) {
  BandedMatrix K = kinetic_matrix(grid, h, stencil_order);
  VecC d(grid.n_points);
  VecR v2(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    d[i] = pot.V1(grid.node(i));
    v2[i] = pot.V2(grid.node(i));
  }
  K.add_diagonal(d);
  return make_dilation_system(K.to_dense(), v2, h, nu, L, spacing);
}

DilationState zero_state(const DilationSystem& sys) {
  const int m = sys.fibres(), nc = sys.channel_points();
  return {MatC::Zero(m, nc), VecC::Zero(sys.interior_size()), MatC::Zero(m, nc)};
}

namespace {

double channel_weight(int k, int nc, double d) { return (k == 0 || k == nc - 1) ? 0.5 * d : d; }

double channel_norm2(const MatC& c, double d) {
  double acc = 0.0;
  const int nc = static_cast<int>(c.cols());
  for (int k = 0; k < nc; ++k) acc += channel_weight(k, nc, d) * c.col(k).squaredNorm();
  return acc;
}

VecC scatter(const DilationSystem& sys, const VecC& fib) {
  VecC out = VecC::Zero(sys.interior_size());
  for (int f = 0; f < sys.fibres(); ++f) out[sys.omega[f]] += fib[f];
  return out;
}

VecC gather(const DilationSystem& sys, const VecC& v) {
  VecC out(sys.fibres());
  for (int f = 0; f < sys.fibres(); ++f) out[f] = v[sys.omega[f]];
  return out;
}

}  // namespace

double state_norm(const DilationSystem& sys, const DilationState& s) {
  const double d = sys.L / (sys.channel_points() - 1);
  return std::sqrt(channel_norm2(s.phi_minus, d) + s.phi_0.squaredNorm() +
                   channel_norm2(s.phi_plus, d));
}

DilationState dilation_resolvent(const DilationSystem& sys, cplx z, const DilationState& phi,
                                 double trunc_tol) {
  if (z.imag() == 0.0) throw PreconditionViolated("Im z must be nonzero");
  if (std::exp(-std::abs(z.imag()) * sys.L) > trunc_tol)
    throw TruncationError("exp(-|Im z| L) = " + std::to_string(std::exp(-std::abs(z.imag()) * sys.L)));
  const int nc = sys.channel_points(), m = sys.fibres(), n = sys.interior_size();
  const double d = sys.L / (nc - 1);
  const cplx e = std::exp(I * z * d);
  DilationState psi = zero_state(sys);
  const MatC H = sys.dissipative_part();
  if (z.imag() > 0) {
    // incoming side r < 0, integrated from -L
    for (int k = 0; k + 1 < nc; ++k)
      psi.phi_minus.col(k + 1) =
          e * psi.phi_minus.col(k) + I * (0.5 * d) * (e * phi.phi_minus.col(k) + phi.phi_minus.col(k + 1));
    const VecC in0 = psi.phi_minus.col(nc - 1);
    const VecC rhs = phi.phi_0 + scatter(sys, sys.W.cast<cplx>().cwiseProduct(in0));
    psi.phi_0 = (H - z * MatC::Identity(n, n)).partialPivLu().solve(rhs);
    psi.phi_plus.col(0) = in0 + I * sys.W.cast<cplx>().cwiseProduct(gather(sys, psi.phi_0));
    for (int k = 0; k + 1 < nc; ++k)
      psi.phi_plus.col(k + 1) =
          e * psi.phi_plus.col(k) + I * (0.5 * d) * (e * phi.phi_plus.col(k) + phi.phi_plus.col(k + 1));
  } else {
    // mirror image: incoming side r > 0, integrated from +L, interior uses H^*
    const cplx eb = std::exp(-I * z * d);
    for (int k = nc - 1; k > 0; --k)
      psi.phi_plus.col(k - 1) =
          eb * psi.phi_plus.col(k) - I * (0.5 * d) * (phi.phi_plus.col(k - 1) + eb * phi.phi_plus.col(k));
    const VecC in0 = psi.phi_plus.col(0);
    const VecC rhs = phi.phi_0 + scatter(sys, sys.W.cast<cplx>().cwiseProduct(in0));
    psi.phi_0 = (H.adjoint() - z * MatC::Identity(n, n)).partialPivLu().solve(rhs);
    psi.phi_minus.col(nc - 1) = in0 - I * sys.W.cast<cplx>().cwiseProduct(gather(sys, psi.phi_0));
    for (int k = nc - 1; k > 0; --k)
      psi.phi_minus.col(k - 1) = eb * psi.phi_minus.col(k) -
                                 I * (0.5 * d) * (phi.phi_minus.col(k - 1) + eb * phi.phi_minus.col(k));
  }
  (void)m;
  return psi;
}

namespace {

// Fourth-order first derivative along the columns of c.
MatC channel_derivative(const MatC& c, double d) {
  const int nc = static_cast<int>(c.cols());
  MatC out(c.rows(), nc);
  for (int k = 0; k < nc; ++k) {
    if (k >= 2 && k <= nc - 3) {
      out.col(k) = (c.col(k - 2) - 8.0 * c.col(k - 1) + 8.0 * c.col(k + 1) - c.col(k + 2)) / (12 * d);
    } else if (k == 0) {
      out.col(k) = (-25.0 * c.col(0) + 48.0 * c.col(1) - 36.0 * c.col(2) + 16.0 * c.col(3) - 3.0 * c.col(4)) / (12 * d);
    } else if (k == 1) {
      out.col(k) = (-3.0 * c.col(0) - 10.0 * c.col(1) + 18.0 * c.col(2) - 6.0 * c.col(3) + c.col(4)) / (12 * d);
    } else if (k == nc - 1) {
      out.col(k) = (25.0 * c.col(nc - 1) - 48.0 * c.col(nc - 2) + 36.0 * c.col(nc - 3) - 16.0 * c.col(nc - 4) + 3.0 * c.col(nc - 5)) / (12 * d);
    } else {
      out.col(k) = (3.0 * c.col(nc - 1) + 10.0 * c.col(nc - 2) - 18.0 * c.col(nc - 3) + 6.0 * c.col(nc - 4) - c.col(nc - 5)) / (12 * d);
    }
  }
  return out;
}

}  // namespace

DilationResidual dilation_residual(const DilationSystem& sys, cplx z, const DilationState& psi,
                                   const DilationState& phi) {
  const int nc = sys.channel_points();
  if (nc < 5) throw PreconditionViolated("channel needs at least five samples");
  const double d = sys.L / (nc - 1);
  DilationResidual r;
  const MatC rm = -I * channel_derivative(psi.phi_minus, d) - z * psi.phi_minus - phi.phi_minus;
  const MatC rp = -I * channel_derivative(psi.phi_plus, d) - z * psi.phi_plus - phi.phi_plus;
  r.channel = std::sqrt(channel_norm2(rm, d) + channel_norm2(rp, d));
  const VecC edge = 0.5 * sys.W.cast<cplx>().cwiseProduct(psi.phi_minus.col(nc - 1) + psi.phi_plus.col(0));
  const VecC ri = sys.H1 * psi.phi_0 - scatter(sys, edge) - z * psi.phi_0 - phi.phi_0;
  r.interior = ri.norm();
  const VecC jump = psi.phi_plus.col(0) - psi.phi_minus.col(nc - 1) -
                    I * sys.W.cast<cplx>().cwiseProduct(gather(sys, psi.phi_0));
  r.jump = jump.norm();
  r.total = std::sqrt(r.channel * r.channel + r.interior * r.interior + r.jump * r.jump);
  return r;
}

ResolventIdentityReport verify_resolvent_identity(const DilationSystem& sys,
                                                  const std::vector<cplx>& z_list, int probes,
                                                  std::uint64_t seed, bool channel_probes) {
  ResolventIdentityReport rep;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = sys.interior_size(), nc = sys.channel_points(), m = sys.fibres();
  const double d = sys.L / (nc - 1), width = sys.L / 8.0;
  // direct interior operator assembled from V2 (not from the coupling W)
  MatC Hdirect = sys.H1;
  for (int i = 0; i < n; ++i) Hdirect(i, i) -= I * sys.nu * sys.v2[i];

  for (cplx z0 : z_list) {
    if (!(z0.imag() > 0)) throw PreconditionViolated("z must lie in the upper half plane");
    for (int p = 0; p < probes; ++p) {
      DilationState phi = zero_state(sys);
      for (int i = 0; i < n; ++i) phi.phi_0[i] = cplx(g(rng), g(rng));
      phi.phi_0.normalize();
      const bool with_channels = channel_probes && (p % 2 == 1) && m > 0;
      if (with_channels)
        for (int f = 0; f < m; ++f) {
          const cplx am(g(rng), g(rng)), ap(g(rng), g(rng));
          const double km = u(rng), kp = u(rng);
          for (int k = 0; k < nc; ++k) {
            const double rm = -sys.L + k * d, rp = k * d;
            phi.phi_minus(f, k) = am * std::exp(-std::pow((rm + sys.L / 2) / width, 2) + I * km * rm);
            phi.phi_plus(f, k) = ap * std::exp(-std::pow((rp - sys.L / 2) / width, 2) + I * kp * rp);
          }
        }
      double worst = 0.0;
      for (cplx z : {z0, std::conj(z0)}) {
        const DilationState psi = dilation_resolvent(sys, z, phi);
        const DilationResidual res = dilation_residual(sys, z, psi, phi);
        // ||Psi - Psi_exact|| <= ||residual|| / |Im z|, relative to the computed state
        const double bound = res.total / (std::abs(z.imag()) * std::max(state_norm(sys, psi), 1e-300));
        rep.residual_bound = std::max(rep.residual_bound, bound);
        rep.jump_defect = std::max(rep.jump_defect, res.jump);
        worst = std::max(worst, bound);
        if (!with_channels) {
          const MatC Hz = (z.imag() > 0 ? Hdirect : MatC(Hdirect.adjoint())) - z * MatC::Identity(n, n);
          const VecC direct = Hz.fullPivLu().solve(phi.phi_0);
          const double err = (psi.phi_0 - direct).norm() / direct.norm();
          worst = std::max(worst, err);
          if (z.imag() > 0)
            rep.interior_error = std::max(rep.interior_error, err);
          else
            rep.adjoint_error = std::max(rep.adjoint_error, err);
        }
      }
      rep.probe_errors.push_back(worst);
      rep.max_error = std::max(rep.max_error, worst);
    }
  }
  return rep;
}

namespace {

struct SpectralDilation {
  const DilationSystem* sys;
  int modes;
  std::vector<double> k;
  VecC g;  // coupling per fibre
  int dim() const { return sys->interior_size() + sys->fibres() * (2 * modes + 1); }

  SpectralDilation(const DilationSystem& s, int M) : sys(&s), modes(M) {
    for (int j = -M; j <= M; ++j) k.push_back(kPi * j / s.L);
    g = (-s.W / std::sqrt(2.0 * s.L)).cast<cplx>();
  }
  VecC apply(const VecC& v) const {
    const int n = sys->interior_size(), nm = 2 * modes + 1;
    VecC out(v.size());
    out.head(n) = sys->H1 * v.head(n);
    for (int f = 0; f < sys->fibres(); ++f) {
      const int off = n + f * nm, idx = sys->omega[f];
      cplx sum = 0.0;
      for (int j = 0; j < nm; ++j) {
        sum += v[off + j];
        out[off + j] = k[j] * v[off + j] + g[f] * v[idx];
      }
      out[idx] += g[f] * sum;
    }
    return out;
  }
  std::pair<double, double> bounds() const {
    Eigen::SelfAdjointEigenSolver<MatC> es(sys->H1, Eigen::EigenvaluesOnly);
    const double gnorm = sys->fibres() ? (sys->W.maxCoeff() / std::sqrt(2.0 * sys->L)) *
                                             std::sqrt(2.0 * modes + 1.0)
                                       : 0.0;
    const double lo = std::min(es.eigenvalues().minCoeff(), -k.back()) - gnorm;
    const double hi = std::max(es.eigenvalues().maxCoeff(), k.back()) + gnorm;
    return {lo, hi};
  }
};

}  // namespace

MatC discrete_dilation_matrix(const DilationSystem& sys, int modes) {
  const SpectralDilation K(sys, modes);
  const int d = K.dim();
  MatC M(d, d);
  for (int j = 0; j < d; ++j) {
    VecC e = VecC::Zero(d);
    e[j] = 1.0;
    M.col(j) = K.apply(e);
  }
  return M;
}

SemigroupReport verify_semigroup_dilation(const DilationSystem& sys,
                                          const std::vector<double>& t_list, int modes,
                                          bool extrapolate, double margin, std::uint64_t seed) {
  for (double t : t_list)
    if (t < 0 || t / sys.h >= sys.L * (1.0 - margin))
      throw FrontReachedBoundary("t/h = " + std::to_string(t / sys.h) +
                                 " reaches the channel end L(1-margin) = " +
                                 std::to_string(sys.L * (1.0 - margin)));
  const int n = sys.interior_size();
  VecC phi0 = random_vector(n, seed);
  phi0.normalize();

  DiscreteOperator H;
  H.is_dense = true;
  H.role = Role::H;
  H.dense = sys.dissipative_part();
  PropagatorPlan plan;
  plan.h = sys.h;
  const Propagator ref(H, plan);

  auto run = [&](int M, double t, double* norm_drift) {
    const SpectralDilation K(sys, M);
    VecC v = VecC::Zero(K.dim());
    v.head(n) = phi0;
    const auto [lo, hi] = K.bounds();
    const VecC out = chebyshev_expm([&](const VecC& x) { return K.apply(x); }, lo, hi, t / sys.h, v);
    if (norm_drift) *norm_drift = std::max(*norm_drift, std::abs(out.norm() - 1.0));
    return VecC(out.head(n));
  };

  SemigroupReport rep;
  rep.modes = modes;
  for (double t : t_list) {
    const VecC exact = ref.apply(t, phi0);
    const VecC fine = run(2 * modes, t, &rep.norm_drift);
    VecC est = fine;
    if (extrapolate) {
      const VecC coarse = run(modes, t, &rep.norm_drift);
      est = 2.0 * fine - coarse;
    }
    rep.times.push_back(t);
    rep.raw_errors.push_back((fine - exact).norm());
    rep.errors.push_back((est - exact).norm());
    rep.max_error = std::max(rep.max_error, rep.errors.back());
  }
  return rep;
}

}  // namespace dslab
