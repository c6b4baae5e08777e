#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dslab/classical.hpp"
#include "dslab/linalg.hpp"
#include "dslab/quantize.hpp"

namespace dslab {

enum class PropagatorMethod { Eigendecomposition, ImplicitMidpoint };

struct PropagatorPlan {
  PropagatorMethod method = PropagatorMethod::Eigendecomposition;
  double dt_quantum = 1e-3;
  double t_final = 1.0;
  double h = 0.1;
};

// U(t) = exp(-i t H / h).
class Propagator {
 public:
  Propagator(const DiscreteOperator& H, const PropagatorPlan& plan);
  MatC apply(double t, const MatC& psi) const;
  VecC apply(double t, const VecC& psi) const;
  // Dense U(t) (eigendecomposition method only).
  MatC matrix(double t) const;
  const PropagatorPlan& plan() const { return plan_; }

 private:
  PropagatorPlan plan_;
  // eigendecomposition: H = V diag(lam) V^{-1}
  VecC lam_;
  MatC V_;
  std::unique_ptr<Eigen::PartialPivLU<MatC>> Vlu_;
  bool unitary_basis_ = false;
  // implicit midpoint
  BandedMatrix band_;
  MatC dense_;
};

VecC propagate(const DiscreteOperator& H, const PropagatorPlan& plan, const VecC& psi0);

// U(t)^* Op(a) U(t) as a dense matrix.
MatC heisenberg(const DiscreteOperator& H, const PropagatorPlan& plan, const Grid& grid,
                const Symbol& a, double t);

// Tabulated (a o phi^t) q(t) and (a o phi^t) q1(t) on an (x, xi) lattice,
// bicubic (Catmull-Rom) interpolation, zero outside the lattice.
class ClassicalSymbolTable {
 public:
  struct Lattice {
    double x_lo = -4, x_hi = 4, xi_lo = -3, xi_hi = 3, spacing = 0.02;
  };
  ClassicalSymbolTable(const Potential& pot, const Symbol& a, double t, const Lattice& lat,
                       double flow_dt = 2e-3, int workers = 1);
  double eval(double x, double xi, bool mixed) const;
  void eval_row(double x, const std::vector<double>& xi, bool mixed, std::vector<double>& out) const;
  double t() const { return t_; }

 private:
  double sample(const std::vector<double>& tab, int i, int j) const;
  double t_;
  Lattice lat_;
  int nx_, nxi_;
  std::vector<double> bq_, bq1_;
};

struct EgorovSetup {
  Potential pot;
  Grid grid;
  HamiltonianOptions ham;
  Symbol a;
  double t = 1.0;
  // interior test subspace: sine modes on [window_lo, window_hi] with |xi| <= xi_band
  double window_lo = -2.5, window_hi = 2.5, xi_band = 1.6;
  ClassicalSymbolTable::Lattice lattice;
  double flow_dt = 2e-3;
};

struct EgorovRow {
  double h = 0, error = 0, mixed_error = 0;
  int subspace_dim = 0;
};
struct EgorovResult {
  std::vector<EgorovRow> rows;
  LineFit fit, mixed_fit;
};

// Orthonormal band-limited interior test vectors.
MatC test_subspace(const Grid& grid, double lo, double hi, double xi_band, double h);

// E(h) = || P^*(U^* Op(a) U - Op((a o phi^t) q)) P || and the one-sided variant
// with exp(-it H1/h) on the left and q1. nu(h) = h is assumed by q.
EgorovResult egorov_compare(const EgorovSetup& setup, const std::vector<double>& h_list,
                            int workers = 1);

struct SmoothingSetup {
  Potential pot;
  Grid grid;
  HamiltonianOptions ham;
  NuLaw nu_law;
  double s = 1.0;
  double chi_lo = 0.5, chi_hi = 1.5, chi_ramp = 0.2;  // smooth plateau window
  // coherent state exp(-(x-x0)^2/(2 sigma^2) + i xi0 x / h)
  double x0 = 0.0, xi0 = 1.0, sigma = 1.0;
  double dt = 1e-3;
  double sample_every = 0.05;
  double tail_threshold = 1e-12;
  double T_max = 400.0;
};
struct SmoothingRow {
  double h = 0, value = 0, T = 0, tail = 0;
};
struct SmoothingResult {
  std::vector<SmoothingRow> rows;
  double max_min_ratio = 0.0;
};

// Smooth cutoff equal to 1 on [lo+ramp, hi-ramp], supported in [lo, hi].
double smooth_window(double E, double lo, double hi, double ramp);

// int_0^T || <x>^{-s} chi(H1) U(t) psi ||^2 dt for one h; T grows until the
// integrand falls below tail_threshold * ||psi||^2.
SmoothingRow smoothing_integral_single(const SmoothingSetup& setup, double h, const VecC& psi0);
VecC coherent_state(const Grid& grid, double x0, double xi0, double sigma, double h);
SmoothingResult smoothing_integral(const SmoothingSetup& setup, const std::vector<double>& h_list,
                                   int workers = 1);

}  // namespace dslab
