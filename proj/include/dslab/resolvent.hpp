#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dslab/banded.hpp"
#include "dslab/linalg.hpp"
#include "dslab/quantize.hpp"

namespace dslab {

// Process-wide record of the bound ||(H-z)^{-1} f|| <= ||f|| / Im z over every
// solve with a dissipative operator.
class SolveAudit {
 public:
  static SolveAudit& global();
  void record(double ratio);  // ratio = Im z ||u|| / ||f||
  void reset();
  long solves() const { return solves_.load(); }
  long violations() const { return violations_.load(); }
  double worst_ratio() const;

 private:
  std::atomic<long> solves_{0}, violations_{0};
  mutable std::mutex mu_;
  double worst_ = 0.0;
};

// Factorised (H - z) for a banded operator.
class Resolvent {
 public:
  Resolvent(const DiscreteOperator& H, cplx z, bool dissipative = true);
  VecC solve(const VecC& f) const;
  VecC solve_adjoint(const VecC& f) const;
  cplx z() const { return z_; }
  int size() const { return lu_.size(); }

 private:
  void audit(const VecC& f, const VecC& u) const;
  BandedLU lu_;
  cplx z_;
  bool dissipative_;
};

struct SolveResult {
  VecC u;
  double relative_residual = 0.0;
};
// (H - z) u = f by banded LU; throws SingularSystem, and ToleranceExceeded when
// the relative residual exceeds 1e-10.
SolveResult solve(const DiscreteOperator& H, cplx z, const VecC& f);

struct NormResult {
  double norm = 0.0;
  int iterations = 0;
  std::string method;  // "lanczos" | "dense-svd"
};
// || w (H - z)^{-1} w || for a diagonal weight w.
NormResult weighted_norm(const DiscreteOperator& H, cplx z, const VecR& w,
                         const SvdOptions& opt = {});
NormResult weighted_norm(const DiscreteOperator& H, cplx z, const Grid& grid, double s,
                         const SvdOptions& opt = {});

struct QuadraticCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};
// T = T_R - i T_I with T_I >= 0 and B^*B <= T_I; compares ||B(T-z)^{-1}Q||
// with ||Q(T-z)^{-1}Q||^{1/2}.
QuadraticCheck quadratic_estimate_check(const MatC& T_R, const MatC& T_I, const MatC& B,
                                        const MatC& Q, cplx z);

struct LimitingAbsorptionReport {
  std::vector<double> mu;
  std::vector<double> norms;       // ||F(mu_k)||
  std::vector<double> increments;  // ||F(mu_k) - F(mu_{k+1})||
  bool increments_decreasing = false;
  double limit_norm = 0.0;         // ||F(lambda + i0)|| by extrapolation
  std::vector<double> holder_offsets;
  std::vector<double> holder_differences;
  double holder_exponent = 0.0;
  double holder_target = 0.0;      // (2s-1)/(2s+1)
};
LimitingAbsorptionReport limiting_absorption_scan(const DiscreteOperator& H, const Grid& grid,
                                                  double lambda, double s,
                                                  const std::vector<double>& mu_sequence,
                                                  const std::vector<double>& holder_offsets = {
                                                      0.01, 0.02, 0.04, 0.08});

struct SweepSetup {
  Potential pot;
  NuLaw nu_law;
  Grid grid;
  HamiltonianOptions ham;
  double I_lo = 0.9, I_hi = 1.1;
  double s = 1.0;
  double mu_min = 1e-4;
  double re_step_max = 2e-3;  // dense Re z scan step, further limited by nu/4
  int refine_candidates = 3;
  bool grid_gate = true;
  double gate_tol = 0.02;
};

struct SweepRow {
  double h = 0, nu = 0, nu_tilde = 0, re_z = 0, im_z = 0, s = 0, norm = 0;
  double residual = 0;  // log(norm) minus the fitted line
  bool grid_converged = false;
  double refined_norm = 0;
  int z_evaluations = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  LineFit fit;
  double holder_exponent_fit = -1.0;  // filled only when a LAP scan was attached
  bool grid_converged = false;
};

struct SupResult {
  double norm = 0.0;
  cplx z;
  int evaluations = 0;
};
// sup of the weighted norm over Re z in I at Im z >= mu_min: dense Re z scan,
// bounded Brent refinement around the best candidates, plus the 15-point grid
// (5 Re z x {mu, 2mu, 4mu}).
SupResult weighted_sup(const DiscreteOperator& H, const VecR& w, double I_lo, double I_hi,
                       double mu_min, double re_step, int candidates);

SweepResult scaling_sweep(const SweepSetup& setup, const std::vector<double>& h_list,
                          int workers = 1);

// || 1_{(-inf,0)}(A) (H - z)^{-1} <A>^{-s} || via dense functional calculus.
double negative_projection_estimate(const DiscreteOperator& H, const DiscreteOperator& A, cplx z,
                                    double s);

}  // namespace dslab
