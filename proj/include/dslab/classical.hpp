#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dslab/common.hpp"
#include "dslab/potential.hpp"

namespace dslab {

struct PhasePoint {
  double x = 0.0;
  double xi = 0.0;
};

struct FlowParams {
  double dt = 1e-3;
  double t_max = 50.0;
  double r_escape = 10.0;
  double tol_energy = 1e-8;
  // Symplectic composition order built from the leapfrog step: 2, 4 or 6.
  int order = 6;
  double overflow_guard = 1e8;
  double v2_threshold = 1e-8;
  // keep every k-th sample in recorded trajectories
  int record_stride = 1;
};

struct Trajectory {
  std::vector<double> times;  // increasing, spans [-t_max, t_max]
  std::vector<PhasePoint> points;
  double energy0 = 0.0;
  // damping accumulated between 0 and t: q = exp(-2 |int V2|), q1 = exp(-|int V2|)
  std::vector<double> q_values;
  std::vector<double> q1_values;
  bool bounded_future = false;
  bool bounded_past = false;
  bool meets_O = false;
  double min_v2_along = 0.0;
  double max_energy_drift = 0.0;
};

double energy(const PhasePoint& w, const Potential& pot);
// {p, x xi} = 2 xi^2 - x V1'(x)
double virial_bracket(const PhasePoint& w, const Potential& pot);

// One composed symplectic step of size dt (dt may be negative).
void flow_step(PhasePoint& w, const Potential& pot, double dt, int order);

struct FlowEnd {
  PhasePoint w;
  double damping_integral = 0.0;  // int_0^t V2 along the orbit (signed with t)
};
// Endpoint of the flow at time t (any sign) without recording.
FlowEnd flow_to(const PhasePoint& w0, const Potential& pot, double t, double dt, int order = 6);

Trajectory integrate_flow(const PhasePoint& w0, const Potential& pot, const FlowParams& params);

struct Classification {
  bool bounded_future = false;
  bool bounded_past = false;
  bool meets_O = false;
  double min_v2_along = 0.0;
  double damping_integral = 0.0;  // forward int V2 over the retained orbit
  double horizon = 0.0;           // bounded verdicts hold up to this time only
};
Classification classify_trajectory(const PhasePoint& w0, const Potential& pot,
                                   const FlowParams& params);

// Smallest sampled radius beyond which |2V1 + x V1'| <= E/2, doubled.
double estimate_escape_radius(const Potential& pot, double E, double r_max = 50.0,
                              int samples = 5000);

// Newton projection of w onto the shell p = E along grad p.
PhasePoint project_to_shell(const PhasePoint& w, double E, const Potential& pot);

struct DampingReport {
  std::vector<PhasePoint> bounded_orbits;
  int sampled = 0;
  double fraction_meeting_O = 1.0;
  double min_bounded_integral = 0.0;
  std::string verdict;  // "covered" | "uncovered" | "no bounded orbits"
};
DampingReport damping_condition_check(double E, const Potential& pot, const FlowParams& params,
                                      int n_samples);

struct EscapeCorrection {
  double f_value = 0.0;
  double bracket_residual = 0.0;
};
// f(z) = int_0^T g(phi^{-t} z) dt and the defect of d/dt f(phi^t w) = g(w) - g(phi^{-T} w).
EscapeCorrection escape_correction(const PhasePoint& w, const Potential& pot,
                                   const std::function<double(const PhasePoint&)>& g, double T_w,
                                   double dt = 1e-3);

// inf over sampled p^{-1}([E-eps, E+eps]) of {p, x xi} + C_V V2.
double mourre_symbol_infimum(double E, double eps, const Potential& pot, double C_V,
                             int shell_samples, double r_max = -1.0);

}  // namespace dslab
