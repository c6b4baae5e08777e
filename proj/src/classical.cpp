#include "dslab/classical.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dslab/common.hpp"

namespace dslab {

double energy(const PhasePoint& w, const Potential& pot) { return w.xi * w.xi + pot.V1(w.x); }

double virial_bracket(const PhasePoint& w, const Potential& pot) {
  return 2.0 * w.xi * w.xi - w.x * pot.dV1(w.x);
}

namespace {

// Yoshida triple-jump / six-stage coefficients for composing leapfrog.
const std::vector<double>& composition(int order) {
  static const std::vector<double> o2 = {1.0};
  static const std::vector<double> o4 = [] {
    const double c = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - c), w0 = -c / (2.0 - c);
    return std::vector<double>{w1, w0, w1};
  }();
  static const std::vector<double> o6 = [] {
    const double w1 = -1.17767998417887, w2 = 0.235573213359357, w3 = 0.784513610477560;
    const double w0 = 1.0 - 2.0 * (w1 + w2 + w3);
    return std::vector<double>{w3, w2, w1, w0, w1, w2, w3};
  }();
  switch (order) {
    case 2: return o2;
    case 4: return o4;
    case 6: return o6;
    default: throw ConfigError("flow order must be 2, 4 or 6");
  }
}

inline void leapfrog(PhasePoint& w, const Potential& pot, double tau) {
  w.xi -= 0.5 * tau * pot.dV1(w.x);
  w.x += 2.0 * tau * w.xi;
  w.xi -= 0.5 * tau * pot.dV1(w.x);
}

// Simpson on one step, midpoint position from the cubic Hermite interpolant
// (x' = 2 xi at both ends).
inline double v2_step_integral(const Potential& pot, const PhasePoint& a, const PhasePoint& b,
                               double dt) {
  const double xm = 0.5 * (a.x + b.x) + dt / 8.0 * (2.0 * a.xi - 2.0 * b.xi);
  return dt / 6.0 * (pot.V2(a.x) + 4.0 * pot.V2(xm) + pot.V2(b.x));
}

void guard(const PhasePoint& w, double limit) {
  if (!std::isfinite(w.x) || !std::isfinite(w.xi) || std::abs(w.x) > limit ||
      std::abs(w.xi) > limit)
    throw StepBlowup("phase point left the overflow guard");
}

}  // namespace

void flow_step(PhasePoint& w, const Potential& pot, double dt, int order) {
  for (double c : composition(order)) leapfrog(w, pot, c * dt);
}

FlowEnd flow_to(const PhasePoint& w0, const Potential& pot, double t, double dt, int order) {
  FlowEnd out{w0, 0.0};
  if (t == 0.0) return out;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt - 1e-9)));
  const double h = t / steps;
  for (int k = 0; k < steps; ++k) {
    const PhasePoint prev = out.w;
    flow_step(out.w, pot, h, order);
    out.damping_integral += v2_step_integral(pot, prev, out.w, h);
  }
  return out;
}

Trajectory integrate_flow(const PhasePoint& w0, const Potential& pot, const FlowParams& params) {
  if (!(params.dt > 0 && params.t_max > 0 && params.r_escape > 0))
    throw ConfigError("flow parameters must be positive");
  Trajectory tr;
  tr.energy0 = energy(w0, pot);
  const int steps = static_cast<int>(std::llround(params.t_max / params.dt));
  const int stride = std::max(1, params.record_stride);

  struct Half {
    std::vector<double> t, integral;
    std::vector<PhasePoint> pts;
    double max_abs_x = 0.0, min_v2 = 1e300, max_v2 = 0.0, drift = 0.0;
  };
  auto run = [&](double sign) {
    Half hf;
    PhasePoint w = w0;
    double integral = 0.0;
    hf.max_abs_x = std::abs(w.x);
    hf.min_v2 = hf.max_v2 = pot.V2(w.x);
    for (int k = 1; k <= steps; ++k) {
      const PhasePoint prev = w;
      flow_step(w, pot, sign * params.dt, params.order);
      guard(w, params.overflow_guard);
      integral += v2_step_integral(pot, prev, w, params.dt);
      const double v2 = pot.V2(w.x);
      hf.min_v2 = std::min(hf.min_v2, v2);
      hf.max_v2 = std::max(hf.max_v2, v2);
      hf.max_abs_x = std::max(hf.max_abs_x, std::abs(w.x));
      hf.drift = std::max(hf.drift, std::abs(energy(w, pot) - tr.energy0));
      if (k % stride == 0 || k == steps) {
        hf.t.push_back(sign * k * params.dt);
        hf.pts.push_back(w);
        hf.integral.push_back(integral);
      }
    }
    return hf;
  };
  const Half fwd = run(+1.0), bwd = run(-1.0);

  for (std::size_t i = bwd.t.size(); i-- > 0;) {
    tr.times.push_back(bwd.t[i]);
    tr.points.push_back(bwd.pts[i]);
    tr.q_values.push_back(std::exp(-2.0 * bwd.integral[i]));
    tr.q1_values.push_back(std::exp(-bwd.integral[i]));
  }
  tr.times.push_back(0.0);
  tr.points.push_back(w0);
  tr.q_values.push_back(1.0);
  tr.q1_values.push_back(1.0);
  for (std::size_t i = 0; i < fwd.t.size(); ++i) {
    tr.times.push_back(fwd.t[i]);
    tr.points.push_back(fwd.pts[i]);
    tr.q_values.push_back(std::exp(-2.0 * fwd.integral[i]));
    tr.q1_values.push_back(std::exp(-fwd.integral[i]));
  }
  tr.bounded_future = fwd.max_abs_x <= params.r_escape;
  tr.bounded_past = bwd.max_abs_x <= params.r_escape;
  tr.max_energy_drift = std::max(fwd.drift, bwd.drift);
  tr.min_v2_along = std::min(fwd.min_v2, bwd.min_v2);
  tr.meets_O = std::max(fwd.max_v2, bwd.max_v2) > params.v2_threshold;
  if (tr.max_energy_drift > params.tol_energy)
    throw ToleranceExceeded("energy drift " + std::to_string(tr.max_energy_drift) +
                            " exceeds tolerance; reduce dt");
  return tr;
}

Classification classify_trajectory(const PhasePoint& w0, const Potential& pot,
                                   const FlowParams& params) {
  Classification c;
  c.horizon = params.t_max;
  const int steps = static_cast<int>(std::llround(params.t_max / params.dt));
  double min_v2 = pot.V2(w0.x), max_v2 = min_v2;
  auto run = [&](double sign, double& integral) {
    PhasePoint w = w0;
    for (int k = 1; k <= steps; ++k) {
      const PhasePoint prev = w;
      flow_step(w, pot, sign * params.dt, params.order);
      guard(w, params.overflow_guard);
      integral += v2_step_integral(pot, prev, w, params.dt);
      const double v2 = pot.V2(w.x);
      min_v2 = std::min(min_v2, v2);
      max_v2 = std::max(max_v2, v2);
      if (std::abs(w.x) > params.r_escape) return false;
    }
    if (std::abs(w.x) > 0.5 * params.r_escape)
      throw UndeterminedStatus("horizon reached with |x| = " + std::to_string(std::abs(w.x)) +
                               " inside the escape band");
    return true;
  };
  double back_integral = 0.0;
  c.bounded_future = run(+1.0, c.damping_integral);
  c.bounded_past = run(-1.0, back_integral);
  c.meets_O = max_v2 > params.v2_threshold;
  c.min_v2_along = min_v2;
  return c;
}

double estimate_escape_radius(const Potential& pot, double E, double r_max, int samples) {
  double radius = 0.0;
  // scan inward: the answer is the last radius where the condition fails
  for (int i = samples; i >= 0; --i) {
    const double r = r_max * i / samples;
    const double worst = std::max(std::abs(2.0 * pot.V1(r) + r * pot.dV1(r)),
                                  std::abs(2.0 * pot.V1(-r) - r * pot.dV1(-r)));
    if (worst > E / 2.0) {
      radius = r;
      break;
    }
  }
  return std::max(2.0 * radius, 1.0);
}

PhasePoint project_to_shell(const PhasePoint& w, double E, const Potential& pot) {
  PhasePoint p = w;
  for (int it = 0; it < 100; ++it) {
    const double f = energy(p, pot) - E;
    if (std::abs(f) <= 1e-15 * std::max(1.0, std::abs(E))) break;
    const double gx = pot.dV1(p.x), gxi = 2.0 * p.xi;
    const double g2 = gx * gx + gxi * gxi;
    if (g2 == 0.0) throw EmptyShell("critical point of p; cannot project");
    p.x -= f * gx / g2;
    p.xi -= f * gxi / g2;
  }
  return p;
}

DampingReport damping_condition_check(double E, const Potential& pot, const FlowParams& params,
                                      int n_samples) {
  if (!(E > 0)) throw PreconditionViolated("energy must be positive");
  DampingReport rep;
  int meeting = 0;
  double min_int = 1e300;
  const double R = params.r_escape;
  for (int i = 0; i < n_samples; ++i) {
    const double x = -R + 2.0 * R * (i + 0.5) / n_samples;
    const double k2 = E - pot.V1(x);
    if (k2 <= 0) continue;
    for (double sgn : {1.0, -1.0}) {
      const PhasePoint w{x, sgn * std::sqrt(k2)};
      ++rep.sampled;
      const Classification c = classify_trajectory(w, pot, params);
      if (c.bounded_future && c.bounded_past) {
        rep.bounded_orbits.push_back(w);
        if (c.meets_O) ++meeting;
        min_int = std::min(min_int, c.damping_integral);
      }
    }
  }
  if (rep.sampled == 0) throw EmptyShell("V1 > E at every sampled point");
  if (rep.bounded_orbits.empty()) {
    rep.verdict = "no bounded orbits";
    rep.fraction_meeting_O = 1.0;
    rep.min_bounded_integral = 0.0;
  } else {
    rep.fraction_meeting_O = static_cast<double>(meeting) / rep.bounded_orbits.size();
    rep.min_bounded_integral = min_int;
    rep.verdict = meeting == static_cast<int>(rep.bounded_orbits.size()) ? "covered" : "uncovered";
  }
  return rep;
}

namespace {

double backward_integral(const PhasePoint& z, const Potential& pot,
                         const std::function<double(const PhasePoint&)>& g, double T, double dt,
                         PhasePoint* end = nullptr) {
  if (T <= 0.0) {
    if (end) *end = z;
    return 0.0;
  }
  int n = static_cast<int>(std::ceil(T / dt));
  n += n % 2;
  const double h = T / n;
  PhasePoint w = z;
  double acc = g(w);
  for (int k = 1; k <= n; ++k) {
    flow_step(w, pot, -h, 6);
    acc += (k == n ? 1.0 : (k % 2 ? 4.0 : 2.0)) * g(w);
  }
  if (end) *end = w;
  return acc * h / 3.0;
}

}  // namespace

EscapeCorrection escape_correction(const PhasePoint& w, const Potential& pot,
                                   const std::function<double(const PhasePoint&)>& g, double T_w,
                                   double dt) {
  EscapeCorrection out;
  PhasePoint end;
  out.f_value = backward_integral(w, pot, g, T_w, dt, &end);
  if (T_w <= 0.0) return out;
  const double delta = dt;
  PhasePoint wp = w, wm = w;
  flow_step(wp, pot, delta, 6);
  flow_step(wm, pot, -delta, 6);
  const double deriv =
      (backward_integral(wp, pot, g, T_w, dt) - backward_integral(wm, pot, g, T_w, dt)) /
      (2.0 * delta);
  out.bracket_residual = std::abs(deriv - (g(w) - g(end)));
  return out;
}

double mourre_symbol_infimum(double E, double eps, const Potential& pot, double C_V,
                             int shell_samples, double r_max) {
  if (C_V < 0) throw PreconditionViolated("C_V must be nonnegative");
  const double R = r_max > 0 ? r_max : estimate_escape_radius(pot, E + eps);
  const int levels = eps > 0 ? 5 : 1;
  double inf = 1e300;
  bool any = false;
  for (int l = 0; l < levels; ++l) {
    const double El = levels == 1 ? E : E - eps + 2.0 * eps * l / (levels - 1);
    for (int i = 0; i < shell_samples; ++i) {
      const double x = -R + 2.0 * R * i / std::max(1, shell_samples - 1);
      const double k2 = El - pot.V1(x);
      if (k2 < 0) continue;
      any = true;
      const PhasePoint w{x, std::sqrt(k2)};
      inf = std::min(inf, virial_bracket(w, pot) + C_V * pot.V2(x));
    }
  }
  if (!any) throw EmptyShell("no sampled point on the energy shell");
  return inf;
}

}  // namespace dslab
