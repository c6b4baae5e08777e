#include <cmath>

#include "doctest.h"
#include "dslab/classical.hpp"

using namespace dslab;

namespace {
Potential free_pot() { return make_potential("free", "none"); }
}  // namespace

TEST_CASE("potential presets satisfy their sampled invariants") {
  for (const char* v1 : {"free", "gaussian_bump", "double_barrier", "harmonic"})
    for (const char* v2 : {"none", "constant(0.5)", "well_centered", "outside_only"}) {
      const Potential p = make_potential(v1, v2);
      const PotentialCheck c = check_potential(p);
      CHECK(c.v2_nonnegative);
      CHECK(c.max_grad_rel_error <= 1e-6);
      if (p.decaying) CHECK(c.decay_ok);
    }
  CHECK_THROWS_AS(make_potential("nonsense", "none"), ConfigError);
  CHECK_THROWS_AS(make_potential("free", "well_centered(1,2,3,4)"), ConfigError);
}

TEST_CASE("energy and virial bracket on simple points") {
  const Potential shifted = make_potential("gaussian_bump(1,1)", "none");  // V1(0) = 1
  CHECK(energy({0.0, 2.0}, shifted) == doctest::Approx(5.0));
  CHECK(energy({3.0, 0.0}, free_pot()) == 0.0);
  CHECK(virial_bracket({0.7, 1.0}, free_pot()) == doctest::Approx(2.0));
  CHECK(virial_bracket({0.0, 1.0}, shifted) == doctest::Approx(2.0));
}

TEST_CASE("virial bracket equals d/dt (x xi) along the flow") {
  const Potential p = make_potential("double_barrier", "none");
  for (PhasePoint w : {PhasePoint{0.3, 0.9}, PhasePoint{1.8, -0.4}, PhasePoint{-2.2, 1.3}}) {
    const double d = 1e-5;
    const FlowEnd a = flow_to(w, p, d, 1e-6), b = flow_to(w, p, -d, 1e-6);
    const double deriv = (a.w.x * a.w.xi - b.w.x * b.w.xi) / (2 * d);
    CHECK(std::abs(deriv - virial_bracket(w, p)) <= 1e-6);
  }
}

TEST_CASE("shell projection lands on the energy shell") {
  const Potential p = make_potential("double_barrier", "none");
  for (double x : {-2.5, -1.0, 0.0, 0.4, 2.05, 3.3}) {
    const PhasePoint w = project_to_shell({x, 0.8}, 1.0, p);
    CHECK(std::abs(energy(w, p) - 1.0) <= 1e-12);
  }
}

TEST_CASE("free flow is a straight line") {
  FlowParams fp;
  fp.t_max = 10;
  const Trajectory tr = integrate_flow({0.5, 0.75}, free_pot(), fp);
  double err = 0;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    err = std::max(err, std::abs(tr.points[k].x - (0.5 + 1.5 * tr.times[k])));
    err = std::max(err, std::abs(tr.points[k].xi - 0.75));
  }
  CHECK(err <= 1e-12);
  CHECK_FALSE(tr.bounded_future);
  CHECK_FALSE(tr.bounded_past);
}

TEST_CASE("harmonic flow matches the closed form") {
  const Potential p = make_potential("harmonic(1)", "none");
  FlowParams fp;
  fp.t_max = 10;
  const Trajectory tr = integrate_flow({1.0, 0.0}, p, fp);
  double err = 0;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    err = std::max(err, std::abs(tr.points[k].x - std::cos(2 * tr.times[k])));
    err = std::max(err, std::abs(tr.points[k].xi + std::sin(2 * tr.times[k])));
  }
  CHECK(err <= 1e-6);
}

TEST_CASE("constant damping gives q = exp(-2t), q1 = exp(-t/2 * 2)") {
  const Potential p = make_potential("free", "constant(0.5)");
  const FlowEnd e = flow_to({0.0, 1.0}, p, 1.0, 1e-3);
  CHECK(std::exp(-2 * e.damping_integral) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  FlowParams fp;
  fp.t_max = 1.0;
  const Trajectory tr = integrate_flow({0.0, 1.0}, p, fp);
  CHECK(tr.q_values.back() == doctest::Approx(0.367879441171).epsilon(1e-10));
  CHECK(tr.q1_values.back() == doctest::Approx(std::exp(-0.5)).epsilon(1e-10));
}

TEST_CASE("flow invariants: energy, q monotone, q1^2 = q, group law") {
  const Potential p = make_potential("double_barrier", "well_centered");
  FlowParams fp;
  fp.t_max = 20;
  const Trajectory tr = integrate_flow({0.2, 0.95}, p, fp);
  CHECK(tr.max_energy_drift <= fp.tol_energy);
  std::size_t zero = 0;
  while (tr.times[zero] < 0) ++zero;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    CHECK(tr.q_values[k] > 0);
    CHECK(tr.q_values[k] <= 1);
    CHECK(std::abs(tr.q1_values[k] * tr.q1_values[k] - tr.q_values[k]) <= 1e-10);
    if (k > zero) CHECK(tr.q_values[k] <= tr.q_values[k - 1]);
  }
  const PhasePoint w{0.2, 0.95};
  const FlowEnd a = flow_to(flow_to(w, p, 1.3, 1e-3).w, p, 2.1, 1e-3);
  const FlowEnd b = flow_to(w, p, 3.4, 1e-3);
  CHECK(std::hypot(a.w.x - b.w.x, a.w.xi - b.w.xi) <= 10 * fp.tol_energy);
  // orbits avoiding supp V2 keep q = 1
  const Potential far = make_potential("free", "outside_only(1,5,1)");
  fp.t_max = 1.0;
  const Trajectory t2 = integrate_flow({0.0, 0.5}, far, fp);
  for (double q : t2.q_values) CHECK(q == 1.0);
}

TEST_CASE("overflow guard raises StepBlowup") {
  FlowParams fp;
  fp.t_max = 10;
  fp.overflow_guard = 5;
  CHECK_THROWS_AS(integrate_flow({0.0, 1.0}, free_pot(), fp), StepBlowup);
}

TEST_CASE("trajectory classification") {
  FlowParams fp;
  fp.r_escape = 10;
  const Classification f = classify_trajectory({0.0, 1.0}, free_pot(), fp);
  CHECK_FALSE(f.bounded_future);
  CHECK_FALSE(f.bounded_past);

  const Potential db = make_potential("double_barrier(2,2,0.15)", "well_centered(3,1)");
  const PhasePoint w = project_to_shell({0.0, 1.0}, 1.0, db);
  const Classification c = classify_trajectory(w, db, fp);
  CHECK(c.bounded_future);
  CHECK(c.bounded_past);
  CHECK(c.meets_O);
  CHECK(c.min_v2_along > 0);
  // classification is stable under dt/2
  FlowParams half = fp;
  half.dt = fp.dt / 2;
  CHECK(classify_trajectory(w, db, half).meets_O == c.meets_O);
}

TEST_CASE("damping condition verdicts") {
  FlowParams fp;
  fp.t_max = 20;
  fp.r_escape = 8;
  CHECK(damping_condition_check(1.0, free_pot(), fp, 40).verdict == "no bounded orbits");
  const DampingReport cov =
      damping_condition_check(1.0, make_potential("double_barrier", "well_centered"), fp, 40);
  CHECK(cov.verdict == "covered");
  CHECK(cov.min_bounded_integral > 0);
  const DampingReport unc =
      damping_condition_check(1.0, make_potential("double_barrier", "outside_only(1,5,1)"), fp, 40);
  CHECK(unc.verdict == "uncovered");
  CHECK_THROWS_AS(damping_condition_check(1.0, make_potential("gaussian_bump(5,100)", "none"), fp, 40),
                  EmptyShell);
}

TEST_CASE("no-return beyond the escape radius") {
  const Potential p = make_potential("gaussian_bump", "none");
  const double R = estimate_escape_radius(p, 1.0);
  CHECK(R >= 1.0);
  CHECK(virial_bracket(project_to_shell({R, 1.0}, 1.0, p), p) >= 1.0);
  FlowParams fp;
  fp.t_max = 20;
  const Trajectory tr = integrate_flow({R + 0.1, 1.0}, p, fp);
  std::size_t zero = 0;
  while (tr.times[zero] < 0) ++zero;
  for (std::size_t k = zero + 1; k < tr.times.size(); ++k)
    CHECK(std::abs(tr.points[k].x) >= std::abs(tr.points[k - 1].x) - 1e-12);
}

TEST_CASE("escape correction") {
  auto g = [](const PhasePoint& w) { return std::exp(-(w.x * w.x + w.xi * w.xi)); };
  const EscapeCorrection zero = escape_correction({0.3, 0.7}, free_pot(), g, 0.0);
  CHECK(zero.f_value == 0.0);
  CHECK(zero.bracket_residual == doctest::Approx(0.0).epsilon(1e-12));
  const EscapeCorrection one = escape_correction({0.3, 0.7}, free_pot(), g, 1.0);
  CHECK(one.f_value > 0);
  CHECK(one.bracket_residual <= 1e-5);
  auto far = [](const PhasePoint& w) { return std::abs(w.x - 50) < 1 ? 1.0 : 0.0; };
  CHECK(escape_correction({0.0, 0.5}, free_pot(), far, 1.0).f_value == 0.0);
}

TEST_CASE("symbol-level Mourre infimum") {
  CHECK(mourre_symbol_infimum(1.0, 0.0, free_pot(), 0.0, 200) == doctest::Approx(2.0).epsilon(1e-9));
  const Potential db = make_potential("double_barrier", "well_centered");
  CHECK(mourre_symbol_infimum(1.0, 0.0, db, 0.0, 400) < 0);
  CHECK(mourre_symbol_infimum(1.0, 0.0, db, 1e4, 400) > 0);
}
