#include <cmath>

#include "doctest.h"
#include "dslab/egorov.hpp"

using namespace dslab;

namespace {

struct Small {
  Grid grid = make_grid(-4, 4, 160);
  double h = 0.25;
  Hamiltonian ham;
  explicit Small(const char* v2 = "none") {
    HamiltonianOptions o;
    o.stencil_order = 4;
    o.sponge.strength = 4.0;
    ham = build_hamiltonian(grid, make_potential("gaussian_bump", v2), make_params(h, NuLaw::parse("h")), o);
  }
  PropagatorPlan plan(PropagatorMethod m = PropagatorMethod::Eigendecomposition) const {
    PropagatorPlan p;
    p.method = m;
    p.h = h;
    p.t_final = 2.0;
    p.dt_quantum = 1e-3;
    return p;
  }
};

}  // namespace

TEST_CASE("propagator semigroup law and contraction") {
  const Small s("well_centered");
  const Propagator U(s.ham.H, s.plan());
  const VecC psi = coherent_state(s.grid, -1.0, 0.8, 0.5, s.h) * std::sqrt(s.grid.spacing());
  const VecC a = U.apply(0.7, U.apply(0.5, psi));
  const VecC b = U.apply(1.2, psi);
  CHECK((a - b).norm() <= 1e-10);
  CHECK((U.apply(0.0, psi) - psi).norm() <= 1e-12);
  double prev = psi.norm();
  for (double t : {0.2, 0.4, 0.8, 1.6}) {
    const double n = U.apply(t, psi).norm();
    CHECK(n <= prev + 1e-12);
    prev = n;
  }
  CHECK(prev < 0.999);  // the well damps
}

TEST_CASE("implicit midpoint agrees with the eigendecomposition") {
  const Small s("well_centered");
  const VecC psi = coherent_state(s.grid, 0.5, -0.6, 0.6, s.h) * std::sqrt(s.grid.spacing());
  const VecC a = Propagator(s.ham.H, s.plan()).apply(0.5, psi);
  const VecC b = Propagator(s.ham.H, s.plan(PropagatorMethod::ImplicitMidpoint)).apply(0.5, psi);
  CHECK((a - b).norm() <= 1e-3);
}

TEST_CASE("without damping the interior evolution is unitary and Heisenberg operators are hermitian") {
  HamiltonianOptions o;
  o.sponge.enabled = false;
  o.resolution_guard = 1.0;
  const Grid g = make_grid(-4, 4, 128);
  const double h = 0.25;
  const Hamiltonian ham =
      build_hamiltonian(g, make_potential("gaussian_bump", "none"), make_params(h, NuLaw::parse("h")), o);
  PropagatorPlan p;
  p.h = h;
  const Propagator U(ham.H, p);
  const MatC M = U.matrix(0.8);
  CHECK((M.adjoint() * M - MatC::Identity(128, 128)).cwiseAbs().maxCoeff() <= 1e-10);
  const MatC Ht = heisenberg(ham.H, p, g, gaussian_symbol(0.0, 0.5, 0.8), 0.8);
  CHECK((Ht - Ht.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("classical symbol table follows the free flow with constant damping") {
  const Symbol a = gaussian_symbol(0.2, 0.4, 0.7);
  ClassicalSymbolTable::Lattice lat;
  lat.spacing = 0.02;
  const double t = 0.6;
  const ClassicalSymbolTable tab(make_potential("free", "constant(0.5)"), a, t, lat);
  double worst = 0, worst1 = 0;
  for (double x : {-1.3, -0.21, 0.0, 0.77, 1.5})
    for (double xi : {-0.9, -0.13, 0.4, 1.1}) {
      const double exact = a.f(x + 2 * t * xi, xi);
      worst = std::max(worst, std::abs(tab.eval(x, xi, false) - exact * std::exp(-2 * 0.5 * t)));
      worst1 = std::max(worst1, std::abs(tab.eval(x, xi, true) - exact * std::exp(-0.5 * t)));
    }
  CHECK(worst <= 1e-5);
  CHECK(worst1 <= 1e-5);
  CHECK(tab.eval(100.0, 0.0, false) == 0.0);
  CHECK(tab.t() == t);
}

TEST_CASE("smooth window, coherent states, test subspace") {
  CHECK(smooth_window(1.0, 0.5, 1.5, 0.2) == 1.0);
  CHECK(smooth_window(0.4, 0.5, 1.5, 0.2) == 0.0);
  CHECK(smooth_window(1.6, 0.5, 1.5, 0.2) == 0.0);
  double prev = 0;
  for (double E = 0.5; E <= 0.7; E += 0.01) {
    const double v = smooth_window(E, 0.5, 1.5, 0.2);
    CHECK(v >= prev);
    CHECK(v <= 1.0);
    prev = v;
  }
  const Grid g = make_grid(-5, 5, 400);
  const VecC psi = coherent_state(g, 0.3, 1.0, 0.7, 0.1);
  CHECK(psi.squaredNorm() * g.spacing() == doctest::Approx(1.0).epsilon(1e-14));
  const MatC P = test_subspace(g, -2.5, 2.5, 1.6, 0.1);
  CHECK(P.cols() == static_cast<int>(std::floor(1.6 * 5.0 / (kPi * 0.1))));
  CHECK((P.adjoint() * P - MatC::Identity(P.cols(), P.cols())).cwiseAbs().maxCoeff() <= 1e-12);
  for (int i = 0; i < g.n_points; ++i)
    if (std::abs(g.node(i)) >= 2.5) CHECK(P.row(i).norm() <= 1e-14);
}

// quadratic Hamiltonian: the correspondence is exact up to discretisation
TEST_CASE("Egorov error for a free particle is at the discretisation floor") {
  EgorovSetup es;
  es.pot = make_potential("free", "none");
  es.grid = make_grid(-3.5, 3.5, 512);
  es.ham.stencil_order = 8;
  es.ham.sponge.strength = 4.0;
  es.a = gaussian_symbol(0.0, 0.6, 0.7);
  es.t = 0.5;
  es.window_lo = -1.5;
  es.window_hi = 1.5;
  es.lattice.x_lo = -3.5;
  es.lattice.x_hi = 3.5;
  es.lattice.spacing = 0.03;
  const EgorovResult r = egorov_compare(es, {0.25, 0.125});
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    CHECK(row.error <= 1e-4);
    CHECK(row.mixed_error <= 1e-4);
  }
}
