#include <cmath>
#include <random>

#include "doctest.h"
#include "dslab/resolvent.hpp"

using namespace dslab;

namespace {

DiscreteOperator dense_op(const MatC& m, Role role = Role::H) {
  const int n = static_cast<int>(m.rows());
  DiscreteOperator op;
  op.role = role;
  op.band = BandedMatrix(n, std::max(n - 1, 0), std::max(n - 1, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) op.band.at(i, j) = m(i, j);
  op.hermitian = (m - m.adjoint()).cwiseAbs().maxCoeff() == 0.0;
  return op;
}

MatC random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatC a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  return a;
}

// T_R - i T_I with T_I >= 0
MatC random_dissipative(int n, std::mt19937_64& rng) {
  const MatC a = random_matrix(n, rng), b = random_matrix(n, rng);
  return 0.5 * (a + a.adjoint()) - I * (b * b.adjoint()) / double(n);
}

Hamiltonian free_small(double h = 0.5, int n = 96) {
  HamiltonianOptions o;
  o.sponge.enabled = false;
  return build_hamiltonian(make_grid(-3, 3, n), make_potential("free", "none"),
                           make_params(h, NuLaw::parse("h")), o);
}

}  // namespace

TEST_CASE("1x1 solves") {
  const SolveResult a = solve(dense_op(MatC::Constant(1, 1, 0.0)), I, VecC::Ones(1));
  CHECK(std::abs(a.u[0] - I) <= 1e-15);
  const SolveResult b = solve(dense_op(MatC::Constant(1, 1, 3.0)), I, VecC::Ones(1));
  CHECK(std::abs(b.u[0] - 1.0 / (3.0 - I)) <= 1e-15);
  CHECK(b.relative_residual <= 1e-10);
}

TEST_CASE("dissipative resolvent bound and audit on random instances") {
  std::mt19937_64 rng(7);
  SolveAudit::global().reset();
  for (int inst = 0; inst < 20; ++inst) {
    const MatC H = random_dissipative(40, rng);
    for (double mu : {1e-2, 0.3, 5.0}) {
      const cplx z(0.3 * inst - 3.0, mu);
      const MatC R = (H - z * MatC::Identity(40, 40)).inverse();
      CHECK(dense_norm2(R) <= (1.0 + 1e-10) / mu);
      const Resolvent res(dense_op(H), z);
      const VecC f = random_vector(40, inst);
      const VecC u = res.solve(f);
      CHECK((u - R * f).norm() <= 1e-9 * u.norm());
      CHECK((res.solve_adjoint(f) - R.adjoint() * f).norm() <= 1e-9 * u.norm());
    }
  }
  CHECK(SolveAudit::global().solves() > 0);
  CHECK(SolveAudit::global().violations() == 0);
}

TEST_CASE("s = 0 on a hermitian matrix gives 1/dist(z, spec)") {
  std::mt19937_64 rng(11);
  const MatC a = random_matrix(40, rng);
  const MatC H = 0.5 * (a + a.adjoint());
  const Eigen::SelfAdjointEigenSolver<MatC> es(H, Eigen::EigenvaluesOnly);
  for (cplx z : {cplx(0.1, 0.05), cplx(2.0, 1.0), cplx(-4.0, 0.01)}) {
    double dist = 1e300;
    for (int i = 0; i < 40; ++i) dist = std::min(dist, std::abs(es.eigenvalues()[i] - z));
    const NormResult r = weighted_norm(dense_op(H), z, VecR::Ones(40));
    CHECK(std::abs(r.norm * dist - 1.0) <= 1e-8);
  }
}

TEST_CASE("diagonal operators have explicit weighted norms") {
  VecR d(8), w(8);
  for (int i = 0; i < 8; ++i) d[i] = 0.5 * i - 1.0, w[i] = 1.0 / (1.0 + i);
  const cplx z(0.2, 0.3);
  double expect = 0;
  for (int i = 0; i < 8; ++i) expect = std::max(expect, w[i] * w[i] / std::abs(d[i] - z));
  const MatC D = d.cast<cplx>().asDiagonal();
  CHECK(weighted_norm(dense_op(D), z, w).norm == doctest::Approx(expect).epsilon(1e-10));
  // 1x1 with v = 0: 1/|z|
  CHECK(weighted_norm(dense_op(MatC::Zero(1, 1)), cplx(0.6, 0.8), VecR::Ones(1)).norm ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weighted norm of the free operator decreases in Im z and in s") {
  const Hamiltonian ham = free_small();
  const Grid g = make_grid(-3, 3, 96);
  double prev = 1e300;
  for (double mu : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
    const double v = weighted_norm(ham.H, cplx(1.0, mu), g, 1.0).norm;
    CHECK(v <= prev * (1 + 1e-10));
    prev = v;
  }
  prev = 1e300;
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    const double v = weighted_norm(ham.H, cplx(1.0, 0.05), g, s).norm;
    CHECK(v <= prev * (1 + 1e-10));
    prev = v;
  }
}

TEST_CASE("first resolvent identity and adjoint symmetry") {
  std::mt19937_64 rng(3);
  const MatC H = random_dissipative(30, rng);
  const DiscreteOperator op = dense_op(H);
  const cplx z(0.4, 0.2), zp(-1.0, 0.7);
  const Resolvent rz(op, z), rzp(op, zp);
  for (int k = 0; k < 5; ++k) {
    const VecC f = random_vector(30, 100 + k);
    const VecC lhs = rz.solve(f) - rzp.solve(f) - (z - zp) * rz.solve(rzp.solve(f));
    CHECK(lhs.norm() <= 1e-8 * f.norm());
  }
  VecR w(30);
  for (int i = 0; i < 30; ++i) w[i] = 1.0 / std::sqrt(1.0 + i);
  const double a = weighted_norm(op, z, w).norm;
  const double b = weighted_norm(dense_op(H.adjoint()), std::conj(z), w).norm;
  CHECK(std::abs(a - b) <= 1e-10 * a);
}

TEST_CASE("quadratic estimate") {
  const MatC zero = MatC::Zero(1, 1), one = MatC::Ones(1, 1);
  const QuadraticCheck q = quadratic_estimate_check(zero, one, one, one, I);
  CHECK(q.lhs == doctest::Approx(0.5));
  CHECK(q.rhs == doctest::Approx(std::sqrt(0.5)));
  CHECK(q.holds);
  const QuadraticCheck q0 = quadratic_estimate_check(zero, one, zero, one, I);
  CHECK(q0.lhs == 0.0);
  CHECK(q0.holds);

  std::mt19937_64 rng(21);
  for (int inst = 0; inst < 50; ++inst) {
    const int n = 1 + inst % 12;
    const MatC a = random_matrix(n, rng), b = random_matrix(n, rng), c = random_matrix(n, rng);
    const MatC TR = 0.5 * (a + a.adjoint()), TI = b * b.adjoint() / double(n);
    const MatC Q = 0.5 * (c + c.adjoint());
    const Eigen::SelfAdjointEigenSolver<MatC> es(TI);
    const MatC B = es.operatorSqrt();
    CHECK(quadratic_estimate_check(TR, TI, B, Q, cplx(0.1 * inst - 2.0, 0.5)).holds);
  }
}

TEST_CASE("limiting absorption on the free operator") {
  const Grid g = make_grid(-7.5, 7.5, 512);
  HamiltonianOptions o;
  o.sponge.strength = 4.0;
  const Hamiltonian ham =
      build_hamiltonian(g, make_potential("free", "none"), make_params(0.25, NuLaw::parse("h")), o);
  const LimitingAbsorptionReport rep =
      limiting_absorption_scan(ham.H, g, 1.0, 1.0, {0.08, 0.04, 0.02, 0.01});
  CHECK(rep.increments_decreasing);
  CHECK(rep.holder_target == doctest::Approx(1.0 / 3.0));
  CHECK(std::isfinite(rep.limit_norm));
  // decay as 1/mu for large mu
  const double a = weighted_norm(ham.H, cplx(1.0, 100.0), g, 1.0).norm;
  const double b = weighted_norm(ham.H, cplx(1.0, 200.0), g, 1.0).norm;
  CHECK(a * 100.0 <= 1.0 + 1e-12);
  CHECK(b / a == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("negative spectral projection estimate") {
  const MatC H1 = MatC::Zero(1, 1);
  CHECK(negative_projection_estimate(dense_op(H1), dense_op(MatC::Constant(1, 1, -1.0), Role::DilationGenerator), I,
                                     2.0) == doctest::Approx(0.5));
  CHECK(negative_projection_estimate(dense_op(H1), dense_op(MatC::Constant(1, 1, 2.0), Role::DilationGenerator), I,
                                     2.0) == 0.0);
  std::mt19937_64 rng(5);
  const MatC a = random_matrix(12, rng);
  const MatC A = a * a.adjoint() + MatC::Identity(12, 12);
  CHECK(negative_projection_estimate(dense_op(random_dissipative(12, rng)), dense_op(A), cplx(0.0, 0.5), 1.0) ==
        0.0);
}

TEST_CASE("weighted sup scan finds the resonance of a diagonal operator") {
  VecR d(8);
  for (int i = 0; i < 8; ++i) d[i] = 0.5 + 0.25 * i;
  MatC D = d.cast<cplx>().asDiagonal();
  const SupResult r = weighted_sup(dense_op(D), VecR::Ones(8), 0.9, 1.1, 1e-3, 2e-3, 3);
  CHECK(r.norm == doctest::Approx(1e3).epsilon(1e-6));
  CHECK(r.z.real() == doctest::Approx(1.0).epsilon(1e-6));
}
