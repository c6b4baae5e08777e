#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "dslab/linalg.hpp"
#include "dslab/quantize.hpp"

using namespace dslab;

namespace {

HamiltonianOptions no_sponge(int order = 2) {
  HamiltonianOptions o;
  o.stencil_order = order;
  o.sponge.enabled = false;
  o.resolution_guard = 1.0;
  return o;
}

// Interior gaussian packet with central momentum xi0.
VecC packet(const Grid& g, double x0, double xi0, double width, double h) {
  VecC u(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.node(i);
    u[i] = std::exp(-std::pow((x - x0) / width, 2) + I * xi0 * x / h);
  }
  return u / u.norm();
}

}  // namespace

TEST_CASE("grid and semiclassical parameters") {
  const Grid g = make_grid(-1, 1, 9);
  CHECK(g.spacing() == doctest::Approx(0.25));
  CHECK(g.node(8) == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_grid(-1, 1, 7), ConfigError);
  CHECK_THROWS_AS(make_grid(1, -1, 16), ConfigError);

  const SemiclassicalParams a = make_params(0.1, NuLaw::parse("h"));
  CHECK(a.nu_tilde() == 1.0);
  CHECK(1.0 / (a.h * a.nu_tilde()) == doctest::Approx(10.0));
  const SemiclassicalParams b = make_params(0.1, NuLaw::parse("h^2"));
  CHECK(b.nu_tilde() == doctest::Approx(0.1));
  CHECK(1.0 / (b.h * b.nu_tilde()) == doctest::Approx(100.0));
  CHECK(make_params(0.5, NuLaw::parse("power(2,3)")).nu() == doctest::Approx(0.25));
  CHECK(make_params(0.5, NuLaw::parse("const(0.3)")).nu_tilde() == doctest::Approx(0.6));
  CHECK(make_params(0.25, NuLaw::parse("table(0.25:0.01;0.5:0.1)")).nu() == doctest::Approx(0.01));
  CHECK_THROWS_AS(NuLaw::parse("cubic"), ConfigError);
  CHECK_THROWS_AS(make_params(1.5, NuLaw::parse("h")), ConfigError);
}

TEST_CASE("free hamiltonian without sponge is the hermitian (1,-2,1) stencil") {
  const Grid g = make_grid(-2, 2, 64);
  const double h = 0.5;
  const Hamiltonian ham =
      build_hamiltonian(g, make_potential("free", "none"), make_params(h, NuLaw::parse("h")), no_sponge());
  const MatC H = ham.H.to_dense();
  CHECK((H - ham.H1.to_dense()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  const double c = -h * h / (g.spacing() * g.spacing());
  CHECK(H(5, 5).real() == doctest::Approx(-2 * c));
  CHECK(H(5, 6).real() == doctest::Approx(c));
  CHECK(std::abs(H(5, 7)) == 0.0);
}

TEST_CASE("constant damping shifts the diagonal by -i h c") {
  const Grid g = make_grid(-2, 2, 64);
  const Hamiltonian ham = build_hamiltonian(g, make_potential("free", "constant(0.5)"),
                                            make_params(0.25, NuLaw::parse("h")), no_sponge());
  const MatC H = ham.H.to_dense();
  for (int i = 0; i < 64; ++i) CHECK(H(i, i).imag() == doctest::Approx(-0.125));
  CHECK(dissipativity_check(ham.H) == doctest::Approx(-0.125));
  CHECK(std::abs(dissipativity_check(ham.H1)) <= 1e-12);
}

TEST_CASE("Dirichlet spectrum of the free operator") {
  const Grid g = make_grid(-7.5, 7.5, 2048);
  const double h = 0.1;
  const Hamiltonian ham =
      build_hamiltonian(g, make_potential("free", "none"), make_params(h, NuLaw::parse("h")), no_sponge());
  Eigen::SelfAdjointEigenSolver<MatC> es(ham.H1.to_dense(), Eigen::EigenvaluesOnly);
  const double L = 15.0 + 2 * g.spacing();
  for (int m = 1; m <= 5; ++m) {
    const double exact = h * h * std::pow(kPi * m / L, 2);
    CHECK(std::abs(es.eigenvalues()[m - 1] - exact) <= 0.01 * exact);
  }
}

TEST_CASE("resolution guard and stencil orders") {
  const Potential p = make_potential("free", "none");
  CHECK_THROWS_AS(build_hamiltonian(make_grid(-7.5, 7.5, 64), p, make_params(0.01, NuLaw::parse("h")),
                                    HamiltonianOptions{}),
                  ResolutionError);
  HamiltonianOptions bad;
  bad.stencil_order = 3;
  CHECK_THROWS(build_hamiltonian(make_grid(-1, 1, 64), p, make_params(0.5, NuLaw::parse("h")), bad));
  // higher orders approximate -h^2 u'' better on a smooth packet
  const Grid g = make_grid(-5, 5, 512);
  const double h = 0.1;
  const VecC u = packet(g, 0.0, 1.0, 1.0, h);
  VecC exact(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.node(i);
    const cplx a = -2.0 * x + I / h;  // (log u)'
    exact[i] = -h * h * (a * a - 2.0) * u[i];
  }
  double prev = 1e300;
  for (int order : {2, 4, 6, 8}) {
    const double err = (kinetic_matrix(g, h, order).multiply(u) - exact).norm() / exact.norm();
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("sponge is nonnegative, confined to the outer band, and keeps H dissipative") {
  const Grid g = make_grid(-7.5, 7.5, 1024);
  SpongeConfig sc;
  const VecR s = sponge_profile(g, sc);
  for (int i = 0; i < g.n_points; ++i) {
    CHECK(s[i] >= 0);
    if (std::abs(g.node(i)) < 7.5 * (1 - sc.width_fraction)) CHECK(s[i] == 0.0);
  }
  HamiltonianOptions o;
  o.stencil_order = 4;
  const Hamiltonian ham = build_hamiltonian(g, make_potential("double_barrier", "well_centered"),
                                            make_params(0.1, NuLaw::parse("h")), o);
  CHECK(dissipativity_check(ham.H) <= 1e-12);
  CHECK(ham.H1.band.hermitian_defect() <= 1e-12);
}

TEST_CASE("dissipativity flags a growing part") {
  const Grid g = make_grid(-1, 1, 16);
  Hamiltonian ham = build_hamiltonian(g, make_potential("free", "none"), make_params(0.5, NuLaw::parse("h")),
                                      no_sponge());
  VecC d = VecC::Constant(16, I * 0.3);
  ham.H.band.add_diagonal(d);
  CHECK(dissipativity_check(ham.H) > 0);
}

TEST_CASE("weights") {
  const Grid g = make_grid(-std::sqrt(3.0), std::sqrt(3.0), 9);
  const VecR w1 = weight_diagonal(g, 1.0);
  CHECK(w1[4] == doctest::Approx(1.0));
  CHECK(w1[8] == doctest::Approx(0.5));
  const VecR w0 = weight_diagonal(g, 0.0);
  for (int i = 0; i < 9; ++i) CHECK(w0[i] == 1.0);
  const VecR wm = weight_diagonal(g, -1.0);
  for (int i = 0; i < 9; ++i) CHECK(std::abs(w1[i] * wm[i] - 1.0) <= 1e-14);
  const DiscreteOperator W = weight_operator(g, 1.0);
  CHECK(W.role == Role::Weight);
  CHECK((W.to_dense() - W.to_dense().adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("dilation generator: hermitian, plane-wave expectation, commutator with the Laplacian") {
  const Grid g = make_grid(-7.5, 7.5, 2048);
  const double h = 0.1;
  const DiscreteOperator A = dilation_generator(g, h);
  CHECK(A.band.hermitian_defect() <= 1e-12);

  // windowed plane wave centered at x = 2
  const double xi0 = 1.0;
  VecC u(g.n_points);
  double num = 0, den = 0;
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.node(i), win = std::exp(-std::pow((x - 2.0) / 1.5, 2));
    u[i] = win * std::exp(I * xi0 * x / h);
    num += x * xi0 * win * win;
    den += win * win;
  }
  const cplx expect = u.dot(A.apply(u)) / u.squaredNorm();
  CHECK(std::abs(expect - num / den) <= 0.02 * std::abs(num / den));

  // (i/h)[K, A] ~ 2K on band-limited vectors
  const BandedMatrix K = kinetic_matrix(g, h, 2);
  const MatC Kd = K.to_dense(), Ad = A.to_dense();
  const MatC comm = (I / h) * (Kd * Ad - Ad * Kd);
  for (double x0 : {-2.0, 0.0, 1.5}) {
    const VecC v = packet(g, x0, 0.8, 1.0, h);
    const VecC lhs = comm * v, rhs = 2.0 * (Kd * v);
    CHECK((lhs - rhs).norm() <= 0.01 * rhs.norm());
  }
}

TEST_CASE("Weyl quantisation of polynomial symbols") {
  const Grid g = make_grid(-5, 5, 512);
  const double h = 0.1;
  auto zero = [](double) { return 0.0; };
  auto one = [](double) { return 1.0; };
  auto id = [](double x) { return x; };
  const MatC X = weyl_quantize(g, polynomial_symbol("x", id, zero, zero), h).to_dense();
  CHECK((X - MatC(g.nodes().cast<cplx>().asDiagonal())).cwiseAbs().maxCoeff() <= 1e-14);

  // a = xi against the analytic derivative of a packet
  const DiscreteOperator P = weyl_quantize(g, polynomial_symbol("xi", zero, one, zero), h);
  const VecC u = packet(g, 0.3, 0.7, 0.8, h);
  VecC exact(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.node(i);
    exact[i] = -I * h * (-2.0 * (x - 0.3) / 0.64 + I * 0.7 / h) * u[i];
  }
  CHECK((P.apply(u) - exact).norm() <= 0.01 * exact.norm());

  // a = x xi against the dilation generator
  const DiscreteOperator XP = weyl_quantize(g, polynomial_symbol("x xi", zero, id, zero), h);
  const DiscreteOperator A = dilation_generator(g, h);
  for (double x0 : {-1.0, 0.5}) {
    const VecC v = packet(g, x0, 0.9, 0.8, h);
    CHECK((XP.apply(v) - A.apply(v)).norm() <= 0.01 * A.apply(v).norm());
  }
}

TEST_CASE("Weyl quantisation by FFT matches direct quadrature of the kernel") {
  const Grid g = make_grid(-3, 3, 96);
  const double h = 0.2;
  const Symbol a = gaussian_symbol(0.3, 0.5, 0.7);
  const MatC K = weyl_quantize(g, a, h).to_dense();
  CHECK((K - K.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
  // oracle: (dx / 2 pi h) int exp(i (x-y) xi / h) a((x+y)/2, xi) dxi by Simpson on a fine grid
  const double dx = g.spacing();
  double worst = 0;
  for (int j : {10, 40, 47, 60})
    for (int k : {10, 44, 47, 52, 80}) {
      const double x = g.node(j), y = g.node(k), m = 0.5 * (x + y);
      const int N = 4000;
      const double lo = -8, hi = 8, d = (hi - lo) / N;
      cplx acc = 0;
      for (int q = 0; q <= N; ++q) {
        const double xi = lo + q * d;
        const double wq = (q == 0 || q == N) ? 1 : (q % 2 ? 4 : 2);
        acc += wq * std::exp(I * (x - y) * xi / h) * a.f(m, xi);
      }
      acc *= d / 3 * dx / (2 * kPi * h);
      worst = std::max(worst, std::abs(acc - K(j, k)));
    }
  CHECK(worst <= 1e-8);
}

TEST_CASE("Weyl quantisation is linear and rejects slowly decaying symbols") {
  const Grid g = make_grid(-3, 3, 64);
  const double h = 0.25;
  const Symbol a = gaussian_symbol(0.0, 0.4, 0.6), b = gaussian_symbol(1.0, -0.3, 0.5);
  Symbol sum;
  sum.name = "a+b";
  sum.f = [&](double x, double xi) { return a.f(x, xi) + b.f(x, xi); };
  const MatC lhs = weyl_quantize(g, sum, h).to_dense();
  const MatC rhs = weyl_quantize(g, a, h).to_dense() + weyl_quantize(g, b, h).to_dense();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  Symbol slow;
  slow.name = "lorentzian";
  slow.f = [](double, double xi) { return 1.0 / (1.0 + xi * xi); };
  CHECK_THROWS_AS(weyl_quantize(g, slow, h), SymbolDecayError);
}

TEST_CASE("binary export round trip") {
  const Grid g = make_grid(-1, 1, 16);
  const Hamiltonian ham = build_hamiltonian(g, make_potential("gaussian_bump", "constant(0.2)"),
                                            make_params(0.5, NuLaw::parse("h")), no_sponge());
  const std::string path = "dslab_roundtrip_test.bin";
  export_binary(ham.H, path);
  const DiscreteOperator back = import_binary(path);
  CHECK(back.role == Role::H);
  CHECK((back.to_dense() - ham.H.to_dense()).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("higher-order generators are hermitian and more accurate") {
  const Grid g = make_grid(-3, 3, 256);
  const double h = 0.05;
  const VecC u = packet(g, 0.4, 1.0, 0.6, h);
  // A u = -i h (x u' + u/2)
  VecC exact(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.node(i);
    const cplx dlog = -2.0 * (x - 0.4) / 0.36 + I * 1.0 / h;
    exact[i] = -I * h * (x * dlog + 0.5) * u[i];
  }
  double prev = 1e300;
  for (int order : {2, 4, 6, 8}) {
    const DiscreteOperator A = dilation_generator(g, h, order);
    CHECK(A.band.hermitian_defect() <= 1e-12);
    const double err = (A.apply(u) - exact).norm() / exact.norm();
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev <= 1e-5);
  CHECK_THROWS_AS(dilation_generator(g, h, 5), ConfigError);
}
