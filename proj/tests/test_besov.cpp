#include <cmath>
#include <random>

#include "doctest.h"
#include "dslab/besov.hpp"

using namespace dslab;

namespace {

MatC random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatC a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  return a;
}

// hermitian F with prescribed spectrum spread over several dyadic blocks
MatC random_reference(int n, double spread, std::mt19937_64& rng) {
  const Eigen::HouseholderQR<MatC> qr(random_matrix(n, rng));
  const MatC U = qr.householderQ();
  std::uniform_real_distribution<double> u(-spread, spread);
  VecR lam(n);
  for (int i = 0; i < n; ++i) lam[i] = u(rng);
  const MatC F = U * lam.cast<cplx>().asDiagonal() * U.adjoint();
  return 0.5 * (F + F.adjoint());
}

}  // namespace

TEST_CASE("dyadic block index") {
  CHECK(dyadic_block(0.0) == 0);
  CHECK(dyadic_block(0.999) == 0);
  CHECK(dyadic_block(-1.5) == 1);
  CHECK(dyadic_block(3.0) == 2);
  CHECK(dyadic_block(40.0) == 6);
  // edges go to the lower block
  CHECK(dyadic_block(1.0) == 0);
  CHECK(dyadic_block(2.0) == 1);
  CHECK(dyadic_block(-4.0) == 2);
  CHECK(dyadic_block(4.0 + 5e-13) == 2);
}

TEST_CASE("Besov norms of an eigenvector in block 1") {
  VecR vals(4);
  vals << 0.5, 1.5, -3.0, 6.0;
  const DyadicDecomposition dec = make_dyadic_decomposition(vals);
  VecC u = VecC::Zero(4);
  u[1] = 1.0;
  CHECK(besov_norm(u, dec, 1.0) == doctest::Approx(2.0));
  CHECK(dual_norm(u, dec, 1.0) == doctest::Approx(0.5));
  CHECK(besov_norm(VecC::Zero(4), dec, 1.0) == 0.0);
  CHECK(dual_norm(VecC::Zero(4), dec, 1.0) == 0.0);
}

TEST_CASE("projections partition the identity and norms compare with l2") {
  std::mt19937_64 rng(17);
  const DyadicDecomposition dec = make_dyadic_decomposition(random_reference(48, 20.0, rng));
  MatC sum = MatC::Zero(48, 48);
  for (int j = 0; j < dec.blocks(); ++j) {
    const MatC P = dec.projection(j);
    CHECK((P * P - P).cwiseAbs().maxCoeff() <= 1e-10);
    for (int k = j + 1; k < dec.blocks(); ++k)
      CHECK((P * dec.projection(k)).cwiseAbs().maxCoeff() <= 1e-10);
    sum += P;
  }
  CHECK((sum - MatC::Identity(48, 48)).cwiseAbs().maxCoeff() <= 1e-10);

  for (int k = 0; k < 100; ++k) {
    const VecC u = random_vector(48, 500 + k), v = random_vector(48, 900 + k);
    for (double s : {0.0, 0.5, 1.0}) {
      CHECK(u.norm() <= besov_norm(u, dec, s) * (1 + 1e-12));
      CHECK(dual_norm(v, dec, s) <= v.norm() * (1 + 1e-12));
      CHECK(std::abs(u.dot(v)) <= besov_norm(u, dec, s) * dual_norm(v, dec, s) * (1 + 1e-12));
    }
  }
}

TEST_CASE("operator norm: identity and cross-block rank one") {
  VecR vals(6);
  vals << 0.2, -0.7, 1.2, 1.9, 5.0, -7.0;
  const DyadicDecomposition dec = make_dyadic_decomposition(vals);
  const BesovOperatorNorm id = operator_norm_bs(MatC::Identity(6, 6), dec, 1.0);
  CHECK(id.norm == doctest::Approx(1.0));
  CHECK(id.j == 0);
  CHECK(id.k == 0);
  // e_j e_k^* between block 1 (index 2) and block 3 (index 4), s = 1
  MatC M = MatC::Zero(6, 6);
  M(2, 4) = std::pow(2.0, 1.0) * std::pow(2.0, 3.0);
  const BesovOperatorNorm r = operator_norm_bs(M, dec, 1.0);
  CHECK(r.norm == doctest::Approx(1.0));
  CHECK(r.j == 1);
  CHECK(r.k == 3);
}

TEST_CASE("block formula matches brute force, oracle lower bound, and is monotone in s") {
  std::mt19937_64 rng(31);
  for (int inst = 0; inst < 4; ++inst) {
    const int n = 24 + 8 * inst;
    const DyadicDecomposition dec = make_dyadic_decomposition(random_reference(n, 40.0, rng));
    const MatC M = random_matrix(n, rng);
    double prev = 1e300;
    for (double s : {0.0, 0.5, 1.0, 1.5}) {
      const BesovOperatorNorm b = operator_norm_bs(M, dec, s);
      CHECK(std::abs(b.norm - operator_norm_bs_bruteforce(M, dec, s)) <= 1e-8 * b.norm);
      CHECK(b.norm <= prev * (1 + 1e-12));
      prev = b.norm;
      CHECK(besov_norm(b.extremal, dec, s) == doctest::Approx(1.0).epsilon(1e-10));
      const RandomizedOracle o = besov_randomized_oracle(M, dec, s, b.extremal, 200, 1 + inst, 100);
      CHECK(o.lower_bound <= b.norm * (1 + 1e-10));
      CHECK(o.extremal_value >= 0.99 * b.norm);
    }
  }
}

TEST_CASE("eigenbasis and direct entry points agree") {
  std::mt19937_64 rng(4);
  const DyadicDecomposition dec = make_dyadic_decomposition(random_reference(32, 10.0, rng));
  const MatC M = random_matrix(32, rng);
  const double a = operator_norm_bs(M, dec, 0.5, 2).norm;
  const double b = operator_norm_bs_eigenbasis(dec.basis.adjoint() * M * dec.basis, dec, 0.5).norm;
  CHECK(std::abs(a - b) <= 1e-12 * a);
}

TEST_CASE("resolvent Besov norm decays for large Im z") {
  const Grid g = make_grid(-3, 3, 128);
  HamiltonianOptions o;
  o.sponge.strength = 4.0;
  const double h = 0.25;
  const Hamiltonian ham =
      build_hamiltonian(g, make_potential("free", "none"), make_params(h, NuLaw::parse("h")), o);
  const DyadicDecomposition dec = make_dyadic_decomposition(dilation_generator(g, h).to_dense());
  const double near = resolvent_besov_norm(ham.H, dec, cplx(1.0, 0.01), 0.5).norm;
  const double far = resolvent_besov_norm(ham.H, dec, cplx(1.0, 1e4), 0.5).norm;
  CHECK(far <= 1e-4);
  CHECK(far < near);
  CHECK(parse_besov_reference("ah") == BesovReference::ConjugateA);
  CHECK(parse_besov_reference("x") == BesovReference::Position);
  CHECK_THROWS_AS(parse_besov_reference("p"), ConfigError);
}
