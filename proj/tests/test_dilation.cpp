#include <cmath>

#include "doctest.h"
#include "dslab/dilation.hpp"

using namespace dslab;

namespace {

DilationSystem scalar_system(double L = 10.0, double spacing = 1e-3) {
  return make_dilation_system(MatC::Constant(1, 1, 0.5), VecR::Constant(1, 0.25), 1.0, 1.0, L, spacing);
}

DilationSystem three_site(double v2_mid, double L = 8.0) {
  MatC H1(3, 3);
  H1 << 1.0, 0.3, 0.0, 0.3, 0.5, cplx(0.0, 0.2), 0.0, cplx(0.0, -0.2), -0.4;
  VecR v2(3);
  v2 << 0.0, v2_mid, 0.1;
  return make_dilation_system(H1, v2, 0.5, 0.5, L, 2e-3);
}

}  // namespace

TEST_CASE("coupling and dissipative part") {
  const DilationSystem sys = three_site(0.4);
  CHECK(sys.fibres() == 2);
  CHECK(sys.W[0] == doctest::Approx(std::sqrt(2 * 0.5 * 0.4)));
  const MatC H = sys.dissipative_part();
  CHECK(H(1, 1).imag() == doctest::Approx(-0.5 * 0.4));
  CHECK(H(0, 0).imag() == 0.0);
  CHECK(sys.channel_points() == 4001);
  CHECK_THROWS(make_dilation_system(MatC::Identity(1, 1), VecR::Constant(1, -0.1), 1, 1, 1, 1e-2));
}

TEST_CASE("empty channel data: psi_minus = 0, psi_0 = (H - z)^{-1} phi_0, psi_plus(0) = i W psi_0") {
  const DilationSystem sys = three_site(0.4);
  DilationState phi = zero_state(sys);
  phi.phi_0 << 1.0, cplx(0.2, -0.5), -0.3;
  const cplx z(0.3, 0.6);
  const DilationState psi = dilation_resolvent(sys, z, phi);
  CHECK(psi.phi_minus.cwiseAbs().maxCoeff() == 0.0);
  const VecC direct = (sys.dissipative_part() - z * MatC::Identity(3, 3)).partialPivLu().solve(phi.phi_0);
  CHECK((psi.phi_0 - direct).norm() <= 1e-12);
  for (int f = 0; f < sys.fibres(); ++f)
    CHECK(std::abs(psi.phi_plus(f, 0) - I * sys.W[f] * psi.phi_0[sys.omega[f]]) <= 1e-12);
}

TEST_CASE("without damping the channels decouple") {
  const DilationSystem sys = three_site(0.0);
  CHECK(sys.fibres() == 1);  // only the 0.1 site
  MatC H1(2, 2);
  H1 << 0.2, 0.1, 0.1, -0.3;
  const DilationSystem free = make_dilation_system(H1, VecR::Zero(2), 1.0, 1.0, 5.0, 1e-2);
  CHECK(free.fibres() == 0);
  DilationState phi = zero_state(free);
  phi.phi_0 << 1.0, -1.0;
  const cplx z(0.1, 1.0);
  const DilationState psi = dilation_resolvent(free, z, phi);
  CHECK((psi.phi_0 - (H1 - z * MatC::Identity(2, 2)).inverse() * phi.phi_0).norm() <= 1e-12);
}

TEST_CASE("scalar interior: compressed resolvent is (lambda0 - i h v - z)^{-1}") {
  const DilationSystem sys = scalar_system();
  const ResolventIdentityReport r =
      verify_resolvent_identity(sys, {cplx(0.7, 0.5), cplx(-0.4, 0.8), cplx(1.5, 1.0)}, 4);
  CHECK(r.interior_error <= 1e-10);
  CHECK(r.adjoint_error <= 1e-10);
  CHECK(r.jump_defect <= 1e-10);
  DilationState phi = zero_state(sys);
  phi.phi_0[0] = 1.0;
  const cplx z(0.7, 0.5);
  CHECK(std::abs(dilation_resolvent(sys, z, phi).phi_0[0] - 1.0 / (0.5 - I * 0.25 - z)) <= 1e-12);
}

TEST_CASE("channel quadrature refinement reduces the identity error") {
  double prev = 1e300;
  for (double sp : {8e-3, 4e-3, 2e-3}) {
    const DilationSystem sys = make_dilation_system(
        [] {
          MatC H1(3, 3);
          H1 << 1.0, 0.3, 0.0, 0.3, 0.5, 0.2, 0.0, 0.2, -0.4;
          return H1;
        }(),
        (VecR(3) << 0.3, 0.0, 0.6).finished(), 0.5, 0.5, 10.0, sp);
    const double e = verify_resolvent_identity(sys, {cplx(1.0, 0.5)}, 4).max_error;
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("truncation guard") {
  const DilationSystem sys = scalar_system(2.0, 1e-2);
  DilationState phi = zero_state(sys);
  phi.phi_0[0] = 1.0;
  CHECK_THROWS_AS(dilation_resolvent(sys, cplx(0.5, 1e-3), phi), TruncationError);
  CHECK_THROWS_AS(dilation_resolvent(sys, cplx(0.5, 0.0), phi), PreconditionViolated);
  CHECK_NOTHROW(dilation_resolvent(sys, cplx(0.5, 3.0), phi));
  CHECK_NOTHROW(dilation_resolvent(sys, cplx(0.5, -3.0), phi));
}

TEST_CASE("spectral dilation: hermitian, contraction law, scalar semigroup") {
  const DilationSystem sys = scalar_system(2.0, 1e-2);
  const MatC K = discrete_dilation_matrix(sys, 24);
  CHECK((K - K.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);

  const SemigroupReport r = verify_semigroup_dilation(sys, {0.0, 1.0}, 2000);
  CHECK(r.errors[0] <= 1e-14);
  CHECK(r.max_error <= 1e-6);
  CHECK(r.norm_drift <= 1e-8);
  CHECK_THROWS_AS(verify_semigroup_dilation(sys, {2.5}, 200), FrontReachedBoundary);

  // no damping: both sides are the unitary interior evolution
  MatC H1(2, 2);
  H1 << 0.2, 0.1, 0.1, -0.3;
  const DilationSystem free = make_dilation_system(H1, VecR::Zero(2), 1.0, 1.0, 2.0, 1e-2);
  CHECK(verify_semigroup_dilation(free, {0.5, 1.0}, 200).max_error <= 1e-10);
}
