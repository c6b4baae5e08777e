#pragma once

#include <cstdint>
#include <vector>

#include "dslab/common.hpp"
#include "dslab/quantize.hpp"

namespace dslab {

// Channel (-inf,0] + interior + channel [0,inf) with fibres over the interior
// indices where V2 > threshold; the coupling is W = sqrt(2 nu V2).
struct DilationSystem {
  MatC H1;                 // selfadjoint interior part (dense, small)
  VecR v2;                 // V2 on the interior grid
  double h = 1.0;
  double nu = 1.0;
  std::vector<int> omega;  // fibre -> interior index
  VecR W;                  // coupling per fibre
  double L = 1.0;          // truncated channel length on each side
  double spacing = 1e-3;   // channel quadrature step

  int fibres() const { return static_cast<int>(omega.size()); }
  int channel_points() const;  // samples on [-L,0] (and on [0,L]), endpoints included
  int interior_size() const { return static_cast<int>(H1.rows()); }
  // H = H1 - i W^2/2 on the fibres (= H1 - i nu V2)
  MatC dissipative_part() const;
};

DilationSystem make_dilation_system(const MatC& H1, const VecR& v2, double h, double nu, double L,
                                    double spacing, double threshold = 1e-12);
// Interior from the quantised operator on a grid (no sponge).
DilationSystem make_dilation_system(const Grid& grid, const Potential& pot, double h, double nu,
                                    double L, double spacing, int stencil_order = 2);

// phi_minus(f, k) at r = -L + k*spacing; phi_plus(f, k) at r = k*spacing.
struct DilationState {
  MatC phi_minus;
  VecC phi_0;
  MatC phi_plus;
};
DilationState zero_state(const DilationSystem& sys);
double state_norm(const DilationSystem& sys, const DilationState& s);

// (K - z)^{-1} by the channel quadrature formulas and one interior solve.
// For Im z > 0 the incoming channel is r < 0; for Im z < 0 the roles swap and
// the interior solve uses H^*. Throws TruncationError if exp(-|Im z| L) > trunc_tol.
DilationState dilation_resolvent(const DilationSystem& sys, cplx z, const DilationState& phi,
                                 double trunc_tol = 1e-2);

// (K - z) Psi - Phi with the channel derivative by finite differences and the
// interior row H1 psi0 - (W/2)(psi_-(0) + psi_+(0)); also returns the jump defect.
struct DilationResidual {
  double channel = 0.0;
  double interior = 0.0;
  double jump = 0.0;
  double total = 0.0;  // K-norm of the full residual
};
DilationResidual dilation_residual(const DilationSystem& sys, cplx z, const DilationState& psi,
                                   const DilationState& phi);

struct ResolventIdentityReport {
  double max_error = 0.0;        // max over z, probes, and both z and conj(z)
  double residual_bound = 0.0;   // max ||(K-z)Psi - Phi|| / (|Im z| ||Psi||)
  double interior_error = 0.0;   // interior block vs direct solve (interior probes)
  double adjoint_error = 0.0;
  double jump_defect = 0.0;
  std::vector<double> probe_errors;
};
ResolventIdentityReport verify_resolvent_identity(const DilationSystem& sys,
                                                  const std::vector<cplx>& z_list,
                                                  int probes = 10, std::uint64_t seed = 7,
                                                  bool channel_probes = true);

struct SemigroupReport {
  double max_error = 0.0;
  std::vector<double> times;
  std::vector<double> errors;
  std::vector<double> raw_errors;  // single resolution, before extrapolation
  double norm_drift = 0.0;         // | ||e^{-itK/h} Phi|| - ||Phi|| |
  int modes = 0;
};
// Spectral channel discretisation (2M+1 Fourier modes per fibre on [-L, L]),
// Chebyshev propagation, extrapolation in M, compared with exp(-itH/h).
SemigroupReport verify_semigroup_dilation(const DilationSystem& sys,
                                          const std::vector<double>& t_list, int modes = 2000,
                                          bool extrapolate = true, double margin = 0.05,
                                          std::uint64_t seed = 11);

// Dense spectral K (small sizes) for hermiticity checks.
MatC discrete_dilation_matrix(const DilationSystem& sys, int modes);

}  // namespace dslab
