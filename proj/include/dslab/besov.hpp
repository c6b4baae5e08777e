#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dslab/linalg.hpp"
#include "dslab/quantize.hpp"

namespace dslab {

// Dyadic spectral blocks of a hermitian reference operator F:
// block 0 = {|lambda| < 1}, block j = {2^{j-1} <= |lambda| < 2^j}.
// Eigenvalues within 1e-12 of a block edge 2^{j-1} go to the lower block.
struct DyadicDecomposition {
  VecR eigenvalues;
  MatC basis;                            // columns: orthonormal eigenvectors
  std::vector<int> block;                // block index per eigenvalue
  std::vector<std::vector<int>> members; // eigen-indices per block (may be empty)

  int size() const { return static_cast<int>(eigenvalues.size()); }
  int blocks() const { return static_cast<int>(members.size()); }
  MatC projection(int j) const;  // 1_{Omega_j}(F)
  // coefficients in the eigenbasis
  VecC coefficients(const VecC& u) const { return basis.adjoint() * u; }
  VecC block_part(const VecC& u, int j) const;
};

int dyadic_block(double lambda);
DyadicDecomposition make_dyadic_decomposition(const MatC& F);
// F = diag(values) (e.g. the position operator); basis = identity.
DyadicDecomposition make_dyadic_decomposition(const VecR& values);

// sum_j 2^{js} ||1_j u||  and  sup_j 2^{-js} ||1_j v||
double besov_norm(const VecC& u, const DyadicDecomposition& dec, double s);
double dual_norm(const VecC& v, const DyadicDecomposition& dec, double s);

struct BlockEntry {
  int j = 0, k = 0;
  double block_norm = 0.0;  // || 1_j M 1_k ||
  double weighted = 0.0;    // 2^{-js} 2^{-ks} block_norm
};

struct BesovOperatorNorm {
  double norm = 0.0;
  int j = 0, k = 0;  // maximising block pair
  std::vector<BlockEntry> table;
  VecC extremal;     // unit B_s vector attaining the norm
};
// max_{j,k} 2^{-js} 2^{-ks} || 1_j M 1_k || (the B_s -> B_s^* norm).
BesovOperatorNorm operator_norm_bs(const MatC& M, const DyadicDecomposition& dec, double s,
                                   int workers = 1);
// Same, with M already expressed in the eigenbasis of F (M_t = V^* M V).
BesovOperatorNorm operator_norm_bs_eigenbasis(const MatC& Mt, const DyadicDecomposition& dec,
                                              double s, int workers = 1);

// Independent check: explicit projector matrices and dense SVD of P_j M P_k.
double operator_norm_bs_bruteforce(const MatC& M, const DyadicDecomposition& dec, double s);

struct RandomizedOracle {
  double random_best = 0.0;     // best ||M u||_{B*} over random unit-B_s u
  double power_best = 0.0;      // best over per-block power iteration vectors
  double lower_bound = 0.0;     // max of the two
  double extremal_value = 0.0;  // ||M u*||_{B*} for the constructed extremal vector
  int samples = 0;
};
RandomizedOracle besov_randomized_oracle(const MatC& M, const DyadicDecomposition& dec, double s,
                                         const VecC& extremal, int samples = 2000,
                                         std::uint64_t seed = 2024, int power_iterations = 300);

enum class BesovReference { ConjugateA, Position };
BesovReference parse_besov_reference(const std::string& s);  // "ah" | "x"

struct BesovSweepSetup {
  Potential pot;
  NuLaw nu_law;
  Grid grid;
  HamiltonianOptions ham;
  BesovReference reference = BesovReference::ConjugateA;
  double I_lo = 0.9, I_hi = 1.1;
  double s = 0.5;
  double mu_min = 1e-4;
  int re_points = 5;                       // Re z grid on I
  std::vector<double> mu_factors{1, 2, 4};  // Im z = factor * mu_min
  double weighted_s_offset = 0.1;          // companion weighted norm at s + offset
  bool grid_gate = true;
  double gate_tol = 0.02;
};

struct BesovSweepRow {
  double h = 0, nu = 0, nu_tilde = 0, re_z = 0, im_z = 0, s = 0;
  double norm = 0;           // sup over the z grid of the B_s -> B_s^* norm
  int j = 0, k = 0;
  double weighted_norm = 0;  // <x>^{-s'} (H - z)^{-1} <x>^{-s'} at the same z
  double residual = 0;
  bool grid_converged = false;
  double refined_norm = 0;
  std::vector<BlockEntry> table;  // blocks at the maximising z
};

struct BesovSweepResult {
  std::vector<BesovSweepRow> rows;
  LineFit fit;  // log(norm) against log(1/(h nu_tilde))
  bool grid_converged = false;
};

// B_s -> B_s^* norm of (H - z)^{-1} for z in the grid; dense (n <= 2048).
BesovOperatorNorm resolvent_besov_norm(const DiscreteOperator& H, const DyadicDecomposition& dec,
                                       cplx z, double s, int workers = 1);
BesovSweepResult resolvent_besov_sweep(const BesovSweepSetup& setup,
                                       const std::vector<double>& h_list, int workers = 1);

}  // namespace dslab
