#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dslab/banded.hpp"
#include "dslab/common.hpp"
#include "dslab/potential.hpp"

namespace dslab {

struct Grid {
  double x_min = -1.0;
  double x_max = 1.0;
  int n_points = 8;

  double spacing() const { return (x_max - x_min) / (n_points - 1); }
  double node(int i) const { return x_min + i * spacing(); }
  VecR nodes() const;
};
Grid make_grid(double x_min, double x_max, int n_points);

// nu(h): "h", "h^2", "power(c,k)" for c h^k, "const(c)", or "table(h1:nu1;h2:nu2;...)".
class NuLaw {
 public:
  NuLaw() = default;
  static NuLaw parse(const std::string& text);
  double operator()(double h) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_ = "h";
  double coef_ = 1.0, power_ = 1.0;
  std::vector<std::pair<double, double>> table_;
};

struct SemiclassicalParams {
  double h = 0.1;
  NuLaw nu_law;

  double nu() const;
  double nu_tilde() const;  // min(1, nu/h)
};
SemiclassicalParams make_params(double h, const NuLaw& law);

struct SpongeConfig {
  double strength = 1.0;
  double width_fraction = 0.15;
  bool enabled = true;
};
// Nonnegative absorbing profile strength * d^2, d the normalised depth into the
// outer width_fraction of the box on each side.
VecR sponge_profile(const Grid& grid, const SpongeConfig& cfg);

enum class Role : int { H1 = 1, H = 2, Weight = 3, DilationGenerator = 4, WeylOp = 5, Sponge = 6 };
std::string role_name(Role r);

struct DiscreteOperator {
  Role role = Role::H;
  bool hermitian = false;
  bool is_dense = false;
  BandedMatrix band;
  MatC dense;

  int size() const { return is_dense ? static_cast<int>(dense.rows()) : band.size(); }
  MatC to_dense() const { return is_dense ? dense : band.to_dense(); }
  VecC apply(const VecC& v) const { return is_dense ? VecC(dense * v) : band.multiply(v); }
};

struct HamiltonianOptions {
  int stencil_order = 2;          // 2, 4, 6 or 8
  double resolution_guard = 4.0;  // require spacing <= h / (guard sqrt(E_max))
  double e_max = 1.0;
  SpongeConfig sponge;
};

struct Hamiltonian {
  DiscreteOperator H1;
  DiscreteOperator H;
};
Hamiltonian build_hamiltonian(const Grid& grid, const Potential& pot,
                              const SemiclassicalParams& params, const HamiltonianOptions& opt);

// Real symmetric finite-difference matrix for -h^2 d^2/dx^2 (Dirichlet).
BandedMatrix kinetic_matrix(const Grid& grid, double h, int stencil_order);

DiscreteOperator weight_operator(const Grid& grid, double s);
VecR weight_diagonal(const Grid& grid, double s);

// A = (h/2)(X D + D X), D = -i * central difference of the given order.
DiscreteOperator dilation_generator(const Grid& grid, double h, int order = 2);
// h D with D = -i * central difference (order 2, 4, 6 or 8).
BandedMatrix momentum_matrix(const Grid& grid, double h, int order = 2);

struct Symbol {
  std::string name;
  std::function<double(double, double)> f;
  // a0(x) + a1(x) xi + a2(x) xi^2, quantised with exact Weyl ordering rules
  std::optional<std::array<std::function<double(double)>, 3>> poly;
};
Symbol gaussian_symbol(double x0, double xi0, double width);
Symbol polynomial_symbol(std::string name, std::function<double(double)> a0,
                         std::function<double(double)> a1, std::function<double(double)> a2);

struct WeylOptions {
  double margin = 0.05;  // fraction of the Nyquist band treated as the decay tail
  double tail_tol = 1e-8;
};
DiscreteOperator weyl_quantize(const Grid& grid, const Symbol& a, double h,
                               const WeylOptions& opt = {});
// Same quadrature for a symbol given by a batch evaluator b(x_mid, xi_nodes) -> values.
using SymbolBatch = std::function<void(double x, const std::vector<double>& xi, std::vector<double>& out)>;
MatC weyl_quantize_batch(const Grid& grid, const SymbolBatch& b, double h,
                         const WeylOptions& opt = {});

// lambda_max((H - H^*) / 2i); H is dissipative iff this is <= 1e-12.
double dissipativity_check(const DiscreteOperator& H);

// Row-major complex pairs, little-endian, 32-byte header:
// magic "DSLABMAT", uint64 n, uint64 role id, uint64 reserved.
void export_binary(const DiscreteOperator& op, const std::string& path);
DiscreteOperator import_binary(const std::string& path);

}  // namespace dslab
