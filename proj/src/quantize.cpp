#include "dslab/quantize.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

namespace dslab {

VecR Grid::nodes() const {
  VecR x(n_points);
  for (int i = 0; i < n_points; ++i) x[i] = node(i);
  return x;
}

Grid make_grid(double x_min, double x_max, int n_points) {
  if (n_points < 8) throw ConfigError("grid.n_points must be >= 8");
  if (!(x_max > x_min)) throw ConfigError("grid.x_max must exceed grid.x_min");
  return Grid{x_min, x_max, n_points};
}

NuLaw NuLaw::parse(const std::string& text) {
  NuLaw law;
  law.text_ = text;
  if (text == "h") {
    law.coef_ = 1.0, law.power_ = 1.0;
  } else if (text == "h^2" || text == "h2") {
    law.coef_ = 1.0, law.power_ = 2.0;
  } else {
    const PresetSpec p = parse_preset(text.rfind("table", 0) == 0 ? "table" : text);
    if (p.name == "power" && p.args.size() == 2) {
      law.coef_ = p.args[0], law.power_ = p.args[1];
    } else if (p.name == "const" && p.args.size() == 1) {
      law.coef_ = p.args[0], law.power_ = 0.0;
    } else if (p.name == "table") {
      const auto open = text.find('('), close = text.rfind(')');
      if (open == std::string::npos || close == std::string::npos)
        throw ConfigError("params.nu_law table must look like table(h:nu;...)");
      std::stringstream ss(text.substr(open + 1, close - open - 1));
      std::string item;
      while (std::getline(ss, item, ';')) {
        const auto c = item.find(':');
        if (c == std::string::npos) throw ConfigError("nu_law table entry '" + item + "'");
        law.table_.emplace_back(std::stod(item.substr(0, c)), std::stod(item.substr(c + 1)));
      }
      if (law.table_.empty()) throw ConfigError("empty nu_law table");
    } else {
      throw ConfigError("unknown params.nu_law '" + text + "'");
    }
  }
  return law;
}

double NuLaw::operator()(double h) const {
  if (!table_.empty()) {
    for (const auto& [hh, nu] : table_)
      if (std::abs(hh - h) <= 1e-12 * std::max(1.0, h)) return nu;
    throw ConfigError("nu_law table has no entry for h=" + std::to_string(h));
  }
  return coef_ * std::pow(h, power_);
}

double SemiclassicalParams::nu() const { return nu_law(h); }
double SemiclassicalParams::nu_tilde() const { return std::min(1.0, nu() / h); }

SemiclassicalParams make_params(double h, const NuLaw& law) {
  if (!(h > 0 && h <= 1)) throw ConfigError("params.h must lie in (0,1]");
  SemiclassicalParams p{h, law};
  const double nu = p.nu();
  if (!(nu > 0 && nu <= 1)) throw ConfigError("nu(h) must lie in (0,1]");
  return p;
}

VecR sponge_profile(const Grid& grid, const SpongeConfig& cfg) {
  VecR s = VecR::Zero(grid.n_points);
  if (!cfg.enabled || cfg.strength == 0.0) return s;
  const double c = 0.5 * (grid.x_min + grid.x_max), half = 0.5 * (grid.x_max - grid.x_min);
  const double inner = half * (1.0 - cfg.width_fraction);
  for (int i = 0; i < grid.n_points; ++i) {
    const double r = std::abs(grid.node(i) - c);
    if (r > inner) {
      const double d = (r - inner) / (half - inner);
      s[i] = cfg.strength * d * d;
    }
  }
  return s;
}

std::string role_name(Role r) {
  switch (r) {
    case Role::H1: return "H1";
    case Role::H: return "H";
    case Role::Weight: return "weight";
    case Role::DilationGenerator: return "A_h";
    case Role::WeylOp: return "WeylOp";
    case Role::Sponge: return "sponge";
  }
  return "?";
}

namespace {

// Central second-derivative stencils, one side (index 0 = centre).
std::vector<double> second_derivative_stencil(int order) {
  switch (order) {
    case 2: return {-2.0, 1.0};
    case 4: return {-5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0};
    case 6: return {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
    case 8: return {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
    default: throw ConfigError("grid.stencil_order must be 2, 4, 6 or 8");
  }
}

}  // namespace

BandedMatrix kinetic_matrix(const Grid& grid, double h, int stencil_order) {
  const auto c = second_derivative_stencil(stencil_order);
  const int b = static_cast<int>(c.size()) - 1, n = grid.n_points;
  const double scale = -h * h / (grid.spacing() * grid.spacing());
  BandedMatrix K(n, b, b);
  for (int i = 0; i < n; ++i)
    for (int k = -b; k <= b; ++k) {
      const int j = i + k;
      if (j >= 0 && j < n) K.at(i, j) = scale * c[std::abs(k)];
    }
  return K;
}

Hamiltonian build_hamiltonian(const Grid& grid, const Potential& pot,
                              const SemiclassicalParams& params, const HamiltonianOptions& opt) {
  const double limit = params.h / (opt.resolution_guard * std::sqrt(std::max(opt.e_max, 1e-12)));
  if (grid.spacing() > limit * (1.0 + 1e-9))
    throw ResolutionError("spacing " + std::to_string(grid.spacing()) + " exceeds h/(guard*sqrt(E_max)) = " +
                          std::to_string(limit));
  Hamiltonian out;
  BandedMatrix K = kinetic_matrix(grid, params.h, opt.stencil_order);
  const int n = grid.n_points;
  VecC v1(n), damp(n);
  const VecR sp = sponge_profile(grid, opt.sponge);
  const double nu = params.nu();
  for (int i = 0; i < n; ++i) {
    const double x = grid.node(i);
    v1[i] = pot.V1(x);
    damp[i] = -I * (nu * pot.V2(x) + sp[i]);
  }
  K.add_diagonal(v1);
  out.H1.role = Role::H1;
  out.H1.hermitian = true;
  out.H1.band = K;
  K.add_diagonal(damp);
  out.H.role = Role::H;
  out.H.hermitian = (damp.cwiseAbs().maxCoeff() == 0.0);
  out.H.band = std::move(K);
  return out;
}

VecR weight_diagonal(const Grid& grid, double s) {
  VecR w(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.node(i);
    w[i] = std::pow(1.0 + x * x, -s / 2.0);
  }
  return w;
}

DiscreteOperator weight_operator(const Grid& grid, double s) {
  DiscreteOperator op;
  op.role = Role::Weight;
  op.hermitian = true;
  op.band = BandedMatrix(grid.n_points, 0, 0);
  const VecR w = weight_diagonal(grid, s);
  for (int i = 0; i < grid.n_points; ++i) op.band.at(i, i) = w[i];
  return op;
}

BandedMatrix momentum_matrix(const Grid& grid, double h, int order) {
  // central first-derivative weights c_m for offsets m = 1..order/2
  static const std::vector<std::vector<double>> w = {
      {0.5}, {2.0 / 3.0, -1.0 / 12.0}, {0.75, -0.15, 1.0 / 60.0},
      {0.8, -0.2, 4.0 / 105.0, -1.0 / 280.0}};
  if (order != 2 && order != 4 && order != 6 && order != 8)
    throw ConfigError("difference order must be 2, 4, 6 or 8");
  const auto& c = w[order / 2 - 1];
  const int n = grid.n_points, half = order / 2;
  const double scale = h / grid.spacing();
  BandedMatrix P(n, half, half);
  for (int i = 0; i < n; ++i)
    for (int m = 1; m <= half; ++m) {
      if (i + m < n) P.at(i, i + m) = -I * scale * c[m - 1];
      if (i - m >= 0) P.at(i, i - m) = I * scale * c[m - 1];
    }
  return P;
}

DiscreteOperator dilation_generator(const Grid& grid, double h, int order) {
  const int n = grid.n_points, half = order / 2;
  const BandedMatrix P = momentum_matrix(grid, h, order);
  DiscreteOperator op;
  op.role = Role::DilationGenerator;
  op.hermitian = true;
  op.band = BandedMatrix(n, half, half);
  // (1/2)(x_i P_ij + P_ij x_j)
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j)
      op.band.at(i, j) = 0.5 * (grid.node(i) + grid.node(j)) * P.get(i, j);
  return op;
}

Symbol gaussian_symbol(double x0, double xi0, double width) {
  Symbol s;
  s.name = "gaussian";
  s.f = [=](double x, double xi) {
    return std::exp(-((x - x0) * (x - x0) + (xi - xi0) * (xi - xi0)) / (width * width));
  };
  return s;
}

Symbol polynomial_symbol(std::string name, std::function<double(double)> a0,
                         std::function<double(double)> a1, std::function<double(double)> a2) {
  Symbol s;
  s.name = std::move(name);
  s.f = [=](double x, double xi) { return a0(x) + a1(x) * xi + a2(x) * xi * xi; };
  s.poly = std::array<std::function<double(double)>, 3>{a0, a1, a2};
  return s;
}

namespace {

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

MatC polynomial_weyl(const Grid& grid, const Symbol& a, double h) {
  const int n = grid.n_points;
  const MatC P = momentum_matrix(grid, h).to_dense();
  VecC d0(n), d1(n), d2(n);
  for (int i = 0; i < n; ++i) {
    const double x = grid.node(i);
    d0[i] = (*a.poly)[0](x);
    d1[i] = (*a.poly)[1](x);
    d2[i] = (*a.poly)[2](x);
  }
  MatC M = d0.asDiagonal();
  const MatC A1 = d1.asDiagonal(), A2 = d2.asDiagonal();
  M += 0.5 * (A1 * P + P * A1);
  const MatC P2 = P * P;
  M += 0.25 * (A2 * P2 + 2.0 * P * A2 * P + P2 * A2);
  return M;
}

}  // namespace

MatC weyl_quantize_batch(const Grid& grid, const SymbolBatch& b, double h, const WeylOptions& opt) {
  const int n = grid.n_points;
  const double dx = grid.spacing();
  int nf = 1;
  while (nf < 2 * n) nf <<= 1;
  const double dxi = 2.0 * kPi * h / (nf * dx);
  const double xi_nyq = kPi * h / dx, xi_cut = xi_nyq * (1.0 - opt.margin);
  std::vector<double> xi(nf);
  for (int m = 0; m < nf; ++m) xi[m] = (m < nf / 2 ? m : m - nf) * dxi;

  fftw_complex* buf = fftw_alloc_complex(nf);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lk(fftw_plan_mutex());
    plan = fftw_plan_dft_1d(nf, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  MatC K = MatC::Zero(n, n);
  std::vector<double> vals(nf);
  const double pref = dx / (2.0 * kPi * h) * dxi;
  double peak = 0.0, tail = 0.0;
  for (int p = 0; p <= 2 * (n - 1); ++p) {
    const double xm = grid.x_min + 0.5 * p * dx;
    b(xm, xi, vals);
    for (int m = 0; m < nf; ++m) {
      const double v = vals[m];
      if (std::abs(xi[m]) > xi_cut) {
        tail = std::max(tail, std::abs(v));
        buf[m][0] = buf[m][1] = 0.0;
      } else {
        peak = std::max(peak, std::abs(v));
        buf[m][0] = v;
        buf[m][1] = 0.0;
      }
    }
    fftw_execute(plan);
    // pairs (j,k) with j + k = p
    const int j0 = std::max(0, p - (n - 1)), j1 = std::min(p, n - 1);
    for (int j = j0; j <= j1; ++j) {
      const int k = p - j;
      const int d = ((j - k) % nf + nf) % nf;
      K(j, k) = pref * cplx(buf[d][0], buf[d][1]);
    }
  }
  {
    std::lock_guard<std::mutex> lk(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  if (tail > opt.tail_tol * std::max(peak, 1e-300) && tail > opt.tail_tol)
    throw SymbolDecayError("symbol reaches " + std::to_string(tail) +
                           " near the Nyquist momentum " + std::to_string(xi_nyq));
  return K;
}

DiscreteOperator weyl_quantize(const Grid& grid, const Symbol& a, double h,
                               const WeylOptions& opt) {
  DiscreteOperator op;
  op.role = Role::WeylOp;
  op.is_dense = true;
  op.hermitian = true;  // symbols are real-valued
  if (a.poly) {
    op.dense = polynomial_weyl(grid, a, h);
    return op;
  }
  op.dense = weyl_quantize_batch(
      grid,
      [&](double x, const std::vector<double>& xi, std::vector<double>& out) {
        for (std::size_t m = 0; m < xi.size(); ++m) out[m] = a.f(x, xi[m]);
      },
      h, opt);
  return op;
}

double dissipativity_check(const DiscreteOperator& H) {
  if (!H.is_dense) {
    const BandedMatrix& B = H.band;
    bool diagonal_only = true;
    const int n = B.size(), b = std::max(B.kl(), B.ku());
    for (int i = 0; i < n && diagonal_only; ++i)
      for (int j = std::max(0, i - b); j <= std::min(n - 1, i + b); ++j)
        if (i != j && std::abs(B.get(i, j) - std::conj(B.get(j, i))) > 0.0) {
          diagonal_only = false;
          break;
        }
    if (diagonal_only) {
      double m = -1e300;
      for (int i = 0; i < n; ++i) m = std::max(m, B.get(i, i).imag());
      return m;
    }
  }
  const MatC M = H.to_dense();
  const MatC S = (M - M.adjoint()) / (2.0 * I);
  Eigen::SelfAdjointEigenSolver<MatC> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

void export_binary(const DiscreteOperator& op, const std::string& path) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  const char magic[8] = {'D', 'S', 'L', 'A', 'B', 'M', 'A', 'T'};
  const std::uint64_t n = op.size(), role = static_cast<std::uint64_t>(op.role), reserved = 0;
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&role), 8);
  out.write(reinterpret_cast<const char*>(&reserved), 8);
  const MatC M = op.to_dense();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      const double re = M(i, j).real(), im = M(i, j).imag();
      out.write(reinterpret_cast<const char*>(&re), 8);
      out.write(reinterpret_cast<const char*>(&im), 8);
    }
}

DiscreteOperator import_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  char magic[8];
  std::uint64_t n = 0, role = 0, reserved = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&role), 8);
  in.read(reinterpret_cast<char*>(&reserved), 8);
  if (!in || std::memcmp(magic, "DSLABMAT", 8) != 0) throw ConfigError("bad matrix header in '" + path + "'");
  DiscreteOperator op;
  op.role = static_cast<Role>(role);
  op.is_dense = true;
  op.dense.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j) {
      double re = 0, im = 0;
      in.read(reinterpret_cast<char*>(&re), 8);
      in.read(reinterpret_cast<char*>(&im), 8);
      op.dense(i, j) = cplx(re, im);
    }
  if (!in) throw ConfigError("truncated matrix file '" + path + "'");
  op.hermitian = (op.dense - op.dense.adjoint()).cwiseAbs().maxCoeff() <= 1e-12;
  return op;
}

}  // namespace dslab
