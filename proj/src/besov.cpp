#include "dslab/besov.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dslab/lapack.hpp"
#include "dslab/resolvent.hpp"
#include "dslab/workers.hpp"

namespace dslab {

int dyadic_block(double lambda) {
  const double a = std::abs(lambda);
  if (a < 1.0) return 0;
  int j = static_cast<int>(std::floor(std::log2(a))) + 1;
  // guard the floating log2 near the edges
  while (a < std::ldexp(1.0, j - 1)) --j;
  while (a >= std::ldexp(1.0, j)) ++j;
  if (a - std::ldexp(1.0, j - 1) <= 1e-12) --j;  // boundary -> lower block
  return j;
}

namespace {
void assign_blocks(DyadicDecomposition& d) {
  const int n = d.size();
  d.block.resize(n);
  int jmax = 0;
  for (int i = 0; i < n; ++i) {
    d.block[i] = dyadic_block(d.eigenvalues[i]);
    jmax = std::max(jmax, d.block[i]);
  }
  d.members.assign(jmax + 1, {});
  for (int i = 0; i < n; ++i) d.members[d.block[i]].push_back(i);
}

double block_coeff_norm(const VecC& c, const std::vector<int>& idx) {
  double acc = 0.0;
  for (int i : idx) acc += std::norm(c[i]);
  return std::sqrt(acc);
}

MatC select(const MatC& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  MatC out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = m(rows[a], cols[b]);
  return out;
}
}  // namespace

MatC DyadicDecomposition::projection(int j) const {
  const int n = size();
  MatC P = MatC::Zero(n, n);
  if (j < 0 || j >= blocks()) return P;
  for (int i : members[j]) P += basis.col(i) * basis.col(i).adjoint();
  return P;
}

VecC DyadicDecomposition::block_part(const VecC& u, int j) const {
  const VecC c = coefficients(u);
  VecC out = VecC::Zero(size());
  if (j < 0 || j >= blocks()) return out;
  for (int i : members[j]) out += c[i] * basis.col(i);
  return out;
}

DyadicDecomposition make_dyadic_decomposition(const MatC& F) {
  if (F.rows() != F.cols()) throw PreconditionViolated("reference operator must be square");
  if ((F - F.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, F.cwiseAbs().maxCoeff()))
    throw PreconditionViolated("reference operator must be hermitian");
  if (F.rows() > 2048) throw PreconditionViolated("full diagonalisation capped at n = 2048");
  DyadicDecomposition d;
  lapack::heevd(0.5 * (F + F.adjoint()), d.eigenvalues, d.basis);
  assign_blocks(d);
  return d;
}

DyadicDecomposition make_dyadic_decomposition(const VecR& values) {
  DyadicDecomposition d;
  d.eigenvalues = values;
  d.basis = MatC::Identity(values.size(), values.size());
  assign_blocks(d);
  return d;
}

double besov_norm(const VecC& u, const DyadicDecomposition& dec, double s) {
  const VecC c = dec.coefficients(u);
  double acc = 0.0;
  for (int j = 0; j < dec.blocks(); ++j)
    if (!dec.members[j].empty()) acc += std::pow(2.0, j * s) * block_coeff_norm(c, dec.members[j]);
  return acc;
}

double dual_norm(const VecC& v, const DyadicDecomposition& dec, double s) {
  const VecC c = dec.coefficients(v);
  double best = 0.0;
  for (int j = 0; j < dec.blocks(); ++j)
    if (!dec.members[j].empty())
      best = std::max(best, std::pow(2.0, -j * s) * block_coeff_norm(c, dec.members[j]));
  return best;
}

BesovOperatorNorm operator_norm_bs_eigenbasis(const MatC& Mt, const DyadicDecomposition& dec,
                                              double s, int workers) {
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < dec.blocks(); ++j)
    for (int k = 0; k < dec.blocks(); ++k)
      if (!dec.members[j].empty() && !dec.members[k].empty()) pairs.emplace_back(j, k);
  std::vector<BlockEntry> table(pairs.size());
  std::vector<VecC> right(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), workers, [&](int p) {
    const auto [j, k] = pairs[p];
    const MatC blk = select(Mt, dec.members[j], dec.members[k]);
    Eigen::BDCSVD<MatC> svd(blk, Eigen::ComputeThinV);
    table[p] = {j, k, svd.singularValues()[0],
                std::pow(2.0, -(j + k) * s) * svd.singularValues()[0]};
    right[p] = svd.matrixV().col(0);
  });
  BesovOperatorNorm out;
  out.table = table;
  std::size_t best = 0;
  for (std::size_t p = 0; p < table.size(); ++p)
    if (table[p].weighted > table[best].weighted) best = p;
  if (table.empty()) return out;
  out.norm = table[best].weighted;
  out.j = table[best].j;
  out.k = table[best].k;
  // u = 2^{-ks} * (top right singular vector inside block k): ||u||_{B_s} = 1
  VecC coeff = VecC::Zero(dec.size());
  const auto& mk = dec.members[out.k];
  for (std::size_t b = 0; b < mk.size(); ++b) coeff[mk[b]] = right[best][b];
  out.extremal = std::pow(2.0, -out.k * s) * (dec.basis * coeff);
  return out;
}

BesovOperatorNorm operator_norm_bs(const MatC& M, const DyadicDecomposition& dec, double s,
                                   int workers) {
  const MatC Mt = dec.basis.adjoint() * M * dec.basis;
  return operator_norm_bs_eigenbasis(Mt, dec, s, workers);
}

double operator_norm_bs_bruteforce(const MatC& M, const DyadicDecomposition& dec, double s) {
  std::vector<MatC> P;
  for (int j = 0; j < dec.blocks(); ++j) P.push_back(dec.projection(j));
  double best = 0.0;
  for (int j = 0; j < dec.blocks(); ++j)
    for (int k = 0; k < dec.blocks(); ++k) {
      if (dec.members[j].empty() || dec.members[k].empty()) continue;
      best = std::max(best, std::pow(2.0, -(j + k) * s) * dense_norm2(P[j] * M * P[k]));
    }
  return best;
}

RandomizedOracle besov_randomized_oracle(const MatC& M, const DyadicDecomposition& dec, double s,
                                         const VecC& extremal, int samples, std::uint64_t seed,
                                         int power_iterations) {
  RandomizedOracle o;
  o.samples = samples;
  const int n = dec.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> pick(0, std::max(0, dec.blocks() - 1));
  for (int t = 0; t < samples; ++t) {
    VecC u(n);
    for (int i = 0; i < n; ++i) u[i] = cplx(g(rng), g(rng));
    // half of the samples are concentrated in one block, where the maximiser lives
    if (t % 2 == 1) {
      int k = pick(rng);
      while (dec.members[k].empty()) k = pick(rng);
      u = dec.block_part(u, k);
    }
    const double b = besov_norm(u, dec, s);
    if (b <= 0) continue;
    o.random_best = std::max(o.random_best, dual_norm(M * (u / b), dec, s));
  }
  // power iteration on 1_j M 1_k for every block pair, evaluated through M itself
  for (int j = 0; j < dec.blocks(); ++j)
    for (int k = 0; k < dec.blocks(); ++k) {
      if (dec.members[j].empty() || dec.members[k].empty()) continue;
      VecC u = dec.block_part(random_vector(n, seed + 31 * j + 7 * k + 1), k);
      if (u.norm() == 0) continue;
      for (int it = 0; it < power_iterations; ++it) {
        const VecC w = dec.block_part(M * u, j);
        const VecC back = dec.block_part(M.adjoint() * w, k);
        const double nb = back.norm();
        if (nb == 0) break;
        u = back / nb;
      }
      const double b = besov_norm(u, dec, s);
      o.power_best = std::max(o.power_best, dual_norm(M * (u / b), dec, s));
    }
  o.lower_bound = std::max(o.random_best, o.power_best);
  if (extremal.size() == n) {
    const double b = besov_norm(extremal, dec, s);
    o.extremal_value = b > 0 ? dual_norm(M * (extremal / b), dec, s) : 0.0;
  }
  return o;
}

BesovReference parse_besov_reference(const std::string& s) {
  if (s == "ah" || s == "A" || s == "a") return BesovReference::ConjugateA;
  if (s == "x") return BesovReference::Position;
  throw ConfigError("besov reference must be 'ah' or 'x', got '" + s + "'");
}

BesovOperatorNorm resolvent_besov_norm(const DiscreteOperator& H, const DyadicDecomposition& dec,
                                       cplx z, double s, int workers) {
  if (!(z.imag() > 0)) throw PreconditionViolated("Im z must be positive");
  const Resolvent R(H, z);
  const int n = dec.size();
  MatC X(n, n);
  for (int c = 0; c < n; ++c) X.col(c) = R.solve(dec.basis.col(c));
  const MatC Mt = dec.basis.adjoint() * X;
  BesovOperatorNorm out = operator_norm_bs_eigenbasis(Mt, dec, s, workers);
  return out;
}

namespace {
DyadicDecomposition reference_decomposition(const BesovSweepSetup& setup, const Grid& grid,
                                            double h) {
  if (setup.reference == BesovReference::Position) return make_dyadic_decomposition(grid.nodes());
  return make_dyadic_decomposition(dilation_generator(grid, h).to_dense());
}
}  // namespace

BesovSweepResult resolvent_besov_sweep(const BesovSweepSetup& setup,
                                       const std::vector<double>& h_list, int workers) {
  if (h_list.size() < 2) throw PreconditionViolated("need at least two h values");
  if (setup.s < 0.5) throw PreconditionViolated("s must be >= 1/2");
  if (setup.grid.n_points > 2048) throw PreconditionViolated("besov sweep capped at n = 2048");
  BesovSweepResult res;
  res.rows.resize(h_list.size());
  parallel_for(static_cast<int>(h_list.size()), workers, [&](int idx) {
    const double h = h_list[idx];
    const SemiclassicalParams par = make_params(h, setup.nu_law);
    HamiltonianOptions ho = setup.ham;
    ho.e_max = std::max(ho.e_max, setup.I_hi);
    const Hamiltonian ham = build_hamiltonian(setup.grid, setup.pot, par, ho);
    const DyadicDecomposition dec = reference_decomposition(setup, setup.grid, h);
    BesovSweepRow row;
    row.h = h;
    row.nu = par.nu();
    row.nu_tilde = par.nu_tilde();
    row.s = setup.s;
    for (int a = 0; a < setup.re_points; ++a) {
      const double re = setup.re_points == 1
                            ? 0.5 * (setup.I_lo + setup.I_hi)
                            : setup.I_lo + (setup.I_hi - setup.I_lo) * a / (setup.re_points - 1);
      for (double f : setup.mu_factors) {
        const cplx z(re, f * setup.mu_min);
        BesovOperatorNorm b = resolvent_besov_norm(ham.H, dec, z, setup.s);
        if (b.norm > row.norm) {
          row.norm = b.norm;
          row.re_z = re;
          row.im_z = z.imag();
          row.j = b.j;
          row.k = b.k;
          row.table = std::move(b.table);
        }
      }
    }
    row.weighted_norm =
        weighted_norm(ham.H, cplx(row.re_z, row.im_z), setup.grid, setup.s + setup.weighted_s_offset)
            .norm;
    if (setup.grid_gate) {
      const Grid fine = make_grid(setup.grid.x_min, setup.grid.x_max, 2 * setup.grid.n_points - 1);
      const Hamiltonian hf = build_hamiltonian(fine, setup.pot, par, ho);
      const DyadicDecomposition df = reference_decomposition(setup, fine, h);
      row.refined_norm = resolvent_besov_norm(hf.H, df, cplx(row.re_z, row.im_z), setup.s).norm;
      row.grid_converged = std::abs(row.refined_norm - row.norm) <= setup.gate_tol * row.norm;
    } else {
      row.refined_norm = row.norm;
      row.grid_converged = true;
    }
    res.rows[idx] = std::move(row);
  });
  std::vector<double> x, y;
  for (const auto& r : res.rows) {
    x.push_back(std::log(1.0 / (r.h * r.nu_tilde)));
    y.push_back(std::log(r.norm));
  }
  res.fit = fit_line(x, y);
  res.grid_converged = true;
  for (std::size_t k = 0; k < res.rows.size(); ++k) {
    res.rows[k].residual = y[k] - (res.fit.intercept + res.fit.slope * x[k]);
    res.grid_converged = res.grid_converged && res.rows[k].grid_converged;
  }
  return res;
}

}  // namespace dslab
