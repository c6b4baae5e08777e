#include "dslab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include "json.hpp"

#include "dslab/acceptance.hpp"
#include "dslab/besov.hpp"
#include "dslab/classical.hpp"
#include "dslab/dilation.hpp"
#include "dslab/egorov.hpp"
#include "dslab/report.hpp"
#include "dslab/resolvent.hpp"
#include "dslab/scenario.hpp"
#include "dslab/workers.hpp"

namespace dslab {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

constexpr const char* kToolVersion = "dslab 1.0.0";

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"run", {"command", "out", "plots", "workers", "csv_name"}},
      {"scenario",
       {"base", "name", "v1", "v2", "nu", "x_min", "x_max", "n_points", "stencil_order",
        "resolution_guard", "sponge_strength", "sponge_width", "I_lo", "I_hi", "s", "mu_min",
        "seed"}},
      {"sweep", {"h_list", "grid_gate", "gate_tol", "slope_min", "slope_max", "residual_max"}},
      {"resolvent", {"h", "re_z", "im_z", "grid_gate", "gate_tol"}},
      {"lap", {"h", "lambda", "mu_list", "holder_offsets"}},
      {"egorov",
       {"h_list", "t", "symbol", "window_lo", "window_hi", "xi_band", "lattice_spacing", "slope_min",
        "mixed_slope_min"}},
      {"smoothing", {"h_list", "x0", "xi0", "sigma", "dt", "ratio_max"}},
      {"dilation",
       {"interior", "h", "L", "spacing", "z_list", "t_list", "modes", "probes", "check", "max_error",
        "interior_points", "lambda0", "v"}},
      {"besov", {"h", "h_list", "ref", "grid_gate", "slope_min", "slope_max"}},
      {"flow", {"x0", "xi0", "t_max", "dt", "order", "stride"}},
      {"classify", {"energy", "samples", "t_max", "r_escape"}},
      {"accept", {"criteria"}},
  };
  return s;
}

const std::set<std::string> kCommands = {"sweep",  "resolvent", "lap",  "egorov", "smoothing",
                                         "dilation", "besov", "flow", "classify", "accept", "list"};

double parse_number(const std::string& key, std::string t) {
  t.erase(std::remove_if(t.begin(), t.end(), ::isspace), t.end());
  try {
    const auto slash = t.find('/');
    std::size_t pos = 0;
    if (slash != std::string::npos) {
      const double a = std::stod(t.substr(0, slash)), b = std::stod(t.substr(slash + 1), &pos);
      if (pos != t.size() - slash - 1) throw std::invalid_argument(t);
      return a / b;
    }
    const double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse number '" + t + "'");
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_number(key, item));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

// "re:im;re:im" or "re,im"
std::vector<cplx> parse_z_list(const std::string& key, const std::string& text) {
  std::vector<cplx> out;
  std::stringstream ss(text);
  std::string item;
  const char sep = text.find(';') != std::string::npos || text.find(':') != std::string::npos ? ';' : '\n';
  while (std::getline(ss, item, sep)) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto c = item.find(item.find(':') != std::string::npos ? ':' : ',');
    if (c == std::string::npos) throw ConfigError(key + ": expected re:im pairs");
    out.emplace_back(parse_number(key, item.substr(0, c)), parse_number(key, item.substr(c + 1)));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

struct Cfg {
  const pt::ptree& root;
  std::string str(const std::string& path, const std::string& fallback) const {
    return root.get<std::string>(path, fallback);
  }
  bool has(const std::string& path) const { return static_cast<bool>(root.get_optional<std::string>(path)); }
  double num(const std::string& path, double fallback) const {
    const auto v = root.get_optional<std::string>(path);
    return v ? parse_number(path, *v) : fallback;
  }
  int integer(const std::string& path, int fallback) const {
    const double v = num(path, fallback);
    if (v != std::floor(v)) throw ConfigError(path + ": expected an integer");
    return static_cast<int>(v);
  }
  bool flag(const std::string& path, bool fallback) const {
    const auto v = root.get_optional<std::string>(path);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError(path + ": expected true/false");
  }
  std::vector<double> list(const std::string& path, const std::vector<double>& fallback) const {
    const auto v = root.get_optional<std::string>(path);
    return v ? parse_list(path, *v) : fallback;
  }
};

Scenario scenario_from(const pt::ptree& cfg) {
  const auto sec = cfg.get_child_optional("scenario");
  Scenario base = resolve_scenario(sec ? sec->get<std::string>("base", sec->get<std::string>("name", "free"))
                                       : std::string("free"));
  if (!sec) return base;
  pt::ptree t = *sec;
  t.erase("base");
  if (!sec->get_optional<std::string>("base")) t.erase("name");  // name was used as the base
  Scenario s = Scenario::from_ptree(t, base);
  s.validate();
  return s;
}

struct Artifacts {
  std::string dir;
  bool plots = false;
  std::vector<std::string> files;
  std::vector<GateResult> gates;
  nlohmann::json results = nlohmann::json::array();

  void csv(const std::string& name, const CsvTable& t, bool grid_converged) {
    t.write((fs::path(dir) / name).string());
    files.push_back(name);
    results.push_back({{"file", name}, {"rows", t.rows()}, {"grid_converged", grid_converged}});
  }
  void svg(const std::string& name, const std::string& body) {
    if (!plots) return;
    write_text((fs::path(dir) / name).string(), body);
    files.push_back(name);
  }
  void gate(const std::string& name, double value, bool ok) { gates.push_back({name, value, ok}); }
};

const std::vector<double> kDefaultH = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};

SweepSetup sweep_setup(const Scenario& sc) {
  SweepSetup s;
  s.pot = sc.potential();
  s.nu_law = sc.nu();
  s.grid = sc.grid();
  s.ham = sc.hamiltonian_options();
  s.I_lo = sc.I_lo;
  s.I_hi = sc.I_hi;
  s.s = sc.s;
  s.mu_min = sc.mu_min;
  return s;
}

void do_sweep(const Cfg& c, const Scenario& sc, int workers, Artifacts& a, const std::string& csv_name) {
  SweepSetup s = sweep_setup(sc);
  s.grid_gate = c.flag("sweep.grid_gate", true);
  s.gate_tol = c.num("sweep.gate_tol", 0.02);
  const SweepResult r = scaling_sweep(s, c.list("sweep.h_list", kDefaultH), workers);
  CsvTable t({"h", "nu", "nu_tilde", "re_z", "im_z", "s", "norm", "residual", "grid_converged",
              "refined_norm", "z_evaluations"});
  PlotSeries ps{"sup-norm", {}, {}};
  for (const auto& row : r.rows) {
    t.add_row({fmt(row.h), fmt(row.nu), fmt(row.nu_tilde), fmt(row.re_z), fmt(row.im_z), fmt(row.s),
               fmt(row.norm), fmt(row.residual), fmt_bool(row.grid_converged), fmt(row.refined_norm),
               std::to_string(row.z_evaluations)});
    ps.x.push_back(1.0 / (row.h * row.nu_tilde));
    ps.y.push_back(row.norm);
  }
  a.csv(csv_name, t, r.grid_converged);
  CsvTable f({"slope", "intercept", "rms_residual", "grid_converged"});
  f.add_row({fmt(r.fit.slope), fmt(r.fit.intercept), fmt(r.fit.rms_residual), fmt_bool(r.grid_converged)});
  a.csv("sweep_fit.csv", f, r.grid_converged);
  a.svg("sweep.svg", svg_plot("weighted resolvent sup-norm (" + sc.name + ")", "1/(h nu~)", "norm",
                              {ps}, true, true));
  if (s.grid_gate) a.gate("grid_converged", r.grid_converged ? 1 : 0, r.grid_converged);
  if (c.has("sweep.slope_min"))
    a.gate("slope_min", r.fit.slope, r.fit.slope >= c.num("sweep.slope_min", 0));
  if (c.has("sweep.slope_max"))
    a.gate("slope_max", r.fit.slope, r.fit.slope <= c.num("sweep.slope_max", 0));
  if (c.has("sweep.residual_max"))
    a.gate("residual_max", r.fit.rms_residual, r.fit.rms_residual < c.num("sweep.residual_max", 0));
}

void do_resolvent(const Cfg& c, const Scenario& sc, Artifacts& a) {
  const double h = c.num("resolvent.h", 0.125);
  const cplx z(c.num("resolvent.re_z", 1.0), c.num("resolvent.im_z", 1e-2));
  const auto par = sc.params(h);
  const Hamiltonian ham = build_hamiltonian(sc.grid(), sc.potential(), par, sc.hamiltonian_options());
  const NormResult nr = weighted_norm(ham.H, z, sc.grid(), sc.s);
  bool converged = true;
  double refined = nr.norm;
  if (c.flag("resolvent.grid_gate", true)) {
    const Grid fine = make_grid(sc.x_min, sc.x_max, 2 * sc.n_points - 1);
    const Hamiltonian hf = build_hamiltonian(fine, sc.potential(), par, sc.hamiltonian_options());
    refined = weighted_norm(hf.H, z, fine, sc.s).norm;
    converged = std::abs(refined - nr.norm) <= c.num("resolvent.gate_tol", 0.02) * nr.norm;
    a.gate("grid_converged", converged ? 1 : 0, converged);
  }
  CsvTable t({"h", "nu", "nu_tilde", "re_z", "im_z", "s", "norm", "residual", "grid_converged",
              "refined_norm", "method"});
  t.add_row({fmt(h), fmt(par.nu()), fmt(par.nu_tilde()), fmt(z.real()), fmt(z.imag()), fmt(sc.s),
             fmt(nr.norm), "0", fmt_bool(converged), fmt(refined), nr.method});
  a.csv("resolvent.csv", t, converged);
}

void do_lap(const Cfg& c, const Scenario& sc, Artifacts& a) {
  const double h = c.num("lap.h", 0.125);
  const Hamiltonian ham =
      build_hamiltonian(sc.grid(), sc.potential(), sc.params(h), sc.hamiltonian_options());
  LimitingAbsorptionReport r;
  bool ok = true;
  try {
    r = limiting_absorption_scan(ham.H, sc.grid(), c.num("lap.lambda", 1.0), sc.s,
                                 c.list("lap.mu_list", {4e-3, 2e-3, 1e-3, 5e-4}),
                                 c.list("lap.holder_offsets", {0.01, 0.02, 0.04, 0.08}));
  } catch (const NoConvergence&) {
    ok = false;
  }
  CsvTable t({"mu", "norm", "increment", "grid_converged"});
  for (std::size_t k = 0; k < r.mu.size(); ++k)
    t.add_row({fmt(r.mu[k]), fmt(r.norms[k]), k < r.increments.size() ? fmt(r.increments[k]) : "",
               "false"});
  a.csv("lap.csv", t, false);
  CsvTable hcsv({"offset", "difference", "limit_norm", "holder_exponent", "holder_target"});
  for (std::size_t k = 0; k < r.holder_offsets.size(); ++k)
    hcsv.add_row({fmt(r.holder_offsets[k]), fmt(r.holder_differences[k]), fmt(r.limit_norm),
                  fmt(r.holder_exponent), fmt(r.holder_target)});
  a.csv("lap_holder.csv", hcsv, false);
  a.gate("increments_decreasing", ok ? 1 : 0, ok);
}

Symbol symbol_from(const std::string& text) {
  const PresetSpec p = parse_preset(text);
  if (p.name == "gaussian") {
    const double x0 = p.args.size() > 0 ? p.args[0] : 0.0;
    const double xi0 = p.args.size() > 1 ? p.args[1] : 0.6;
    const double w = p.args.size() > 2 ? p.args[2] : 0.7;
    return gaussian_symbol(x0, xi0, w);
  }
  if (p.name == "position")
    return polynomial_symbol("position", [](double x) { return x; }, [](double) { return 0.0; },
                             [](double) { return 0.0; });
  if (p.name == "momentum")
    return polynomial_symbol("momentum", [](double) { return 0.0; }, [](double) { return 1.0; },
                             [](double) { return 0.0; });
  throw ConfigError("egorov.symbol: unknown symbol '" + p.name + "' (gaussian, position, momentum)");
}

void do_egorov(const Cfg& c, const Scenario& sc, int workers, Artifacts& a) {
  EgorovSetup s;
  s.pot = sc.potential();
  s.grid = sc.grid();
  s.ham = sc.hamiltonian_options();
  s.a = symbol_from(c.str("egorov.symbol", "gaussian(0,0.6,0.7)"));
  s.t = c.num("egorov.t", 1.0);
  s.window_lo = c.num("egorov.window_lo", s.window_lo);
  s.window_hi = c.num("egorov.window_hi", s.window_hi);
  s.xi_band = c.num("egorov.xi_band", s.xi_band);
  s.lattice.spacing = c.num("egorov.lattice_spacing", s.lattice.spacing);
  const EgorovResult r = egorov_compare(s, c.list("egorov.h_list", kDefaultH), workers);
  CsvTable t({"h", "error", "mixed_error", "subspace_dim", "grid_converged"});
  PlotSeries e{"full (q)", {}, {}}, m{"mixed (q1)", {}, {}};
  for (const auto& row : r.rows) {
    t.add_row({fmt(row.h), fmt(row.error), fmt(row.mixed_error), std::to_string(row.subspace_dim),
               "false"});
    e.x.push_back(row.h), e.y.push_back(row.error);
    m.x.push_back(row.h), m.y.push_back(row.mixed_error);
  }
  a.csv("egorov.csv", t, false);
  CsvTable f({"slope", "mixed_slope", "rms_residual", "mixed_rms_residual"});
  f.add_row({fmt(r.fit.slope), fmt(r.mixed_fit.slope), fmt(r.fit.rms_residual),
             fmt(r.mixed_fit.rms_residual)});
  a.csv("egorov_fit.csv", f, false);
  a.svg("egorov.svg", svg_plot("Egorov error (" + sc.name + ")", "h", "error", {e, m}, true, true));
  if (c.has("egorov.slope_min"))
    a.gate("slope_min", r.fit.slope, r.fit.slope >= c.num("egorov.slope_min", 0));
  if (c.has("egorov.mixed_slope_min"))
    a.gate("mixed_slope_min", r.mixed_fit.slope, r.mixed_fit.slope >= c.num("egorov.mixed_slope_min", 0));
}

void do_smoothing(const Cfg& c, const Scenario& sc, int workers, Artifacts& a) {
  SmoothingSetup s;
  s.pot = sc.potential();
  s.grid = sc.grid();
  s.ham = sc.hamiltonian_options();
  s.nu_law = sc.nu();
  s.s = sc.s;
  s.x0 = c.num("smoothing.x0", s.x0);
  s.xi0 = c.num("smoothing.xi0", s.xi0);
  s.sigma = c.num("smoothing.sigma", s.sigma);
  s.dt = c.num("smoothing.dt", s.dt);
  const SmoothingResult r = smoothing_integral(s, c.list("smoothing.h_list", kDefaultH), workers);
  CsvTable t({"h", "value", "T", "tail", "grid_converged"});
  for (const auto& row : r.rows)
    t.add_row({fmt(row.h), fmt(row.value), fmt(row.T), fmt(row.tail), "false"});
  a.csv("smoothing.csv", t, false);
  if (c.has("smoothing.ratio_max"))
    a.gate("ratio_max", r.max_min_ratio, r.max_min_ratio <= c.num("smoothing.ratio_max", 2));
}

void do_dilation(const Cfg& c, const Scenario& sc, Artifacts& a) {
  const std::string interior = c.str("dilation.interior", "scalar");
  const double L = c.num("dilation.L", 10.0), spacing = c.num("dilation.spacing", 1e-3);
  const double h = c.num("dilation.h", 1.0);
  DilationSystem sys;
  if (interior == "scalar") {
    sys = make_dilation_system(MatC::Constant(1, 1, c.num("dilation.lambda0", 0.5)),
                               VecR::Constant(1, c.num("dilation.v", 0.25)), h, sc.nu()(h), L, spacing);
  } else if (interior == "grid") {
    const int n = c.integer("dilation.interior_points", 64);
    const Grid g = make_grid(sc.x_min, sc.x_max, n);
    sys = make_dilation_system(g, sc.potential(), h, sc.nu()(h), L, spacing);
  } else {
    throw ConfigError("dilation.interior: expected scalar or grid");
  }
  const std::string check = c.str("dilation.check", "resolvent");
  CsvTable t({"probe", "error", "L", "spacing", "grid_converged"});
  double max_error = 0;
  if (check == "resolvent") {
    const auto zs = parse_z_list("dilation.z_list", c.str("dilation.z_list", "1:0.5"));
    const auto r = verify_resolvent_identity(sys, zs, c.integer("dilation.probes", 10), sc.seed);
    for (std::size_t k = 0; k < r.probe_errors.size(); ++k)
      t.add_row({std::to_string(k), fmt(r.probe_errors[k]), fmt(L), fmt(spacing), "false"});
    max_error = r.max_error;
  } else if (check == "semigroup") {
    const auto r = verify_semigroup_dilation(sys, c.list("dilation.t_list", {0.25, 0.5, 1.0}),
                                             c.integer("dilation.modes", 2000), true, 0.05, sc.seed);
    for (std::size_t k = 0; k < r.times.size(); ++k)
      t.add_row({"t=" + fmt(r.times[k]), fmt(r.errors[k]), fmt(L), fmt(spacing), "false"});
    max_error = r.max_error;
  } else {
    throw ConfigError("dilation.check: expected resolvent or semigroup");
  }
  a.csv("dilation.csv", t, false);
  if (c.has("dilation.max_error"))
    a.gate("max_error", max_error, max_error <= c.num("dilation.max_error", 0));
}

void do_besov(const Cfg& c, const Scenario& sc, int workers, Artifacts& a) {
  BesovSweepSetup s;
  s.pot = sc.potential();
  s.nu_law = sc.nu();
  s.grid = sc.grid();
  s.ham = sc.hamiltonian_options();
  s.reference = parse_besov_reference(c.str("besov.ref", "ah"));
  s.s = sc.s;
  s.I_lo = sc.I_lo;
  s.I_hi = sc.I_hi;
  s.mu_min = sc.mu_min;
  s.grid_gate = c.flag("besov.grid_gate", true);
  if (c.has("besov.h_list")) {
    const BesovSweepResult r = resolvent_besov_sweep(s, c.list("besov.h_list", kDefaultH), workers);
    CsvTable t({"h", "nu", "nu_tilde", "re_z", "im_z", "s", "norm", "j", "k", "weighted_norm",
                "residual", "grid_converged", "refined_norm"});
    for (const auto& row : r.rows)
      t.add_row({fmt(row.h), fmt(row.nu), fmt(row.nu_tilde), fmt(row.re_z), fmt(row.im_z), fmt(row.s),
                 fmt(row.norm), std::to_string(row.j), std::to_string(row.k), fmt(row.weighted_norm),
                 fmt(row.residual), fmt_bool(row.grid_converged), fmt(row.refined_norm)});
    a.csv("besov_sweep.csv", t, r.grid_converged);
    CsvTable b({"h", "j", "k", "block_norm", "weighted"});
    for (const auto& row : r.rows)
      for (const auto& e : row.table)
        b.add_row({fmt(row.h), std::to_string(e.j), std::to_string(e.k), fmt(e.block_norm), fmt(e.weighted)});
    a.csv("besov_blocks.csv", b, r.grid_converged);
    if (s.grid_gate) a.gate("grid_converged", r.grid_converged ? 1 : 0, r.grid_converged);
    if (c.has("besov.slope_min"))
      a.gate("slope_min", r.fit.slope, r.fit.slope >= c.num("besov.slope_min", 0));
    if (c.has("besov.slope_max"))
      a.gate("slope_max", r.fit.slope, r.fit.slope <= c.num("besov.slope_max", 0));
    return;
  }
  const double h = c.num("besov.h", 0.125);
  HamiltonianOptions ho = s.ham;
  const Hamiltonian ham = build_hamiltonian(s.grid, s.pot, sc.params(h), ho);
  const DyadicDecomposition dec = s.reference == BesovReference::Position
                                      ? make_dyadic_decomposition(s.grid.nodes())
                                      : make_dyadic_decomposition(dilation_generator(s.grid, h).to_dense());
  const cplx z(0.5 * (sc.I_lo + sc.I_hi), sc.mu_min);
  const BesovOperatorNorm b = resolvent_besov_norm(ham.H, dec, z, sc.s, workers);
  CsvTable t({"j", "k", "block_norm", "weighted"});
  for (const auto& e : b.table)
    t.add_row({std::to_string(e.j), std::to_string(e.k), fmt(e.block_norm), fmt(e.weighted)});
  a.csv("besov.csv", t, false);
}

void do_flow(const Cfg& c, const Scenario& sc, Artifacts& a) {
  FlowParams p;
  p.t_max = c.num("flow.t_max", 10.0);
  p.dt = c.num("flow.dt", 1e-3);
  p.order = c.integer("flow.order", 6);
  p.r_escape = 1e6;
  p.record_stride = c.integer("flow.stride", 10);
  const Potential pot = sc.potential();
  const Trajectory tr = integrate_flow({c.num("flow.x0", 0.0), c.num("flow.xi0", 1.0)}, pot, p);
  CsvTable t({"t", "x", "xi", "p", "q", "q1"});
  PlotSeries orbit{"orbit", {}, {}, false, true};
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    t.add_row({fmt(tr.times[k]), fmt(tr.points[k].x), fmt(tr.points[k].xi), fmt(energy(tr.points[k], pot)),
               fmt(tr.q_values[k]), fmt(tr.q1_values[k])});
    orbit.x.push_back(tr.points[k].x);
    orbit.y.push_back(tr.points[k].xi);
  }
  a.csv("orbit.csv", t, true);
  a.svg("orbit.svg", svg_plot("orbit portrait (" + sc.name + ")", "x", "xi", {orbit}, false, false));
  a.gate("energy_drift", tr.max_energy_drift, tr.max_energy_drift <= p.tol_energy);
}

void do_classify(const Cfg& c, const Scenario& sc, Artifacts& a) {
  FlowParams p;
  p.t_max = c.num("classify.t_max", 50.0);
  const Potential pot = sc.potential();
  const double E = c.num("classify.energy", 1.0);
  p.r_escape = c.num("classify.r_escape", estimate_escape_radius(pot, E));
  const DampingReport r = damping_condition_check(E, pot, p, c.integer("classify.samples", 200));
  CsvTable t({"x", "xi", "energy", "meets_O"});
  for (const auto& w : r.bounded_orbits) {
    const Classification cl = classify_trajectory(w, pot, p);
    t.add_row({fmt(w.x), fmt(w.xi), fmt(energy(w, pot)), fmt_bool(cl.meets_O)});
  }
  a.csv("bounded_orbits.csv", t, true);
  CsvTable s({"energy", "sampled", "bounded", "fraction_meeting_O", "min_bounded_integral", "verdict"});
  s.add_row({fmt(E), std::to_string(r.sampled), std::to_string(r.bounded_orbits.size()),
             fmt(r.fraction_meeting_O), fmt(r.min_bounded_integral), r.verdict});
  a.csv("classify.csv", s, true);
}

void do_accept(const Cfg& c, int workers, Artifacts& a) {
  std::vector<int> ids;
  for (double v : c.list("accept.criteria", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}))
    ids.push_back(static_cast<int>(v));
  const auto results = run_acceptance(ids, workers);
  CsvTable t({"criterion", "name", "passed", "detail"});
  for (const auto& r : results) {
    t.add_row({std::to_string(r.id), r.name, fmt_bool(r.passed), r.detail});
    a.gate("criterion_" + std::to_string(r.id), r.passed ? 1 : 0, r.passed);
  }
  a.csv("acceptance.csv", t, true);
}

void do_list(Artifacts& a) {
  CsvTable t({"name", "kind", "parameters"});
  for (const auto& r : list_scenarios()) t.add_row({r.name, r.kind, r.doc});
  a.csv("scenarios.csv", t, true);
}

}  // namespace

pt::ptree parse_config(const std::string& text) {
  pt::ptree root;
  std::istringstream is(text);
  try {
    pt::read_ini(is, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate_config(root);
  return root;
}

pt::ptree load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error&) {
    throw ConfigError("config: cannot read '" + path + "'");
  }
  return parse_config(text);
}

void validate_config(const pt::ptree& cfg) {
  for (const auto& [section, body] : cfg) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError(section + ": unknown section");
    if (!body.data().empty()) throw ConfigError(section + ": keys must live inside a section");
    for (const auto& kv : body)
      if (!it->second.count(kv.first)) throw ConfigError(section + "." + kv.first + ": unknown key");
  }
  const auto cmd = cfg.get_optional<std::string>("run.command");
  if (!cmd) throw ConfigError("run.command: missing");
  if (!kCommands.count(*cmd)) throw ConfigError("run.command: unknown command '" + *cmd + "'");
}

RunOutcome run(const pt::ptree& cfg) {
  validate_config(cfg);
  const Cfg c{cfg};
  const std::string command = c.str("run.command", "");
  const Scenario sc = scenario_from(cfg);
  int workers = c.integer("run.workers", 0);
  if (workers <= 0) workers = worker_count();

  Artifacts a;
  a.dir = c.str("run.out", "dslab_out");
  a.plots = c.flag("run.plots", false);
  fs::create_directories(a.dir);

  if (command == "sweep") do_sweep(c, sc, workers, a, c.str("run.csv_name", "sweep.csv"));
  else if (command == "resolvent") do_resolvent(c, sc, a);
  else if (command == "lap") do_lap(c, sc, a);
  else if (command == "egorov") do_egorov(c, sc, workers, a);
  else if (command == "smoothing") do_smoothing(c, sc, workers, a);
  else if (command == "dilation") do_dilation(c, sc, a);
  else if (command == "besov") do_besov(c, sc, workers, a);
  else if (command == "flow") do_flow(c, sc, a);
  else if (command == "classify") do_classify(c, sc, a);
  else if (command == "accept") do_accept(c, workers, a);
  else if (command == "list") do_list(a);

  std::ostringstream cfg_text;
  pt::write_ini(cfg_text, cfg);
  nlohmann::json manifest = {
      {"tool", kToolVersion},
      {"command", command},
      {"config_hash", hex64(fnv1a64(cfg_text.str()))},
      {"scenario", sc.name},
      {"seeds", {{"scenario", sc.seed}, {"lanczos", SvdOptions{}.seed}}},
      {"results", a.results},
      {"files", a.files},
  };
  nlohmann::json gates = nlohmann::json::array();
  RunOutcome out;
  out.directory = a.dir;
  out.command = command;
  out.gates = a.gates;
  std::ostringstream summary;
  for (const auto& g : a.gates) {
    gates.push_back({{"name", g.name}, {"value", g.value}, {"passed", g.passed}});
    summary << (g.passed ? "PASS " : "FAIL ") << g.name << " = " << fmt(g.value) << "\n";
    if (!g.passed) out.exit_code = 1;
  }
  manifest["gates"] = gates;
  write_text((fs::path(a.dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  a.files.push_back("manifest.json");
  out.files = a.files;
  out.summary = summary.str();
  return out;
}

RunOutcome run(const std::string& config_path) { return run(load_config(config_path)); }

}  // namespace dslab
