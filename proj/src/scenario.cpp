#include "dslab/scenario.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "dslab/potential.hpp"

namespace dslab {

namespace pt = boost::property_tree;

Potential Scenario::potential() const {
  try {
    return make_potential(v1, v2);
  } catch (const ConfigError& e) {
    throw ConfigError("scenario.v1/v2: " + std::string(e.what()));
  }
}

Grid Scenario::grid() const {
  if (!(x_max > x_min)) throw ConfigError("scenario.x_max must exceed scenario.x_min");
  if (n_points < 8) throw ConfigError("scenario.n_points must be >= 8");
  return make_grid(x_min, x_max, n_points);
}

NuLaw Scenario::nu() const {
  try {
    return NuLaw::parse(nu_law);
  } catch (const ConfigError& e) {
    throw ConfigError("scenario.nu: " + std::string(e.what()));
  }
}

HamiltonianOptions Scenario::hamiltonian_options() const {
  if (stencil_order != 2 && stencil_order != 4 && stencil_order != 6 && stencil_order != 8)
    throw ConfigError("scenario.stencil_order must be 2, 4, 6 or 8");
  if (!(resolution_guard > 0)) throw ConfigError("scenario.resolution_guard must be positive");
  if (sponge_strength < 0) throw ConfigError("scenario.sponge_strength must be >= 0");
  if (!(sponge_width >= 0 && sponge_width < 0.5))
    throw ConfigError("scenario.sponge_width must be in [0, 0.5)");
  HamiltonianOptions o;
  o.stencil_order = stencil_order;
  o.resolution_guard = resolution_guard;
  o.e_max = std::max(1.0, I_hi);
  o.sponge.strength = sponge_strength;
  o.sponge.width_fraction = sponge_width;
  o.sponge.enabled = sponge_strength > 0 && sponge_width > 0;
  return o;
}

SemiclassicalParams Scenario::params(double h) const { return make_params(h, nu()); }

void Scenario::validate() const {
  potential();
  grid();
  nu();
  hamiltonian_options();
  if (!(I_hi > I_lo)) throw ConfigError("scenario.I_hi must exceed scenario.I_lo");
  if (!(mu_min > 0)) throw ConfigError("scenario.mu_min must be positive");
  if (s < 0) throw ConfigError("scenario.s must be >= 0");
}

pt::ptree Scenario::to_ptree() const {
  pt::ptree t;
  auto num = [](double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
  };
  t.put("name", name);
  t.put("v1", v1);
  t.put("v2", v2);
  t.put("nu", nu_law);
  t.put("x_min", num(x_min));
  t.put("x_max", num(x_max));
  t.put("n_points", n_points);
  t.put("stencil_order", stencil_order);
  t.put("resolution_guard", num(resolution_guard));
  t.put("sponge_strength", num(sponge_strength));
  t.put("sponge_width", num(sponge_width));
  t.put("I_lo", num(I_lo));
  t.put("I_hi", num(I_hi));
  t.put("s", num(s));
  t.put("mu_min", num(mu_min));
  t.put("seed", seed);
  return t;
}

namespace {
template <class T>
T get_key(const pt::ptree& t, const std::string& key, T fallback) {
  const auto node = t.get_child_optional(key);
  if (!node) return fallback;
  try {
    return node->get_value<T>();
  } catch (const pt::ptree_error&) {
    throw ConfigError("scenario." + key + ": cannot parse '" + node->data() + "'");
  }
}
}  // namespace

Scenario Scenario::from_ptree(const pt::ptree& t, const Scenario& base) {
  static const std::vector<std::string> known = {
      "name",  "base",  "v1",          "v2",          "nu",     "x_min", "x_max",  "n_points",
      "stencil_order", "resolution_guard", "sponge_strength", "sponge_width", "I_lo",
      "I_hi",  "s",     "mu_min",      "seed"};
  for (const auto& kv : t)
    if (std::find(known.begin(), known.end(), kv.first) == known.end())
      throw ConfigError("scenario." + kv.first + ": unknown key");
  Scenario s = base;
  s.name = get_key<std::string>(t, "name", base.name);
  s.v1 = get_key<std::string>(t, "v1", base.v1);
  s.v2 = get_key<std::string>(t, "v2", base.v2);
  s.nu_law = get_key<std::string>(t, "nu", base.nu_law);
  s.x_min = get_key<double>(t, "x_min", base.x_min);
  s.x_max = get_key<double>(t, "x_max", base.x_max);
  s.n_points = get_key<int>(t, "n_points", base.n_points);
  s.stencil_order = get_key<int>(t, "stencil_order", base.stencil_order);
  s.resolution_guard = get_key<double>(t, "resolution_guard", base.resolution_guard);
  s.sponge_strength = get_key<double>(t, "sponge_strength", base.sponge_strength);
  s.sponge_width = get_key<double>(t, "sponge_width", base.sponge_width);
  s.I_lo = get_key<double>(t, "I_lo", base.I_lo);
  s.I_hi = get_key<double>(t, "I_hi", base.I_hi);
  s.s = get_key<double>(t, "s", base.s);
  s.mu_min = get_key<double>(t, "mu_min", base.mu_min);
  s.seed = get_key<std::uint64_t>(t, "seed", base.seed);
  return s;
}

std::string Scenario::to_ini() const {
  pt::ptree root;
  root.add_child("scenario", to_ptree());
  std::ostringstream os;
  pt::write_ini(os, root);
  return os.str();
}

Scenario Scenario::from_ini(const std::string& text) {
  pt::ptree root;
  std::istringstream is(text);
  try {
    pt::read_ini(is, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("ini: ") + e.what());
  }
  const auto sec = root.get_child_optional("scenario");
  if (!sec) throw ConfigError("scenario: missing section");
  return from_ptree(*sec, Scenario{});
}

bool Scenario::operator==(const Scenario& o) const {
  return name == o.name && v1 == o.v1 && v2 == o.v2 && nu_law == o.nu_law && x_min == o.x_min &&
         x_max == o.x_max && n_points == o.n_points && stencil_order == o.stencil_order &&
         resolution_guard == o.resolution_guard && sponge_strength == o.sponge_strength &&
         sponge_width == o.sponge_width && I_lo == o.I_lo && I_hi == o.I_hi && s == o.s &&
         mu_min == o.mu_min && seed == o.seed;
}

const std::map<std::string, Scenario>& scenario_registry() {
  static const std::map<std::string, Scenario> reg = [] {
    std::map<std::string, Scenario> r;
    Scenario free;
    free.name = "free";
    r[free.name] = free;

    Scenario db = free;
    db.name = "double_barrier";
    db.v1 = "double_barrier(2,2,0.15)";
    db.v2 = "well_centered(3,1)";
    r[db.name] = db;

    Scenario db2 = db;
    db2.name = "double_barrier_nu_h2";
    db2.nu_law = "h^2";
    r[db2.name] = db2;

    Scenario dbo = db;
    dbo.name = "double_barrier_uncovered";
    dbo.v2 = "outside_only(1,5,1)";
    r[dbo.name] = dbo;

    Scenario eg;
    eg.name = "egorov_bump";
    eg.v1 = "gaussian_bump(0.5,1)";
    eg.v2 = "well_centered(0.5,1)";
    eg.x_min = -3.5;
    eg.x_max = 3.5;
    eg.n_points = 1024;
    eg.stencil_order = 8;
    r[eg.name] = eg;

    Scenario besov = free;
    besov.name = "free_besov";
    besov.x_min = -3.5;
    besov.x_max = 3.5;
    besov.n_points = 1024;
    besov.s = 0.5;
    r[besov.name] = besov;

    Scenario harm = free;
    harm.name = "harmonic";
    harm.v1 = "harmonic(1)";
    harm.v2 = "constant(0.5)";
    harm.sponge_strength = 0;
    r[harm.name] = harm;
    return r;
  }();
  return reg;
}

Scenario resolve_scenario(const std::string& name) {
  const auto& reg = scenario_registry();
  if (auto it = reg.find(name); it != reg.end()) return it->second;
  for (const auto& doc : preset_catalog()) {
    if (doc.name != name) continue;
    Scenario s;
    s.name = name;
    if (doc.kind == "potential") {
      s.v1 = name;
    } else {
      s.v2 = name;
    }
    if (name == "harmonic") s.sponge_strength = 0;
    return s;
  }
  throw ConfigError("scenario.name: unknown scenario or preset '" + name + "'");
}

std::vector<ScenarioListing> list_scenarios() {
  std::vector<ScenarioListing> out;
  for (const auto& [name, s] : scenario_registry())
    out.push_back({name, "scenario",
                   "V1=" + s.v1 + " V2=" + s.v2 + " nu=" + s.nu_law + " box=[" +
                       std::to_string(s.x_min) + "," + std::to_string(s.x_max) +
                       "] n=" + std::to_string(s.n_points)});
  for (const auto& d : preset_catalog()) out.push_back({d.name, d.kind, d.params});
  return out;
}

std::string format_listing(const std::vector<ScenarioListing>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(28) << "name" << std::setw(11) << "kind" << "parameters\n";
  for (const auto& r : rows) os << std::setw(28) << r.name << std::setw(11) << r.kind << r.doc << "\n";
  return os.str();
}

}  // namespace dslab
