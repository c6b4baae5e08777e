#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "dslab/quantize.hpp"

namespace dslab {

struct Scenario {
  std::string name = "custom";
  std::string v1 = "free";
  std::string v2 = "none";
  std::string nu_law = "h";
  double x_min = -7.5, x_max = 7.5;
  int n_points = 2048;
  int stencil_order = 4;
  double resolution_guard = 2.0;
  double sponge_strength = 4.0;
  double sponge_width = 0.15;
  double I_lo = 0.9, I_hi = 1.1;
  double s = 1.0;
  double mu_min = 1e-4;
  std::uint64_t seed = 12345;

  Potential potential() const;
  Grid grid() const;
  NuLaw nu() const;
  HamiltonianOptions hamiltonian_options() const;
  SemiclassicalParams params(double h) const;
  // Resolves every field; throws ConfigError naming the offending key.
  void validate() const;

  boost::property_tree::ptree to_ptree() const;
  static Scenario from_ptree(const boost::property_tree::ptree& pt, const Scenario& base);
  std::string to_ini() const;
  static Scenario from_ini(const std::string& text);
  bool operator==(const Scenario& o) const;
};

// Built-in scenarios (name -> scenario).
const std::map<std::string, Scenario>& scenario_registry();

// Registry names, or bare preset names (a potential preset with no damping,
// or a damping preset over a free V1).
Scenario resolve_scenario(const std::string& name);

struct ScenarioListing {
  std::string name;
  std::string kind;  // "scenario" | "potential" | "damping"
  std::string doc;
};
std::vector<ScenarioListing> list_scenarios();
std::string format_listing(const std::vector<ScenarioListing>& rows);

}  // namespace dslab
