#pragma once

#include <functional>
#include <string>
#include <vector>

namespace dslab {

// One-dimensional pair (V1, V2); V2 >= 0 is the damping profile.
struct Potential {
  std::function<double(double)> v1;
  std::function<double(double)> grad_v1;
  std::function<double(double)> v2;
  double rho = 1.0;        // decay exponent (informational for non-decaying presets)
  bool decaying = true;
  std::string preset_name;

  double V1(double x) const { return v1(x); }
  double dV1(double x) const { return grad_v1(x); }
  double V2(double x) const { return v2(x); }
};

// Parsed "name(arg,arg,...)" preset spec.
struct PresetSpec {
  std::string name;
  std::vector<double> args;
};
PresetSpec parse_preset(const std::string& text);

// Real-potential presets: free, gaussian_bump(A,sigma), double_barrier(a,B,sigma),
// harmonic(k). Damping presets: none, constant(c), well_centered(c,width),
// outside_only(c,center,halfwidth).
Potential make_potential(const std::string& v1_spec, const std::string& v2_spec);

struct PresetDoc {
  std::string name;
  std::string kind;  // "potential" | "damping"
  std::string params;
};
const std::vector<PresetDoc>& preset_catalog();

// Smooth compactly supported bump exp(1 - 1/(1-u^2)) on |u| < 1, peak 1.
double smooth_bump(double u);

struct PotentialCheck {
  bool v2_nonnegative = true;
  bool decay_ok = true;
  double max_grad_rel_error = 0.0;
};
// Sampled invariants: V2 >= 0, |V1| <= C <x>^-rho on sampled radii, and
// grad_v1 against central differences.
PotentialCheck check_potential(const Potential& pot, double r_max = 20.0, int samples = 400);

}  // namespace dslab
