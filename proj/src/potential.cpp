#include "dslab/potential.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "dslab/common.hpp"

namespace dslab {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double arg_or(const PresetSpec& p, std::size_t i, double fallback) {
  return i < p.args.size() ? p.args[i] : fallback;
}

void require_args(const PresetSpec& p, std::size_t max_args) {
  if (p.args.size() > max_args)
    throw ConfigError("preset '" + p.name + "' takes at most " + std::to_string(max_args) +
                      " arguments");
}

}  // namespace

PresetSpec parse_preset(const std::string& text) {
  PresetSpec out;
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos) {
    out.name = t;
  } else {
    if (t.back() != ')') throw ConfigError("malformed preset '" + text + "'");
    out.name = trim(t.substr(0, open));
    std::stringstream ss(t.substr(open + 1, t.size() - open - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        std::size_t pos = 0;
        out.args.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError("non-numeric argument '" + item + "' in preset '" + text + "'");
      }
    }
  }
  if (out.name.empty()) throw ConfigError("empty preset name");
  return out;
}

double smooth_bump(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

const std::vector<PresetDoc>& preset_catalog() {
  static const std::vector<PresetDoc> docs = {
      {"free", "potential", "V1 = 0"},
      {"gaussian_bump", "potential", "(A=0.5, sigma=1): V1 = A exp(-x^2/sigma^2)"},
      {"double_barrier", "potential",
       "(a=2, B=2, sigma=0.15): V1 = B [exp(-(x-a)^2/sigma^2) + exp(-(x+a)^2/sigma^2)]"},
      {"harmonic", "potential", "(k=1): V1 = k x^2 (confining; test preset)"},
      {"none", "damping", "V2 = 0"},
      {"constant", "damping", "(c=1): V2 = c"},
      {"well_centered", "damping", "(c=3, width=1): V2 = c exp(-x^2/width^2)"},
      {"outside_only", "damping",
       "(c=1, center=5, halfwidth=1): V2 = c bump((|x|-center)/halfwidth), compact support"},
  };
  return docs;
}

Potential make_potential(const std::string& v1_spec, const std::string& v2_spec) {
  Potential pot;
  const PresetSpec p1 = parse_preset(v1_spec);
  const PresetSpec p2 = parse_preset(v2_spec);
  if (p1.name == "free") {
    require_args(p1, 0);
    pot.v1 = [](double) { return 0.0; };
    pot.grad_v1 = [](double) { return 0.0; };
    pot.rho = 2.0;
  } else if (p1.name == "gaussian_bump") {
    require_args(p1, 2);
    const double A = arg_or(p1, 0, 0.5), s = arg_or(p1, 1, 1.0);
    pot.v1 = [A, s](double x) { return A * std::exp(-x * x / (s * s)); };
    pot.grad_v1 = [A, s](double x) { return -2.0 * x / (s * s) * A * std::exp(-x * x / (s * s)); };
    pot.rho = 2.0;
  } else if (p1.name == "double_barrier") {
    require_args(p1, 3);
    const double a = arg_or(p1, 0, 2.0), B = arg_or(p1, 1, 2.0), s = arg_or(p1, 2, 0.15);
    pot.v1 = [a, B, s](double x) {
      return B * (std::exp(-(x - a) * (x - a) / (s * s)) + std::exp(-(x + a) * (x + a) / (s * s)));
    };
    pot.grad_v1 = [a, B, s](double x) {
      return B * (-2.0 * (x - a) / (s * s) * std::exp(-(x - a) * (x - a) / (s * s)) -
                  2.0 * (x + a) / (s * s) * std::exp(-(x + a) * (x + a) / (s * s)));
    };
    pot.rho = 2.0;
  } else if (p1.name == "harmonic") {
    require_args(p1, 1);
    const double k = arg_or(p1, 0, 1.0);
    pot.v1 = [k](double x) { return k * x * x; };
    pot.grad_v1 = [k](double x) { return 2.0 * k * x; };
    pot.decaying = false;
  } else {
    throw ConfigError("unknown potential preset '" + p1.name + "'");
  }

  if (p2.name == "none") {
    require_args(p2, 0);
    pot.v2 = [](double) { return 0.0; };
  } else if (p2.name == "constant") {
    require_args(p2, 1);
    const double c = arg_or(p2, 0, 1.0);
    if (c < 0) throw ConfigError("constant damping must be nonnegative");
    pot.v2 = [c](double) { return c; };
  } else if (p2.name == "well_centered") {
    require_args(p2, 2);
    const double c = arg_or(p2, 0, 3.0), w = arg_or(p2, 1, 1.0);
    if (c < 0) throw ConfigError("well_centered amplitude must be nonnegative");
    pot.v2 = [c, w](double x) { return c * std::exp(-x * x / (w * w)); };
  } else if (p2.name == "outside_only") {
    require_args(p2, 3);
    const double c = arg_or(p2, 0, 1.0), r0 = arg_or(p2, 1, 5.0), hw = arg_or(p2, 2, 1.0);
    if (c < 0) throw ConfigError("outside_only amplitude must be nonnegative");
    pot.v2 = [c, r0, hw](double x) { return c * smooth_bump((std::abs(x) - r0) / hw); };
  } else {
    throw ConfigError("unknown damping preset '" + p2.name + "'");
  }
  pot.preset_name = v1_spec + "+" + v2_spec;
  return pot;
}

PotentialCheck check_potential(const Potential& pot, double r_max, int samples) {
  PotentialCheck c;
  double cmax = 0.0;
  std::vector<double> ratio;
  for (int i = 0; i < samples; ++i) {
    const double x = -r_max + 2.0 * r_max * i / (samples - 1);
    if (pot.V2(x) < 0) c.v2_nonnegative = false;
    const double step = 1e-5 * std::max(1.0, std::abs(x));
    const double fd = (pot.V1(x + step) - pot.V1(x - step)) / (2 * step);
    const double g = pot.dV1(x);
    const double scale = std::max({std::abs(g), std::abs(fd), 1e-3});
    c.max_grad_rel_error = std::max(c.max_grad_rel_error, std::abs(fd - g) / scale);
    const double bracket = std::pow(1.0 + x * x, pot.rho / 2.0);
    ratio.push_back(std::abs(pot.V1(x)) * bracket);
    cmax = std::max(cmax, ratio.back());
  }
  if (pot.decaying) {
    // the envelope constant estimated on the inner half must cover the outer radii
    double inner = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double x = -r_max + 2.0 * r_max * i / (samples - 1);
      if (std::abs(x) <= r_max / 2) inner = std::max(inner, ratio[i]);
    }
    c.decay_ok = cmax <= inner * (1.0 + 1e-9) + 1e-12;
  }
  return c;
}

}  // namespace dslab
