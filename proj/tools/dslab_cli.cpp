// Command-line front end: every subcommand is translated into the same INI
// configuration that `dslab run --config FILE` accepts.
#include <filesystem>
#include <iostream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>

#include "CLI11.hpp"
#include "dslab/acceptance.hpp"
#include "dslab/common.hpp"
#include "dslab/runner.hpp"
#include "dslab/scenario.hpp"
#include "dslab/workers.hpp"

namespace pt = boost::property_tree;

namespace {

struct Common {
  std::string scenario = "free";
  std::string out = "dslab_out";
  std::string nu;
  double s = -1;
  bool plots = false;
  int workers = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  app->add_option("--scenario", c.scenario, "scenario or preset name (see `dslab list`)");
  app->add_option("--out", c.out, "artifact directory (or a .csv path for sweep)");
  app->add_option("--nu", c.nu, "damping law: h, h^2, power(c,k), const(c)");
  app->add_option("--s", c.s, "weight / Besov exponent");
  app->add_flag("--plots", c.plots, "also write SVG plots");
  app->add_option("--workers", c.workers, "worker threads (default: DSLAB_WORKERS or 1)");
}

pt::ptree base_config(const std::string& command, const Common& c) {
  pt::ptree cfg;
  cfg.put("run.command", command);
  cfg.put("run.out", c.out);
  cfg.put("run.plots", c.plots ? "true" : "false");
  if (c.workers > 0) cfg.put("run.workers", c.workers);
  cfg.put("scenario.base", c.scenario);
  if (!c.nu.empty()) cfg.put("scenario.nu", c.nu);
  if (c.s >= 0) cfg.put("scenario.s", c.s);
  return cfg;
}

std::pair<std::string, std::string> split_pair(const std::string& text, const std::string& what) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw dslab::ConfigError(what + ": expected A,B");
  return {text.substr(0, comma), text.substr(comma + 1)};
}

int execute(const pt::ptree& cfg) {
  const dslab::RunOutcome r = dslab::run(cfg);
  std::cout << "artifacts: " << r.directory << "\n";
  for (const auto& f : r.files) std::cout << "  " << f << "\n";
  if (!r.summary.empty()) std::cout << r.summary;
  for (const auto& g : r.gates)
    if (!g.passed)
      std::cerr << dslab::GateFailure("gate '" + g.name + "' failed with value " + std::to_string(g.value)).what()
                << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dslab: dissipative semiclassical Schroedinger workbench"};
  app.require_subcommand(1);
  Common common;

  auto* run = app.add_subcommand("run", "run a pipeline from an INI config file");
  std::string config_path;
  run->add_option("--config", config_path, "config file")->required();

  auto* flow = app.add_subcommand("flow", "integrate one classical orbit (orbit.csv)");
  add_common(flow, common);
  double x0 = 0, xi0 = 1, t_max = 10, dt = 1e-3;
  flow->add_option("--x0", x0);
  flow->add_option("--xi0", xi0);
  flow->add_option("--t-max", t_max);
  flow->add_option("--dt", dt);

  auto* classify = app.add_subcommand("classify", "bounded orbits on an energy shell and damping coverage");
  add_common(classify, common);
  double energy = 1.0;
  int samples = 200;
  classify->add_option("--energy", energy);
  classify->add_option("--samples", samples);

  auto* resolvent = app.add_subcommand("resolvent", "weighted resolvent norm at one z");
  add_common(resolvent, common);
  double h = 0.125;
  std::string z = "1,0.01";
  resolvent->add_option("--h", h);
  resolvent->add_option("--z", z, "RE,IM");

  auto* sweep = app.add_subcommand("sweep", "h-scaling sweep of the weighted sup-norm");
  add_common(sweep, common);
  std::string h_list = "1/8,1/16,1/32,1/64", interval;
  bool no_gate = false;
  sweep->add_option("--h-list", h_list);
  sweep->add_option("--interval", interval, "a,b energy window");
  sweep->add_flag("--no-gate", no_gate, "skip the grid-refinement gate");

  auto* egorov = app.add_subcommand("egorov", "Egorov-with-damping comparison");
  add_common(egorov, common);
  std::string symbol = "gaussian(0,0.6,0.7)";
  double t = 1.0;
  egorov->add_option("--symbol", symbol);
  egorov->add_option("--t", t);
  egorov->add_option("--h-list", h_list);

  auto* dilation = app.add_subcommand("dilation", "selfadjoint dilation identities");
  add_common(dilation, common);
  double L = 10.0, spacing = 1e-3;
  std::string check = "resolvent", interior = "scalar", zd = "1,0.5";
  dilation->add_option("--L", L);
  dilation->add_option("--z", zd, "RE,IM");
  dilation->add_option("--check", check, "resolvent|semigroup");
  dilation->add_option("--interior", interior, "scalar|grid");
  dilation->add_option("--spacing", spacing);
  dilation->add_option("--h", h);

  auto* besov = app.add_subcommand("besov", "B_s -> B_s^* norm of the resolvent");
  add_common(besov, common);
  std::string ref = "ah", besov_h_list;
  besov->add_option("--h", h);
  besov->add_option("--h-list", besov_h_list, "sweep instead of a single h");
  besov->add_option("--ref", ref, "ah|x");

  auto* accept = app.add_subcommand("accept", "acceptance suite (pass/fail per criterion)");
  std::string only;
  int accept_workers = 0;
  accept->add_option("--only", only, "comma-separated criterion ids");
  accept->add_option("--workers", accept_workers);

  auto* list = app.add_subcommand("list", "scenarios and presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return execute(dslab::load_config(config_path));
    if (list->parsed()) {
      std::cout << dslab::format_listing(dslab::list_scenarios());
      return 0;
    }
    if (accept->parsed()) {
      std::vector<int> ids;
      if (only.empty()) {
        for (int i = 1; i <= 11; ++i) ids.push_back(i);
      } else {
        std::stringstream ss(only);
        std::string item;
        while (std::getline(ss, item, ',')) ids.push_back(std::stoi(item));
      }
      const int w = accept_workers > 0 ? accept_workers : dslab::worker_count();
      bool ok = true;
      dslab::run_acceptance(ids, w, [&](const dslab::CriterionResult& r) {
        std::cout << dslab::format_criterion(r) << std::endl;
        ok = ok && r.passed;
      });
      return ok ? 0 : 1;
    }
    pt::ptree cfg;
    if (flow->parsed()) {
      cfg = base_config("flow", common);
      cfg.put("flow.x0", x0), cfg.put("flow.xi0", xi0), cfg.put("flow.t_max", t_max), cfg.put("flow.dt", dt);
    } else if (classify->parsed()) {
      cfg = base_config("classify", common);
      cfg.put("classify.energy", energy), cfg.put("classify.samples", samples);
    } else if (resolvent->parsed()) {
      cfg = base_config("resolvent", common);
      const auto [re, im] = split_pair(z, "--z");
      cfg.put("resolvent.h", h), cfg.put("resolvent.re_z", re), cfg.put("resolvent.im_z", im);
    } else if (sweep->parsed()) {
      Common c = common;
      std::string csv = "sweep.csv";
      if (c.out.size() > 4 && c.out.substr(c.out.size() - 4) == ".csv") {
        const std::filesystem::path p(c.out);
        csv = p.filename().string();
        c.out = p.has_parent_path() ? p.parent_path().string() : ".";
      }
      cfg = base_config("sweep", c);
      cfg.put("run.csv_name", csv);
      cfg.put("sweep.h_list", h_list);
      if (no_gate) cfg.put("sweep.grid_gate", "false");
      if (!interval.empty()) {
        const auto [lo, hi] = split_pair(interval, "--interval");
        cfg.put("scenario.I_lo", lo), cfg.put("scenario.I_hi", hi);
      }
    } else if (egorov->parsed()) {
      cfg = base_config("egorov", common);
      cfg.put("egorov.symbol", symbol), cfg.put("egorov.t", t), cfg.put("egorov.h_list", h_list);
    } else if (dilation->parsed()) {
      cfg = base_config("dilation", common);
      const auto [re, im] = split_pair(zd, "--z");
      cfg.put("dilation.L", L), cfg.put("dilation.spacing", spacing), cfg.put("dilation.check", check);
      cfg.put("dilation.interior", interior), cfg.put("dilation.h", h);
      cfg.put("dilation.z_list", re + ":" + im);
    } else if (besov->parsed()) {
      cfg = base_config("besov", common);
      cfg.put("besov.ref", ref), cfg.put("besov.h", h);
      if (!besov_h_list.empty()) cfg.put("besov.h_list", besov_h_list);
    }
    return execute(cfg);
  } catch (const dslab::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return 2;
  }
}
