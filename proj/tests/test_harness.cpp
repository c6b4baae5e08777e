#include <filesystem>
#include <string>

#include "doctest.h"
#include "dslab/report.hpp"
#include "dslab/runner.hpp"
#include "dslab/scenario.hpp"

using namespace dslab;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
  try {
    run(parse_config(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dslab_harness_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("CSV escaping and parsing round trip") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CsvTable t({"name", "value"});
  t.add_row({"x,y", "1"});
  t.add_row({"quote\"d", "line\nbreak"});
  CHECK_THROWS(t.add_row({"only one"}));
  const std::string text = t.str();
  CHECK(text.substr(0, 12) == "name,value\r\n");
  const auto rows = parse_csv(text);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "x,y");
  CHECK(rows[2][0] == "quote\"d");
  CHECK(rows[2][1] == "line\nbreak");
}

TEST_CASE("number formatting and hashing are stable") {
  CHECK(fmt(0.1) == "0.1");
  CHECK(fmt(1.0 / 3.0) == "0.333333333333");
  CHECK(fmt(1e-20) == "1e-20");
  CHECK(fmt_bool(true) == "true");
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("scenario INI round trip") {
  for (const auto& [name, sc] : scenario_registry()) {
    const Scenario back = Scenario::from_ini(sc.to_ini());
    CHECK(back == sc);
  }
  Scenario odd = resolve_scenario("double_barrier");
  odd.x_min = -1.0 / 3.0;
  odd.mu_min = 3.14159e-5;
  odd.seed = 987654321987ULL;
  CHECK(Scenario::from_ini(odd.to_ini()) == odd);
}

TEST_CASE("scenario listing resolves and builds") {
  const auto rows = list_scenarios();
  bool has_free = false, has_db = false;
  for (const auto& r : rows) {
    has_free = has_free || r.name == "free";
    has_db = has_db || r.name == "double_barrier";
    const Scenario sc = resolve_scenario(r.name);
    CHECK_NOTHROW(sc.validate());
    CHECK_NOTHROW(sc.potential());
    CHECK(sc.grid().n_points >= 8);
  }
  CHECK(has_free);
  CHECK(has_db);
  CHECK(format_listing(rows).find("double_barrier") != std::string::npos);
}

TEST_CASE("config errors name the offending path") {
  CHECK(config_error("[run]\ncommand = flow\n[scenario]\nv1 = no_such_well\n").find("scenario.v1") !=
        std::string::npos);
  CHECK(config_error("[run]\ncommand = flow\n[scenario]\nbase = nowhere\n").find("nowhere") !=
        std::string::npos);
  CHECK(config_error("[run]\ncommand = flow\n[bogus]\nx = 1\n").find("bogus") != std::string::npos);
  CHECK(config_error("[run]\ncommand = flow\n[flow]\nspeed = 1\n").find("flow.speed") != std::string::npos);
  CHECK(config_error("[run]\ncommand = teleport\n").find("run.command") != std::string::npos);
  CHECK(config_error("[scenario]\nbase = free\n").find("run.command") != std::string::npos);
  CHECK(config_error("[run]\ncommand = flow\n[flow]\ndt = fast\n").find("flow.dt") != std::string::npos);
}

TEST_CASE("a minimal sweep is reproducible byte for byte and fully listed in the manifest") {
  const fs::path a = scratch("sweep_a"), b = scratch("sweep_b");
  auto cfg = [](const fs::path& out) {
    return "[run]\ncommand = sweep\nout = " + out.string() +
           "\nworkers = 1\n[scenario]\nbase = free\nx_min = -4\nx_max = 4\nn_points = 256\n"
           "[sweep]\nh_list = 1/2, 1/4\ngrid_gate = false\nslope_min = -10\nslope_max = 10\n"
           "residual_max = 10\n";
  };
  const RunOutcome ra = run(parse_config(cfg(a)));
  const RunOutcome rb = run(parse_config(cfg(b)));
  CHECK(ra.exit_code == 0);
  REQUIRE(fs::exists(a / "sweep.csv"));
  CHECK(read_text((a / "sweep.csv").string()) == read_text((b / "sweep.csv").string()));
  const std::string manifest = read_text((a / "manifest.json").string());
  for (const auto& entry : fs::directory_iterator(a)) {
    const std::string f = entry.path().filename().string();
    if (entry.path().extension() == ".csv") CHECK(manifest.find("\"" + f + "\"") != std::string::npos);
  }
  const auto rows = parse_csv(read_text((a / "sweep.csv").string()));
  REQUIRE(rows.size() == 3);
  bool has_flag = false;
  for (const auto& col : rows[0]) has_flag = has_flag || col == "grid_converged";
  CHECK(has_flag);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("flow and classify pipelines write their tables") {
  const fs::path d = scratch("flow");
  const RunOutcome r = run(parse_config("[run]\ncommand = flow\nout = " + d.string() +
                                        "\n[scenario]\nbase = double_barrier\n[flow]\nx0 = 0\nxi0 = 0.9\n"
                                        "t_max = 5\nstride = 100\n"));
  CHECK(r.exit_code == 0);
  const auto rows = parse_csv(read_text((d / "orbit.csv").string()));
  REQUIRE(rows.size() > 2);
  CHECK(rows[0][0] == "t");
  fs::remove_all(d);
}
