#pragma once

#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace dslab {

struct GateResult {
  std::string name;
  double value = 0.0;
  bool passed = false;
};

struct RunOutcome {
  std::string directory;
  std::string command;
  std::vector<std::string> files;  // relative to directory
  std::vector<GateResult> gates;
  int exit_code = 0;              // 0 iff every gate passed
  std::string summary;            // human-readable table
};

// Parses an INI config (see config/SCHEMA.md); throws ConfigError with the
// offending "section.key" path.
boost::property_tree::ptree load_config(const std::string& path);
boost::property_tree::ptree parse_config(const std::string& text);
void validate_config(const boost::property_tree::ptree& cfg);

// Runs the pipeline named by run.command and writes CSVs, optional SVG plots
// and manifest.json into run.out.
RunOutcome run(const boost::property_tree::ptree& cfg);
RunOutcome run(const std::string& config_path);

}  // namespace dslab
