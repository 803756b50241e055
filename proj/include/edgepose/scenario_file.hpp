#ifndef EDGEPOSE_SCENARIO_FILE_HPP
#define EDGEPOSE_SCENARIO_FILE_HPP

#include <iosfwd>
#include <string>

#include "edgepose/optimizer.hpp"
#include "edgepose/scenario.hpp"

namespace edgepose {

// A parsed scenario document: the resolved scenario and optimizer settings
// plus enough input detail to echo a faithful provenance header.
struct ScenarioFile {
  Scenario scenario;
  OptimizerConfig config;
  std::string dev_pos_spec = "beta(6,2)";
  std::string dev_neg_spec = "beta(2,6)";
  std::string srv_pos_spec = "beta(12,2)";
  std::string srv_neg_spec = "beta(2,12)";
};

// Flat `key = value` text, one per line, `#` comments. Unknown keys are
// rejected by name; missing keys take the defaults. Distribution values are
// `beta(a,b)` or `file(path)`.
ScenarioFile load_scenario_file(const std::string& path);

// Same grammar from a string (for tests and defaults).
ScenarioFile parse_scenario_text(const std::string& text, const std::string& origin);

ScenarioFile default_scenario_file();

// Comment block with every resolved key (defaults included) and the seed;
// prepended to every output file.
void write_provenance(std::ostream& out, const ScenarioFile& sf);

}  // namespace edgepose

#endif
