#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "darklattice/core.hpp"
#include "darklattice/lattice.hpp"
#include "darklattice/pattern.hpp"

namespace darklattice {

using json = nlohmann::json;

// Experiment kinds accepted by run().
const std::vector<std::string>& experiment_kinds();

// Fully populated configuration with defaults for the experiment.
json default_config(const std::string& experiment);

// Recursively overlays `over` onto `base` (objects merge, everything else replaces).
void merge_config(json& base, const json& over);

// Empty iff run() would pass validation; each entry names the offending key.
std::vector<std::string> validate_config(const json& config);

// Hash of the resolved config without output plumbing (output.dir, threads).
std::string config_hash(const json& config);

// Typed accessors used by the runner.
Lattice lattice_from_config(const json& config);
CVec3 parse_polarization(const json& value);
std::vector<cplx> parse_amplitudes(const json& value);
DetuningPattern pattern_from_config(const json& config);

// Process exit code for an error kind: 2 validation, 3 instability, 4 infeasible, 5 other.
int exit_code_for(ErrorKind kind);

struct RunOutput {
  std::string csv_path;
  std::string json_path;
  json summary;
};

// Runs a validated config and writes <experiment>-<hash>.csv/.json into output.dir.
RunOutput run_experiment(const json& config);

// Entry point shared by the command-line tool.
int cli_main(int argc, char** argv);

}  // namespace darklattice
