#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "consensus/bounds.hpp"
#include "consensus/evolution.hpp"
#include "consensus/io.hpp"

namespace consensus {

struct ModeSpec {
  EvolutionMode type = EvolutionMode::Discrete;
  std::size_t steps = 0;  // discrete
  bool early_stop = true;
  double t_end = 0.0;  // continuous
  double tol = 1e-8;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;
  bool merge_singular = true;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  OpinionState initial;
  json model_spec;  // canonical form, as written to meta.json
  InfluenceModel model = InfluenceModel::standard(Kernel::constant(0.0));
  ModeSpec mode;
  std::filesystem::path output;
  std::size_t stride = 1;
  DiagnosticsOptions diagnostics;
  CertificateOptions certificates;
};

// Parses JSON text; syntax errors become ConfigError("line L, column C", ...).
json parse_config_text(const std::string& text);

// Relative paths in the config resolve against `base`. Throws ConfigError
// naming the offending field.
ExperimentConfig load_experiment_config(const json& config, const std::filesystem::path& base = {});
ExperimentConfig load_experiment_config_file(const std::filesystem::path& path);

// Fully resolved config: inline initial state, canonical model, defaults
// filled in. Loading it again reproduces the same run.
json resolved_config(const ExperimentConfig& cfg);

Trajectory run_experiment(const ExperimentConfig& cfg);

// Certificate options stored under "certificates" in a resolved config.
CertificateOptions certificate_options_from_json(const json& config);

enum ExitCode : int { kExitPass = 0, kExitCertificateFail = 1, kExitBadInput = 2, kExitIo = 3 };

// consensus-lab [--config PATH] [--out DIR] [--json] <simulate|verify|bounds|nbody> ...
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace consensus
