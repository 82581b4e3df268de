#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "consensus/bounds.hpp"
#include "consensus/clusters.hpp"
#include "consensus/diagnostics.hpp"
#include "consensus/evolution.hpp"
#include "consensus/kernel.hpp"
#include "consensus/model.hpp"
#include "consensus/nbody.hpp"
#include "consensus/state.hpp"

namespace consensus {

using json = nlohmann::json;

inline constexpr const char* kLibraryVersion = "0.1.0";

// CSV, one row per vertex, values printed with %.17g so that reading back
// is bit-exact. Throws IoError.
std::string format_state_csv(const OpinionState& u);
void write_state_csv(const std::filesystem::path& path, const OpinionState& u);
OpinionState parse_state_csv(const std::string& text, const std::string& origin = "<csv>");
OpinionState read_state_csv(const std::filesystem::path& path);

// Kernel configs: {"type": "constant"|"power"|"clamped_power"|"table", ...}.
// Relative table CSV paths resolve against `base`. Throws ConfigError with
// the dotted field path given in `where`.
Kernel kernel_from_json(const json& spec, const std::string& where = "kernel",
                        const std::filesystem::path& base = {});
json kernel_to_json(const Kernel& kernel);

// {"kernel": ..., "variant": "standard"|"normalized"|"rank_dependent",
//  "rank_kernel": {"type": "inverse_product", "scale": s}}
InfluenceModel model_from_json(const json& spec, const std::string& where = "model",
                               const std::filesystem::path& base = {});
json model_to_json(const InfluenceModel& model);

json diagnostics_to_json(const DiagnosticsRecord& rec, EvolutionMode mode);
std::string diagnostics_jsonl(const std::vector<DiagnosticsRecord>& records, EvolutionMode mode);

json certificate_to_json(const CertificateEntry& e);
json report_to_json(const CertificateReport& r);
std::string report_table(const CertificateReport& r);

json bounds_to_json(const BoundSet& b);
json contraction_to_json(const ContractionReport& r);
json nbody_diagnostics_to_json(const NBodyDiagnostics& d, std::size_t step);

// CSV with columns m, x, y, z, vx, vy, vz and an optional header line.
PhaseState parse_phase_csv(const std::string& text, double G, const std::string& origin = "<csv>");

// Trajectory directory: meta.json, diagnostics.jsonl, states/state_XXXXXX.csv.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const json& resolved_config);

struct LoadedTrajectory {
  Trajectory trajectory;
  json meta;
};
// Throws IoError for missing or corrupt files.
LoadedTrajectory read_trajectory(const std::filesystem::path& dir);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace consensus
