#include "consensus/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "consensus/error.hpp"

namespace consensus {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.c_str();
  while (*begin == ' ' || *begin == '\t') ++begin;
  if (*begin == '\0') return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(begin, &end);
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0' && errno != ERANGE;
}

// Numeric rows of a CSV; a first line that fails to parse is a header.
std::vector<std::vector<double>> numeric_rows(const std::string& text, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    bool ok = true;
    for (const auto& cell : split(line, ',')) {
      double x = 0.0;
      if (!parse_double(cell, x)) {
        ok = false;
        break;
      }
      row.push_back(x);
    }
    if (!ok) {
      if (rows.empty() && lineno == 1) continue;
      throw IoError(origin + ":" + std::to_string(lineno) + ": not a number");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(origin + ":" + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                    " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_state_csv(const OpinionState& u) {
  std::string out;
  for (std::size_t v = 0; v < u.vertices(); ++v) {
    for (std::size_t i = 0; i < u.n(); ++i) {
      if (i) out += ',';
      out += g17(u(v, i));
    }
    out += '\n';
  }
  return out;
}

void write_state_csv(const fs::path& path, const OpinionState& u) { write_text(path, format_state_csv(u)); }

OpinionState parse_state_csv(const std::string& text, const std::string& origin) {
  auto rows = numeric_rows(text, origin);
  if (rows.size() < 2) throw IoError(origin + ": a state needs at least two vertices");
  try {
    return OpinionState(Matrix::from_rows(rows));
  } catch (const std::exception& e) {
    throw IoError(origin + ": " + e.what());
  }
}

OpinionState read_state_csv(const fs::path& path) { return parse_state_csv(read_text(path), path.string()); }

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError(where + "." + key, "missing required field");
  return obj.at(key);
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw ConfigError(where + "." + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number(obj, key, where);
}

bool flag_or(const json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw ConfigError(where + "." + key, "expected true or false");
  return obj.at(key).get<bool>();
}

std::vector<TableKernel::Knot> knots_from(const std::vector<std::vector<double>>& rows, const std::string& where) {
  std::vector<TableKernel::Knot> knots;
  for (const auto& r : rows) {
    if (r.size() != 2) throw ConfigError(where, "table knots need two columns (s, rho)");
    knots.push_back({r[0], r[1]});
  }
  return knots;
}

}  // namespace

Kernel kernel_from_json(const json& spec, const std::string& where, const fs::path& base) {
  if (!spec.is_object()) throw ConfigError(where, "expected an object with a \"type\" field");
  const json& type_field = require(spec, "type", where);
  if (!type_field.is_string()) throw ConfigError(where + ".type", "expected a string");
  const std::string type = type_field.get<std::string>();
  try {
    if (type == "constant") {
      return Kernel::constant(number(spec, "p", where), flag_or(spec, "cap_at_one", true, where));
    }
    if (type == "power") {
      return Kernel::power_law(number(spec, "alpha", where), number_or(spec, "coeff", 1.0, where),
                               flag_or(spec, "cap_at_one", false, where));
    }
    if (type == "clamped_power") {
      return Kernel::clamped_power(number(spec, "c", where), number(spec, "alpha", where),
                                   flag_or(spec, "cap_at_one", true, where),
                                   number_or(spec, "ceiling", 1.0, where));
    }
    if (type == "table") {
      std::vector<TableKernel::Knot> knots;
      if (spec.contains("knots")) {
        const json& k = spec.at("knots");
        if (!k.is_array()) throw ConfigError(where + ".knots", "expected [[s, rho], ...]");
        std::vector<std::vector<double>> rows;
        for (const auto& r : k) {
          if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
            throw ConfigError(where + ".knots", "expected [[s, rho], ...]");
          rows.push_back({r[0].get<double>(), r[1].get<double>()});
        }
        knots = knots_from(rows, where + ".knots");
      } else {
        const json& csv = require(spec, "csv", where);
        if (!csv.is_string()) throw ConfigError(where + ".csv", "expected a path");
        fs::path p = csv.get<std::string>();
        if (p.is_relative() && !base.empty()) p = base / p;
        if (!fs::exists(p)) throw ConfigError(where + ".csv", "file not found: " + p.string());
        knots = knots_from(numeric_rows(read_text(p), p.string()), where + ".csv");
      }
      return Kernel::table(std::move(knots), flag_or(spec, "cap_at_one", true, where));
    }
  } catch (const DomainError& e) {
    throw ConfigError(where, e.what());
  } catch (const UnsupportedError& e) {
    throw ConfigError(where, e.what());
  }
  throw ConfigError(where + ".type", "unknown kernel type \"" + type + "\"");
}

json kernel_to_json(const Kernel& kernel) {
  json j;
  const auto& v = kernel.variant();
  if (const auto* k = std::get_if<ConstantKernel>(&v)) {
    j = {{"type", "constant"}, {"p", k->p}};
  } else if (const auto* k = std::get_if<PowerLawKernel>(&v)) {
    j = {{"type", "power"}, {"alpha", k->alpha}, {"coeff", k->coeff}};
  } else if (const auto* k = std::get_if<ClampedPowerKernel>(&v)) {
    j = {{"type", "clamped_power"}, {"c", k->c}, {"alpha", k->alpha}, {"ceiling", k->ceiling}};
  } else if (const auto* k = std::get_if<TableKernel>(&v)) {
    json knots = json::array();
    for (const auto& kn : k->knots) knots.push_back({kn.s, kn.rho});
    j = {{"type", "table"}, {"knots", knots}};
  } else {
    throw UnsupportedError("custom kernels cannot be serialized");
  }
  j["cap_at_one"] = kernel.cap_at_one();
  return j;
}

InfluenceModel model_from_json(const json& spec, const std::string& where, const fs::path& base) {
  if (!spec.is_object()) throw ConfigError(where, "expected an object");
  std::string variant = "standard";
  if (spec.contains("variant")) {
    if (!spec.at("variant").is_string()) throw ConfigError(where + ".variant", "expected a string");
    variant = spec.at("variant").get<std::string>();
  }
  if (variant == "rank_dependent") {
    const json& rk = require(spec, "rank_kernel", where);
    const std::string rwhere = where + ".rank_kernel";
    const std::string type = require(rk, "type", rwhere).is_string() ? rk.at("type").get<std::string>() : "";
    try {
      if (type == "inverse_product")
        return InfluenceModel::rank_dependent(RankKernel::inverse_product(number_or(rk, "scale", 1.0, rwhere)));
      if (type == "distance_only")
        return InfluenceModel::rank_dependent(
            RankKernel::distance_only(kernel_from_json(require(spec, "kernel", where), where + ".kernel", base)));
    } catch (const DomainError& e) {
      throw ConfigError(rwhere, e.what());
    }
    throw ConfigError(rwhere + ".type", "expected \"inverse_product\" or \"distance_only\"");
  }
  Kernel kernel = kernel_from_json(require(spec, "kernel", where), where + ".kernel", base);
  if (variant == "standard") return InfluenceModel::standard(std::move(kernel));
  if (variant == "normalized") return InfluenceModel::normalized(std::move(kernel));
  throw ConfigError(where + ".variant", "expected \"standard\", \"normalized\" or \"rank_dependent\"");
}

json model_to_json(const InfluenceModel& model) {
  json j;
  switch (model.variant) {
    case ModelVariant::Standard:
      j = {{"variant", "standard"}, {"kernel", kernel_to_json(model.kernel)}};
      break;
    case ModelVariant::NormalizedWeights:
      j = {{"variant", "normalized"}, {"kernel", kernel_to_json(model.kernel)}};
      break;
    case ModelVariant::RankDependent: {
      const RankKernel& rk = *model.rank_kernel;
      j["variant"] = "rank_dependent";
      if (rk.name() == "inverse_product") {
        j["rank_kernel"] = {{"type", "inverse_product"}, {"scale", rk.scale()}};
      } else if (rk.name() == "distance_only") {
        j["rank_kernel"] = {{"type", "distance_only"}};
        j["kernel"] = kernel_to_json(*rk.distance_kernel());
      } else {
        throw UnsupportedError("custom rank kernels cannot be serialized");
      }
      break;
    }
  }
  return j;
}

json diagnostics_to_json(const DiagnosticsRecord& rec, EvolutionMode mode) {
  json j;
  if (mode == EvolutionMode::Discrete) {
    j["t"] = static_cast<long long>(std::llround(rec.t));
  } else {
    j["t"] = rec.t;
  }
  j["max_per_coord"] = rec.max_per_coord;
  j["min_per_coord"] = rec.min_per_coord;
  j["osc"] = rec.osc;
  j["mean"] = rec.mean;
  j["variance"] = rec.variance;
  j["l2_sq"] = rec.l2_sq;
  j["energy_rho"] = rec.energy_rho;
  j["energy_sigma"] = rec.energy_sigma ? json(*rec.energy_sigma) : json(nullptr);
  j["entropy"] = rec.entropy ? json(*rec.entropy) : json(nullptr);
  json renyi = json::object();
  for (const auto& [a, val] : rec.renyi) renyi[g17(a)] = val;
  j["renyi"] = renyi;
  j["I_alpha"] = rec.I_alpha ? json(*rec.I_alpha) : json(nullptr);
  return j;
}

std::string diagnostics_jsonl(const std::vector<DiagnosticsRecord>& records, EvolutionMode mode) {
  std::string out;
  for (const auto& r : records) {
    out += diagnostics_to_json(r, mode).dump();
    out += '\n';
  }
  return out;
}

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json certificate_to_json(const CertificateEntry& e) {
  json j = {{"name", e.name},
            {"status", to_string(e.status)},
            {"relation", to_string(e.relation)},
            {"measured", finite_or_null(e.measured)},
            {"bound", finite_or_null(e.bound)},
            {"margin", finite_or_null(e.margin)},
            {"tolerance", finite_or_null(e.tolerance)},
            {"checked", e.checked},
            {"note", e.note}};
  j["at_time"] = e.at_time ? json(*e.at_time) : json(nullptr);
  return j;
}

json report_to_json(const CertificateReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) entries.push_back(certificate_to_json(e));
  return {{"passed", r.passed()},
          {"counts",
           {{"pass", r.count(CertStatus::Pass)},
            {"fail", r.count(CertStatus::Fail)},
            {"not_applicable", r.count(CertStatus::NotApplicable)}}},
          {"entries", entries}};
}

std::string report_table(const CertificateReport& r) {
  std::ostringstream os;
  const auto cell = [&os](int width, const auto& value) { os << std::setw(width) << value << ' '; };
  os << std::left << std::setprecision(6);
  cell(27, "certificate");
  cell(14, "status");
  cell(3, "rel");
  for (const char* h : {"measured", "bound", "margin", "tolerance"}) cell(13, h);
  os << "note\n" << std::string(120, '-') << '\n';
  for (const auto& e : r.entries) {
    cell(27, e.name);
    cell(14, to_string(e.status));
    if (e.status == CertStatus::NotApplicable) {
      cell(3, "");
      for (int i = 0; i < 4; ++i) cell(13, "-");
    } else {
      cell(3, to_string(e.relation));
      for (double x : {e.measured, e.bound, e.margin, e.tolerance}) cell(13, x);
    }
    os << e.note << '\n';
  }
  os << "pass " << r.count(CertStatus::Pass) << ", fail " << r.count(CertStatus::Fail) << ", not applicable "
     << r.count(CertStatus::NotApplicable) << '\n';
  return os.str();
}

json bounds_to_json(const BoundSet& b) {
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  return {{"grad_factor_sharp", opt(b.grad_factor_sharp)},
          {"grad_factor_pre_exponential", opt(b.grad_factor_pre_exponential)},
          {"grad_factor_conservative", opt(b.grad_factor_conservative)},
          {"variance_rate", opt(b.variance_rate)},
          {"consensus_time", opt(b.consensus_time)},
          {"poincare_constant", opt(b.poincare_constant)},
          {"notes", b.notes}};
}

json contraction_to_json(const ContractionReport& r) {
  json steps = json::array();
  for (const auto& s : r.per_step) {
    steps.push_back({{"g", s.g},
                     {"h", s.h},
                     {"g_next", s.g_next},
                     {"h_next", s.h_next},
                     {"kappa_step", s.kappa_step ? json(*s.kappa_step) : json(nullptr)},
                     {"resolved", s.resolved}});
  }
  return {{"per_step", steps},
          {"kappa_min", finite_or_null(r.kappa_min)},
          {"cluster_preserved", r.cluster_preserved},
          {"degenerate", r.degenerate}};
}

json nbody_diagnostics_to_json(const NBodyDiagnostics& d, std::size_t step) {
  return {{"step", step},
          {"total_weighted_position", d.total_weighted_position},
          {"total_momentum", d.total_momentum},
          {"moment_of_inertia", d.moment_of_inertia},
          {"potential", d.potential}};
}

PhaseState parse_phase_csv(const std::string& text, double G, const std::string& origin) {
  const auto rows = numeric_rows(text, origin);
  if (rows.empty()) throw IoError(origin + ": no bodies");
  if (rows.front().size() != 7) throw IoError(origin + ": expected columns m, x, y, z, vx, vy, vz");
  PhaseState p;
  p.G = G;
  p.x = Matrix(rows.size(), 3);
  p.v = Matrix(rows.size(), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    p.m.push_back(rows[i][0]);
    for (std::size_t c = 0; c < 3; ++c) {
      p.x(i, c) = rows[i][1 + c];
      p.v(i, c) = rows[i][4 + c];
    }
  }
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw IoError(origin + ": " + e.what());
  }
  return p;
}

namespace {

std::string state_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "state_%06zu.csv", k);
  return buf;
}

json integrator_to_json(const IntegratorMeta& m) {
  return {{"tol", m.tol},
          {"initial_step", m.initial_step},
          {"max_step", finite_or_null(m.max_step)},
          {"smallest_step", m.smallest_step},
          {"largest_step", m.largest_step},
          {"accepted", m.accepted},
          {"rejected", m.rejected}};
}

}  // namespace

void write_trajectory(const fs::path& dir, const Trajectory& traj, const json& resolved_config) {
  std::error_code ec;
  fs::create_directories(dir / "states", ec);
  if (ec) throw IoError("cannot create " + (dir / "states").string() + ": " + ec.message());
  // Stale state files from an earlier run would be picked up by verify.
  for (const auto& entry : fs::directory_iterator(dir / "states")) {
    if (entry.path().extension() == ".csv") fs::remove(entry.path(), ec);
  }

  json files = json::array();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const std::string name = state_name(k);
    write_state_csv(dir / "states" / name, traj.states[k]);
    files.push_back("states/" + name);
  }
  json merges = json::array();
  for (const auto& m : traj.merges) merges.push_back({{"t", m.t}, {"v", m.v}, {"w", m.w}});

  json meta;
  meta["library"] = "consensus-lab";
  meta["version"] = kLibraryVersion;
  meta["config"] = resolved_config;
  meta["trajectory"] = {{"mode", to_string(traj.mode)},
                        {"model", model_to_json(traj.model)},
                        {"stride", traj.stride},
                        {"stop", to_string(traj.stop)},
                        {"consensus_time", traj.consensus_time ? json(*traj.consensus_time) : json(nullptr)},
                        {"times", traj.times},
                        {"states", files},
                        {"merges", merges}};
  if (traj.mode == EvolutionMode::Continuous) meta["trajectory"]["integrator"] = integrator_to_json(traj.integrator);
  write_text(dir / "meta.json", meta.dump(2) + "\n");
  write_text(dir / "diagnostics.jsonl", diagnostics_jsonl(traj.diagnostics, traj.mode));
}

LoadedTrajectory read_trajectory(const fs::path& dir) {
  const fs::path meta_path = dir / "meta.json";
  if (!fs::exists(meta_path)) throw IoError("missing " + meta_path.string());
  LoadedTrajectory out;
  try {
    out.meta = json::parse(read_text(meta_path));
    const json& t = out.meta.at("trajectory");
    Trajectory& tr = out.trajectory;
    tr.mode = evolution_mode_from_string(t.at("mode").get<std::string>());
    tr.model = model_from_json(t.at("model"), "trajectory.model");
    tr.stride = t.at("stride").get<std::size_t>();
    tr.stop = stop_reason_from_string(t.at("stop").get<std::string>());
    if (!t.at("consensus_time").is_null()) tr.consensus_time = t.at("consensus_time").get<double>();
    tr.times = t.at("times").get<std::vector<double>>();
    for (const auto& m : t.at("merges")) tr.merges.push_back({m.at("t").get<double>(), m.at("v").get<std::size_t>(), m.at("w").get<std::size_t>()});
    if (t.contains("integrator")) {
      const json& ig = t.at("integrator");
      tr.integrator.tol = ig.at("tol").get<double>();
      tr.integrator.initial_step = ig.at("initial_step").get<double>();
      if (!ig.at("max_step").is_null()) tr.integrator.max_step = ig.at("max_step").get<double>();
      tr.integrator.smallest_step = ig.at("smallest_step").get<double>();
      tr.integrator.largest_step = ig.at("largest_step").get<double>();
      tr.integrator.accepted = ig.at("accepted").get<std::size_t>();
      tr.integrator.rejected = ig.at("rejected").get<std::size_t>();
    }
    const auto files = t.at("states").get<std::vector<std::string>>();
    if (files.size() != tr.times.size()) throw IoError("meta.json: times and states differ in length");
    for (const auto& f : files) tr.states.push_back(read_state_csv(dir / f));
  } catch (const json::exception& e) {
    throw IoError("corrupt " + meta_path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw IoError("corrupt " + meta_path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError("corrupt " + meta_path.string() + ": " + e.what());
  }
  const auto& states = out.trajectory.states;
  for (const auto& s : states) {
    if (s.vertices() != states.front().vertices() || s.n() != states.front().n())
      throw IoError("state files differ in shape");
  }
  return out;
}

}  // namespace consensus
