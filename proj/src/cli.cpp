#include "consensus/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "consensus/error.hpp"
#include "consensus/nbody.hpp"

namespace consensus {

namespace fs = std::filesystem;

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col), "invalid JSON");
  }
}

namespace {

const json* field(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const json* v = field(obj, key);
  if (!v) throw ConfigError(where + "." + key, "missing required field");
  if (!v->is_number()) throw ConfigError(where + "." + key, "expected a number");
  return v->get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  return field(obj, key) ? get_number(obj, key, where) : fallback;
}

std::size_t count_field(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(path, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

bool bool_or(const json& obj, const char* key, bool fallback, const std::string& where) {
  const json* v = field(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(where + "." + key, "expected true or false");
  return v->get<bool>();
}

Matrix matrix_from_json(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) throw ConfigError(where, "expected a nonempty array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const json& row = rows[r];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.empty()) throw ConfigError(rw, "expected a nonempty array of numbers");
    std::vector<double> vals;
    for (const auto& x : row) {
      if (!x.is_number()) throw ConfigError(rw, "expected numbers");
      vals.push_back(x.get<double>());
    }
    if (!out.empty() && vals.size() != out.front().size()) throw ConfigError(rw, "rows differ in length");
    out.push_back(std::move(vals));
  }
  return Matrix::from_rows(out);
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix random_initial(const json& spec, std::size_t vertices, std::size_t n, std::uint64_t seed) {
  const std::string where = "initial";
  const std::string dist = spec.at("distribution").is_string() ? spec.at("distribution").get<std::string>() : "";
  std::uint64_t s = seed;
  if (const json* v = field(spec, "seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
      throw ConfigError("initial.seed", "expected a nonnegative integer");
    s = v->get<std::uint64_t>();
  }
  std::mt19937_64 rng(s);
  Matrix m(vertices, n);
  if (dist == "uniform") {
    const double low = number_or(spec, "low", 0.0, where);
    const double high = number_or(spec, "high", 1.0, where);
    if (!(low < high)) throw ConfigError("initial.high", "must exceed low");
    std::uniform_real_distribution<double> u(low, high);
    for (double& x : m.data()) x = u(rng);
  } else if (dist == "gaussian") {
    const double mean = number_or(spec, "mean", 0.0, where);
    const double sd = number_or(spec, "stddev", 1.0, where);
    if (!(sd > 0.0)) throw ConfigError("initial.stddev", "must be positive");
    std::normal_distribution<double> g(mean, sd);
    for (double& x : m.data()) x = g(rng);
  } else {
    throw ConfigError("initial.distribution", "expected \"uniform\" or \"gaussian\"");
  }
  return m;
}

std::optional<std::size_t> optional_count(const json& cfg, const char* top, const char* nested, const char* key) {
  if (const json* v = field(cfg, top)) return count_field(*v, top);
  if (const json* g = field(cfg, nested)) {
    if (const json* v = field(*g, key)) return count_field(*v, std::string(nested) + "." + key);
  }
  return std::nullopt;
}

ModeSpec mode_from_json(const json& spec) {
  const std::string where = "mode";
  if (!spec.is_object()) throw ConfigError(where, "expected an object with a \"type\" field");
  const json* t = field(spec, "type");
  if (!t || !t->is_string()) throw ConfigError("mode.type", "expected \"discrete\" or \"continuous\"");
  ModeSpec m;
  const std::string type = t->get<std::string>();
  if (type == "discrete") {
    m.type = EvolutionMode::Discrete;
    const json* steps = field(spec, "steps");
    if (!steps) throw ConfigError("mode.steps", "missing required field");
    m.steps = count_field(*steps, "mode.steps");
    m.early_stop = bool_or(spec, "early_stop", true, where);
  } else if (type == "continuous") {
    m.type = EvolutionMode::Continuous;
    m.t_end = get_number(spec, "t_end", where);
    if (!(m.t_end > 0.0)) throw ConfigError("mode.t_end", "must be positive");
    m.tol = number_or(spec, "tol", 1e-8, where);
    if (!(m.tol > 1e-12 && m.tol < 1e-2)) throw ConfigError("mode.tol", "must lie in (1e-12, 1e-2)");
    if (const json* ms = field(spec, "max_step"); ms && !ms->is_null()) m.max_step = get_number(spec, "max_step", where);
    if (!(m.max_step > 0.0)) throw ConfigError("mode.max_step", "must be positive");
    m.initial_step = number_or(spec, "initial_step", 0.0, where);
    if (m.initial_step < 0.0) throw ConfigError("mode.initial_step", "must be nonnegative");
    m.merge_singular = bool_or(spec, "merge_singular", true, where);
  } else {
    throw ConfigError("mode.type", "expected \"discrete\" or \"continuous\"");
  }
  return m;
}

json mode_to_json(const ModeSpec& m) {
  if (m.type == EvolutionMode::Discrete) return {{"type", "discrete"}, {"steps", m.steps}, {"early_stop", m.early_stop}};
  return {{"type", "continuous"},
          {"t_end", m.t_end},
          {"tol", m.tol},
          {"max_step", std::isfinite(m.max_step) ? json(m.max_step) : json(nullptr)},
          {"initial_step", m.initial_step},
          {"merge_singular", m.merge_singular}};
}

std::vector<double> renyi_from_json(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& a : v) {
    if (!a.is_number()) throw ConfigError(where, "expected an array of numbers");
    const double x = a.get<double>();
    if (!(x > 0.0) || x == 1.0) throw ConfigError(where, "Renyi orders must be positive and differ from 1");
    out.push_back(x);
  }
  return out;
}

CertificateOptions certificates_from_json(const json* spec, std::uint64_t seed, const std::vector<double>& renyi,
                                          std::size_t vertices) {
  CertificateOptions o;
  o.seed = seed;
  o.renyi_alphas = renyi;
  if (!spec) return o;
  const std::string where = "certificates";
  if (!spec->is_object()) throw ConfigError(where, "expected an object");
  if (const json* dis = field(*spec, "disabled")) {
    if (!dis->is_array()) throw ConfigError("certificates.disabled", "expected an array of names");
    for (const auto& n : *dis) {
      if (!n.is_string()) throw ConfigError("certificates.disabled", "expected an array of names");
      o.disabled.insert(n.get<std::string>());
    }
  }
  if (const json* cl = field(*spec, "cluster"); cl && !cl->is_null()) {
    if (!cl->is_array()) throw ConfigError("certificates.cluster", "expected an array of vertex indices");
    Members m;
    for (const auto& v : *cl) {
      const std::size_t idx = count_field(v, "certificates.cluster");
      if (vertices && idx >= vertices) throw ConfigError("certificates.cluster", "vertex index out of range");
      m.push_back(idx);
    }
    std::sort(m.begin(), m.end());
    if (std::adjacent_find(m.begin(), m.end()) != m.end())
      throw ConfigError("certificates.cluster", "repeated vertex index");
    o.cluster = std::move(m);
  }
  o.cluster_stop_distance = number_or(*spec, "cluster_stop_distance", o.cluster_stop_distance, where);
  if (const json* p = field(*spec, "three_circle_pairs")) o.three_circle_pairs = count_field(*p, "certificates.three_circle_pairs");
  return o;
}

json certificates_to_json(const CertificateOptions& o) {
  json j;
  j["disabled"] = std::vector<std::string>(o.disabled.begin(), o.disabled.end());
  j["cluster"] = o.cluster ? json(*o.cluster) : json(nullptr);
  j["cluster_stop_distance"] = o.cluster_stop_distance;
  j["three_circle_pairs"] = o.three_circle_pairs;
  return j;
}

}  // namespace

ExperimentConfig load_experiment_config(const json& config, const fs::path& base) {
  if (!config.is_object()) throw ConfigError("config", "expected a JSON object");
  ExperimentConfig cfg;

  if (const json* s = field(config, "seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0))
      throw ConfigError("seed", "expected a nonnegative integer");
    cfg.seed = s->get<std::uint64_t>();
  }
  const auto d = optional_count(config, "d", "graph", "d");
  auto n = optional_count(config, "n", "graph", "n");
  if (!n) n = optional_count(config, "dimension", "graph", "dimension");

  const json* init = field(config, "initial");
  if (!init) throw ConfigError("initial", "missing required field");
  Matrix values;
  if (init->is_array()) {
    values = matrix_from_json(*init, "initial");
  } else if (const json* csv = field(*init, "csv")) {
    if (!csv->is_string()) throw ConfigError("initial.csv", "expected a path");
    fs::path p = csv->get<std::string>();
    if (p.is_relative() && !base.empty()) p = base / p;
    if (!fs::exists(p)) throw ConfigError("initial.csv", "file not found: " + p.string());
    try {
      values = read_state_csv(p).values();
    } catch (const IoError& e) {
      throw ConfigError("initial.csv", e.what());
    }
  } else if (field(*init, "distribution")) {
    if (!d) throw ConfigError("graph.d", "required for a random initial state");
    if (!n) throw ConfigError("dimension", "required for a random initial state");
    values = random_initial(*init, *d + 1, *n, cfg.seed);
  } else {
    throw ConfigError("initial", "expected a matrix, {\"csv\": path} or {\"distribution\": ...}");
  }
  if (values.rows() < 2) throw ConfigError("initial", "need at least two vertices");
  if (d && values.rows() != *d + 1)
    throw ConfigError("initial", "has " + std::to_string(values.rows()) + " rows but d + 1 = " + std::to_string(*d + 1));
  if (n && values.cols() != *n)
    throw ConfigError("initial", "has " + std::to_string(values.cols()) + " columns but n = " + std::to_string(*n));
  for (double x : values.data())
    if (!std::isfinite(x)) throw ConfigError("initial", "values must be finite");
  cfg.initial = OpinionState(std::move(values));

  const json* model = field(config, "model");
  if (!model) throw ConfigError("model", "missing required field");
  cfg.model = model_from_json(*model, "model", base);
  try {
    cfg.model.check_consistent();
    cfg.model_spec = model_to_json(cfg.model);
  } catch (const UnsupportedError& e) {
    throw ConfigError("model", e.what());
  }

  const json* mode = field(config, "mode");
  if (!mode) throw ConfigError("mode", "missing required field");
  cfg.mode = mode_from_json(*mode);
  if (cfg.mode.type == EvolutionMode::Discrete && cfg.model.variant != ModelVariant::RankDependent &&
      !cfg.model.kernel.cap_at_one())
    throw ConfigError("model.kernel.cap_at_one", "discrete evolution requires a kernel capped at one");

  if (const json* out = field(config, "output")) {
    if (!out->is_string()) throw ConfigError("output", "expected a directory path");
    cfg.output = out->get<std::string>();
    if (cfg.output.is_relative() && !base.empty()) cfg.output = base / cfg.output;
  }
  if (const json* st = field(config, "stride")) {
    cfg.stride = count_field(*st, "stride");
    if (cfg.stride == 0) throw ConfigError("stride", "must be positive");
  }
  if (const json* r = field(config, "renyi_alphas")) cfg.diagnostics.renyi_alphas = renyi_from_json(*r, "renyi_alphas");
  cfg.certificates =
      certificates_from_json(field(config, "certificates"), cfg.seed, cfg.diagnostics.renyi_alphas, cfg.initial.vertices());
  return cfg;
}

ExperimentConfig load_experiment_config_file(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("config not found: " + path.string());
  return load_experiment_config(parse_config_text(read_text(path)), path.parent_path());
}

json resolved_config(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["graph"] = {{"d", cfg.initial.d()}};
  j["dimension"] = cfg.initial.n();
  j["initial"] = matrix_to_json(cfg.initial.values());
  j["model"] = cfg.model_spec;
  j["mode"] = mode_to_json(cfg.mode);
  j["output"] = cfg.output.string();
  j["stride"] = cfg.stride;
  j["renyi_alphas"] = cfg.diagnostics.renyi_alphas;
  j["certificates"] = certificates_to_json(cfg.certificates);
  return j;
}

CertificateOptions certificate_options_from_json(const json& config) {
  std::uint64_t seed = 0;
  if (const json* s = field(config, "seed"); s && s->is_number_integer()) seed = s->get<std::uint64_t>();
  std::vector<double> renyi = DiagnosticsOptions{}.renyi_alphas;
  if (const json* r = field(config, "renyi_alphas")) renyi = renyi_from_json(*r, "renyi_alphas");
  return certificates_from_json(field(config, "certificates"), seed, renyi, 0);
}

Trajectory run_experiment(const ExperimentConfig& cfg) {
  if (cfg.mode.type == EvolutionMode::Discrete) {
    DiscreteOptions o;
    o.stride = cfg.stride;
    o.early_stop = cfg.mode.early_stop;
    o.diag = cfg.diagnostics;
    return evolve_discrete(cfg.initial, cfg.model, cfg.mode.steps, o);
  }
  ContinuousOptions o;
  o.stride = cfg.stride;
  o.initial_step = cfg.mode.initial_step;
  o.max_step = cfg.mode.max_step;
  o.merge_singular = cfg.mode.merge_singular;
  o.diag = cfg.diagnostics;
  return evolve_continuous(cfg.initial, cfg.model, cfg.mode.t_end, cfg.mode.tol, o);
}

namespace {

struct GlobalFlags {
  std::string config;
  std::string out;
  bool json = false;
};

std::string fmt_value(const std::optional<double>& x) {
  if (!x) return "-";
  std::ostringstream os;
  os << std::setprecision(10) << *x;
  return os.str();
}

int cmd_simulate(const GlobalFlags& g, std::ostream& out) {
  if (g.config.empty()) throw ConfigError("--config", "simulate needs a config file");
  ExperimentConfig cfg = load_experiment_config_file(g.config);
  if (!g.out.empty()) cfg.output = g.out;
  if (cfg.output.empty()) throw ConfigError("output", "no output directory (set \"output\" or pass --out)");
  const Trajectory traj = run_experiment(cfg);
  write_trajectory(cfg.output, traj, resolved_config(cfg));
  if (g.json) {
    json j = {{"output", cfg.output.string()},
              {"states", traj.size()},
              {"stop", to_string(traj.stop)},
              {"final_time", traj.times.back()},
              {"merges", traj.merges.size()},
              {"consensus_time", traj.consensus_time ? json(*traj.consensus_time) : json(nullptr)}};
    out << j.dump(2) << '\n';
  } else {
    out << "wrote " << traj.size() << " states to " << cfg.output.string() << " (" << to_string(traj.mode)
        << ", stop: " << to_string(traj.stop) << ", t = " << traj.times.back() << ")\n";
  }
  return kExitPass;
}

int cmd_verify(const GlobalFlags& g, const std::string& dir_arg, std::ostream& out) {
  const std::string dir = !dir_arg.empty() ? dir_arg : g.out;
  if (dir.empty()) throw ConfigError("verify", "needs a trajectory directory");
  const LoadedTrajectory loaded = read_trajectory(dir);
  CertificateOptions opts;
  try {
    opts = certificate_options_from_json(loaded.meta.value("config", json::object()));
  } catch (const ConfigError& e) {
    throw IoError(std::string("corrupt meta.json: ") + e.what());
  }
  const CertificateReport report = verify_trajectory_certificates(loaded.trajectory, opts);
  if (g.json) {
    out << report_to_json(report).dump(2) << '\n';
  } else {
    out << report_table(report);
  }
  return report.passed() ? kExitPass : kExitCertificateFail;
}

int cmd_bounds(const GlobalFlags& g, double a, long long d, double alpha, std::optional<double> var0,
               std::ostream& out) {
  if (d < 0) throw DomainError("d must be nonnegative");
  const BoundSet b = evaluate_bounds(a, static_cast<std::size_t>(d), alpha, var0);
  const json j = bounds_to_json(b);
  if (!g.json) {
    const std::pair<const char*, const std::optional<double>*> rows[] = {
        {"grad_factor_sharp", &b.grad_factor_sharp},
        {"grad_factor_pre_exponential", &b.grad_factor_pre_exponential},
        {"grad_factor_conservative", &b.grad_factor_conservative},
        {"variance_rate", &b.variance_rate},
        {"consensus_time", &b.consensus_time},
        {"poincare_constant", &b.poincare_constant}};
    for (const auto& [name, value] : rows) out << std::left << std::setw(30) << name << fmt_value(*value) << '\n';
    for (const auto& note : b.notes) out << "note: " << note << '\n';
  }
  out << j.dump(2) << '\n';
  return kExitPass;
}

int cmd_nbody(const GlobalFlags& g, std::ostream& out) {
  if (g.config.empty()) throw ConfigError("--config", "nbody needs a config file");
  const fs::path path = g.config;
  if (!fs::exists(path)) throw IoError("config not found: " + path.string());
  const json cfg = parse_config_text(read_text(path));
  if (!cfg.is_object()) throw ConfigError("config", "expected a JSON object");
  const double G = number_or(cfg, "G", 1.0, "config");
  if (!(G > 0.0)) throw ConfigError("G", "must be positive");

  PhaseState phase;
  if (const json* bodies = field(cfg, "bodies")) {
    const Matrix rows = matrix_from_json(*bodies, "bodies");
    if (rows.cols() != 7) throw ConfigError("bodies", "expected rows [m, x, y, z, vx, vy, vz]");
    std::ostringstream csv;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      for (std::size_t c = 0; c < 7; ++c) csv << (c ? "," : "") << std::setprecision(17) << rows(r, c);
      csv << '\n';
    }
    try {
      phase = parse_phase_csv(csv.str(), G, "bodies");
    } catch (const IoError& e) {
      throw ConfigError("bodies", e.what());
    }
  } else if (const json* csv = field(cfg, "csv")) {
    if (!csv->is_string()) throw ConfigError("csv", "expected a path");
    fs::path p = csv->get<std::string>();
    if (p.is_relative()) p = path.parent_path() / p;
    if (!fs::exists(p)) throw ConfigError("csv", "file not found: " + p.string());
    phase = parse_phase_csv(read_text(p), G, p.string());
  } else {
    throw ConfigError("bodies", "missing required field (or give \"csv\")");
  }
  const json* steps_v = field(cfg, "steps");
  if (!steps_v) throw ConfigError("steps", "missing required field");
  const std::size_t steps = count_field(*steps_v, "steps");
  const double substep = number_or(cfg, "substep", 1.0, "config");
  if (!(substep > 0.0 && substep <= 1.0)) throw ConfigError("substep", "must lie in (0, 1]");

  fs::path dir = g.out;
  if (dir.empty()) {
    if (const json* o = field(cfg, "output"); o && o->is_string()) dir = path.parent_path() / o->get<std::string>();
  }
  if (dir.empty()) throw ConfigError("output", "no output directory (set \"output\" or pass --out)");

  const NBodyRun run = nbody_evolve(phase, steps, substep);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::string lines;
  for (std::size_t k = 0; k < run.diagnostics.size(); ++k) lines += nbody_diagnostics_to_json(run.diagnostics[k], k).dump() + '\n';
  write_text(dir / "diagnostics.jsonl", lines);
  std::ostringstream final_csv;
  final_csv << "m,x,y,z,vx,vy,vz\n" << std::setprecision(17);
  const PhaseState& last = run.states.back();
  for (std::size_t i = 0; i < last.bodies(); ++i) {
    final_csv << last.m[i];
    for (std::size_t c = 0; c < 3; ++c) final_csv << ',' << last.x(i, c);
    for (std::size_t c = 0; c < 3; ++c) final_csv << ',' << last.v(i, c);
    final_csv << '\n';
  }
  write_text(dir / "final.csv", final_csv.str());
  const json summary = {{"library", "consensus-lab"},
                        {"version", kLibraryVersion},
                        {"G", G},
                        {"bodies", phase.bodies()},
                        {"steps_requested", steps},
                        {"steps_taken", run.states.size() - 1},
                        {"substep", substep},
                        {"truncated", run.truncated},
                        {"reason", run.reason}};
  write_text(dir / "meta.json", summary.dump(2) + "\n");
  if (g.json) {
    out << summary.dump(2) << '\n';
  } else {
    out << "nbody: " << run.states.size() - 1 << " of " << steps << " steps written to " << dir.string();
    if (run.truncated) out << " (truncated: " << run.reason << ")";
    out << '\n';
  }
  return kExitPass;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlinear heat equations on complete graphs and certificate checks.", "consensus-lab"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--config", g.config, "experiment config (JSON)");
  app.add_option("--out", g.out, "output or trajectory directory");
  app.add_flag("--json", g.json, "machine-readable output");

  auto* simulate = app.add_subcommand("simulate", "run an experiment and write its trajectory");
  auto* verify = app.add_subcommand("verify", "check certificates along a trajectory directory");
  std::string dir;
  verify->add_option("dir", dir, "trajectory directory (defaults to --out)");
  auto* bounds = app.add_subcommand("bounds", "evaluate closed-form bounds");
  double a = 1.0;
  long long d = 0;
  double alpha = 0.0;
  std::optional<double> var0;
  bounds->add_option("--a", a, "lower bound on the kernel")->capture_default_str();
  bounds->add_option("--d", d, "degree (vertices minus one)")->required();
  bounds->add_option("--alpha", alpha, "kernel exponent")->required();
  bounds->add_option("--var0", var0, "initial variance");
  auto* nbody = app.add_subcommand("nbody", "iterate the phase-space time-one map");
  for (auto* sub : {simulate, verify, bounds, nbody}) sub->fallthrough();

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitBadInput;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(g, out);
    if (verify->parsed()) return cmd_verify(g, dir, out);
    if (bounds->parsed()) return cmd_bounds(g, a, d, alpha, var0, out);
    if (nbody->parsed()) return cmd_nbody(g, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ModelInvalidError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const SingularityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitBadInput;
}

}  // namespace consensus
