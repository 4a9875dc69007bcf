#include "nlslab/harness.hpp"

#include "nlslab/diagnostics.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/observables.hpp"
#include "nlslab/random.hpp"
#include "nlslab/snapshot_io.hpp"
#include "nlslab/symmetry.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#ifndef NLSLAB_VERSION
#define NLSLAB_VERSION "unknown"
#endif

namespace nlslab {

namespace fs = std::filesystem;
using nlohmann::json;

const char* code_version() { return NLSLAB_VERSION; }

const GroundState& reference_ground_state() {
  static const GroundState q = shoot_ground_state(1e-12, make_grid(512, 20.0));
  return q;
}

RadialField ground_state_on(GridPtr g) {
  const auto& q = reference_ground_state();
  if (g == q.profile.grid) return q.profile;
  const std::vector<double> r(g->r().begin(), g->r().end());
  CVec v = evaluate_at(hankel_forward(q.profile), r);
  const double R = q.profile.grid->radius();
  for (std::size_t k = 0; k < r.size(); ++k)
    if (r[k] >= R) v[k] = 0.0;
  return RadialField(g, std::move(v));
}

// -- parsing ------------------------------------------------------------------------

std::string to_string(InitialData::Kind k) {
  switch (k) {
    case InitialData::Kind::GroundState: return "ground_state";
    case InitialData::Kind::Gaussian: return "gaussian";
    case InitialData::Kind::PcSoliton: return "pc_soliton";
    case InitialData::Kind::File: return "file";
  }
  return "?";
}

InitialData::Kind parse_initial_kind(const std::string& s) {
  for (auto k : {InitialData::Kind::GroundState, InitialData::Kind::Gaussian, InitialData::Kind::PcSoliton,
                 InitialData::Kind::File})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown initial data kind: " + s);
}

namespace {

const std::set<std::string> kOps{"mass", "energy", "strichartz", "scattering", "scales", "classify", "virial",
                                 "concentration"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw std::invalid_argument("unknown key '" + key + "' in " + where);
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw std::invalid_argument(where + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw std::invalid_argument(where + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

DiagnosticRequest diagnostic_from_json(const json& j) {
  if (j.is_string()) return parse_diagnostic(j.get<std::string>());
  if (!j.is_object() || !j.contains("op") || !j["op"].is_string())
    throw std::invalid_argument("diagnostic entries are strings or objects with an 'op'");
  DiagnosticRequest d;
  d.op = j["op"].get<std::string>();
  if (!kOps.count(d.op)) throw std::invalid_argument("unknown diagnostic: " + d.op);
  for (const auto& [key, value] : j.items()) {
    if (key == "op") continue;
    if (!value.is_number()) throw std::invalid_argument("diagnostic parameter '" + key + "' must be a number");
    d.params[key] = value.get<double>();
  }
  return d;
}

json diagnostic_to_json(const DiagnosticRequest& d) {
  json j{{"op", d.op}};
  for (const auto& [k, v] : d.params) j[k] = v;
  return j;
}

}  // namespace

DiagnosticRequest parse_diagnostic(const std::string& text) {
  DiagnosticRequest d;
  std::stringstream ss(text);
  std::string part;
  std::getline(ss, d.op, ':');
  if (!kOps.count(d.op)) throw std::invalid_argument("unknown diagnostic: " + d.op);
  while (std::getline(ss, part, ':')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("expected key=value in '" + text + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(part.substr(eq + 1), &used);
      if (used != part.size() - eq - 1) throw std::invalid_argument("trailing characters");
      d.params[part.substr(0, eq)] = v;
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number in '" + text + "'");
    }
  }
  return d;
}

std::vector<DiagnosticRequest> parse_diagnostic_list(const std::string& comma_separated) {
  std::vector<DiagnosticRequest> out;
  std::stringstream ss(comma_separated);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_diagnostic(item));
  return out;
}

ExperimentSpec parse_experiment(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("spec is not valid JSON: ") + e.what());
  }
  check_keys(j, {"name", "grid", "initial_data", "evolve", "diagnostics", "sweep", "seed", "output_dir", "workers",
                 "write_snapshots"},
             "spec");
  ExperimentSpec s;
  s.source = json_text;
  try {
    s.name = j.value("name", s.name);
    if (j.contains("grid")) {
      check_keys(j["grid"], {"n", "R"}, "grid");
      s.grid_n = j["grid"].value("n", s.grid_n);
      s.grid_R = j["grid"].value("R", s.grid_R);
    }
    if (j.contains("initial_data")) {
      const auto& d = j["initial_data"];
      check_keys(d, {"kind", "amplitude", "width", "path", "noise"}, "initial_data");
      if (d.contains("kind")) s.initial.kind = parse_initial_kind(d["kind"].get<std::string>());
      s.initial.amplitude = d.value("amplitude", s.initial.amplitude);
      s.initial.width = d.value("width", s.initial.width);
      s.initial.path = d.value("path", s.initial.path);
      s.initial.noise = d.value("noise", s.initial.noise);
    }
    if (j.contains("evolve")) {
      const auto& e = j["evolve"];
      check_keys(e, {"mu", "scheme", "dt", "t_start", "t_end", "adaptive", "c_a", "blowup_linf_threshold",
                     "resolution_tolerance", "blowup_growth_factor", "snapshot_stride", "output_times", "max_steps"},
                 "evolve");
      auto& c = s.evolve;
      c.mu = e.value("mu", c.mu);
      if (e.contains("scheme")) c.scheme = parse_scheme(e["scheme"].get<std::string>());
      c.dt0 = e.value("dt", c.dt0);
      c.t_start = e.value("t_start", c.t_start);
      c.t_end = e.value("t_end", c.t_end);
      c.adaptive = e.value("adaptive", c.adaptive);
      c.c_a = e.value("c_a", c.c_a);
      c.blowup_linf_threshold = e.value("blowup_linf_threshold", c.blowup_linf_threshold);
      c.resolution_tolerance = e.value("resolution_tolerance", c.resolution_tolerance);
      c.blowup_growth_factor = e.value("blowup_growth_factor", c.blowup_growth_factor);
      c.snapshot_stride = e.value("snapshot_stride", c.snapshot_stride);
      if (e.contains("output_times")) c.output_times = number_list(e["output_times"], "evolve.output_times");
      c.max_steps = e.value("max_steps", c.max_steps);
    }
    if (j.contains("diagnostics")) {
      if (!j["diagnostics"].is_array()) throw std::invalid_argument("diagnostics must be an array");
      for (const auto& d : j["diagnostics"]) s.diagnostics.push_back(diagnostic_from_json(d));
    }
    if (j.contains("sweep")) {
      check_keys(j["sweep"], {"mass_ratio", "mu"}, "sweep");
      if (j["sweep"].contains("mass_ratio")) s.mass_ratios = number_list(j["sweep"]["mass_ratio"], "sweep.mass_ratio");
      if (j["sweep"].contains("mu")) s.mus = number_list(j["sweep"]["mu"], "sweep.mu");
    }
    s.seed = j.value("seed", s.seed);
    if (j.contains("output_dir")) s.output_dir = j["output_dir"].get<std::string>();
    s.workers = j.value("workers", s.workers);
    s.write_snapshots = j.value("write_snapshots", s.write_snapshots);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("spec has a value of the wrong type: ") + e.what());
  }
  validate(s);
  return s;
}

ExperimentSpec load_experiment(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::invalid_argument("cannot read spec " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_experiment(ss.str());
}

json to_json(const ExperimentSpec& s) {
  json diags = json::array();
  for (const auto& d : s.diagnostics) diags.push_back(diagnostic_to_json(d));
  const auto& c = s.evolve;
  json j{
      {"name", s.name},
      {"grid", {{"n", s.grid_n}, {"R", s.grid_R}}},
      {"initial_data",
       {{"kind", to_string(s.initial.kind)},
        {"amplitude", s.initial.amplitude},
        {"width", s.initial.width},
        {"path", s.initial.path},
        {"noise", s.initial.noise}}},
      {"evolve",
       {{"mu", c.mu},
        {"scheme", to_string(c.scheme)},
        {"dt", c.dt0},
        {"t_start", c.t_start},
        {"t_end", c.t_end},
        {"adaptive", c.adaptive},
        {"c_a", c.c_a},
        {"blowup_linf_threshold", c.blowup_linf_threshold},
        {"resolution_tolerance", c.resolution_tolerance},
        {"blowup_growth_factor", c.blowup_growth_factor},
        {"snapshot_stride", c.snapshot_stride},
        {"output_times", c.output_times},
        {"max_steps", c.max_steps}}},
      {"diagnostics", diags},
      {"sweep", {{"mass_ratio", s.mass_ratios}, {"mu", s.mus}}},
      {"seed", s.seed},
      {"output_dir", s.output_dir.generic_string()},
      {"workers", s.workers},
      {"write_snapshots", s.write_snapshots},
  };
  return j;
}

void validate(const ExperimentSpec& s) {
  if (s.name.empty()) throw std::invalid_argument("spec name is empty");
  if (s.grid_n < 8 || !(s.grid_R > 0.0) || !std::isfinite(s.grid_R)) throw std::invalid_argument("bad grid");
  validate(s.evolve);
  if (s.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (!std::isfinite(s.initial.amplitude) || !(s.initial.width > 0.0) || s.initial.noise < 0.0)
    throw std::invalid_argument("bad initial data parameters");
  if (s.initial.kind == InitialData::Kind::File) {
    if (s.initial.path.empty() || !fs::exists(s.initial.path))
      throw std::invalid_argument("initial data file not found: " + s.initial.path);
  }
  if (s.initial.kind == InitialData::Kind::PcSoliton && !(s.evolve.t_start < 0.0))
    throw std::invalid_argument("pc_soliton data start at a negative time");
  for (double m : s.mass_ratios)
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("mass ratios must be positive");
  for (double mu : s.mus)
    if (!std::isfinite(mu)) throw std::invalid_argument("mu values must be finite");
  if (s.mass_ratios.size() * std::max<std::size_t>(1, s.mus.size()) > 10000)
    throw std::invalid_argument("sweep too large");
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// -- manifest ---------------------------------------------------------------------

std::vector<std::string> RunManifest::all_artifacts() const {
  std::vector<std::string> out = artifacts;
  for (const auto& r : runs) out.insert(out.end(), r.artifacts.begin(), r.artifacts.end());
  return out;
}

json to_json(const RunManifest& m) {
  json runs = json::array();
  for (const auto& r : m.runs) {
    runs.push_back({{"index", r.index},
                    {"id", r.id},
                    {"mass_ratio", std::isfinite(r.mass_ratio) ? json(r.mass_ratio) : json(nullptr)},
                    {"mu", r.mu},
                    {"status", r.status},
                    {"termination", r.termination},
                    {"message", r.message},
                    {"wall_seconds", r.wall_seconds},
                    {"artifacts", r.artifacts},
                    {"summary", r.summary}});
  }
  return {{"name", m.name},
          {"spec_hash", m.spec_hash},
          {"code_version", m.code_version},
          {"grid", {{"n", m.grid_n}, {"R", m.grid_R}}},
          {"seed", m.seed},
          {"wall_seconds", m.wall_seconds},
          {"complete", m.complete},
          {"artifacts", m.artifacts},
          {"runs", runs}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.spec_hash = j.at("spec_hash").get<std::string>();
    m.code_version = j.at("code_version").get<std::string>();
    m.grid_n = j.at("grid").at("n").get<int>();
    m.grid_R = j.at("grid").at("R").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.wall_seconds = j.at("wall_seconds").get<double>();
    m.complete = j.at("complete").get<bool>();
    m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    for (const auto& r : j.at("runs")) {
      RunRecord rec;
      rec.index = r.at("index").get<int>();
      rec.id = r.at("id").get<std::string>();
      rec.mass_ratio = r.at("mass_ratio").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                     : r.at("mass_ratio").get<double>();
      rec.mu = r.at("mu").get<double>();
      rec.status = r.at("status").get<std::string>();
      rec.termination = r.at("termination").get<std::string>();
      rec.message = r.at("message").get<std::string>();
      rec.wall_seconds = r.at("wall_seconds").get<double>();
      rec.artifacts = r.at("artifacts").get<std::vector<std::string>>();
      rec.summary = r.at("summary");
      m.runs.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

RunManifest load_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read manifest " + path.string());
  try {
    return manifest_from_json(json::parse(is));
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed manifest: ") + e.what());
  }
}

void write_manifest_atomic(const fs::path& path, const RunManifest& m) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << to_json(m).dump(2) << '\n';
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

// -- runs -------------------------------------------------------------------------

RadialField initial_datum(const ExperimentSpec& spec, double mass_ratio, int run_index) {
  RadialField base;
  const auto& q = reference_ground_state();
  switch (spec.initial.kind) {
    case InitialData::Kind::GroundState:
      base = ground_state_on(make_grid(spec.grid_n, spec.grid_R));
      break;
    case InitialData::Kind::Gaussian: {
      const double w = spec.initial.width;
      base = sample(make_grid(spec.grid_n, spec.grid_R), [w](double r) { return cplx(std::exp(-r * r / (2 * w * w)), 0.0); });
      break;
    }
    case InitialData::Kind::PcSoliton:
      base = pc_soliton(q, make_grid(spec.grid_n, spec.grid_R), spec.evolve.t_start);
      break;
    case InitialData::Kind::File:
      base = read_snapshot(spec.initial.path);
      break;
  }
  double scale = spec.initial.amplitude;
  if (std::isfinite(mass_ratio)) {
    const double m = mass(base);
    if (!(m > 0.0)) throw std::invalid_argument("cannot rescale a zero datum to a mass ratio");
    scale = std::sqrt(mass_ratio * q.mass / m);
  }
  RadialField u = cplx(scale, 0.0) * base;
  if (spec.initial.noise > 0.0) {
    CounterRng rng(spec.seed, static_cast<std::uint64_t>(run_index));
    const double size = spec.initial.noise * sup_norm(u);
    const auto r = u.grid->r();
    for (int j = 0; j < 3; ++j) {
      const cplx c(rng.normal(), rng.normal());
      const double width = rng.uniform(0.5, 2.0);
      for (int k = 0; k < u.size(); ++k) u.values[k] += size * c * std::exp(-r[k] * r[k] / (2 * width * width));
    }
  }
  return u;
}

namespace {

json fit_json(const LogLogFit& f) { return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"points", f.points}}; }

json series_stats(const Trajectory& traj, double StepRecord::*field) {
  const double v0 = traj.series.front().*field;
  double drift = 0.0;
  for (const auto& s : traj.series) drift = std::max(drift, std::abs(s.*field - v0));
  return {{"initial", v0},
          {"final", traj.series.back().*field},
          {"max_abs_drift", drift},
          {"max_rel_drift", v0 != 0.0 ? drift / std::abs(v0) : drift}};
}

}  // namespace

json run_diagnostic(const Trajectory& traj, const DiagnosticRequest& req, const fs::path& dir,
                    std::vector<std::string>& written) {
  try {
    if (traj.series.empty() || traj.snapshots.empty()) throw std::invalid_argument("empty trajectory");
    if (req.op == "mass") return series_stats(traj, &StepRecord::mass);
    if (req.op == "energy") return series_stats(traj, &StepRecord::energy);
    if (req.op == "strichartz") return {{"l4_spacetime", strichartz_accumulate(traj)}};
    if (req.op == "scattering") {
      ScatteringOptions o;
      o.tail_window = req.param("window", 0.0);
      o.tolerance = req.param("tol", o.tolerance);
      const auto rep = scattering_test(traj, o);
      return {{"scatters", rep.scatters},       {"cauchy_gap", rep.cauchy_gap},   {"tail_l4", rep.tail_l4},
              {"previous_l4", rep.previous_l4}, {"l4_decaying", rep.l4_decaying}, {"tail_snapshots", rep.tail_snapshots},
              {"u_plus_mass", mass(rep.u_plus)}};
    }
    if (req.op == "scales" || req.op == "classify") {
      const auto s = scale_functions(traj, req.param("eta", 0.01));
      if (req.op == "classify") {
        const bool from_end = traj.blew_up() && traj.blowup;
        const auto rep = classify_scenario(from_end ? from_blowup_end(s, traj.blowup->t_star) : s);
        return {{"label", to_string(rep.label)},
                {"max_min_ratio", rep.max_min_ratio},
                {"median", rep.median},
                {"time_fit", fit_json(rep.time_fit)},
                {"timed_from_blowup", from_end}};
      }
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < s.size(); ++i) rows.push_back({s.t[i], s.N[i], s.n_freq[i], s.r_space[i], s.x[i], s.xi[i]});
      write_csv(dir / "scales.csv", {"t", "N", "n_freq", "r_space", "x", "xi"}, rows);
      written.push_back("scales.csv");
      json chat = json::array();
      for (const auto& [eta, c] : s.c_hat) chat.push_back({{"eta", eta}, {"c_hat", c}});
      json out{{"eta", s.eta},
               {"N_min", *std::min_element(s.N.begin(), s.N.end())},
               {"N_max", *std::max_element(s.N.begin(), s.N.end())},
               {"c_hat", chat}};
      if (traj.blew_up() && traj.blowup) out["exponent_vs_blowup"] = fit_json(scale_exponent(s, traj.blowup->t_star));
      return out;
    }
    if (req.op == "virial") {
      const double Rcut = req.param("R", 0.25 * traj.snapshots.front().u.grid->radius());
      const double t = req.param("t", traj.snapshots[traj.snapshots.size() / 2].t);
      const auto rep = virial_identity(traj, t, Rcut, traj.mu);
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < rep.times.size(); ++i) rows.push_back({rep.times[i], rep.Ma[i]});
      write_csv(dir / "virial.csv", {"t", "Ma"}, rows);
      written.push_back("virial.csv");
      return {{"R", rep.R},
              {"t", rep.t},
              {"dMa_dt_fd", rep.dMa_dt_fd},
              {"rhs_terms", rep.rhs_terms},
              {"rhs", rep.rhs()},
              {"identity_gap", rep.identity_gap}};
    }
    if (req.op == "concentration") {
      const auto pts = concentration_mass(traj, req.param("c", 10.0), static_cast<std::size_t>(req.param("last", 0.0)));
      std::vector<std::vector<double>> rows;
      for (const auto& p : pts) rows.push_back({p.t, p.radius, p.mass, p.running_max});
      write_csv(dir / "concentration.csv", {"t", "radius", "mass", "running_max"}, rows);
      written.push_back("concentration.csv");
      const double mq = reference_ground_state().mass;
      return {{"c", req.param("c", 10.0)},
              {"final_mass", pts.back().mass},
              {"running_max", pts.back().running_max},
              {"ground_state_mass", mq},
              {"max_over_ground_state", pts.back().running_max / mq}};
    }
    throw std::invalid_argument("unknown diagnostic: " + req.op);
  } catch (const std::invalid_argument& e) {
    return {{"error", e.what()}, {"kind", "validation"}};
  } catch (const std::out_of_range& e) {
    return {{"error", e.what()}, {"kind", "validation"}};
  } catch (const HypothesisNotMet& e) {
    return {{"error", e.what()}, {"kind", "hypothesis"}};
  } catch (const NumericFailure& e) {
    return {{"error", e.what()}, {"kind", "numeric"}};
  }
}

namespace {

struct GridPoint {
  double mass_ratio;
  double mu;
};

std::string run_id(int index, const GridPoint& p) {
  char buf[96];
  if (std::isfinite(p.mass_ratio))
    std::snprintf(buf, sizeof buf, "run_%03d_m%g_mu%g", index, p.mass_ratio, p.mu);
  else
    std::snprintf(buf, sizeof buf, "run_%03d_mu%g", index, p.mu);
  return buf;
}

void execute_run(const ExperimentSpec& spec, const GridPoint& p, RunRecord& rec) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = spec.output_dir / rec.id;
  fs::create_directories(dir);
  auto rel = [&](const std::string& name) { return (fs::path(rec.id) / name).generic_string(); };
  try {
    EvolveConfig cfg = spec.evolve;
    cfg.mu = p.mu;
    const auto u0 = initial_datum(spec, p.mass_ratio, rec.index);
    auto traj = evolve(u0, cfg);
    if (!spec.write_snapshots) traj.snapshots = {traj.snapshots.front(), traj.snapshots.back()};
    const json provenance{{"experiment", spec.name}, {"run", rec.id}, {"mass_ratio", std::isfinite(p.mass_ratio) ? json(p.mass_ratio) : json(nullptr)}};
    for (const auto& f : write_trajectory(dir, traj, provenance)) rec.artifacts.push_back(rel(f));
    // diagnostics need every snapshot even when only the ends are kept on disk
    if (!spec.write_snapshots) traj = evolve(u0, cfg);

    json diags = json::object();
    std::vector<std::string> written;
    for (const auto& d : spec.diagnostics) diags[d.op] = run_diagnostic(traj, d, dir, written);
    for (const auto& f : written) rec.artifacts.push_back(rel(f));
    {
      std::ofstream os(dir / "diagnostics.json", std::ios::trunc);
      os << diags.dump(2) << '\n';
    }
    rec.artifacts.push_back(rel("diagnostics.json"));

    rec.termination = to_string(traj.termination);
    rec.message = traj.message;
    rec.summary = {{"t_end", traj.t_end()},
                   {"steps", traj.series.size()},
                   {"initial_mass", traj.series.front().mass},
                   {"diagnostics", diags}};
    if (traj.blowup) rec.summary["t_star"] = traj.blowup->t_star;
    rec.status = "complete";
  } catch (const std::exception& e) {
    rec.status = "failed";
    rec.message = e.what();
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RunManifest run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(spec.output_dir);

  std::vector<GridPoint> points;
  const std::vector<double> ratios = spec.mass_ratios.empty()
                                         ? std::vector<double>{std::numeric_limits<double>::quiet_NaN()}
                                         : spec.mass_ratios;
  const std::vector<double> mus = spec.mus.empty() ? std::vector<double>{spec.evolve.mu} : spec.mus;
  for (double mu : mus)
    for (double m : ratios) points.push_back({m, mu});

  RunManifest man;
  man.name = spec.name;
  const std::string bytes = spec.source.empty() ? to_json(spec).dump(2) : spec.source;
  man.spec_hash = fnv1a64_hex(bytes);
  man.code_version = code_version();
  man.grid_n = spec.grid_n;
  man.grid_R = spec.grid_R;
  man.seed = spec.seed;
  {
    std::ofstream os(spec.output_dir / "spec.json", std::ios::binary | std::ios::trunc);
    os << bytes;
  }
  man.artifacts = {"spec.json", "manifest.json"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    RunRecord r;
    r.index = static_cast<int>(i);
    r.id = run_id(r.index, points[i]);
    r.mass_ratio = points[i].mass_ratio;
    r.mu = points[i].mu;
    man.runs.push_back(r);
  }
  const fs::path manifest_path = spec.output_dir / "manifest.json";
  write_manifest_atomic(manifest_path, man);

  // shared reference state is built before the pool starts
  if (!points.empty()) (void)reference_ground_state();

  std::mutex mtx;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      RunRecord rec;
      {
        std::lock_guard lock(mtx);
        rec = man.runs[i];
      }
      execute_run(spec, points[i], rec);
      std::lock_guard lock(mtx);
      man.runs[i] = std::move(rec);
      write_manifest_atomic(manifest_path, man);
    }
  };
  const int nworkers = std::min<int>(spec.workers, static_cast<int>(points.size()));
  if (nworkers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
  }

  man.complete = true;
  man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest_atomic(manifest_path, man);
  return man;
}

}  // namespace nlslab
