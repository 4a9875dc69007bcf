// nlslab command line: ground states, evolution, symmetry transforms,
// diagnostics, inequality probes, sweeps and reports.
//
// exit codes: 0 success, 2 validation, 3 numeric failure, 4 hypothesis not met
// (1 for I/O and anything unexpected).

#include "nlslab/errors.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/harness.hpp"
#include "nlslab/observables.hpp"
#include "nlslab/probes.hpp"
#include "nlslab/snapshot_io.hpp"
#include "nlslab/symmetry.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nlslab;

namespace {

enum Exit { kOk = 0, kOther = 1, kValidation = 2, kNumeric = 3, kHypothesis = 4 };

struct Globals {
  std::optional<int> grid_n;
  std::optional<double> grid_R;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  int n(int fallback = 512) const { return grid_n.value_or(fallback); }
  double R(double fallback = 20.0) const { return grid_R.value_or(fallback); }
  fs::path out_dir(const char* fallback) const { return out.value_or(fallback); }
};

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

json ground_state_json(const GroundState& q) {
  return {{"method", to_string(q.method)},
          {"n", q.profile.grid->size()},
          {"R", q.profile.grid->radius()},
          {"mass", q.mass},
          {"grad_norm_sq", q.grad_norm_sq},
          {"l4_norm_4", q.l4_norm_4},
          {"energy", q.energy()},
          {"q0", q.q0},
          {"residual", q.residual},
          {"iterations", q.iterations},
          {"gn_ratio", gn_ratio(q.profile, q.mass)}};
}

int cmd_groundstate(const Globals& gl, const std::string& method, double tol) {
  const auto g = make_grid(gl.n(), gl.R());
  GroundState q;
  if (method == "shooting") {
    q = shoot_ground_state(tol, g);
  } else {
    FlowOptions o;
    o.tol = tol;
    q = gradient_flow_ground_state(g, o);
  }
  const fs::path dir = gl.out_dir("nlslab-groundstate");
  fs::create_directories(dir);
  const json info = ground_state_json(q);
  write_snapshot(dir / "ground_state.nlsf", q.profile, info);
  write_json(dir / "ground_state.json", info);
  std::cout << info.dump(2) << '\n';
  return kOk;
}

struct EvolveArgs {
  std::string initial = "ground_state";
  double amplitude = 1.0;
  double width = 1.0;
  std::string file;
  double noise = 0.0;
  double mass_ratio = NAN;
  double mu = -1.0;
  std::string scheme = "strang";
  double dt = 1e-3;
  double t_start = 0.0;
  double t_end = 1.0;
  bool adaptive = false;
  double c_a = 0.1;
  int stride = 1;
};

int cmd_evolve(const Globals& gl, const EvolveArgs& a) {
  ExperimentSpec s;
  s.grid_n = gl.n();
  s.grid_R = gl.R();
  s.seed = gl.seed.value_or(0);
  s.initial.kind = parse_initial_kind(a.initial);
  s.initial.amplitude = a.amplitude;
  s.initial.width = a.width;
  s.initial.path = a.file;
  s.initial.noise = a.noise;
  s.evolve.mu = a.mu;
  s.evolve.scheme = parse_scheme(a.scheme);
  s.evolve.dt0 = a.dt;
  s.evolve.t_start = a.t_start;
  s.evolve.t_end = a.t_end;
  s.evolve.adaptive = a.adaptive;
  s.evolve.c_a = a.c_a;
  s.evolve.snapshot_stride = a.stride;
  validate(s);

  const auto traj = evolve(initial_datum(s, a.mass_ratio, 0), s.evolve);
  const fs::path dir = gl.out_dir("nlslab-evolve");
  write_trajectory(dir, traj, {{"command", "evolve"}, {"spec", to_json(s)}});
  json info{{"termination", to_string(traj.termination)},
            {"t_end", traj.t_end()},
            {"steps", traj.series.size() - 1},
            {"snapshots", traj.snapshots.size()},
            {"mass_drift", std::abs(traj.series.back().mass - traj.series.front().mass)},
            {"message", traj.message}};
  if (traj.blowup) info["t_star"] = traj.blowup->t_star;
  std::cout << info.dump(2) << '\n';
  return traj.termination == Termination::NumericFailure ? kNumeric : kOk;
}

struct TransformArgs {
  std::string input;
  std::string op;
  double lambda = 1.0;
  double theta = 0.0;
  double t0 = 0.0;
};

int cmd_transform(const Globals& gl, const TransformArgs& a) {
  const fs::path dir = gl.out_dir("nlslab-transform");
  if (fs::is_regular_file(a.input)) {
    const auto u = read_snapshot(a.input);
    RadialField v;
    if (a.op == "scaling") v = apply_group_element(GroupElement::scaling(a.lambda), u);
    else if (a.op == "phase") v = apply_group_element(GroupElement::phase(a.theta), u);
    else if (a.op == "pc") v = pseudoconformal_snapshot(u, a.t0);
    else throw std::invalid_argument("snapshots support scaling, phase and pc (at --t0)");
    fs::create_directories(dir);
    write_snapshot(dir / "transformed.nlsf", v, {{"op", a.op}, {"source", a.input}});
    std::cout << json{{"op", a.op}, {"mass_in", mass(u)}, {"mass_out", mass(v)}}.dump(2) << '\n';
    return kOk;
  }
  const auto traj = read_trajectory(a.input);
  Trajectory out;
  if (a.op == "scaling") out = transform_trajectory(GroupElement::scaling(a.lambda), traj);
  else if (a.op == "phase") out = transform_trajectory(GroupElement::phase(a.theta), traj);
  else if (a.op == "time_translate") out = time_translate(traj, a.t0);
  else if (a.op == "time_reverse") out = time_reverse(traj);
  else if (a.op == "pc") out = pseudoconformal(traj);
  else throw std::invalid_argument("unknown transform: " + a.op);
  write_trajectory(dir, out, {{"op", a.op}, {"source", a.input}});
  std::cout << json{{"op", a.op}, {"snapshots", out.snapshots.size()}, {"t_begin", out.t_begin()},
                    {"t_end", out.t_end()}}
                   .dump(2)
            << '\n';
  return kOk;
}

int cmd_diagnose(const Globals& gl, const std::string& traj_dir, const std::string& ops) {
  const auto reqs = parse_diagnostic_list(ops);
  if (reqs.empty()) throw std::invalid_argument("no diagnostics requested");
  const auto traj = read_trajectory(traj_dir);
  const fs::path dir = gl.out_dir("nlslab-diagnose");
  fs::create_directories(dir);
  json out = json::object();
  std::vector<std::string> written;
  int code = kOk;
  for (const auto& r : reqs) {
    out[r.op] = run_diagnostic(traj, r, dir, written);
    if (out[r.op].contains("kind")) {
      const auto kind = out[r.op]["kind"].get<std::string>();
      const int c = kind == "hypothesis" ? kHypothesis : kind == "numeric" ? kNumeric : kValidation;
      code = std::max(code, c);
    }
  }
  write_json(dir / "diagnostics.json", out);
  std::cout << out.dump(2) << '\n';
  return code;
}

struct ProbeArgs {
  std::string name = "all";
  int ensemble = 64;
  double q = 3.5;
  int n = 0;
  double R = 0.0;
  bool no_refine = false;
};

json probe_json(const ProbeReport& r) {
  json curve = json::array();
  for (const auto& [x, y] : r.curve) curve.push_back({x, y});
  json j{{"name", r.name},
         {"ensemble_size", r.ensemble_size},
         {"n", r.n},
         {"R", r.R},
         {"worst_ratio", r.worst_ratio},
         {"fitted_constant", r.fitted_constant},
         {"curve", curve},
         {"refined_constant", r.refined_constant},
         {"refined_n", r.refined_n},
         {"stable", r.stable}};
  if (r.exponent)
    j["exponent"] = {{"slope", r.exponent->slope}, {"expected", r.expected_exponent}, {"r2", r.exponent->r2}};
  return j;
}

int cmd_probe(const Globals& gl, const ProbeArgs& a) {
  ProbeOptions o;
  o.ensemble_size = a.ensemble;
  o.seed = gl.seed.value_or(o.seed);
  o.q = a.q;
  o.n = a.n;
  o.R = a.R;
  o.refine = !a.no_refine;
  const auto names = a.name == "all" ? probe_names() : std::vector<std::string>{a.name};
  const fs::path dir = gl.out_dir("nlslab-probe");
  for (const auto& name : names) {
    const auto j = probe_json(probe_inequality(name, o));
    write_json(dir / ("probe_" + name + ".json"), j);
    std::cout << j.dump() << '\n';
  }
  return kOk;
}

int cmd_run(const Globals& gl, const std::string& spec_path) {
  auto spec = load_experiment(spec_path);
  if (gl.grid_n) spec.grid_n = *gl.grid_n;
  if (gl.grid_R) spec.grid_R = *gl.grid_R;
  if (gl.seed) spec.seed = *gl.seed;
  if (gl.out) spec.output_dir = *gl.out;
  validate(spec);
  const auto m = run_experiment(spec);
  int code = kOk;
  for (const auto& r : m.runs) {
    std::cout << r.id << ' ' << r.status << ' ' << r.termination << ' ' << r.wall_seconds << "s\n";
    if (r.status == "failed" || r.termination == to_string(Termination::NumericFailure)) code = kNumeric;
  }
  std::cout << "manifest: " << (spec.output_dir / "manifest.json").string() << '\n';
  return code;
}

int cmd_report(const Globals& gl, const std::string& manifest_path) {
  const auto m = load_manifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  const fs::path out = gl.out ? fs::path(*gl.out) : base / "report";
  if (!m.complete) std::cerr << "warning: manifest is incomplete; reporting finished runs only\n";
  const auto files = emit_report(m, base, out);
  for (const auto& f : files.written) std::cout << (out / f).string() << '\n';
  for (const auto& e : files.errors) std::cerr << "error: " << e << '\n';
  return files.errors.empty() ? kOk : kOther;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radial mass-critical NLS laboratory"};
  app.require_subcommand(1);
  Globals gl;
  app.add_option("--grid-n", gl.grid_n, "grid points")->check(CLI::PositiveNumber);
  app.add_option("--grid-R", gl.grid_R, "disc radius")->check(CLI::PositiveNumber);
  app.add_option("--seed", gl.seed, "generator seed");
  app.add_option("--out", gl.out, "output directory");

  std::function<int()> action;

  auto* gs = app.add_subcommand("groundstate", "compute Q and its invariants")->fallthrough();
  std::string method = "shooting";
  double tol = 1e-12;
  gs->add_option("--method", method)->check(CLI::IsMember({"shooting", "flow"}));
  gs->add_option("--tol", tol);
  gs->callback([&] { action = [&] { return cmd_groundstate(gl, method, tol); }; });

  auto* ev = app.add_subcommand("evolve", "evolve one initial datum")->fallthrough();
  EvolveArgs ea;
  ev->add_option("--initial", ea.initial, "ground_state, gaussian, pc_soliton or file");
  ev->add_option("--amplitude", ea.amplitude);
  ev->add_option("--width", ea.width);
  ev->add_option("--file", ea.file)->check(CLI::ExistingFile);
  ev->add_option("--noise", ea.noise);
  ev->add_option("--mass-ratio", ea.mass_ratio, "rescale to this multiple of M(Q)");
  ev->add_option("--mu", ea.mu, "+1 defocusing, -1 focusing, 0 free");
  ev->add_option("--scheme", ea.scheme)->check(CLI::IsMember({"strang", "yoshida4"}));
  ev->add_option("--dt", ea.dt);
  ev->add_option("--t-start", ea.t_start);
  ev->add_option("--t-end", ea.t_end);
  ev->add_flag("--adaptive", ea.adaptive);
  ev->add_option("--c-a", ea.c_a);
  ev->add_option("--stride", ea.stride);
  ev->callback([&] { action = [&] { return cmd_evolve(gl, ea); }; });

  auto* tr = app.add_subcommand("transform", "apply a symmetry to a trajectory or snapshot")->fallthrough();
  TransformArgs ta;
  tr->add_option("--input", ta.input, "trajectory directory or .nlsf file")->required()->check(CLI::ExistingPath);
  tr->add_option("--op", ta.op, "scaling, phase, time_translate, time_reverse, pc")->required();
  tr->add_option("--lambda", ta.lambda);
  tr->add_option("--theta", ta.theta);
  tr->add_option("--t0", ta.t0);
  tr->callback([&] { action = [&] { return cmd_transform(gl, ta); }; });

  auto* dg = app.add_subcommand("diagnose", "diagnostics on a stored trajectory")->fallthrough();
  std::string traj_dir, ops = "mass,energy,strichartz";
  dg->add_option("--traj", traj_dir)->required()->check(CLI::ExistingDirectory);
  dg->add_option("--ops", ops, "comma list, e.g. scales,virial:R=5,concentration:c=10");
  dg->callback([&] { action = [&] { return cmd_diagnose(gl, traj_dir, ops); }; });

  auto* pr = app.add_subcommand("probe", "free-flow inequality probes")->fallthrough();
  ProbeArgs pa;
  pr->add_option("--name", pa.name, "probe name or all");
  pr->add_option("--ensemble", pa.ensemble);
  pr->add_option("--q", pa.q);
  pr->add_option("--n", pa.n);
  pr->add_option("--R", pa.R);
  pr->add_flag("--no-refine", pa.no_refine);
  pr->callback([&] { action = [&] { return cmd_probe(gl, pa); }; });

  auto* rn = app.add_subcommand("run", "execute an experiment spec")->fallthrough();
  std::string spec_path;
  rn->add_option("--spec", spec_path)->required()->check(CLI::ExistingFile);
  rn->callback([&] { action = [&] { return cmd_run(gl, spec_path); }; });

  auto* rp = app.add_subcommand("report", "summarize a manifest")->fallthrough();
  std::string manifest_path;
  rp->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
  rp->callback([&] { action = [&] { return cmd_report(gl, manifest_path); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    return action();
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kValidation;
  } catch (const std::out_of_range& e) {
    std::cerr << "out of range: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const HypothesisNotMet& e) {
    std::cerr << "hypothesis not met: " << e.what() << '\n';
    return kHypothesis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
}
