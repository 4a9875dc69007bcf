// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include "nlslab/diagnostics.hpp"
#include "nlslab/ensemble.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/observables.hpp"
#include "nlslab/probes.hpp"
#include "nlslab/profiles.hpp"
#include "nlslab/symmetry.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace nlslab;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [miss]");
  }
  void note(const std::string& what) { detail << (detail.tellp() > 0 ? "; " : "") << what; }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

const GroundState& ground() {
  static const GroundState q = shoot_ground_state(1e-12, make_grid(512, 20.0));
  return q;
}

RadialField q_on(GridPtr g, double scale = 1.0) {
  const auto Q = hankel_forward(ground().profile);
  std::vector<double> r;
  for (double x : g->r()) r.push_back(x / scale);
  const auto v = evaluate_at(Q, r);
  RadialField f(g);
  for (int k = 0; k < g->size(); ++k) f.values[k] = v[k] / scale;
  return f;
}

RadialField gaussian(GridPtr g, double amp, double a = 0.5) {
  return sample(g, [=](double r) { return cplx(amp * std::exp(-a * r * r), 0.0); });
}

RadialField rotated(const RadialField& f, double theta) {
  RadialField out = f;
  for (auto& z : out.values) z *= std::polar(1.0, theta);
  return out;
}

EvolveConfig config(double mu, double dt, double t0, double t1, std::vector<double> times = {}, int stride = 1) {
  EvolveConfig c;
  c.mu = mu;
  c.dt0 = dt;
  c.t_start = t0;
  c.t_end = t1;
  c.output_times = std::move(times);
  c.snapshot_stride = stride;
  return c;
}

double max_distance(const Trajectory& a, const Trajectory& b, std::size_t skip = 0) {
  if (a.snapshots.size() != b.snapshots.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = skip; i < a.snapshots.size(); ++i) {
    if (std::abs(a.snapshots[i].t - b.snapshots[i].t) > 1e-9) return INFINITY;
    worst = std::max(worst, l2_distance(a.snapshots[i].u, b.snapshots[i].u));
  }
  return worst;
}

EvolveConfig pc_config(double c_a, int stride) {
  EvolveConfig c = config(-1.0, 1e-3, -1.0, -1e-6, {}, stride);
  c.adaptive = true;
  c.c_a = c_a;
  return c;
}

/// The pc-soliton blowup shared by criteria 6, 7 and 8.
const Trajectory& pc_run() {
  static const Trajectory tr = evolve(pc_soliton(ground(), make_grid(512, 14.0), -1.0), pc_config(6.25e-4, 80));
  return tr;
}

// -- criteria -----------------------------------------------------------------------

void ground_state_certification(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = make_grid(512, 20.0);
  const auto a = shoot_ground_state(1e-12, g);
  const auto b = gradient_flow_ground_state(g);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.require(std::abs(a.mass - b.mass) / a.mass <= 1e-6, fmt("mass rel diff %.2e", std::abs(a.mass - b.mass) / a.mass));
  v.require(a.residual <= 1e-8 && b.residual <= 1e-8, fmt("residuals %.1e / %.1e", a.residual, b.residual));
  const double gn = gn_ratio(a.profile, a.mass);
  v.require(std::abs(gn - 1.0) <= 1e-6, fmt("gn_ratio - 1 = %.1e", gn - 1.0));
  v.require(std::abs(a.energy()) <= 1e-6 * a.grad_norm_sq, fmt("|E(Q)| = %.1e", std::abs(a.energy())));
  v.require(secs <= 30.0, fmt("%.1f s", secs));
  v.note(fmt("M(Q) = %.8f", a.mass));
}

double soliton_error(Scheme s, double dt) {
  auto c = config(-1.0, dt, 0.0, 1.0, {}, static_cast<int>(std::lround(0.1 / dt)));
  c.scheme = s;
  const auto tr = evolve(ground().profile, c);
  double worst = 0.0;
  for (const auto& snap : tr.snapshots) worst = std::max(worst, l2_distance(snap.u, rotated(ground().profile, snap.t)));
  return worst;
}

void soliton_tracking(Verdict& v) {
  const double e = soliton_error(Scheme::Strang, 1e-3);
  v.require(e <= 1e-5, fmt("strang dt=1e-3: sup ||u - e^{it}Q|| = %.2e", e));
  v.note(fmt("strang dt=5e-4: %.2e", soliton_error(Scheme::Strang, 5e-4)));
  v.note(fmt("yoshida4 dt=1e-3: %.2e", soliton_error(Scheme::Yoshida4, 1e-3)));
}

void conservation(Verdict& v) {
  const auto u0 = gaussian(make_grid(256, 30.0), 1.5);
  auto drift = [&](double dt) {
    const auto tr = evolve(u0, config(1.0, dt, 0.0, 5.0, {}, 100));
    double m = 0.0, e = 0.0;
    for (const auto& r : tr.series) {
      m = std::max(m, std::abs(r.mass / tr.series[0].mass - 1.0));
      e = std::max(e, std::abs(r.energy - tr.series[0].energy));
    }
    return std::pair{m, e};
  };
  const auto [m1, e1] = drift(1e-2);
  const auto [m2, e2] = drift(5e-3);
  v.require(std::max(m1, m2) <= 1e-10, fmt("mass drift %.1e", std::max(m1, m2)));
  v.require(e1 / e2 >= 3.5, fmt("energy drift %.2e -> %.2e", e1, e2) + fmt(" (x%.2f)", e1 / e2));
}

void symmetry_covariance(Verdict& v) {
  const auto g = make_grid(512, 40.0);
  const auto u0 = gaussian(g, 1.2);
  const std::vector<double> times{0.2, 0.4, 0.6, 0.8, 1.0};
  const auto run = evolve(u0, config(1.0, 1e-3, 0.0, 1.0, times));
  auto check = [&](const char* name, double d) { v.require(d <= 1e-4, name + fmt(" %.1e", d)); };

  {
    const double lambda = 2.0;
    const auto e = GroupElement::scaling(lambda);
    std::vector<double> tt;
    for (double t : times) tt.push_back(lambda * lambda * t);
    const auto resolved = evolve(apply_group_element(e, u0), config(1.0, lambda * lambda * 1e-3, 0.0, lambda * lambda, tt));
    check("scaling", max_distance(transform_trajectory(e, run), resolved, 1));
  }
  {
    const auto e = GroupElement::phase(0.7);
    const auto resolved = evolve(apply_group_element(e, u0), config(1.0, 1e-3, 0.0, 1.0, times));
    check("phase", max_distance(transform_trajectory(e, run), resolved, 1));
  }
  {
    const auto shifted = time_translate(run, 0.4);
    const auto resolved = evolve(u0, config(1.0, 1e-3, -0.4, 0.6, {-0.2, 0.0, 0.2, 0.4, 0.6}));
    check("time translation", max_distance(shifted, resolved, 1));
  }
  {
    const auto back = time_reverse(run);
    const auto resolved = evolve(back.snapshots.front().u, config(1.0, 1e-3, -1.0, 0.0, {-0.8, -0.6, -0.4, -0.2, 0.0}));
    check("time reversal", max_distance(back, resolved, 1));
  }
  {
    const auto g20 = make_grid(512, 20.0);
    const auto u1 = gaussian(g20, 1.0, 0.5);
    const auto forward = evolve(u1, config(1.0, 5e-4, 1.0, 2.0, {1.2, 1.4, 1.6, 1.8, 2.0}));
    const auto image = pseudoconformal(forward);
    std::vector<double> tt;
    for (std::size_t i = 1; i < image.snapshots.size(); ++i) tt.push_back(image.snapshots[i].t);
    const auto resolved = evolve(image.snapshots.front().u, config(1.0, 5e-4, -1.0, -0.5, tt));
    check("pseudoconformal", max_distance(image, resolved, 1));
  }
  {
    const double L = 16.0 * std::numbers::pi;
    const auto c0 = sample_cartesian(256, L, [](double x, double y) { return cplx(1.2 * std::exp(-0.5 * (x * x + y * y)), 0.0); });
    const auto cfg = config(1.0, 2e-3, 0.0, 1.0, times);
    const auto crun = cartesian_evolve(c0, cfg);
    for (const auto& [name, e] : {std::pair{"boost", GroupElement::boost({1.0, 0.0})},
                                  std::pair{"translation", GroupElement::translation({2.0, -1.5})}}) {
      const auto moved = transform_trajectory(e, crun);
      const auto resolved = cartesian_evolve(apply_group_element(e, c0), cfg);
      double worst = moved.snapshots.size() == resolved.snapshots.size() ? 0.0 : INFINITY;
      for (std::size_t i = 1; std::isfinite(worst) && i < moved.snapshots.size(); ++i)
        worst = std::max(worst, l2_distance(moved.snapshots[i].u, resolved.snapshots[i].u));
      check(name, worst);
    }
  }
}

void virial_criterion(Verdict& v) {
  double previous = 0.0, gap = 0.0;
  for (int lvl = 0; lvl < 2; ++lvl) {
    const int n = 128 << lvl;
    const double dt = 4e-3 / (1 << lvl);
    const auto tr = evolve(gaussian(make_grid(n, 30.0), 1.5), config(1.0, dt, 0.0, 0.5));
    previous = gap;
    gap = virial_identity(tr, tr.snapshots[tr.snapshots.size() / 2].t, 5.0, 1.0).identity_gap;
  }
  v.require(gap <= 1e-4, fmt("defocusing gap %.2e", gap));
  v.require(previous / gap > 3.5, fmt("refinement ratio %.2f (second order)", previous / gap));

  const auto& q = ground();
  const double dt = 2.5e-4;
  const auto tr = evolve(q.profile, config(-1.0, dt, 0.0, 0.02));
  const auto rep = virial_identity(tr, tr.snapshots[40].t, 10.0, -1.0);
  const double corrections = std::max({std::abs(rep.rhs_terms[1]), std::abs(rep.rhs_terms[2]), std::abs(rep.rhs_terms[3])});
  v.require(corrections <= 1e-6, fmt("soliton cutoff terms <= %.1e", corrections));
  v.require(std::abs(rep.dMa_dt_fd - rep.rhs_terms[0]) <= 1e-4 && std::abs(rep.rhs_terms[0]) <= 1e-4,
            fmt("dMa/dt = %.1e, 8E(Q) = %.1e (strang dt=2.5e-4)", rep.dMa_dt_fd, rep.rhs_terms[0]));
}

void blowup_scaling(Verdict& v) {
  const auto& tr = pc_run();
  const auto& q = ground();
  double worst = 0.0;
  for (const auto& s : tr.snapshots) worst = std::max(worst, l2_distance(s.u, pc_soliton(q, s.u.grid, s.t)));
  v.require(tr.blew_up() && tr.blowup.has_value(), "blowup detected (" + to_string(tr.termination) + ")");
  v.require(worst <= 1e-4, fmt("tracking %.2e up to t = %.3f", worst, tr.t_end()));
  if (!tr.blowup) return;
  v.note(fmt("T* = %.2e, ||u||_inf exponent %.3f", tr.blowup->t_star, tr.blowup->exponent));
  const auto fit = scale_exponent(scale_functions(tr), tr.blowup->t_star);
  v.require(std::abs(fit.slope + 0.5) <= 0.1, fmt("N(t) exponent %.3f vs -1/2", fit.slope));
}

void concentration(Verdict& v) {
  const auto& tr = pc_run();
  if (!tr.blowup) {
    v.require(false, "no blowup");
    return;
  }
  const auto pts = concentration_mass(tr, 10.0, 40);
  const double mq = ground().mass;
  v.require(pts.back().running_max >= 0.9 * mq, fmt("max mass in 10 (T*-t)^{1/2} ball = %.4f M(Q)", pts.back().running_max / mq));
}

void scattering(Verdict& v) {
  const auto g = make_grid(1024, 150.0);
  const auto base = q_on(g);
  const double mq = ground().mass;
  ScatteringOptions o;
  o.tail_window = 5.0;
  {
    const auto u0 = std::sqrt(0.9 * mq / mass(base)) * base;
    const auto tr = evolve(u0, config(-1.0, 5e-3, 0.0, 20.0, {}, 50));
    if (tr.termination != Termination::ReachedEnd) {
      v.require(false, "0.9 M(Q) focusing: " + to_string(tr.termination));
    } else {
      const auto rep = scattering_test(tr, o);
      v.require(rep.cauchy_gap <= 1e-3, fmt("0.9 M(Q) focusing Cauchy gap on [15,20] %.3e", rep.cauchy_gap));
      v.note(fmt("tail L4 %.3f vs previous %.3f", rep.tail_l4, rep.previous_l4));
    }
  }
  {
    const auto tr = evolve(0.1 * base, config(1.0, 5e-3, 0.0, 20.0, {}, 50));
    const auto rep = scattering_test(tr, o);
    v.require(rep.scatters && rep.cauchy_gap <= 1e-3, fmt("0.1 Q defocusing gap %.1e", rep.cauchy_gap));
  }
  v.require(pc_run().blew_up(), "pc ratio 1.0: " + to_string(pc_run().termination));
  {
    const auto u0 = std::sqrt(1.1) * pc_soliton(ground(), make_grid(512, 14.0), -1.0);
    const auto tr = evolve(u0, pc_config(0.0025, 1000000));
    v.require(tr.blew_up(), "pc ratio 1.1: " + to_string(tr.termination));
  }
}

void probes(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  ProbeOptions o;
  o.ensemble_size = 64;
  const auto shao = probe_inequality("shao", o);
  v.require(shao.exponent && std::abs(shao.exponent->slope + 1.0 / 7.0) <= 0.15,
            fmt("shao exponent %.3f", shao.exponent ? shao.exponent->slope : NAN));
  const auto bil = probe_inequality("bilinear", o);
  v.require(bil.exponent && std::abs(bil.exponent->slope - 0.5) <= 0.15,
            fmt("bilinear exponent %.3f", bil.exponent ? bil.exponent->slope : NAN));
  for (const char* name : {"bernstein", "bernstein_l4", "radial_sobolev", "dispersive", "weighted", "strichartz_l4", "strichartz_l2linf"}) {
    const auto r = probe_inequality(name, o);
    v.require(std::isfinite(r.fitted_constant) && r.stable,
              std::string(name) + fmt(" %.4f -> %.4f", r.fitted_constant, r.refined_constant));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.require(secs <= 600.0, fmt("%.0f s", secs));
}

void bubbles(Verdict& v) {
  const auto& q = ground();
  const auto b = find_bubble(q.profile, 0.0, 0.4, 1e-3);
  v.require(b.mass_in_ball >= 0.5 * q.mass && b.radius <= 10.0,
            fmt("bubble of Q: %.3f M(Q) in radius %.1f", b.mass_in_ball / q.mass, b.radius));

  const double lambda = 10.0;
  const auto g = make_grid(2048, 70.0);
  const auto u = q_on(g, 1.0 / lambda) + q_on(g, lambda);
  ProfileOptions opts;
  opts.t_begin = -0.25;
  opts.t_end = 0.25;
  const auto dec = extract_profiles({u}, 4, 0.05, opts);
  v.require(dec.profiles.size() == 2, fmt("%.0f profiles", static_cast<double>(dec.profiles.size())));
  v.require(dec.mass_decoupling_gap <= 0.05 * mass(u), fmt("decoupling gap %.4f M(u)", dec.mass_decoupling_gap / mass(u)));
  if (dec.profiles.size() == 2)
    v.note(fmt("scale ratio %.1f (expected %.0f)", dec.profiles[1].g.lambda / dec.profiles[0].g.lambda, lambda * lambda));
}

void in_out(Verdict& v) {
  const auto g = make_grid(256, 20.0);
  const auto ens = random_ensemble(17, {.size = 100, .min_width = 0.3, .max_width = 3.0});
  double sum_err = 0.0, ratio = 0.0;
  for (const auto& m : ens) {
    const auto f = m.on_grid(g);
    const auto p = in_out_project(f, WaveDirection::Outgoing);
    const auto n = in_out_project(f, WaveDirection::Incoming);
    for (int k = 0; k < g->size(); ++k) sum_err = std::max(sum_err, std::abs(p.values[k] + n.values[k] - f.values[k]));
    ratio = std::max({ratio, l2_norm(p) / l2_norm(f), l2_norm(n) / l2_norm(f)});
  }
  v.require(sum_err <= 1e-14, fmt("max |P+ f + P- f - f| = %.1e", sum_err));
  v.require(ratio <= 10.0, fmt("operator norm estimate %.3f", ratio));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria{
      {"ground-state certification", ground_state_certification},
      {"soliton tracking", soliton_tracking},
      {"conservation", conservation},
      {"symmetry covariance", symmetry_covariance},
      {"virial identity", virial_criterion},
      {"blowup scaling law", blowup_scaling},
      {"mass concentration", concentration},
      {"scattering dichotomy", scattering},
      {"inequality probes", probes},
      {"bubbles and profiles", bubbles},
      {"in/out structure", in_out},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %s: %s  [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", criteria[i].first,
                v.detail.str().c_str(), secs);
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed ? 1 : 0;
}
