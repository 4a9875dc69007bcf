#include <doctest.h>

#include "nlslab/ensemble.hpp"
#include "nlslab/observables.hpp"
#include "nlslab/symmetry.hpp"

#include <cmath>
#include <numbers>

using namespace nlslab;

namespace {

/// Symbolic composition of two group elements from the explicit action formula.
GroupElement compose(const GroupElement& a, const GroupElement& b) {
  GroupElement c;
  c.lambda = a.lambda * b.lambda;
  c.xi0 = {a.xi0[0] + b.xi0[0] / a.lambda, a.xi0[1] + b.xi0[1] / a.lambda};
  c.x0 = {a.x0[0] + a.lambda * b.x0[0], a.x0[1] + a.lambda * b.x0[1]};
  c.theta = a.theta + b.theta - (a.x0[0] * b.xi0[0] + a.x0[1] * b.xi0[1]) / a.lambda;
  c.radial = a.radial && b.radial;
  return c;
}

const GroundState& ground() {
  static const GroundState q = shoot_ground_state(1e-12, make_grid(512, 20.0));
  return q;
}

RadialField gaussian(GridPtr g, double amp, double a = 0.5) {
  return sample(g, [=](double r) { return cplx(amp * std::exp(-a * r * r), 0.0); });
}

EvolveConfig defocusing(double t0, double t1, std::vector<double> times, double dt = 1e-3) {
  EvolveConfig cfg;
  cfg.mu = 1.0;
  cfg.dt0 = dt;
  cfg.t_start = t0;
  cfg.t_end = t1;
  cfg.output_times = std::move(times);
  return cfg;
}

double max_snapshot_distance(const Trajectory& a, const Trajectory& b) {
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    REQUIRE(a.snapshots[i].t == doctest::Approx(b.snapshots[i].t).epsilon(1e-12));
    worst = std::max(worst, l2_distance(a.snapshots[i].u, b.snapshots[i].u));
  }
  return worst;
}

}  // namespace

TEST_CASE("radial group action") {
  auto g = make_grid(512, 40.0);
  EnsembleOptions opts;
  opts.size = 12;
  opts.min_width = 0.7;
  opts.max_width = 2.0;
  const auto fields = random_ensemble(5, opts);

  SUBCASE("identity") {
    const auto f = fields[0].on_grid(g);
    CHECK(l2_distance(apply_group_element(GroupElement::identity(), f), f) <= 1e-14);
  }
  SUBCASE("mass invariance") {
    CounterRng rng(9);
    for (const auto& m : fields) {
      const auto f = m.on_grid(g);
      GroupElement e = GroupElement::scaling(rng.uniform(0.6, 1.6));
      e.theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
      CHECK(mass(apply_group_element(e, f)) == doctest::Approx(mass(f)).epsilon(1e-10));
    }
  }
  SUBCASE("group law") {
    const auto f = fields[1].on_grid(g);
    const GroupElement a{0.4, {0, 0}, {0, 0}, 1.3, true};
    const GroupElement b{-1.1, {0, 0}, {0, 0}, 0.7, true};
    const auto lhs = apply_group_element(a, apply_group_element(b, f));
    const auto rhs = apply_group_element(compose(a, b), f);
    CHECK(l2_distance(lhs, rhs) <= 1e-9);
  }
  SUBCASE("errors") {
    const auto f = fields[2].on_grid(g);
    CHECK_THROWS_AS(apply_group_element(GroupElement::scaling(-1.0), f), std::invalid_argument);
    CHECK_THROWS_AS(apply_group_element(GroupElement::boost({1.0, 0.0}), f), std::invalid_argument);
    GroupElement bad = GroupElement::identity();
    bad.x0 = {1.0, 0.0};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    CHECK_THROWS_AS(apply_group_element(GroupElement::scaling(40.0), f), std::out_of_range);
    CHECK_THROWS_AS(apply_group_element(GroupElement::scaling(0.01), f), std::out_of_range);
  }
  SUBCASE("radial data stays radial and real data stays real under scaling") {
    const auto f = gaussian(g, 1.0);
    const auto h = apply_group_element(GroupElement::scaling(1.7), f);
    for (const auto& z : h.values) CHECK(std::abs(z.imag()) <= 1e-15);
  }
}

TEST_CASE("scaling and phase commute with the flow") {
  auto g = make_grid(512, 40.0);
  const auto u0 = gaussian(g, 1.2);
  const auto run = evolve(u0, defocusing(0.0, 1.0, {0.2, 0.4, 0.6, 0.8, 1.0}));
  for (double lambda : {2.0, 0.8}) {
    GroupElement e = GroupElement::scaling(lambda);
    e.theta = 0.3;
    const auto moved = transform_trajectory(e, run);
    std::vector<double> times;
    for (double t : {0.2, 0.4, 0.6, 0.8, 1.0}) times.push_back(lambda * lambda * t);
    const auto resolved = evolve(apply_group_element(e, u0), defocusing(0.0, lambda * lambda, times, lambda * lambda * 1e-3));
    CHECK(max_snapshot_distance(moved, resolved) <= 1e-5);
    CHECK(moved.series.back().l4_cum == doctest::Approx(run.series.back().l4_cum).epsilon(1e-6));
    CHECK(moved.series.back().mass == doctest::Approx(run.series.back().mass).epsilon(1e-12));
  }
}

TEST_CASE("time reversal and translation") {
  auto g = make_grid(512, 40.0);
  const auto u0 = gaussian(g, 1.2);
  const auto run = evolve(u0, defocusing(0.0, 1.0, {0.2, 0.4, 0.6, 0.8, 1.0}));

  const auto back = time_reverse(run);
  const auto twice = time_reverse(back);
  REQUIRE(twice.snapshots.size() == run.snapshots.size());
  for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
    CHECK(twice.snapshots[i].t == run.snapshots[i].t);
    CHECK(twice.snapshots[i].u.values == run.snapshots[i].u.values);
  }
  CHECK(back.series.front().mass == run.series.back().mass);

  const auto resolved = evolve(back.snapshots.front().u, defocusing(-1.0, 0.0, {-0.8, -0.6, -0.4, -0.2, 0.0}));
  CHECK(max_snapshot_distance(back, resolved) <= 1e-4);

  const auto shifted = time_translate(run, 0.4);
  CHECK(shifted.t_begin() == doctest::Approx(-0.4));
  const auto from_shift = evolve(u0, defocusing(-0.4, 0.6, {-0.2, 0.0, 0.2, 0.4, 0.6}));
  CHECK(max_snapshot_distance(shifted, from_shift) <= 1e-12);

  Trajectory blow = run;
  blow.termination = Termination::BlowupForward;
  blow.blowup = BlowupEstimate{1.5, -1.0, 0.0, 0.5, 1.0, 0.0};
  const auto rev = time_reverse(blow);
  CHECK(rev.termination == Termination::BlowupBackward);
  CHECK(rev.blowup->t_star == -1.5);
  CHECK(time_reverse(rev).termination == Termination::BlowupForward);
}

TEST_CASE("pseudoconformal transformation") {
  const auto& q = ground();
  auto g = make_grid(512, 20.0);

  SUBCASE("soliton image matches the closed form") {
    Trajectory sol;
    sol.mu = -1.0;
    RadialField u = q.profile;
    for (auto& z : u.values) z *= std::polar(1.0, 1.0);
    sol.snapshots.push_back({1.0, u});
    const auto v = pseudoconformal(sol);
    CHECK(v.snapshots.front().t == -1.0);
    CHECK(l2_distance(v.snapshots.front().u, pc_soliton(q, g, -1.0)) <= 1e-12);
  }
  SUBCASE("mass, involution and covariance") {
    const auto u1 = gaussian(g, 1.0, 0.5);
    const auto run = evolve(u1, defocusing(1.0, 2.0, {1.25, 1.5, 1.75, 2.0}, 5e-4));
    const auto v = pseudoconformal(run);
    for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
      CHECK(v.snapshots[i].t == doctest::Approx(-1.0 / run.snapshots[i].t));
      CHECK(mass(v.snapshots[i].u) == doctest::Approx(mass(run.snapshots[i].u)).epsilon(1e-8));
    }
    const auto w = pseudoconformal(v);
    CHECK(max_snapshot_distance(w, run) <= 1e-6);

    std::vector<double> times;
    for (std::size_t i = 1; i < v.snapshots.size(); ++i) times.push_back(v.snapshots[i].t);
    const auto resolved = evolve(v.snapshots.front().u, defocusing(-1.0, -0.5, times, 5e-4));
    CHECK(max_snapshot_distance(v, resolved) <= 1e-4);
  }
  SUBCASE("refusals") {
    Trajectory across;
    across.snapshots.push_back({-0.5, q.profile});
    across.snapshots.push_back({0.5, q.profile});
    CHECK_THROWS_AS(pseudoconformal(across), std::invalid_argument);
    CHECK_THROWS_AS(pseudoconformal_snapshot(q.profile, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pseudoconformal_snapshot(q.profile, 1000.0), std::out_of_range);
    CHECK_THROWS_AS(pc_soliton(q, g, 0.0), std::invalid_argument);
  }
}

namespace {
struct CartesianSetup {
  CartesianField u0;
  EvolveConfig cfg;
  CartesianTrajectory run;
};

const CartesianSetup& cartesian_setup() {
  static const CartesianSetup s = [] {
    CartesianSetup c;
    const double L = 16.0 * std::numbers::pi;
    c.u0 = sample_cartesian(256, L, [](double x, double y) { return cplx(1.2 * std::exp(-0.5 * (x * x + y * y)), 0.0); });
    c.cfg.mu = 1.0;
    c.cfg.dt0 = 2e-3;
    c.cfg.t_end = 1.0;
    c.cfg.output_times = {0.2, 0.4, 0.6, 0.8, 1.0};
    c.run = cartesian_evolve(c.u0, c.cfg);
    return c;
  }();
  return s;
}
}  // namespace

TEST_CASE("Cartesian group law with shifts") {
  const auto& u0 = cartesian_setup().u0;
  const GroupElement a{0.3, {1.0, 0.0}, {0.5, -1.0}, 1.0, false};
  const GroupElement b{-0.2, {0.0, 0.5}, {1.5, 0.25}, 1.0, false};
  const auto lhs = apply_group_element(a, apply_group_element(b, u0));
  const auto rhs = apply_group_element(compose(a, b), u0);
  CHECK(l2_distance(lhs, rhs) <= 1e-9);
  CHECK(mass(lhs) == doctest::Approx(mass(u0)).epsilon(1e-10));
  CHECK_THROWS_AS(apply_group_element(GroupElement::scaling(2.0), u0), std::out_of_range);
  CHECK_THROWS_AS(apply_group_element(GroupElement::boost({0.3, 0.0}), u0), std::invalid_argument);
}

TEST_CASE("Cartesian boosts and translations commute with the flow") {
  const auto& [u0, cfg, run] = cartesian_setup();
  for (const auto& e : {GroupElement::boost({1.0, 0.0}), GroupElement::translation({2.0, -1.5})}) {
    const auto moved = transform_trajectory(e, run);
    const auto resolved = cartesian_evolve(apply_group_element(e, u0), cfg);
    REQUIRE(moved.snapshots.size() == resolved.snapshots.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < moved.snapshots.size(); ++i)
      worst = std::max(worst, l2_distance(moved.snapshots[i].u, resolved.snapshots[i].u));
    CHECK(worst <= 1e-4);
    CHECK(moved.series.back().l4_cum == doctest::Approx(resolved.series.back().l4_cum).epsilon(1e-6));
    CHECK(moved.series.back().energy == doctest::Approx(resolved.series.back().energy).epsilon(1e-8));
  }
}

TEST_CASE("boosted centroid travels at twice the boost") {
  const auto moved = transform_trajectory(GroupElement::boost({1.0, 0.0}), cartesian_setup().run);
  for (const auto& s : moved.snapshots) {
    const auto c = centroid(s.u);
    CHECK(c[0] == doctest::Approx(2.0 * s.t).epsilon(1e-6));
    CHECK(std::abs(c[1]) <= 1e-9);
  }
}
