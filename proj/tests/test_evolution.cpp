#include <doctest.h>

#include "nlslab/errors.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/observables.hpp"
#include "nlslab/symmetry.hpp"

#include <cmath>
#include <limits>

using namespace nlslab;

namespace {
const GroundState& ground(int n = 512, double R = 20.0) {
  static const GroundState q = shoot_ground_state(1e-12, make_grid(n, R));
  return q;
}

RadialField rotated(const RadialField& f, double theta) {
  RadialField out = f;
  for (auto& z : out.values) z *= std::polar(1.0, theta);
  return out;
}

double soliton_error(const Trajectory& tr, const RadialField& q) {
  double worst = 0.0;
  for (const auto& s : tr.snapshots) worst = std::max(worst, l2_distance(s.u, rotated(q, s.t)));
  return worst;
}

RadialField gaussian(GridPtr g, double amp, double a = 0.5) {
  return sample(g, [=](double r) { return cplx(amp * std::exp(-a * r * r), 0.0); });
}
}  // namespace

TEST_CASE("single split step") {
  const auto& q = ground();
  const auto zero = step_nls(RadialField(q.profile.grid), 1e-3, -1.0);
  for (const auto& z : zero.values) CHECK(z == cplx(0.0));

  const auto u = step_nls(q.profile, 1e-3, -1.0);
  CHECK(l2_distance(u, rotated(q.profile, 1e-3)) <= 2e-6);
  CHECK(std::abs(mass(u) / mass(q.profile) - 1.0) <= 1e-13);

  CHECK_THROWS_AS(step_nls(q.profile, 0.0, -1.0), std::invalid_argument);
  RadialField bad = q.profile;
  bad.values[3] = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(step_nls(bad, 1e-3, -1.0), NumericFailure);
}

TEST_CASE("soliton tracking is second order for Strang, fourth for the composition") {
  const auto& q = ground();
  auto run = [&](double dt, Scheme scheme) {
    EvolveConfig cfg;
    cfg.mu = -1.0;
    cfg.dt0 = dt;
    cfg.t_end = 1.0;
    cfg.scheme = scheme;
    cfg.snapshot_stride = static_cast<int>(std::lround(0.1 / dt));
    const auto tr = evolve(q.profile, cfg);
    REQUIRE(tr.termination == Termination::ReachedEnd);
    REQUIRE(tr.snapshots.size() == 11);
    return soliton_error(tr, q.profile);
  };
  const double e1 = run(2e-3, Scheme::Strang), e2 = run(1e-3, Scheme::Strang);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  CHECK(e2 < 5e-5);
  const double y1 = run(4e-3, Scheme::Yoshida4), y2 = run(2e-3, Scheme::Yoshida4);
  CHECK(y1 / y2 > 12.0);
  CHECK(run(1e-3, Scheme::Yoshida4) <= 1e-5);
}

TEST_CASE("conservation on a defocusing Gaussian") {
  auto g = make_grid(256, 30.0);
  const auto u0 = gaussian(g, 1.5);
  auto drift = [&](double dt) {
    EvolveConfig cfg;
    cfg.mu = 1.0;
    cfg.dt0 = dt;
    cfg.t_end = 5.0;
    cfg.snapshot_stride = 100;
    const auto tr = evolve(u0, cfg);
    REQUIRE(tr.termination == Termination::ReachedEnd);
    double m = 0.0, e = 0.0;
    for (const auto& rec : tr.series) {
      m = std::max(m, std::abs(rec.mass / tr.series[0].mass - 1.0));
      e = std::max(e, std::abs(rec.energy - tr.series[0].energy));
    }
    return std::pair{m, e};
  };
  const auto [m1, e1] = drift(1e-2);
  const auto [m2, e2] = drift(5e-3);
  CHECK(m1 <= 1e-10);
  CHECK(m2 <= 1e-10);
  CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("small data scatters without blowup") {
  auto g = make_grid(512, 80.0);
  const auto& q = ground();
  const auto Q = hankel_forward(q.profile);
  const auto u0 = sample(g, [&](double r) { return 0.1 * evaluate_at(Q, r); });
  EvolveConfig cfg;
  cfg.mu = 1.0;
  cfg.dt0 = 1e-2;
  cfg.t_end = 10.0;
  cfg.snapshot_stride = 100;
  const auto tr = evolve(u0, cfg);
  REQUIRE(tr.termination == Termination::ReachedEnd);
  // L4 increments over unit windows decay
  std::vector<double> inc;
  double last = 0.0;
  for (const auto& rec : tr.series)
    if (std::abs(rec.t - std::round(rec.t)) < 1e-9 && rec.t > 0.5) {
      inc.push_back(rec.l4_cum - last);
      last = rec.l4_cum;
    }
  REQUIRE(inc.size() == 10);
  for (std::size_t i = 1; i < inc.size(); ++i) CHECK(inc[i] < inc[i - 1]);
  CHECK(std::isfinite(tr.series.back().l4_cum));
}

TEST_CASE("defocusing ground state disperses, consistent across resolutions") {
  const auto& q = ground();
  const auto Q = hankel_forward(q.profile);
  auto run = [&](int n) {
    auto g = make_grid(n, 40.0);
    const auto u0 = sample(g, [&](double r) { return evaluate_at(Q, r); });
    EvolveConfig cfg;
    cfg.mu = 1.0;
    cfg.dt0 = 5e-3;
    cfg.t_end = 10.0;
    cfg.snapshot_stride = 400;
    return evolve(u0, cfg);
  };
  const auto a = run(384), b = run(512);
  REQUIRE(a.termination == Termination::ReachedEnd);
  REQUIRE(b.termination == Termination::ReachedEnd);
  for (const auto& rec : b.series) REQUIRE(rec.linf <= 2.0 * b.series[0].linf);
  CHECK(std::abs(a.series.back().linf - b.series.back().linf) <= 1e-6);
  CHECK(std::abs(a.series.back().energy - b.series.back().energy) <= 1e-6);
}

TEST_CASE("pseudoconformal soliton blows up at the predicted time") {
  const auto& q = ground();
  auto g = make_grid(512, 14.0);
  EvolveConfig cfg;
  cfg.mu = -1.0;
  cfg.dt0 = 1e-3;
  cfg.t_start = -1.0;
  cfg.t_end = -1e-6;
  cfg.adaptive = true;
  cfg.c_a = 0.0025;
  cfg.output_times = {-0.8, -0.6, -0.4, -0.3};
  const auto tr = evolve(pc_soliton(q, g, -1.0), cfg);
  CHECK(tr.termination == Termination::BlowupForward);
  CHECK(tr.resolution_limited);
  for (const auto& s : tr.snapshots)
    if (s.t <= -0.3 + 1e-12) CHECK(l2_distance(s.u, pc_soliton(q, g, s.t)) <= 1e-4);
  REQUIRE(tr.blowup);
  CHECK(std::abs(tr.blowup->t_star) < 2e-3);
  CHECK(tr.blowup->exponent == doctest::Approx(-1.0).epsilon(0.02));
  CHECK(std::abs(tr.series.back().mass / tr.series.front().mass - 1.0) <= 1e-10);
}

TEST_CASE("blowup fit recovers a synthetic law") {
  std::vector<StepRecord> series;
  for (int i = 0; i <= 200; ++i) {
    const double t = 0.7 * (1.0 - std::pow(0.97, i));
    StepRecord rec;
    rec.t = t;
    rec.linf = 3.0 * std::pow(0.7 - t, -0.5);
    series.push_back(rec);
  }
  const auto fit = fit_blowup(series);
  REQUIRE(fit);
  CHECK(fit->t_star == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(fit->exponent == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(std::exp(fit->log_prefactor) == doctest::Approx(3.0).epsilon(1e-5));
  CHECK_FALSE(fit_blowup(std::vector<StepRecord>(3)));
}

TEST_CASE("Duhamel residual") {
  const auto& q = ground();
  SUBCASE("free flow") {
    auto g = make_grid(256, 30.0);
    EvolveConfig cfg;
    cfg.mu = 0.0;
    cfg.dt0 = 1e-2;
    cfg.t_end = 1.0;
    const auto tr = evolve(gaussian(g, 1.0), cfg);
    CHECK(duhamel_residual(tr, 0.0, 1.0) <= 1e-10);
    CHECK(duhamel_residual(tr, 0.5, 0.5) == 0.0);
    CHECK_THROWS_AS(duhamel_residual(tr, 0.0, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(duhamel_residual(tr, 0.0, 0.333), std::invalid_argument);
  }
  SUBCASE("soliton, fourth order in the stride") {
    auto run = [&](int stride) {
      EvolveConfig cfg;
      cfg.mu = -1.0;
      cfg.dt0 = 1e-3;
      cfg.t_end = 1.0;
      cfg.snapshot_stride = stride;
      return duhamel_residual(evolve(q.profile, cfg), 0.0, 1.0);
    };
    // below stride ~20 the splitting error of the run itself is the floor
    CHECK(run(10) <= 1e-4);
    const double order = std::log2(run(50) / run(25));
    CHECK(order > 3.5);
    CHECK(order < 5.0);
  }
}

TEST_CASE("output times and adaptive steps") {
  auto g = make_grid(256, 20.0);
  EvolveConfig cfg;
  cfg.mu = -1.0;
  cfg.dt0 = 0.05;
  cfg.t_end = 1.0;
  cfg.adaptive = true;
  cfg.c_a = 0.1;
  cfg.output_times = {0.123, 0.5, 0.77};
  const auto u0 = gaussian(g, 2.0, 1.0);
  const auto tr = evolve(u0, cfg);
  REQUIRE(tr.termination == Termination::ReachedEnd);
  REQUIRE(tr.snapshots.size() == 5);
  CHECK(tr.snapshots[1].t == 0.123);
  CHECK(tr.snapshots[2].t == 0.5);
  CHECK(tr.snapshots[3].t == 0.77);
  CHECK(tr.snapshots[4].t == 1.0);
  for (std::size_t i = 1; i < tr.series.size(); ++i) {
    const double linf = tr.series[i - 1].linf;
    CHECK(tr.series[i].dt <= std::min(0.05, 0.1 / (linf * linf)) + 1e-15);
  }

  EvolveConfig bad;
  bad.dt0 = -1.0;
  CHECK_THROWS_AS(evolve(u0, bad), std::invalid_argument);
  bad = EvolveConfig{};
  bad.t_end = bad.t_start;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  CHECK(parse_scheme("yoshida4") == Scheme::Yoshida4);
  CHECK_THROWS_AS(parse_scheme("rk4"), std::invalid_argument);
}

TEST_CASE("Cartesian backend") {
  SUBCASE("constant field") {
    CartesianField u(16, 4.0);
    for (auto& z : u.values) z = cplx(0.7, 0.2);
    const double m2 = std::norm(cplx(0.7, 0.2));
    EvolveConfig cfg;
    cfg.mu = -1.0;
    cfg.dt0 = 1e-2;
    cfg.t_end = 1.0;
    const auto tr = cartesian_evolve(u, cfg);
    const cplx expect = cplx(0.7, 0.2) * std::polar(1.0, m2 * 1.0);
    for (const auto& z : tr.snapshots.back().u.values) CHECK(std::abs(z - expect) < 1e-12);
  }
  SUBCASE("agrees with the radial solver") {
    auto g = make_grid(256, 25.0);
    const auto u0 = gaussian(g, 1.5);
    EvolveConfig cfg;
    cfg.mu = 1.0;
    cfg.dt0 = 1e-3;
    cfg.t_end = 1.0;
    cfg.snapshot_stride = 1000;
    const auto radial = evolve(u0, cfg);
    const double L = 16.0 * std::numbers::pi;
    const auto cart0 = sample_cartesian(256, L, [](double x, double y) { return cplx(1.5 * std::exp(-0.5 * (x * x + y * y)), 0.0); });
    const auto cart = cartesian_evolve(cart0, cfg);
    REQUIRE(cart.termination == Termination::ReachedEnd);
    const auto ref = to_cartesian(radial.snapshots.back().u, 256, L);
    CHECK(l2_distance(cart.snapshots.back().u, ref) <= 1e-6);
    double per_step = 0.0, drift = 0.0;
    for (std::size_t i = 1; i < cart.series.size(); ++i) {
      per_step = std::max(per_step, std::abs(cart.series[i].mass / cart.series[i - 1].mass - 1.0));
      drift = std::max(drift, std::abs(cart.series[i].mass / cart.series[0].mass - 1.0));
    }
    CHECK(per_step <= 1e-13);
    CHECK(drift <= 1e-10);
  }
  SUBCASE("invalid boxes and unresolved data") {
    CHECK_THROWS_AS(CartesianField(12, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CartesianField(16, 0.0), std::invalid_argument);
    const auto spiky = sample_cartesian(32, 4.0, [](double x, double y) { return cplx(std::exp(-40.0 * (x * x + y * y)), 0.0); });
    CHECK_THROWS_AS(cartesian_evolve(spiky, EvolveConfig{}), std::invalid_argument);
  }
}
