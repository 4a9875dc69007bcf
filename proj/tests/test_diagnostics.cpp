#include <doctest.h>

#include "nlslab/diagnostics.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/observables.hpp"
#include "nlslab/symmetry.hpp"

#include <cmath>
#include <numbers>

using namespace nlslab;

namespace {
const GroundState& ground() {
  static const GroundState q = shoot_ground_state(1e-12, make_grid(512, 20.0));
  return q;
}

RadialField gaussian(GridPtr g, double amp, double a = 0.5) {
  return sample(g, [=](double r) { return cplx(amp * std::exp(-a * r * r), 0.0); });
}

Trajectory run(const RadialField& u0, double mu, double dt, double t_end, int stride = 1,
               Scheme scheme = Scheme::Strang) {
  EvolveConfig cfg;
  cfg.mu = mu;
  cfg.dt0 = dt;
  cfg.t_end = t_end;
  cfg.snapshot_stride = stride;
  cfg.scheme = scheme;
  return evolve(u0, cfg);
}

/// Synthetic series with the given frequency scale.
ScaleSeries synthetic(std::size_t count, double t0, double t1, double (*N)(double)) {
  ScaleSeries s;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = t0 + (t1 - t0) * i / (count - 1);
    s.t.push_back(t);
    s.N.push_back(N(t));
    s.x.push_back(0.0);
    s.xi.push_back(0.0);
    s.n_freq.push_back(N(t));
    s.r_space.push_back(1.0 / N(t));
  }
  return s;
}
}  // namespace

TEST_CASE("spacetime L4 from the step series") {
  const auto g = make_grid(128, 20.0);
  const auto zero = run(RadialField(g), -1.0, 1e-2, 0.5);
  CHECK(strichartz_accumulate(zero) == 0.0);

  const auto& q = ground();
  const auto tr = run(q.profile, -1.0, 1e-3, 0.5);
  CHECK(std::abs(strichartz_accumulate(tr) / (0.5 * q.l4_norm_4) - 1.0) <= 1e-4);
  CHECK(std::abs(strichartz_accumulate(tr, 0.1, 0.3) / (0.2 * q.l4_norm_4) - 1.0) <= 1e-4);
  CHECK_THROWS_AS(strichartz_accumulate(tr, 0.3, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(strichartz_accumulate(tr, 0.3, 0.1), std::invalid_argument);
}

TEST_CASE("scattering test") {
  SUBCASE("free flow pulls back exactly") {
    const auto g = make_grid(256, 40.0);
    const auto tr = run(gaussian(g, 1.0), 0.0, 1e-2, 2.0, 10);
    const auto rep = scattering_test(tr);
    CHECK(rep.scatters);
    CHECK(rep.cauchy_gap <= 1e-12);
    CHECK(l2_distance(rep.u_plus, tr.snapshots.front().u) <= 1e-12);
  }
  SUBCASE("small defocusing datum scatters") {
    const auto g = make_grid(512, 120.0);
    const auto tr = run(gaussian(g, 0.3), 1.0, 1e-2, 10.0, 25);
    REQUIRE(tr.termination == Termination::ReachedEnd);
    const auto rep = scattering_test(tr);
    CHECK(rep.l4_decaying);
    CHECK(rep.tail_l4 < rep.previous_l4);
    CHECK(rep.cauchy_gap <= 1e-3);
    CHECK(rep.scatters);
  }
  SUBCASE("soliton does not") {
    const auto tr = run(ground().profile, -1.0, 1e-2, 2.0, 10);
    const auto rep = scattering_test(tr);
    CHECK_FALSE(rep.scatters);
    CHECK(rep.cauchy_gap > 0.1);
  }
}

TEST_CASE("log-log fit") {
  std::vector<double> x, y;
  for (int i = 1; i <= 20; ++i) {
    x.push_back(i);
    y.push_back(3.0 * std::pow(i, -0.75));
  }
  const auto fit = fit_loglog(x, y);
  CHECK(fit.slope == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.points == 20);
}

TEST_CASE("scale functions follow the scaling symmetry") {
  const auto& q = ground();
  const auto tr = run(q.profile, -1.0, 1e-2, 0.5, 5);
  const auto s = scale_functions(tr);
  REQUIRE(s.size() == tr.snapshots.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.N[i] == s.N.front());
    CHECK(s.x[i] == 0.0);
    CHECK(s.xi[i] == 0.0);
  }
  // N lives on the 2^{k/8} lattice
  const double k = 8.0 * std::log2(s.N.front());
  CHECK(std::abs(k - std::round(k)) <= 1e-12);
  REQUIRE(s.c_hat.size() == 3);
  CHECK(s.c_hat[0].first == 0.1);
  CHECK(s.c_hat[2].first == 0.001);
  CHECK(s.c_hat[0].second <= s.c_hat[1].second);
  CHECK(s.c_hat[1].second <= s.c_hat[2].second);

  // Q_lambda(x) = lambda^{-1} Q(x / lambda) moves both thresholds by lambda
  const auto g2 = make_grid(512, 40.0);
  const auto wide = sample(g2, [&](double r) { return 0.5 * evaluate_at(hankel_forward(q.profile), 0.5 * r); });
  const std::vector<Snapshot<RadialField>> one{{0.0, q.profile}}, two{{0.0, wide}};
  const auto a = scale_functions(one), b = scale_functions(two);
  CHECK(b.r_space[0] / a.r_space[0] == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(a.n_freq[0] / b.n_freq[0] == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(a.N[0] / b.N[0] == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(scale_functions(one, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scale_functions(one, 0.5), std::invalid_argument);
}

TEST_CASE("scenario classifier on synthetic scales") {
  const auto soliton = synthetic(200, 0.0, 20.0, [](double t) { return 1.0 + 0.1 * std::sin(t); });
  CHECK(classify_scenario(soliton).label == Scenario::SolitonLike);

  const auto self_similar = synthetic(200, 1.0, 1e4, [](double t) { return std::pow(t, -0.5); });
  const auto rep = classify_scenario(self_similar);
  CHECK(rep.label == Scenario::SelfSimilar);
  CHECK(rep.time_fit.slope == doctest::Approx(-0.5).epsilon(1e-9));

  const auto cascade = synthetic(200, 0.0, 1.0, [](double t) {
    const double s = std::sin(std::numbers::pi * t);
    return 0.01 + 10.0 * s * s;
  });
  CHECK(classify_scenario(cascade).label == Scenario::Cascade);

  const auto growing = synthetic(200, 1.0, 100.0, [](double t) { return t; });
  CHECK(classify_scenario(growing).label == Scenario::Inconclusive);

  CHECK_THROWS_AS(classify_scenario(synthetic(49, 0.0, 1.0, [](double) { return 1.0; })), std::invalid_argument);
  CHECK(to_string(Scenario::SelfSimilar) == "self-similar");

  const auto back = from_blowup_end(synthetic(100, -1.0, 0.5, [](double t) { return t; }), 0.0);
  REQUIRE(back.size() == 66);
  CHECK(back.t.front() > 0.0);
  for (std::size_t i = 1; i < back.size(); ++i) CHECK(back.t[i] > back.t[i - 1]);
}

TEST_CASE("virial functional") {
  const auto g = make_grid(256, 30.0);
  // real data carry no momentum
  CHECK(std::abs(virial(gaussian(g, 1.0), 5.0)) <= 1e-14);
  // f = e^{i b r^2} g: M_a = 2 int 2 b r^2 psi(r/R) g^2 dx
  const double b = 0.3;
  const auto chirped = sample(g, [=](double r) { return std::exp(-0.5 * r * r) * std::polar(1.0, b * r * r); });
  const double Rc = 50.0;  // psi = 1 on the support
  // 2 pi int_0^inf 4 b r^3 e^{-r^2} dr = 4 pi b
  CHECK(virial(chirped, Rc) == doctest::Approx(4.0 * std::numbers::pi * b).epsilon(1e-12));
}

TEST_CASE("virial identity converges with the time step") {
  SUBCASE("defocusing Gaussian") {
    double previous = 0.0;
    for (int lvl = 0; lvl < 2; ++lvl) {
      const int n = 128 << lvl;
      const double dt = 4e-3 / (1 << lvl);
      const auto tr = run(gaussian(make_grid(n, 30.0), 1.5), 1.0, dt, 0.5);
      const auto rep = virial_identity(tr, tr.snapshots[tr.snapshots.size() / 2].t, 5.0, 1.0);
      if (lvl == 1) {
        CHECK(rep.identity_gap <= 1e-4);
        CHECK(previous / rep.identity_gap > 3.5);
      }
      previous = rep.identity_gap;
    }
  }
  SUBCASE("soliton: cutoff terms vanish and the gap is the scheme's error") {
    const auto& q = ground();
    const auto tr = run(q.profile, -1.0, 1e-3, 0.02, 1, Scheme::Yoshida4);
    const auto rep = virial_identity(tr, 0.01, 10.0, -1.0);
    CHECK(rep.rhs_terms[0] == doctest::Approx(8.0 * q.energy()).epsilon(1e-6));
    CHECK(std::abs(rep.rhs_terms[1] + rep.rhs_terms[2] + rep.rhs_terms[3]) <= 1e-6);
    CHECK(rep.identity_gap <= 1e-5);
    CHECK_THROWS_AS(virial_identity(tr, 0.0005, 10.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(virial_identity(tr, 0.01005, 10.0, -1.0), std::invalid_argument);
  }
}

TEST_CASE("mass in a ball") {
  const auto g = make_grid(256, 20.0);
  const auto f = gaussian(g, 1.0);
  // int_{|x|<rho} e^{-r^2} dx = pi (1 - e^{-rho^2})
  for (double rho : {0.05, 0.5, 1.0, 2.5})
    CHECK(mass_in_ball(f, rho) == doctest::Approx(std::numbers::pi * (1.0 - std::exp(-rho * rho))).epsilon(1e-10));
  CHECK(mass_in_ball(f, 100.0) == doctest::Approx(mass(f)).epsilon(1e-12));
  CHECK(mass_in_ball(f, 0.0) == 0.0);
}

TEST_CASE("mass concentration at a pseudo-conformal blowup") {
  const auto& q = ground();
  CHECK_THROWS_AS(concentration_mass(run(q.profile, -1.0, 1e-2, 0.2), 2.0), std::invalid_argument);

  EvolveConfig cfg;
  cfg.mu = -1.0;
  cfg.dt0 = 1e-3;
  cfg.t_start = -1.0;
  cfg.t_end = -1e-6;
  cfg.adaptive = true;
  cfg.c_a = 0.0025;
  cfg.snapshot_stride = 20;
  const auto tr = evolve(pc_soliton(q, make_grid(512, 14.0), -1.0), cfg);
  REQUIRE(tr.blew_up());
  REQUIRE(tr.blowup.has_value());
  CHECK(std::abs(tr.blowup->t_star) <= 1e-3);

  double previous = 0.0;
  for (double c : {1.0, 3.0, 10.0}) {
    const auto pts = concentration_mass(tr, c, 5);
    REQUIRE(pts.size() == 5);
    const auto& last = pts.back();
    CHECK(last.radius == doctest::Approx(c * std::sqrt(tr.blowup->t_star - last.t)));
    CHECK(last.mass >= previous);
    CHECK(last.running_max >= last.mass);
    previous = last.mass;
  }
  // all of the mass sits in the shrinking ball
  CHECK(previous == doctest::Approx(q.mass).epsilon(1e-5));
}
