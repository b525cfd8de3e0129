#include <doctest.h>

#include <cmath>
#include <vector>

#include "nlfilt/checks.hpp"
#include "nlfilt/fit.hpp"
#include "nlfilt/holder.hpp"
#include "nlfilt/initial_data.hpp"
#include "nlfilt/report.hpp"
#include "test_util.hpp"

using namespace nlfilt;

namespace {

// Diagnostics-only trajectory with prescribed sup norms (and L^p norms for the listed p).
Trajectory synthetic(double m, double alpha, const std::vector<double>& times, const std::vector<double>& linf,
                     std::vector<double> p_list = {}, const std::vector<std::vector<double>>& lp = {}) {
  Trajectory t;
  t.m = m;
  t.alpha = alpha;
  t.Q = 4;
  t.grid = testutil::cube(3);
  t.p_list = std::move(p_list);
  t.times = times;
  for (std::size_t k = 0; k < times.size(); ++k) {
    StepDiagnostics d;
    d.step = static_cast<int>(k);
    d.t = times[k];
    d.dt = k == 0 ? 0.0 : times[k] - times[k - 1];
    d.linf = linf[k];
    for (const auto& col : lp) d.lp.push_back(col[k]);
    t.diagnostics.push_back(d);
  }
  return t;
}

Trajectory static_fields(const DiscreteField& f, std::vector<double> times) {
  Trajectory t = synthetic(2.0, 1.0, times, std::vector<double>(times.size(), 1.0));
  t.grid = f.grid;
  for (std::size_t k = 0; k < times.size(); ++k) {
    t.fields.push_back(f);
    t.field_steps.push_back(k);
  }
  return t;
}

}  // namespace

TEST_CASE("predicted exponents") {
  // Q = 4, alpha = 1, m = 2, p = 1: gamma = 1 / (1 + 1/4) = 0.8, delta = 0.2
  CHECK(smoothing_gamma(2.0, 1.0, 4, 1.0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(smoothing_delta(2.0, 1.0, 4, 1.0) == doctest::Approx(0.2).epsilon(1e-15));
  // m = 1: gamma = Q / (alpha p)
  CHECK(smoothing_gamma(1.0, 0.5, 4, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(mass_leak_slope(2.0, 1.0, 4) == -1.0);
  // m = 0.5: p = 2, -alpha + Q/2
  CHECK(mass_leak_slope(0.5, 1.0, 4) == doctest::Approx(1.0));
  CHECK(critical_exponent(4, 1.0) == 0.75);
}

TEST_CASE("least squares fits") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{3.0, 5.0, 7.0, 9.0};
  const LinearFit f = fit_linear(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.points == 4);

  std::vector<double> py;
  for (double v : x) py.push_back(2.5 * std::pow(v, -0.7));
  const LinearFit p = fit_power_law(x, py);
  CHECK(p.slope == doctest::Approx(-0.7).epsilon(1e-13));
  CHECK(std::exp(p.intercept) == doctest::Approx(2.5).epsilon(1e-13));

  CHECK_THROWS_AS(fit_linear(std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law(x, std::vector<double>{1.0, -1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("smoothing fit on synthetic decay") {
  const double gamma = smoothing_gamma(2.0, 1.0, 4, 1.0);
  std::vector<double> times{0.0}, clean{1.0}, noisy{1.0};
  for (int k = 1; k <= 200; ++k) {
    const double t = 0.05 * k;
    times.push_back(t);
    clean.push_back(std::min(1.0, 0.2 * std::pow(t, -gamma)));
    noisy.push_back(clean.back() * (1.0 + 0.6 * (k % 2)));
  }
  const ExponentReport ok = fit_smoothing(synthetic(2.0, 1.0, times, clean), 1.0);
  CHECK(ok.pass);
  CHECK(ok.status == "pass");
  CHECK(ok.fitted_exponent == doctest::Approx(-gamma).epsilon(1e-10));
  CHECK(ok.t_max == doctest::Approx(10.0 * ok.t_min).epsilon(0.05));

  const ExponentReport bad = fit_smoothing(synthetic(2.0, 1.0, times, noisy), 1.0);
  CHECK_FALSE(bad.pass);
  CHECK(bad.status == "inconclusive");
  CHECK(bad.r_squared < 0.98);

  // wrong exponent with a clean fit is a failure
  const ExponentReport wrong = fit_smoothing(synthetic(3.0, 1.0, times, clean), 1.0);
  CHECK(wrong.status == "fail");

  // a run too short for the window is inconclusive
  std::vector<double> short_t(times.begin(), times.begin() + 40), short_v(clean.begin(), clean.begin() + 40);
  CHECK(fit_smoothing(synthetic(2.0, 1.0, short_t, short_v), 1.0).status == "inconclusive");
}

TEST_CASE("extinction check and its guards") {
  // J' = -J^{3/4} exactly: J = (1 - t/4)^4, zero from t = 4 on
  std::vector<double> times, linf, J3;
  for (int k = 0; k <= 120; ++k) {
    const double t = 0.05 * k;
    const double J = std::pow(std::max(0.0, 1.0 - t / 4.0), 4);
    times.push_back(t);
    J3.push_back(std::cbrt(J));
    linf.push_back(std::cbrt(J));
  }
  const Trajectory traj = synthetic(0.5, 1.0, times, linf, {3.0}, {J3});
  const CheckReport r = check_extinction(traj, 3.0);
  CHECK(r.passed());
  CHECK(r.measured["C_hat"].get<double>() <= 1.0);
  CHECK(r.measured["C_hat"].get<double>() > 0.2);
  CHECK(r.measured["observed_extinction_time"].get<double>() == doctest::Approx(4.0).epsilon(0.02));

  CHECK(check_extinction(synthetic(2.0, 1.0, times, linf, {3.0}, {J3}), 3.0).status == "skipped: m >= m*");
  CHECK(check_extinction(synthetic(0.5, 1.0, times, linf, {2.0}, {J3}), 2.0).status == "skipped: p <= p*(m)");
  CHECK_THROWS_AS(check_extinction(traj, 4.0), std::invalid_argument);

  CHECK_FALSE(check_no_extinction(traj).passed());
  CHECK(check_no_extinction(synthetic(2.0, 1.0, {0.0, 1.0}, {1.0, 0.5})).passed());
}

TEST_CASE("mass check skips the dirichlet closure") {
  const Trajectory t = synthetic(2.0, 1.0, {0.0, 1.0}, {1.0, 1.0});
  CHECK(check_mass(t, Closure::dirichlet_zero).status.rfind("skipped", 0) == 0);
}

TEST_CASE("Holder diagnostic on exact profiles") {
  const GridSpec g = testutil::cube(9, 2.0);
  SUBCASE("flat field is inconclusive") {
    const Trajectory t = static_fields(DiscreteField(g, 0.3), {0.0, 1.0});
    const HolderReport h = holder_diagnostic(t, GroupPoint::neutral(1), 1.0);
    CHECK(h.flat);
    CHECK(h.report.status == "inconclusive");
  }
  SUBCASE("linear field halves per level") {
    DiscreteField f(g);
    double c[3];
    for (std::size_t i = 0; i < f.size(); ++i) {
      g.node_coords(i, c);
      f[i] = c[0];
    }
    const Trajectory t = static_fields(f, {0.0, 0.5, 1.0});
    double omega = 0.0;
    REQUIRE(cylinder_half_oscillation(t, CylinderSpec{GroupPoint::neutral(1), 1.0, 0.5, 0.5}, 0.125, omega));
    CHECK(omega == doctest::Approx(0.5).epsilon(1e-12));
    const HolderReport h = holder_diagnostic(t, GroupPoint::neutral(1), 1.0);
    CHECK(h.report.passed());
    CHECK(h.levels_used == 4);
    CHECK(h.beta_hat == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(h.theta_hat == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(h.cylinders[2].depth == doctest::Approx(0.25));
  }
  SUBCASE("cylinders outside the run are truncated") {
    const Trajectory t = static_fields(DiscreteField(g, 1.0), {0.0, 0.1});
    double omega = 0.0;
    CHECK_FALSE(cylinder_half_oscillation(t, CylinderSpec{GroupPoint::neutral(1), 0.1, 1.0, 1.0}, 0.125, omega));
    CHECK_FALSE(cylinder_half_oscillation(t, CylinderSpec{GroupPoint::neutral(1), 0.1, 3.0, 0.05}, 0.125, omega));
  }
}

TEST_CASE("report json shape") {
  CheckReport a;
  a.name = "x";
  a.set_pass(true);
  CheckReport b;
  b.name = "y";
  b.status = "skipped: m >= m*";
  CheckReport c;
  c.name = "z";
  c.set_pass(false);
  c.notes.push_back("note");
  const json doc = suite_to_json("demo", 7, {a, b, c});
  CHECK(doc["suite"] == "demo");
  CHECK(doc["seed"] == 7);
  CHECK(doc["checks"].size() == 3);
  CHECK(doc["checks"][2]["notes"][0] == "note");
  for (const char* key : {"name", "inputs", "measured", "predicted", "tolerances", "status"}) {
    CHECK(doc["checks"][0].contains(key));
  }
  CHECK(doc["summary"]["pass"] == 1);
  CHECK(doc["summary"]["fail"] == 1);
  CHECK(doc["summary"]["skipped"] == 1);
  CHECK(any_failed({a, b, c}));
  CHECK_FALSE(any_failed({a, b}));
}
