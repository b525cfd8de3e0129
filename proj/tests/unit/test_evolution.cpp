#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "nlfilt/evolution.hpp"
#include "nlfilt/initial_data.hpp"
#include "test_util.hpp"

using namespace nlfilt;

namespace {

EvolutionConfig small_config(double m, Closure closure = Closure::censored) {
  EvolutionConfig cfg;
  cfg.m = m;
  cfg.grid = testutil::cube(7, 2.0, closure);
  cfg.dt_schedule = uniform_schedule(0.05, 0.5);
  cfg.resolvent_tol = 1e-12;
  return cfg;
}

}  // namespace

TEST_CASE("schedules") {
  const auto u = uniform_schedule(0.3, 1.0);
  REQUIRE(u.size() == 4);
  CHECK(u[0] == 0.3);
  CHECK(u[3] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(std::accumulate(u.begin(), u.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));

  const auto g = geometric_schedule(0.1, 2.0, 1.0);
  REQUIRE(g.size() == 4);  // 0.1, 0.2, 0.4, 0.3
  CHECK(g[1] == doctest::Approx(0.2));
  CHECK(g[3] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(uniform_schedule(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(geometric_schedule(0.1, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("config validation") {
  EvolutionConfig cfg = small_config(2.0);
  CHECK_NOTHROW(cfg.validate());
  cfg.m = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config(2.0);
  cfg.dt_schedule.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config(2.0);
  cfg.diagnostics_p_list = {0.5};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("zero and constant data are stationary under the censored closure") {
  const EvolutionConfig cfg = small_config(2.0);
  const Trajectory z = run(cfg, DiscreteField(cfg.grid));
  CHECK(z.completed);
  CHECK(z.steps() == 10);
  for (const auto& f : z.fields) {
    for (double v : f.values) CHECK(v == 0.0);
  }
  const Trajectory c = run(cfg, DiscreteField(cfg.grid, 0.4));
  for (const auto& f : c.fields) {
    for (double v : f.values) CHECK(v == doctest::Approx(0.4).epsilon(1e-12));
  }
}

TEST_CASE("linear two-node system matches the 2x2 inverse") {
  const GridSpec g = testutil::cube(3);
  const std::size_t N = g.node_count();
  const double w = 0.6;
  const NonlocalOperator op =
      operator_from_weights(g, testutil::pair_weights(N, w), std::vector<double>(N, 0.0));
  EvolutionConfig cfg;
  cfg.m = 1.0;
  cfg.grid = g;
  cfg.dt_schedule = {0.1, 0.2, 0.4};
  cfg.resolvent_tol = 1e-14;
  DiscreteField u0(g);
  u0[0] = 1.0;
  u0[1] = -0.5;
  const Trajectory traj = run(op, cfg, u0);
  REQUIRE(traj.completed);
  double a = 1.0, b = -0.5;
  for (std::size_t k = 0; k < cfg.dt_schedule.size(); ++k) {
    const double c = cfg.dt_schedule[k] * w;
    const double det = 1.0 + 2.0 * c;
    const double na = ((1.0 + c) * a + c * b) / det;
    const double nb = (c * a + (1.0 + c) * b) / det;
    a = na;
    b = nb;
    const DiscreteField* f = traj.field_at_step(k + 1);
    REQUIRE(f != nullptr);
    CHECK((*f)[0] == doctest::Approx(a).epsilon(1e-12));
    CHECK((*f)[1] == doctest::Approx(b).epsilon(1e-12));
  }
  CHECK(traj.times.back() == doctest::Approx(0.7));
}

TEST_CASE("censored closure conserves mass") {
  for (double m : {0.6, 1.0, 2.0}) {
    EvolutionConfig cfg = small_config(m);
    InitialData id;
    id.preset = "two_bump";
    const DiscreteField u0 = make_initial_data(cfg.grid, id);
    const Trajectory traj = run(cfg, u0);
    REQUIRE(traj.completed);
    const double m0 = traj.diagnostics.front().mass;
    CHECK(m0 > 0.0);
    for (const auto& d : traj.diagnostics) CHECK(std::abs(d.mass - m0) <= 1e-10 * m0);
  }
}

TEST_CASE("dirichlet closure loses mass") {
  const EvolutionConfig cfg = small_config(2.0, Closure::dirichlet_zero);
  const DiscreteField u0 = make_initial_data(cfg.grid, InitialData{});
  const Trajectory traj = run(cfg, u0);
  for (std::size_t k = 1; k < traj.diagnostics.size(); ++k) {
    CHECK(traj.diagnostics[k].mass < traj.diagnostics[k - 1].mass);
  }
}

TEST_CASE("homogeneity: lambda u0 with rescaled time steps") {
  const double m = 2.0, lambda = 3.0;
  EvolutionConfig a = small_config(m);
  EvolutionConfig b = a;
  for (auto& dt : b.dt_schedule) dt *= std::pow(lambda, -(m - 1.0));
  const DiscreteField u0 = make_initial_data(a.grid, InitialData{});
  DiscreteField v0 = u0;
  for (auto& x : v0.values) x *= lambda;
  const NonlocalOperator op = assemble(a.grid, a.kernel, a.quad);
  const Trajectory ta = run(op, a, u0);
  const Trajectory tb = run(op, b, v0);
  for (std::size_t k = 0; k < ta.fields.size(); ++k) {
    for (std::size_t i = 0; i < u0.size(); ++i) {
      CHECK(std::abs(tb.fields[k][i] - lambda * ta.fields[k][i]) <= 1e-10);
    }
  }
}

TEST_CASE("diagnostics-only keeps step 0, checkpoints and the final step") {
  EvolutionConfig cfg = small_config(2.0);
  cfg.diagnostics_only = true;
  cfg.checkpoint_times = {0.22, 0.1};
  const Trajectory traj = run(cfg, make_initial_data(cfg.grid, InitialData{}));
  CHECK(traj.field_steps == std::vector<std::size_t>{0, 2, 5, 10});
  CHECK(traj.diagnostics.size() == 11);
  CHECK(traj.field_at_step(3) == nullptr);
  CHECK(traj.field_at_step(5) != nullptr);
}

TEST_CASE("subcritical exponent adds a warning") {
  EvolutionConfig cfg = small_config(0.5);
  cfg.dt_schedule = {0.01};
  const Trajectory traj = run(cfg, make_initial_data(cfg.grid, InitialData{}));
  REQUIRE(traj.warnings.size() == 1);
  CHECK(traj.warnings[0].find("m*") != std::string::npos);
  CHECK(run(small_config(2.0), DiscreteField(small_config(2.0).grid)).warnings.empty());
}

TEST_CASE("a failing step ends the run with a partial trajectory") {
  EvolutionConfig cfg = small_config(3.0);
  cfg.resolvent_max_iters = 1;
  cfg.resolvent_tol = 1e-15;
  cfg.dt_schedule = {10.0, 10.0};
  InitialData id;
  id.amplitude = 5.0;
  const Trajectory traj = run(cfg, make_initial_data(cfg.grid, id));
  CHECK_FALSE(traj.completed);
  CHECK(traj.failure.find("step 1") != std::string::npos);
  CHECK(traj.steps() == 0);

  const NonlocalOperator op = assemble(cfg.grid, cfg.kernel);
  SolverReport rep;
  CHECK_THROWS_AS(step(op, make_initial_data(cfg.grid, id), 3.0, 10.0, 1e-15, &rep, 1), StepFailure);
}

TEST_CASE("diagnostics csv") {
  EvolutionConfig cfg = small_config(2.0);
  cfg.diagnostics_p_list = {1.0, 3.0, std::numeric_limits<double>::infinity()};
  cfg.dt_schedule = {0.1, 0.1};
  const Trajectory traj = run(cfg, make_initial_data(cfg.grid, InitialData{}));
  const std::string path = "nlfilt_diag_test.csv";
  write_diagnostics_csv(traj, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  in.close();
  std::remove(path.c_str());
  CHECK(header == "step,t,dt,mass,l1,l2,linf,lp_1,lp_3,lp_inf,energy_mm,resolvent_iters,residual");
  CHECK(rows == 3);
  const auto& d = traj.diagnostics.back();
  CHECK(d.lp[0] == doctest::Approx(d.l1));
  CHECK(d.lp[2] == d.linf);
}
