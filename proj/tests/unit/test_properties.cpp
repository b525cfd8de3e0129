#include <doctest.h>

#include <cmath>

#include "nlfilt/checks.hpp"
#include "nlfilt/resolvent.hpp"
#include "test_util.hpp"

using namespace nlfilt;

// Randomized properties of the resolvent: maximum principle, L1 bound and
// exact mass balance under the censored closure.
TEST_CASE("random resolvent problems") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int points = 3 + 2 * static_cast<int>(rng.uniform(0.0, 2.0));
    const Closure cl = trial % 2 ? Closure::censored : Closure::dirichlet_zero;
    const GridSpec g = testutil::cube(points, rng.uniform(0.5, 3.0), cl);
    const KernelSpec k = trial % 3 ? KernelSpec::pure_power(rng.uniform(0.2, 1.8))
                                   : KernelSpec::log_rough(rng.uniform(0.2, 1.8), rng.uniform(0.0, 0.9));
    const NonlocalOperator op = assemble(g, k);
    const double m = std::exp(rng.uniform(std::log(0.3), std::log(4.0)));
    const double eps = std::exp(rng.uniform(std::log(0.01), std::log(10.0)));
    ResolventProblem prob{op, testutil::random_field(g, rng, -2.0, 2.0), m, eps, 1e-11, 500};
    const auto [v, rep] = solve(prob);
    INFO("trial " << trial << " m = " << m << " eps = " << eps);
    REQUIRE(rep.converged);
    const DiscreteField u = signed_power(v, 1.0 / m);
    const double slack = 1e-9;
    CHECK(lp_norm(u, INFINITY) <= lp_norm(prob.g, INFINITY) + slack);
    CHECK(lp_norm(u, 1.0) <= lp_norm(prob.g, 1.0) + slack);
    if (cl == Closure::censored) {
      CHECK(mass(u) == doctest::Approx(mass(prob.g)).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("Stroock-Varopoulos inequality on random fields") {
  for (Closure cl : {Closure::censored, Closure::dirichlet_zero}) {
    const GridSpec g = testutil::cube(5, 2.0, cl);
    const NonlocalOperator op = assemble(g, KernelSpec::log_rough(1.1, 0.6));
    const CheckReport r = check_stroock_varopoulos(op, {0.3, 0.75, 1.0, 2.0, 5.0}, 50, 77);
    CHECK(r.passed());
  }
}
