#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "nlfilt/kernels.hpp"
#include "nlfilt/random.hpp"
#include "test_util.hpp"

using namespace nlfilt;

TEST_CASE("pure power values") {
  const GroupPoint o = GroupPoint::neutral(1);
  const auto k1 = KernelSpec::pure_power(1.0);
  CHECK(eval_kernel(k1, o, GroupPoint({1.0}, {0.0}, 0.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_kernel(KernelSpec::pure_power(0.3), o, GroupPoint({0.0}, {0.0}, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-15));
  // Q = 4, alpha = 1, d = 2: 2^{-5}
  CHECK(eval_kernel(k1, o, GroupPoint({2.0}, {0.0}, 0.0)) == doctest::Approx(0.03125).epsilon(1e-15));
  CHECK_THROWS_AS(eval_kernel(k1, o, o), SingularityError);
}

TEST_CASE("parameter checks") {
  CHECK_THROWS_AS(KernelSpec::pure_power(0.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::pure_power(2.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::log_rough(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::log_rough(1.0, -0.1), std::invalid_argument);
  CHECK(KernelSpec::log_rough(1.0, 0.5).Lambda == doctest::Approx(2.0));
  CHECK(kernel_family_from_string("log_rough") == KernelFamily::log_rough);
  CHECK(to_string(KernelFamily::tabulated_radial) == "tabulated_radial");
  CHECK_THROWS_AS(kernel_family_from_string("gaussian"), std::invalid_argument);
}

TEST_CASE("log-rough envelope") {
  const auto k = KernelSpec::log_rough(1.0, 0.5);
  const GroupPoint o = GroupPoint::neutral(1);
  for (double d : {0.01, 0.2, 1.0, 2.7, 40.0}) {
    const double J = eval_kernel(k, o, GroupPoint({d}, {0.0}, 0.0));
    const double ratio = J * std::pow(d, 5.0);
    CHECK(ratio == doctest::Approx(1.0 + 0.5 * std::sin(std::log(d))).epsilon(1e-13));
    CHECK(ratio <= k.Lambda);
    CHECK(1.0 / ratio <= k.Lambda);
  }
}

TEST_CASE("validation reports") {
  const GroupContext ctx = make_group_context(1);
  SUBCASE("pure power is exact") {
    const auto rep = validate_kernel(KernelSpec::pure_power(1.0), ctx, 2000, 1);
    CHECK(rep.passed);
    CHECK(rep.worst_upper_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.worst_lower_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.reflection_residual <= 1e-9);
    CHECK(rep.pair_residual <= 1e-9);
  }
  SUBCASE("log rough stays within Lambda = 2") {
    const auto rep = validate_kernel(KernelSpec::log_rough(0.7, 0.5), ctx, 5000, 2);
    CHECK(rep.passed);
    CHECK(rep.worst_upper_ratio <= 2.0);
    CHECK(rep.worst_lower_ratio <= 2.0);
    CHECK(rep.reflection_residual <= 1e-9);
  }
  SUBCASE("tabulated violation is caught") {
    auto profile = RadialProfile::from_points({0.5, 1.0, 2.0}, {1.0, 3.0, 1.0});
    const auto rep = validate_kernel(KernelSpec::tabulated(1.0, 2.0, profile), ctx, 500, 3);
    CHECK_FALSE(rep.passed);
    CHECK(rep.worst_upper_ratio == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_FALSE(rep.failures.empty());
  }
  SUBCASE("non-symmetric custom kernel fails the reflection check") {
    auto fn = [](std::span<const double> x, std::span<const double> y) {
      const double d = kdist(GroupPoint::from_coords(x), GroupPoint::from_coords(y));
      return std::pow(d, -5.0) * (1.0 + 0.3 * std::tanh(y[0] - x[0]));
    };
    const auto rep = validate_kernel(KernelSpec::from_function(1.0, 2.0, fn), ctx, 500, 4);
    CHECK_FALSE(rep.passed);
    CHECK(rep.reflection_residual > 1e-3);
  }
}

TEST_CASE("symmetries and homogeneity on random samples") {
  Rng rng(17);
  for (const auto& k : {KernelSpec::pure_power(1.0), KernelSpec::log_rough(1.3, 0.4)}) {
    for (int s = 0; s < 10000; ++s) {
      const GroupPoint x = testutil::random_point(rng, 1, 2.0);
      const GroupPoint y = testutil::random_point(rng, 1, 2.0);
      if (x == y) continue;
      const double J = eval_kernel(k, x, mul(x, y));
      CHECK(std::abs(J - eval_kernel(k, x, mul(x, inv(y)))) <= 1e-12 * J);
      const double Jxy = eval_kernel(k, x, y);
      CHECK(std::abs(Jxy - eval_kernel(k, y, x)) <= 1e-12 * Jxy);
    }
  }
  const auto k = KernelSpec::pure_power(0.6);
  for (int s = 0; s < 1000; ++s) {
    const GroupPoint x = testutil::random_point(rng, 2, 2.0);
    const GroupPoint y = testutil::random_point(rng, 2, 2.0);
    const double lam = rng.uniform(0.2, 4.0);
    const double lhs = eval_kernel(k, dilate(lam, x), dilate(lam, y));
    const double rhs = std::pow(lam, -(6.0 + 0.6)) * eval_kernel(k, x, y);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("tabulated profiles") {
  const std::string path = "nlfilt_profile_test.csv";
  {
    std::ofstream out(path);
    out << "distance,multiplier\n# comment\n0.5,1.5\n1.0,0.5\n4.0,1.0\n";
  }
  const auto p = RadialProfile::load_csv(path);
  std::remove(path.c_str());
  CHECK(p.distance.size() == 3);
  CHECK(p(0.1) == 1.5);
  CHECK(p(0.75) == doctest::Approx(1.0));
  CHECK(p(10.0) == 1.0);
  const auto k = KernelSpec::tabulated(1.0, 1.8, p);
  CHECK(k.multiplier(0.1) == 1.5);
  CHECK(k.multiplier(1.0) == doctest::Approx(1.0 / 1.8));
  CHECK(k.raw_multiplier(1.0) == 0.5);
  CHECK_THROWS_AS(RadialProfile::from_points({1.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RadialProfile::from_points({1.0, 2.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("radial tail integrals") {
  const GroupContext ctx = make_group_context(1);
  const double C0 = 2.0 * std::numbers::pi * std::numbers::pi;
  for (double R : {0.5, 1.0, 3.0}) {
    CHECK(radial_tail_integral(KernelSpec::pure_power(1.0), ctx, R) == doctest::Approx(C0 / R).epsilon(1e-6));
    CHECK(radial_tail_integral(KernelSpec::pure_power(0.5), ctx, R) ==
          doctest::Approx(C0 * std::pow(R, -0.5) / 0.5).epsilon(1e-6));
  }
  // a constant tabulated profile reduces to the pure power tail times the constant
  const auto flat = KernelSpec::tabulated(1.0, 2.0, RadialProfile::from_points({0.1, 10.0}, {1.5, 1.5}));
  CHECK(radial_tail_integral(flat, ctx, 2.0) == doctest::Approx(1.5 * C0 / 2.0).epsilon(1e-8));
  // log rough: C0 int_R^inf r^{-2} (1 + a sin log r) dr by a crude midpoint rule in log r
  const auto lr = KernelSpec::log_rough(1.0, 0.5);
  double acc = 0.0;
  const double h = 1e-4;
  for (double t = 0.5 * h; t < 50.0; t += h) acc += std::exp(-t) * (1.0 + 0.5 * std::sin(std::log(2.0) + t)) * h;
  CHECK(radial_tail_integral(lr, ctx, 2.0) == doctest::Approx(C0 * acc / 2.0).epsilon(1e-6));
}
