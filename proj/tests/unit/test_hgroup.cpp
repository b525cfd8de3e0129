#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlfilt/hgroup.hpp"
#include "nlfilt/random.hpp"
#include "test_util.hpp"

using namespace nlfilt;

TEST_CASE("group law on hand-evaluated points") {
  const GroupPoint a({1.0}, {0.0}, 0.0);
  const GroupPoint b({0.0}, {1.0}, 0.0);
  // s = 0 + 0 + 2 * eta_a * xi_b - 2 * xi_a * eta_b = -2
  CHECK(mul(a, b) == GroupPoint({1.0}, {1.0}, -2.0));
  CHECK(mul(b, a) == GroupPoint({1.0}, {1.0}, 2.0));

  const GroupPoint p({0.3}, {-1.2}, 0.7);
  CHECK(mul(p, GroupPoint::neutral(1)) == p);
  CHECK(mul(GroupPoint::neutral(1), p) == p);
  CHECK(mul(p, inv(p)) == GroupPoint::neutral(1));
}

TEST_CASE("inverse") {
  CHECK(inv(GroupPoint::neutral(2)) == GroupPoint::neutral(2));
  CHECK(inv(GroupPoint({1.0}, {2.0}, 3.0)) == GroupPoint({-1.0}, {-2.0}, -3.0));
  Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    const GroupPoint p = testutil::random_point(rng, 2, 3.0);
    CHECK(inv(inv(p)) == p);
  }
}

TEST_CASE("associativity on random triples") {
  Rng rng(11);
  for (int n : {1, 2}) {
    for (int k = 0; k < 200; ++k) {
      const GroupPoint a = testutil::random_point(rng, n, 2.0);
      const GroupPoint b = testutil::random_point(rng, n, 2.0);
      const GroupPoint c = testutil::random_point(rng, n, 2.0);
      const auto lhs = mul(mul(a, b), c).coords();
      const auto rhs = mul(a, mul(b, c)).coords();
      for (std::size_t q = 0; q < lhs.size(); ++q) CHECK(lhs[q] == doctest::Approx(rhs[q]).epsilon(1e-12));
    }
  }
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(mul(GroupPoint::neutral(1), GroupPoint::neutral(2)), std::invalid_argument);
  CHECK_THROWS_AS(kdist(GroupPoint::neutral(1), GroupPoint::neutral(2)), std::invalid_argument);
}

TEST_CASE("dilations") {
  const GroupPoint p({1.0}, {0.0}, 1.0);
  CHECK(dilate(1.0, p) == p);
  CHECK(dilate(2.0, p) == GroupPoint({2.0}, {0.0}, 4.0));
  const GroupPoint q({0.4, -0.2}, {1.5, 0.1}, -0.9);
  const auto a = dilate(1.5, dilate(0.5, q)).coords();
  const auto b = dilate(0.75, q).coords();
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-14));
  CHECK_THROWS_AS(dilate(0.0, p), std::invalid_argument);
  CHECK_THROWS_AS(dilate(-1.0, p), std::invalid_argument);
}

TEST_CASE("Koranyi norm and distance") {
  CHECK(knorm(GroupPoint::neutral(1)) == 0.0);
  CHECK(knorm(GroupPoint({1.0}, {0.0}, 0.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(knorm(GroupPoint({0.0}, {0.0}, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  // (|z|^4 + s^2)^{1/4} with |z|^2 = 2, s = 5: (4 + 25)^{1/4}
  CHECK(knorm(GroupPoint({1.0}, {1.0}, 5.0)) == doctest::Approx(std::pow(29.0, 0.25)).epsilon(1e-15));

  const GroupPoint p({0.2}, {0.9}, -0.4);
  CHECK(kdist(p, p) == 0.0);
  CHECK(kdist(GroupPoint::neutral(1), GroupPoint({1.0}, {0.0}, 0.0)) == doctest::Approx(1.0));

  Rng rng(3);
  for (int k = 0; k < 1000; ++k) {
    const GroupPoint a = testutil::random_point(rng, 1, 4.0);
    const GroupPoint b = testutil::random_point(rng, 1, 4.0);
    CHECK(kdist(a, b) == kdist(b, a));
  }
}

TEST_CASE("homogeneity and left invariance") {
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const GroupPoint p = testutil::random_point(rng, 2, 2.0);
    const double lam = rng.uniform(0.1, 5.0);
    CHECK(knorm(dilate(lam, p)) == doctest::Approx(lam * knorm(p)).epsilon(1e-13));

    const GroupPoint g = testutil::random_point(rng, 2, 3.0);
    const GroupPoint a = testutil::random_point(rng, 2, 3.0);
    const GroupPoint b = testutil::random_point(rng, 2, 3.0);
    CHECK(kdist(mul(g, a), mul(g, b)) == doctest::Approx(kdist(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("left translation has unit Jacobian") {
  Rng rng(9);
  for (int n : {1, 2}) {
    const int dims = 2 * n + 1;
    const GroupPoint g = testutil::random_point(rng, n, 2.0);
    const GroupPoint x = testutil::random_point(rng, n, 2.0);
    const auto x0 = x.coords();
    std::vector<double> jac(static_cast<std::size_t>(dims * dims));
    const double h = 1e-5;
    for (int c = 0; c < dims; ++c) {
      auto xp = x0, xm = x0;
      xp[c] += h;
      xm[c] -= h;
      const auto fp = mul(g, GroupPoint::from_coords(xp)).coords();
      const auto fm = mul(g, GroupPoint::from_coords(xm)).coords();
      for (int r = 0; r < dims; ++r) jac[r * dims + c] = (fp[r] - fm[r]) / (2.0 * h);
    }
    CHECK(testutil::determinant(jac, dims) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("ball volume scales with the homogeneous degree") {
  // Monte Carlo counts of B_R and B_{2R} inside their bounding boxes.
  Rng rng(2024);
  const int n = 1;
  const int samples = 1'000'000;
  auto volume = [&](double R) {
    int hits = 0;
    for (int k = 0; k < samples; ++k) {
      const GroupPoint p({rng.uniform(-R, R)}, {rng.uniform(-R, R)}, rng.uniform(-R * R, R * R));
      if (knorm(p) <= R) ++hits;
    }
    const double box = std::pow(2.0 * R, 2 * n) * 2.0 * R * R;
    return box * hits / samples;
  };
  const double v1 = volume(1.0);
  const double v2 = volume(2.0);
  CHECK(v2 / v1 == doctest::Approx(std::pow(2.0, homogeneous_degree(n))).epsilon(0.01));
  // closed form |B_1| = pi^2 / 2 for n = 1
  CHECK(v1 == doctest::Approx(std::numbers::pi * std::numbers::pi / 2.0).epsilon(0.01));
}

TEST_CASE("group context constants") {
  for (int n : {1, 2, 3}) {
    const GroupContext ctx = make_group_context(n);
    CHECK(ctx.n == n);
    CHECK(ctx.Q == 2 * n + 2);
    // polar identity on the shell 1 <= |x| <= 2, by direct quadrature
    CHECK(ctx.C0 == doctest::Approx(koranyi_shell_integral(n, 0.0, 1.0, 2.0) / std::log(2.0)).epsilon(1e-8));
  }
  CHECK(make_group_context(1).C0 == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi).epsilon(1e-14));
  CHECK_THROWS_AS(make_group_context(0), std::invalid_argument);
}

TEST_CASE("critical exponents are exact") {
  CHECK(critical_exponent(4, 1.0) == 0.75);
  CHECK(integrability_threshold(0.5, 4, 1.0) == 2.0);
  CHECK(homogeneous_degree(1) == 4);
  CHECK(homogeneous_degree(3) == 8);
}
