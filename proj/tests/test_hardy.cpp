#include <cmath>
#include <random>

#include "cuspedge/errors.hpp"
#include "cuspedge/hardy.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cuspedge;
using namespace cuspedge::hardy;

namespace {
std::vector<double> uniform_nodes(double a, double b, int cells) {
  std::vector<double> x;
  for (int i = 0; i <= cells; ++i) x.push_back(a + (b - a) * i / cells);
  return x;
}
}  // namespace

TEST_SUITE("hardy") {
  TEST_CASE("theoretical constants") {
    CHECK(theoretical_constant(3.0, 1.0) == 0.5);
    CHECK(theoretical_constant(0.0, 1.0) == 2.0);
    CHECK_THROWS_AS(theoretical_constant(3.0, -1.0), OutsideRegime);
    for (double t : {-0.3, 0.5, 2.0}) CHECK(theoretical_constant(3.0 + 2 * t, 1.0 - t) == theoretical_constant(3.0, 1.0));
  }

  TEST_CASE("numeric best constants approach the continuum value from above") {
    for (auto [alpha, beta] : {std::pair{3.0, 1.0}, std::pair{0.0, 1.0}, std::pair{3.0, 0.0}}) {
      HardyProblem p;
      p.alpha = alpha;
      p.beta = beta;
      const auto r = best_constant_numeric(p);
      const double c = (2 * beta + alpha - 1) / 2;
      CHECK(r.theoretical_bound == c);
      CHECK(r.numeric_best >= c);
      CHECK(r.rayleigh_min <= 1.02 * c * c);
      CHECK(r.refined_numeric_best <= r.numeric_best);
      CHECK(r.ratio == doctest::Approx(r.numeric_best / c));
    }
  }

  TEST_CASE("refinement and the near-extremal function only lower the value") {
    HardyProblem p;
    p.alpha = 3.0;
    p.beta = 1.0;
    double previous = INFINITY;
    for (int cells : {500, 1000, 2000}) {
      p.mesh.cells = cells;
      p.near_extremal = true;
      const double with = best_constant_numeric(p).numeric_best;
      p.near_extremal = false;
      const double without = best_constant_numeric(p).numeric_best;
      CHECK(with <= without);
      CHECK(with <= previous);
      previous = with;
    }
  }

  TEST_CASE("coarse meshes are rejected") {
    HardyProblem p;
    p.mesh = {2, 2.0};
    p.near_extremal = false;
    CHECK_THROWS_AS(best_constant_numeric(p), MeshTooCoarse);
  }

  TEST_CASE("single trial functions respect the bound") {
    const auto x = uniform_nodes(0.0, 1.0, 10);
    std::vector<double> hat(x.size(), 0.0);
    hat[5] = 1.0;
    CHECK(rayleigh_quotient(3.0, 1.0, x, hat) >= 4.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> v(x.size());
      for (double& y : v) y = u(rng);
      v.back() = 0.0;
      CHECK(rayleigh_quotient(0.0, 1.0, x, v) >= 0.25);
      CHECK(rayleigh_quotient(3.0, 0.0, x, v) >= 1.0);
    }
  }

  TEST_CASE("cutoff function") {
    CHECK(cutoff(0.5, 1.0, 0.5) == 1.0);
    CHECK(cutoff(1.25, 1.0, 0.5) == 0.5);
    CHECK(cutoff(1.6, 1.0, 0.5) == 0.0);
    CHECK(cutoff_derivative(1.25, 1.0, 0.5) == doctest::Approx(-3.0));
    CHECK(cutoff_derivative(1.0, 1.0, 0.5) == 0.0);
  }

  TEST_CASE("boundary variant") {
    HardyProblem p;
    p.alpha = 3.0;
    p.beta = 1.0;
    p.eps = 0.5;
    p.mesh = {400, 2.0};
    const auto x = cutoff_mesh(p);
    REQUIRE(x.back() == 1.5);

    SUBCASE("support inside (0, rho0)") {
      std::vector<double> v(x.size(), 0.0);
      for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i] < 0.9 ? std::sin(3.0 * x[i] / 0.9 * M_PI) : 0.0;
      CHECK(boundary_variant_check(p, x, v).holds);
    }
    SUBCASE("constant function") {
      const std::vector<double> ones(x.size(), 1.0);
      const auto r = boundary_variant_check(p, x, ones);
      CHECK(r.holds);
      // psi written out independently: 1 - 3t^2 + 2t^3
      auto psi = [](double r) { const double t = (r - 1.0) / 0.5; return 1 - 3 * t * t + 2 * t * t * t; };
      const double mass = 0.25 + oracle::simpson([&](double r) { return r * r * r * psi(r) * psi(r); }, 1.0, 1.5, 2000);
      CHECK(r.lhs == doctest::Approx(2.0 * std::sqrt(mass)).epsilon(1e-10));
    }
    SUBCASE("near-extremal power") {
      const double s = near_extremal_exponent(3.0, 1.0);
      CHECK(s == doctest::Approx(-1.99));
      std::vector<double> v(x.size());
      for (std::size_t i = 1; i < x.size(); ++i) v[i] = std::pow(x[i], s);
      v[0] = v[1];
      const auto r = boundary_variant_check(p, x, v);
      CHECK(r.holds);
      CHECK(r.ratio > 0.5);
    }
    CHECK_THROWS_AS(boundary_variant_check(p, uniform_nodes(0.0, 1.5, 7), std::vector<double>(8, 1.0)),
                    InvalidArgument);
  }

  TEST_CASE("multi-variable inequality") {
    const auto a = uniform_nodes(0.0, 1.0, 12);
    const auto b = uniform_nodes(0.0, 1.0, 9);
    TensorGrid g{{a, b}, {}};
    std::vector<double> u1(a.size()), u2(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) u1[i] = 1.0 - a[i] * a[i];
    for (std::size_t j = 0; j < b.size(); ++j) u2[j] = std::cos(b[j]) * (1.0 - b[j]);
    for (double x : u1)
      for (double y : u2) g.values.push_back(x * y);

    SUBCASE("separable functions reduce to one direction") {
      const auto r = multi_hardy_check({3.0, 3.0}, {1.0, 1.0}, 0, g);
      CHECK(r.holds);
      const double lhs = std::sqrt(fe::weighted_l2_squared(a, u1, 3.0) * fe::weighted_l2_squared(b, u2, 5.0));
      const double rhs = 0.5 * std::sqrt(fe::weighted_dirichlet_squared(a, u1, 5.0) * fe::weighted_l2_squared(b, u2, 5.0));
      CHECK(r.lhs == doctest::Approx(lhs).epsilon(1e-12));
      CHECK(r.rhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    SUBCASE("random compactly supported grids") {
      std::mt19937_64 rng(5);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int trial = 0; trial < 10; ++trial) {
        for (std::size_t i = 0; i < a.size(); ++i)
          for (std::size_t j = 0; j < b.size(); ++j)
            g.values[i * b.size() + j] = (i + 1 == a.size() || j + 1 == b.size()) ? 0.0 : u(rng);
        CHECK(multi_hardy_check({3.0, 3.0}, {1.0, 1.0}, 0, g).holds);
        CHECK(multi_hardy_check({3.0, 3.0}, {1.0, 1.0}, 1, g).holds);
      }
    }
    CHECK_THROWS_AS(multi_hardy_check({3.0, 3.0}, {1.0, -1.0}, 0, g), OutsideRegime);
    g.values[(a.size() - 1) * b.size()] = 1.0;
    CHECK_THROWS_AS(multi_hardy_check({3.0, 3.0}, {1.0, 1.0}, 0, g), InvalidArgument);
  }
}
