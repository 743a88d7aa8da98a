#include <cmath>
#include <numbers>

#include "cuspedge/errors.hpp"
#include "cuspedge/model.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cuspedge;
using namespace cuspedge::model;
constexpr double pi = std::numbers::pi;

TEST_SUITE("model") {
  TEST_CASE("volume of small models") {
    CHECK(volume(CuspEdgeModel({3.0}, 1.0)) == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(volume(CuspEdgeModel({3.0}, 0.5)) == doctest::Approx(pi / 32).epsilon(1e-14));
  }

  TEST_CASE("two cusp directions against quadrature") {
    const double integral =
        oracle::simpson([](double a) { return oracle::simpson([a](double b) { return a * a * a * b * b * b; }, 0, 1, 8); },
                        0, 1, 8);
    const double expected = 4 * pi * pi * integral;
    CHECK(volume(CuspEdgeModel({3.0, 3.0}, 1.0)) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(expected == doctest::Approx(4 * pi * pi / 16).epsilon(1e-13));
  }

  TEST_CASE("volume scales with delta") {
    const CuspEdgeModel m({3.0, 2.0}, 0.8, CrossSection::flat_torus({1.0, 2.0}));
    CHECK(volume(m) / volume(m.with_delta(0.4)) == doctest::Approx(std::pow(2.0, 4 + 3)).epsilon(1e-13));
  }

  TEST_CASE("weyl constants") {
    CHECK(weyl_constant(CuspEdgeModel({3.0}, 0.5)) == doctest::Approx(1.0 / 128).epsilon(1e-14));
    CHECK(weyl_constant(2, 4 * pi * pi) == doctest::Approx(pi).epsilon(1e-14));
    CHECK(weyl_constant(4, 1.0) == doctest::Approx(1.0 / (32 * pi * pi)).epsilon(1e-14));
    CHECK(unit_ball_volume(3) == doctest::Approx(4 * pi / 3).epsilon(1e-14));
  }

  TEST_CASE("weyl constant is linear in the box volume") {
    const CuspEdgeModel a({3.0}, 0.5, CrossSection::box({1.0, 1.5}, BoundaryCondition::Dirichlet));
    const CuspEdgeModel b({3.0}, 0.5, CrossSection::box({2.0, 3.0}, BoundaryCondition::Dirichlet));
    CHECK(weyl_constant(b) / weyl_constant(a) == doctest::Approx(4.0).epsilon(1e-14));
  }

  TEST_CASE("beta and self-adjointness flag") {
    CHECK(CuspEdgeModel({3.0}, 0.5).beta() == 4.0);
    CHECK(CuspEdgeModel({3.0, 3.0}, 0.5).beta() == 8.0);
    CHECK(CuspEdgeModel({3.0, 4.0}, 0.5).self_adjointness_assured());
    CHECK_FALSE(CuspEdgeModel({2.0}, 0.5).self_adjointness_assured());
  }

  TEST_CASE("invalid models") {
    CHECK_THROWS_AS(CuspEdgeModel({}, 0.5), InvalidArgument);
    CHECK_THROWS_AS(CuspEdgeModel({0.5}, 0.5), InvalidArgument);
    CHECK_THROWS_AS(CuspEdgeModel({3.0}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(CrossSection::flat_torus({-1.0}), InvalidArgument);
  }

  TEST_CASE("json round trip") {
    const auto doc = nlohmann::json::parse(
        R"({"ell":2,"k":3,"delta":0.25,"cross_section":{"kind":"box","lengths":[1,2],"bc":"Neumann"}})");
    const auto m = model_from_json(doc);
    CHECK(m.k() == std::vector<double>{3.0, 3.0});
    CHECK(m.cross_section().dim() == 2);
    CHECK(m.cross_section().bc == BoundaryCondition::Neumann);
    const auto again = model_from_json(to_json(m));
    CHECK(volume(again) == volume(m));
    CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"k":3,"delta":0.5,"cross_section":{"kind":"sphere"}})")),
                    InvalidArgument);
  }

  namespace {
  PerturbationSample power_sample(const std::string& name, double power, double eta, double scale = 1.0) {
    PerturbationSample s;
    s.eta = eta;
    for (int i = 0; i < 12; ++i) {
      PerturbationRecord r;
      const double rho = 0.5 * std::pow(10.0, -0.25 * i);
      r.rho = {rho};
      r.values[name] = scale * std::pow(rho, power);
      s.samples.push_back(r);
    }
    return s;
  }
  }  // namespace

  TEST_CASE("admissibility fits") {
    const CuspEdgeModel m({3.0}, 0.5);
    const auto ok = check_admissibility(power_sample("a_11", 1.0, 1.0), m);
    REQUIRE(ok.coefficients.at("a_11").slope);
    CHECK(*ok.coefficients.at("a_11").slope == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ok.all_pass());

    const auto zero = check_admissibility(power_sample("a_1", 1.0, 2.0, 0.0), m);
    CHECK_FALSE(zero.coefficients.at("a_1").slope);
    CHECK(zero.all_pass());

    const auto slow = check_admissibility(power_sample("c_11", 0.5, 1.0), m);
    CHECK(*slow.coefficients.at("c_11").slope == doctest::Approx(0.5).epsilon(1e-10));
    CHECK_FALSE(slow.all_pass());
  }

  TEST_CASE("admissibility is scale invariant and needs enough samples") {
    const CuspEdgeModel m({3.0}, 0.5);
    const auto a = check_admissibility(power_sample("b_1", 1.3, 1.0), m);
    const auto b = check_admissibility(power_sample("b_1", 1.3, 1.0, 7.5), m);
    CHECK(*a.coefficients.at("b_1").slope == doctest::Approx(*b.coefficients.at("b_1").slope).epsilon(1e-12));
    auto few = power_sample("a_1", 1.0, 1.0);
    few.samples.resize(5);
    CHECK_THROWS_AS(check_admissibility(few, m), InsufficientSamples);
  }
}
