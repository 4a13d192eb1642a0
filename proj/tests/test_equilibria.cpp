#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "pllranges/equilibria.hpp"
#include "pllranges/error.hpp"
#include "pllranges/stability.hpp"

using namespace pllranges;
using fixtures::pi;

TEST_CASE("existence bounds") {
  CHECK(existence_bound(PllModel::build(fixtures::example1())) == doctest::Approx(4.0));
  CHECK(existence_bound(PllModel::build(fixtures::example2())) == doctest::Approx(40.0));
  CHECK(std::isinf(existence_bound(PllModel::build(fixtures::pi_loop()))));
}

TEST_CASE("equilibria solve the rhs") {
  for (const auto& spec : {fixtures::example1(3.8), fixtures::example2(80, 20), fixtures::example3(),
                           fixtures::lead_lag(250, 61.5), fixtures::pi_loop()}) {
    const auto m = PllModel::build(spec);
    const auto eqs = find_equilibria(m);
    CHECK_FALSE(eqs.empty());
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      const auto& e = eqs[i];
      Eigen::VectorXd s(m.dimension());
      s << e.x, e.theta;
      CHECK(m.rhs(s).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK(e.theta >= -m.pd().period() / 2);
      CHECK(e.theta < m.pd().period() / 2);
      CHECK(e.branch == static_cast<int>(i));
    }
  }
}

TEST_CASE("no equilibria beyond the existence bound") {
  CHECK(find_equilibria(PllModel::build(fixtures::example1(4.5))).empty());
  CHECK(find_equilibria(PllModel::build(fixtures::example2(80, 41))).empty());
}

TEST_CASE("tangent equilibrium at the bound is marginal") {
  const auto eqs = find_equilibria(PllModel::build(fixtures::example1(4.0)));
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0].stability == Stability::marginal);
  CHECK(eqs[0].theta == doctest::Approx(pi / 2).epsilon(1e-6));
}

TEST_CASE("mirror property for odd characteristics") {
  for (double w : {0.7, 2.5, 3.9}) {
    const auto plus = find_equilibria(PllModel::build(fixtures::example1(w)));
    const auto minus = find_equilibria(PllModel::build(fixtures::example1(-w)));
    REQUIRE(plus.size() == minus.size());
    for (const auto& e : plus) {
      bool found = false;
      for (const auto& f : minus) {
        const double d = std::abs(std::remainder(e.theta + f.theta, 2 * pi));
        if (d < 1e-9 && (e.x + f.x).norm() < 1e-9) {
          found = true;
          CHECK(e.stability == f.stability);
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("stable and unstable equilibria alternate") {
  const auto eqs = find_equilibria(PllModel::build(fixtures::lead_lag(250, 30)));
  REQUIRE(eqs.size() == 2);
  CHECK(eqs[0].stability != eqs[1].stability);
  // Double-frequency detector: period pi, one stable and one unstable point.
  const auto ex3 = find_equilibria(PllModel::build(fixtures::example3()));
  REQUIRE(ex3.size() == 2);
  CHECK(stable_equilibria(PllModel::build(fixtures::example3())).size() == 1);
}

TEST_CASE("integrating filter keeps the phase at the zero of phi") {
  const auto m = PllModel::build(fixtures::pi_loop(47));
  const auto st = stable_equilibria(m);
  REQUIRE(st.size() == 1);
  CHECK(std::abs(st[0].theta) < 1e-12);
  // Filter output must supply the whole detuning: c x = omega / L.
  CHECK(m.filter().c.dot(st[0].x) == doctest::Approx(47.0 / 250.0));
}

TEST_CASE("double integrator is refused") {
  LoopSpec spec{fixtures::half_sine(), TransferFunction({1, 1}, {0, 0, 1}), 10, 1, std::nullopt};
  try {
    find_equilibria(PllModel::build(spec));
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_pole_multiplicity);
  }
}

TEST_CASE("kink at an equilibrium is marked marginal") {
  LoopSpec spec = fixtures::example1(0.0);
  spec.pd = PdCharacteristic::tabulated({-pi, -pi / 2, 0, pi / 2}, {0, -1, 0, 1}, 2 * pi,
                                        {-pi / 2, 0, pi / 2});
  const auto eqs = find_equilibria(PllModel::build(spec));
  bool seen = false;
  for (const auto& e : eqs)
    if (std::abs(e.theta) < 1e-9) {
      seen = true;
      CHECK(e.stability == Stability::marginal);
    }
  CHECK(seen);
}
