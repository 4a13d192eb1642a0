#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "pllranges/error.hpp"
#include "pllranges/nonlinearity.hpp"

using namespace pllranges;
using fixtures::pi;

namespace {

const PdKind kSinusoidal[] = {PdKind::sinusoidal_half, PdKind::sinusoidal_double_eighth,
                              PdKind::sinusoidal_double_half, PdKind::sinusoidal_unit};

// Triangle wave with corners at +-pi/2, amplitude 1.
PdCharacteristic triangle() {
  return PdCharacteristic::tabulated({-pi, -pi / 2, 0, pi / 2}, {0, -1, 0, 1}, 2 * pi,
                                     {-pi / 2, pi / 2});
}

}  // namespace

TEST_CASE("sinusoidal values") {
  const auto half = fixtures::half_sine();
  const auto eighth = PdCharacteristic::sinusoidal(PdKind::sinusoidal_double_eighth, pi);
  CHECK(half.eval(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(half.eval(pi / 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eighth.eval(pi / 4) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(half.amplitude_max() == 0.5);
  CHECK(eighth.amplitude_max() == 0.125);
  CHECK(half.odd());
}

TEST_CASE("sinusoidal derivatives") {
  const auto half = fixtures::half_sine();
  const auto eighth = PdCharacteristic::sinusoidal(PdKind::sinusoidal_double_eighth, pi);
  CHECK(half.derivative(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(half.derivative(pi / 2)) < 1e-15);
  CHECK(eighth.derivative(0.0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("period must match the kind") {
  CHECK_THROWS_AS(PdCharacteristic::sinusoidal(PdKind::sinusoidal_half, pi), Error);
  CHECK_THROWS_AS(PdCharacteristic::sinusoidal(PdKind::sinusoidal_double_half, 2 * pi), Error);
  CHECK_THROWS_AS(PdCharacteristic::sinusoidal(PdKind::tabulated, 2 * pi), Error);
}

TEST_CASE("kind names round trip") {
  for (PdKind k : kSinusoidal) CHECK(pd_kind_from_name(pd_kind_name(k)) == k);
  CHECK(pd_kind_from_name("tabulated") == PdKind::tabulated);
  CHECK_FALSE(pd_kind_from_name("square").has_value());
}

TEST_CASE("periodicity and oddness") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (PdKind k : kSinusoidal) {
    const double P = (k == PdKind::sinusoidal_half || k == PdKind::sinusoidal_unit) ? 2 * pi : pi;
    const auto pd = PdCharacteristic::sinusoidal(k, P);
    for (int i = 0; i < 200; ++i) {
      const double th = u(rng);
      CHECK(std::abs(pd.eval(th + P) - pd.eval(th)) <= 1e-12);
      CHECK(std::abs(pd.eval(-th) + pd.eval(th)) <= 1e-12);
    }
  }
  const auto tri = triangle();
  CHECK(tri.odd());
  for (int i = 0; i < 200; ++i) {
    const double th = u(rng);
    CHECK(std::abs(tri.eval(th + 2 * pi) - tri.eval(th)) <= 1e-12);
    CHECK(std::abs(tri.eval(-th) + tri.eval(th)) <= 1e-12);
  }
}

TEST_CASE("derivative matches central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const double dh = 1e-6;
  for (PdKind k : kSinusoidal) {
    const double P = (k == PdKind::sinusoidal_half || k == PdKind::sinusoidal_unit) ? 2 * pi : pi;
    const auto pd = PdCharacteristic::sinusoidal(k, P);
    for (int i = 0; i < 100; ++i) {
      const double th = u(rng);
      const double fd = (pd.eval(th + dh) - pd.eval(th - dh)) / (2 * dh);
      CHECK(std::abs(pd.derivative(th) - fd) <= 1e-6);
      const double fi = (pd.integral(th + dh) - pd.integral(th - dh)) / (2 * dh);
      CHECK(std::abs(fi - pd.eval(th)) <= 1e-6);
    }
  }
}

TEST_CASE("tabulated interpolant") {
  std::vector<double> nodes, values;
  for (int i = 0; i < 64; ++i) {
    nodes.push_back(-pi + 2 * pi * i / 64);
    values.push_back(0.5 * std::sin(nodes.back()));
  }
  const auto pd = PdCharacteristic::tabulated(nodes, values, 2 * pi);
  for (std::size_t i = 0; i < nodes.size(); ++i) CHECK(pd.eval(nodes[i]) == doctest::Approx(values[i]));
  for (double th = -3.0; th < 3.0; th += 0.37) {
    CHECK(std::abs(pd.eval(th) - 0.5 * std::sin(th)) < 1e-4);
    CHECK(std::abs(pd.derivative(th) - 0.5 * std::cos(th)) < 2e-3);
  }
  CHECK(pd.odd());
  CHECK(pd.amplitude_max() == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("nonsmooth table points") {
  const auto tri = triangle();
  CHECK_FALSE(tri.smooth_at(pi / 2));
  CHECK_FALSE(tri.smooth_at(pi / 2 + 2 * pi));
  CHECK(tri.smooth_at(0.3));
  try {
    (void)tri.derivative(pi / 2);
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::nonsmooth_point);
  }
  CHECK(tri.eval(pi / 4) == doctest::Approx(0.5));
}

TEST_CASE("malformed tables") {
  CHECK_THROWS_AS(PdCharacteristic::tabulated({0, 1}, {0, 1}, 2 * pi), Error);
  CHECK_THROWS_AS(PdCharacteristic::tabulated({0, 2, 1}, {0, 1, 0}, 2 * pi), Error);
  CHECK_THROWS_AS(PdCharacteristic::tabulated({0, 1, 7}, {0, 1, 0}, 2 * pi), Error);
  CHECK_THROWS_AS(PdCharacteristic::tabulated({0, 1, 2}, {0, 1, 0}, 2 * pi, {0.5}), Error);
}

TEST_CASE("wrap lands in the half-open principal period") {
  const auto pd = fixtures::half_sine();
  for (double th : {-7.0, -pi, 0.0, 3.0, pi, 100.0}) {
    const double w = pd.wrap(th);
    CHECK(w >= -pi);
    CHECK(w < pi);
    CHECK(std::abs(std::remainder(w - th, 2 * pi)) < 1e-12);
  }
}
