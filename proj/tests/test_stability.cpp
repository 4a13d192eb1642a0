#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "fixtures.hpp"
#include "pllranges/error.hpp"
#include "pllranges/polynomial.hpp"
#include "pllranges/stability.hpp"

using namespace pllranges;
using fixtures::pi;

namespace {

poly::Coeffs monic(poly::Coeffs p) {
  const double lead = p.back();
  for (double& v : p) v /= lead;
  return p;
}

void check_proportional(const poly::Coeffs& got, const poly::Coeffs& want) {
  REQUIRE(got.size() == want.size());
  const auto a = monic(got), b = monic(want);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

double max_real_part(const poly::Coeffs& p) {
  double m = -INFINITY;
  for (const auto& r : poly::roots(p)) m = std::max(m, r.real());
  return m;
}

Eigen::MatrixXd jacobian(const PllModel& m, const Equilibrium& e) {
  const auto& fr = m.filter();
  const int n = fr.order();
  const double dphi = m.pd().derivative(e.theta);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 1, n + 1);
  J.topLeftCorner(n, n) = fr.A;
  J.topRightCorner(n, 1) = fr.b * dphi;
  J.bottomLeftCorner(1, n) = -m.gain() * fr.c.transpose();
  J(n, n) = -m.gain() * fr.h * dphi;
  return J;
}

}  // namespace

TEST_CASE("characteristic polynomials") {
  const auto ex1 = PllModel::build(fixtures::example1());
  for (double th : {0.3, 1.1, 2.0}) {
    const double C = std::cos(th);
    check_proportional(char_poly(ex1, th).coeffs, {8 * C, 2 + 4 * C, 1, 1});
  }
  const auto ex2 = PllModel::build(fixtures::example2());
  for (double th : {0.2, 1.4}) {
    const double K = 40 * std::cos(th);
    const auto cp = char_poly(ex2, th);
    CHECK(cp.K == doctest::Approx(K));
    check_proportional(cp.coeffs, {K, 1 + 0.25 * K, 2 + 0.5 * K, 2, 2});
  }
  check_proportional(char_poly(PllModel::build(fixtures::filterless()), 0.0).coeffs, {4, 1});
}

TEST_CASE("characteristic roots are the Jacobian eigenvalues") {
  for (const auto& spec : {fixtures::example1(3.8), fixtures::example2(80, 20), fixtures::lead_lag(250, 61.5),
                           fixtures::pi_loop()}) {
    const auto m = PllModel::build(spec);
    for (const auto& e : find_equilibria(m)) {
      const auto cp = char_poly(m, e).coeffs;
      const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(jacobian(m, e)).eigenvalues();
      for (Eigen::Index i = 0; i < ev.size(); ++i) {
        double scale = 0;
        for (std::size_t k = 0; k < cp.size(); ++k)
          scale += std::abs(cp[k]) * std::pow(std::abs(ev[i]), static_cast<double>(k));
        CHECK(std::abs(poly::eval(cp, ev[i])) <= 1e-9 * scale);
      }
    }
  }
}

TEST_CASE("Routh-Hurwitz anchors") {
  CHECK(routh_hurwitz({4, 4, 1, 1}) == Stability::marginal);
  CHECK(routh_hurwitz({1, 1}) == Stability::asymptotically_stable);
  CHECK(routh_hurwitz({1, -1}) == Stability::unstable);
  CHECK(routh_hurwitz({6, 11, 6, 1}) == Stability::asymptotically_stable);
  CHECK(routh_hurwitz({1, 0, 1}) == Stability::marginal);
  CHECK_THROWS_AS(routh_hurwitz({0, 0}), Error);
}

TEST_CASE("Routh-Hurwitz agrees with eigenvalues on every small integer polynomial") {
  const double values[] = {-2, -1, 1, 2};
  int compared = 0, agree = 0;
  for (int deg = 1; deg <= 6; ++deg) {
    const int combos = 1 << (2 * (deg + 1));
    for (int code = 0; code < combos; ++code) {
      poly::Coeffs p(static_cast<std::size_t>(deg + 1));
      for (int k = 0; k <= deg; ++k) p[static_cast<std::size_t>(k)] = values[(code >> (2 * k)) & 3];
      const double re = max_real_part(p);
      if (std::abs(re) < 1e-8) continue;
      ++compared;
      const bool stable = routh_hurwitz(p) == Stability::asymptotically_stable;
      if (stable == (re < 0)) ++agree;
      else
        INFO("disagreement on degree " << deg << " code " << code);
    }
  }
  CHECK(compared > 20000);
  CHECK(agree == compared);
}

TEST_CASE("classification anchors") {
  const auto ex1 = PllModel::build(fixtures::example1(3.8));
  CHECK(classify(ex1, std::acos(0.4)) == Stability::asymptotically_stable);
  CHECK(classify(ex1, std::acos(0.9)) == Stability::unstable);
  CHECK(classify(ex1, std::acos(0.5)) == Stability::marginal);
  const auto ex2 = PllModel::build(fixtures::example2(80, 30));
  CHECK(classify(ex2, std::acos(12.0 / 40.0)) == Stability::unstable);
  CHECK(classify(ex2, std::acos(2.0 / 40.0)) == Stability::unstable);
  CHECK(classify(ex2, std::acos(0.5 / 40.0)) == Stability::asymptotically_stable);
  CHECK(classify(ex2, std::acos(30.0 / 40.0)) == Stability::asymptotically_stable);
}

TEST_CASE("hold-in sets") {
  SUBCASE("second-order filter") {
    const auto res = hold_in_set(fixtures::example1());
    REQUIRE(res.set.size() == 1);
    const auto iv = res.set.intervals()[0];
    CHECK(std::abs(iv.lo - 2 * std::sqrt(3.0)) <= 1e-3);
    CHECK(std::abs(iv.hi - 4.0) <= 1e-3);
    CHECK_FALSE(res.set.contains(0.0));
    CHECK_FALSE(hold_in_frequency(fixtures::example1(), res).defined);
  }
  SUBCASE("third-order filter") {
    const auto res = hold_in_set(fixtures::example2());
    REQUIRE(res.set.size() == 2);
    const auto a = res.set.intervals()[0], b = res.set.intervals()[1];
    CHECK(a.lo == 0.0);
    CHECK(a.lo_closed);
    // Closed form of the stability loss on the main branch: K = 12 + 8 sqrt(2).
    const double edge = 40 * std::sin(std::acos((12 + 8 * std::sqrt(2.0)) / 40));
    CHECK(std::abs(a.hi - edge) <= 1e-4);
    CHECK(std::abs(b.lo - 39.9942) <= 1e-4);
    CHECK(std::abs(b.hi - 40.0) <= 1e-4);
    const auto wh = hold_in_frequency(fixtures::example2(), res);
    CHECK(wh.defined);
    CHECK(wh.value == doctest::Approx(a.hi));
  }
  SUBCASE("no filter dynamics") {
    const auto res = hold_in_set(fixtures::filterless());
    REQUIRE(res.set.size() == 1);
    CHECK(res.set.intervals()[0].lo == 0.0);
    CHECK(res.set.intervals()[0].hi == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(hold_in_frequency(fixtures::filterless(), res).value == doctest::Approx(4.0).epsilon(1e-6));
  }
}

TEST_CASE("hold-in membership matches a brute-force sweep") {
  const auto spec = fixtures::filterless();
  const auto res = hold_in_set(spec);
  for (double w = 0.0; w < 4.2; w += 0.013)
    CHECK(res.set.contains(w) == hold_in_member(PllModel::build(spec.with_omega(w))));
}

TEST_CASE("signed sweep is symmetric for odd characteristics") {
  HoldInOptions opts;
  opts.signed_sweep = true;
  const auto res = hold_in_set(fixtures::example2(), opts);
  for (double w : {1.0, 20.0, 32.0, 35.0, 39.997}) CHECK(res.set.contains(w) == res.set.contains(-w));
  CHECK(res.set.contains(0.0));
}

TEST_CASE("island appears above the gain threshold") {
  const double Lc = 24 + 16 * std::sqrt(2.0);
  CHECK(hold_in_set(fixtures::example2(Lc - 0.5)).set.size() == 1);
  CHECK(hold_in_set(fixtures::example2(Lc + 0.5)).set.size() == 2);
}

TEST_CASE("hold-in is deterministic") {
  const auto a = hold_in_set(fixtures::example2());
  const auto b = hold_in_set(fixtures::example2());
  REQUIRE(a.set.size() == b.set.size());
  for (std::size_t i = 0; i < a.set.size(); ++i) {
    CHECK(a.set.intervals()[i].lo == b.set.intervals()[i].lo);
    CHECK(a.set.intervals()[i].hi == b.set.intervals()[i].hi);
  }
}
