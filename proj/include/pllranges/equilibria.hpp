#pragma once

#include <Eigen/Dense>
#include <string_view>
#include <vector>

#include "pllranges/model.hpp"

namespace pllranges {

enum class Stability { asymptotically_stable, unstable, marginal };

std::string_view stability_name(Stability s);

struct Equilibrium {
  double theta = 0.0;  // in [-period/2, period/2)
  Eigen::VectorXd x;
  int branch = 0;  // position among the solutions on one period, ascending in theta
  Stability stability = Stability::marginal;
  double residual = 0.0;  // max |rhs| at the point
};

// All equilibria on one period, classified. Singular A is accepted only for a
// single pole at zero; then phi(theta_eq) = 0 and c.x_eq = omega / L.
std::vector<Equilibrium> find_equilibria(const PllModel& model);

// Stable equilibria only.
std::vector<Equilibrium> stable_equilibria(const PllModel& model);

// Supremum of |omega| admitting equilibria; +infinity with a pole at zero.
double existence_bound(const PllModel& model);

LureForm to_lure(const PllModel& model, const Equilibrium& eq);

}  // namespace pllranges

namespace pllranges::detail {

// Zeros of f on [-period/2, period/2) from a uniform sign scan plus bisection.
// Samples where f throws are skipped.
template <class F>
std::vector<double> periodic_roots(F&& f, double period, int grid, double ftol);

}  // namespace pllranges::detail

#include "pllranges/detail/periodic_roots.hpp"
