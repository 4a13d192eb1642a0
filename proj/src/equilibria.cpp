#include "pllranges/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pllranges/error.hpp"
#include "pllranges/stability.hpp"

namespace pllranges {

namespace {

constexpr int kGrid = 4096;
constexpr double kPhiTol = 1e-12;
constexpr double kTangency = 1e-9;

// Unit vector spanning the kernel of a singular A.
Eigen::VectorXd kernel_direction(const Eigen::MatrixXd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  return svd.matrixV().col(A.cols() - 1);
}

// Location of the extremum of phi nearest the level v.
double tangency_point(const PdCharacteristic& pd, double v) {
  const auto crit = detail::periodic_roots([&](double t) { return pd.derivative(t); },
                                           pd.period(), kGrid, 0.0);
  double best = 0.0, gap = std::numeric_limits<double>::infinity();
  auto consider = [&](double t) {
    const double g = std::abs(pd.eval(t) - v);
    if (g < gap) {
      gap = g;
      best = t;
    }
  };
  for (double t : crit) consider(t);
  for (int k = 0; k < kGrid; ++k) consider(-pd.period() / 2.0 + pd.period() * k / kGrid);
  return best;
}

}  // namespace

std::string_view stability_name(Stability s) {
  switch (s) {
    case Stability::asymptotically_stable: return "asymptotically-stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
  }
  return "unknown";
}

std::vector<Equilibrium> find_equilibria(const PllModel& model) {
  const PdCharacteristic& pd = model.pd();
  const FilterRealization& fr = model.filter();
  const int n = fr.order();
  const int mult = model.tf().zero_pole_multiplicity();
  if (mult > 1)
    throw Error(Errc::unsupported_pole_multiplicity, "unsupported pole-at-zero multiplicity");

  const bool integrating = mult == 1;
  const double v = integrating ? 0.0 : model.omega() / (model.gain() * model.dc_gain());
  const double amp = pd.amplitude_max();
  if (std::abs(v) > amp + kTangency) return {};

  const bool tangent = std::abs(std::abs(v) - amp) <= kTangency;
  std::vector<double> thetas;
  if (tangent) {
    thetas.push_back(tangency_point(pd, v));
  } else {
    thetas = detail::periodic_roots([&](double t) { return pd.eval(t) - v; }, pd.period(), kGrid,
                                    kPhiTol);
  }

  Eigen::VectorXd per_phi;   // x_eq = per_phi * phi(theta_eq) for finite dc gain
  Eigen::VectorXd x_fixed;   // x_eq with a pole at zero
  if (n > 0) {
    if (integrating) {
      const Eigen::VectorXd k = kernel_direction(fr.A);
      x_fixed = k * (model.omega() / model.gain()) / fr.c.dot(k);
    } else {
      per_phi = -fr.A.partialPivLu().solve(fr.b);
    }
  }

  std::vector<Equilibrium> out;
  out.reserve(thetas.size());
  for (double t : thetas) {
    Equilibrium eq;
    eq.theta = pd.wrap(t);
    if (n == 0) {
      eq.x = Eigen::VectorXd(0);
    } else {
      eq.x = integrating ? x_fixed : Eigen::VectorXd(per_phi * pd.eval(eq.theta));
    }
    Eigen::VectorXd s(n + 1);
    s << eq.x, eq.theta;
    eq.residual = model.rhs(s).cwiseAbs().maxCoeff();
    if (tangent) {
      eq.stability = Stability::marginal;
    } else {
      try {
        classify(model, eq);
      } catch (const Error& e) {
        if (e.code() != Errc::nonsmooth_linearization_point) throw;
        eq.stability = Stability::marginal;
      }
    }
    out.push_back(std::move(eq));
  }
  std::sort(out.begin(), out.end(),
            [](const Equilibrium& a, const Equilibrium& b) { return a.theta < b.theta; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].branch = static_cast<int>(i);
  return out;
}

std::vector<Equilibrium> stable_equilibria(const PllModel& model) {
  auto all = find_equilibria(model);
  std::erase_if(all, [](const Equilibrium& e) {
    return e.stability != Stability::asymptotically_stable;
  });
  return all;
}

double existence_bound(const PllModel& model) {
  if (model.tf().zero_pole_multiplicity() > 0) return std::numeric_limits<double>::infinity();
  return model.gain() * std::abs(model.dc_gain()) * model.pd().amplitude_max();
}

LureForm to_lure(const PllModel& model, const Equilibrium& eq) {
  return to_lure(model, eq.x, eq.theta);
}

}  // namespace pllranges
