#include "pllranges/model.hpp"

#include <cmath>
#include <string>

#include "pllranges/error.hpp"

namespace pllranges {

PllModel PllModel::build(const LoopSpec& spec) {
  if (!(spec.L > 0.0) || !std::isfinite(spec.L))
    throw Error(Errc::invalid_argument, "VCO gain L must be positive");
  if (!std::isfinite(spec.omega)) throw Error(Errc::invalid_argument, "omega must be finite");
  FilterRealization fr = spec.realization ? *spec.realization : realize(spec.tf);
  if (fr.order() != spec.tf.den_degree())
    throw Error(Errc::state_dimension, "state dimension: realization order mismatch");
  auto shared = std::make_shared<const Shared>(
      Shared{std::move(fr), spec.pd, spec.tf, spec.L, pllranges::dc_gain(spec.tf)});
  return PllModel(std::move(shared), spec.omega);
}

PllModel PllModel::with_omega(double omega) const { return PllModel(shared_, omega); }

void PllModel::rhs(const double* state, double* out) const {
  const FilterRealization& fr = shared_->fr;
  const int n = fr.order();
  const double th = state[n];
  const double phi = shared_->pd.eval(th);
  double cx = 0.0;
  const double* a = fr.A.data();  // column-major
  for (int i = 0; i < n; ++i) out[i] = fr.b[i] * phi;
  for (int j = 0; j < n; ++j) {
    const double xj = state[j];
    const double* col = a + static_cast<std::ptrdiff_t>(j) * n;
    for (int i = 0; i < n; ++i) out[i] += col[i] * xj;
    cx += fr.c[j] * xj;
  }
  out[n] = omega_ - shared_->L * (cx + fr.h * phi);
}

Eigen::VectorXd PllModel::rhs(const Eigen::VectorXd& state) const {
  if (state.size() != dimension())
    throw Error(Errc::state_dimension,
                "state dimension: expected " + std::to_string(dimension()));
  Eigen::VectorXd out(dimension());
  rhs(state.data(), out.data());
  return out;
}

double PllModel::filter_output(const double* state) const {
  const FilterRealization& fr = shared_->fr;
  const int n = fr.order();
  double g = fr.h * shared_->pd.eval(state[n]);
  for (int j = 0; j < n; ++j) g += fr.c[j] * state[j];
  return g;
}

MirroredState apply_symmetry(const PllModel& model, const Eigen::VectorXd& state) {
  if (!model.pd().odd()) throw Error(Errc::symmetry_unavailable, "symmetry unavailable");
  if (state.size() != model.dimension())
    throw Error(Errc::state_dimension,
                "state dimension: expected " + std::to_string(model.dimension()));
  return {model.with_omega(-model.omega()), -state};
}

LureForm::LureForm(PllModel model, Eigen::VectorXd x_eq, double theta_eq)
    : model_(std::move(model)),
      x_eq_(std::move(x_eq)),
      theta_eq_(theta_eq),
      phi_eq_(model_.pd().eval(theta_eq)) {}

Eigen::VectorXd LureForm::rhs(const Eigen::VectorXd& shifted_state) const {
  const int n = model_.order();
  if (shifted_state.size() != n + 1)
    throw Error(Errc::state_dimension, "state dimension: expected " + std::to_string(n + 1));
  const FilterRealization& fr = model_.filter();
  const Eigen::VectorXd xs = shifted_state.head(n);
  const double ps = shifted_phi(theta_eq_ + shifted_state[n]);
  Eigen::VectorXd out(n + 1);
  out.head(n) = fr.A * xs + fr.b * ps;
  out[n] = -model_.gain() * (fr.c.dot(xs) + fr.h * ps);
  return out;
}

LureForm to_lure(const PllModel& model, const Eigen::VectorXd& x_eq, double theta_eq) {
  if (x_eq.size() != model.order())
    throw Error(Errc::state_dimension, "state dimension: expected " + std::to_string(model.order()));
  Eigen::VectorXd s(model.dimension());
  s << x_eq, theta_eq;
  const double residual = model.rhs(s).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-6)) throw Error(Errc::not_an_equilibrium, "not an equilibrium");
  return LureForm(model, x_eq, theta_eq);
}

}  // namespace pllranges
