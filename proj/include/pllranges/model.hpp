#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "pllranges/filter.hpp"
#include "pllranges/nonlinearity.hpp"

namespace pllranges {

// Declarative loop description.
struct LoopSpec {
  PdCharacteristic pd;
  TransferFunction tf;
  double L = 1.0;
  double omega = 0.0;  // input minus free-running VCO frequency
  // Explicit filter coordinates; the canonical realization is used when empty.
  std::optional<FilterRealization> realization;

  LoopSpec with_omega(double w) const {
    LoopSpec s = *this;
    s.omega = w;
    return s;
  }
};

// Phase-space model. State layout: filter state x_1..x_n, then the unwrapped phase error.
//   x'     = A x + b phi(theta)
//   theta' = omega - L c.x - L h phi(theta)
class PllModel {
 public:
  static PllModel build(const LoopSpec& spec);

  PllModel with_omega(double omega) const;

  int order() const noexcept { return shared_->fr.order(); }
  int dimension() const noexcept { return order() + 1; }
  double omega() const noexcept { return omega_; }
  double gain() const noexcept { return shared_->L; }
  const FilterRealization& filter() const noexcept { return shared_->fr; }
  const PdCharacteristic& pd() const noexcept { return shared_->pd; }
  const TransferFunction& tf() const noexcept { return shared_->tf; }
  double dc_gain() const noexcept { return shared_->dc; }

  // Raw-pointer form for integrators; both arrays have dimension() entries.
  void rhs(const double* state, double* out) const;
  Eigen::VectorXd rhs(const Eigen::VectorXd& state) const;

  // g = c.x + h phi(theta)
  double filter_output(const double* state) const;

 private:
  struct Shared {
    FilterRealization fr;
    PdCharacteristic pd;
    TransferFunction tf;
    double L;
    double dc;
  };
  PllModel(std::shared_ptr<const Shared> shared, double omega)
      : shared_(std::move(shared)), omega_(omega) {}

  std::shared_ptr<const Shared> shared_;
  double omega_;
};

struct MirroredState {
  PllModel model;
  Eigen::VectorXd state;
};

// (omega, x, theta) -> (-omega, -x, -theta); requires an odd characteristic.
MirroredState apply_symmetry(const PllModel& model, const Eigen::VectorXd& state);

// System shifted to an equilibrium: xs = x - x_eq, phis(theta) = phi(theta) - phi(theta_eq).
// rhs takes (x - x_eq, theta - theta_eq).
class LureForm {
 public:
  LureForm(PllModel model, Eigen::VectorXd x_eq, double theta_eq);

  double shifted_phi(double theta) const { return model_.pd().eval(theta) - phi_eq_; }
  // State layout (xs, theta).
  Eigen::VectorXd rhs(const Eigen::VectorXd& shifted_state) const;

  const PllModel& model() const noexcept { return model_; }
  const Eigen::VectorXd& x_eq() const noexcept { return x_eq_; }
  double theta_eq() const noexcept { return theta_eq_; }

 private:
  PllModel model_;
  Eigen::VectorXd x_eq_;
  double theta_eq_;
  double phi_eq_;
};

// Throws "not an equilibrium" when the rhs residual at (x_eq, theta_eq) exceeds 1e-6.
LureForm to_lure(const PllModel& model, const Eigen::VectorXd& x_eq, double theta_eq);

}  // namespace pllranges
