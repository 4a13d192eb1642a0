#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "pllranges/model.hpp"

// Loops shared by the test binaries.
namespace fixtures {

using namespace pllranges;

inline constexpr double pi = std::numbers::pi;

inline PdCharacteristic half_sine() { return PdCharacteristic::sinusoidal(PdKind::sinusoidal_half, 2 * pi); }

inline LoopSpec example1(double omega = 0.0) {
  return LoopSpec{half_sine(), TransferFunction({1, 0.5}, {1, 0.5, 0.5}), 8.0, omega, std::nullopt};
}

inline LoopSpec example2(double L = 80.0, double omega = 0.0) {
  return LoopSpec{half_sine(), TransferFunction({1, 0.25, 0.5}, {1, 2, 2, 2}), L, omega, std::nullopt};
}

inline LoopSpec filterless(double omega = 0.0) {
  return LoopSpec{half_sine(), TransferFunction({1}, {1}), 8.0, omega, std::nullopt};
}

inline constexpr double tau1 = 0.0448;
inline constexpr double tau2 = 0.0185;

// Lead-lag filter in the coordinates used for the published portraits.
inline LoopSpec lead_lag(double L, double omega, PdCharacteristic pd = half_sine()) {
  const double T = tau1 + tau2;
  TransferFunction tf({1, tau2}, {1, T});
  auto fr = custom_realization(tf, Eigen::MatrixXd::Constant(1, 1, -1 / T),
                               Eigen::VectorXd::Constant(1, 1 - tau2 / T),
                               Eigen::VectorXd::Constant(1, 1 / T), tau2 / T);
  return LoopSpec{pd, tf, L, omega, fr};
}

inline LoopSpec pi_loop(double omega = 47.0, PdCharacteristic pd = half_sine()) {
  return LoopSpec{pd, TransferFunction({1, 0.0225}, {0, 0.0633}), 250.0, omega, std::nullopt};
}

inline LoopSpec example3(double omega = 100.0) {
  return lead_lag(250.0, omega, PdCharacteristic::sinusoidal(PdKind::sinusoidal_double_half, pi));
}

inline Eigen::VectorXd state(std::initializer_list<double> v) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) s[i++] = d;
  return s;
}

inline std::string config_path(const std::string& name) {
  return std::string(PLLRANGES_CONFIG_DIR) + "/" + name + ".json";
}

}  // namespace fixtures
