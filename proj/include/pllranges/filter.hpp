#pragma once

#include <Eigen/Dense>
#include <complex>

#include "pllranges/polynomial.hpp"

namespace pllranges {

// H(s) = a(s) / d(s), coefficients in ascending powers of s.
class TransferFunction {
 public:
  // Throws on improper, degenerate or non-coprime input.
  TransferFunction(poly::Coeffs num, poly::Coeffs den);

  const poly::Coeffs& num() const noexcept { return num_; }
  const poly::Coeffs& den() const noexcept { return den_; }
  int num_degree() const noexcept { return static_cast<int>(num_.size()) - 1; }
  int den_degree() const noexcept { return static_cast<int>(den_.size()) - 1; }

  std::complex<double> eval(std::complex<double> s) const;
  // Number of poles at s = 0.
  int zero_pole_multiplicity() const noexcept;

 private:
  poly::Coeffs num_;
  poly::Coeffs den_;
};

// x' = A x + b u, g = c.x + h u, so that H(s) = c.(sI - A)^-1 b + h.
struct FilterRealization {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double h = 0.0;

  int order() const noexcept { return static_cast<int>(b.size()); }
  std::complex<double> transfer(std::complex<double> s) const;
};

// Controllable canonical form of the strictly proper part plus feedthrough.
FilterRealization realize(const TransferFunction& tf);

// Explicit coordinates; rejected unless they reproduce tf at sample points.
FilterRealization custom_realization(const TransferFunction& tf, Eigen::MatrixXd A,
                                     Eigen::VectorXd b, Eigen::VectorXd c, double h);

// Largest relative mismatch between fr and tf over `samples` deterministic points.
double realization_mismatch(const TransferFunction& tf, const FilterRealization& fr,
                            int samples = 20);

// a0/d0, or +infinity when d0 = 0.
double dc_gain(const TransferFunction& tf);

// c.exp(At).b
double impulse_response(const FilterRealization& fr, double t);
// c.exp(At).x0
double zero_input_response(const FilterRealization& fr, const Eigen::VectorXd& x0, double t);

}  // namespace pllranges
