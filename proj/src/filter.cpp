#include "pllranges/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "pllranges/error.hpp"

namespace pllranges {

namespace {

// Residual of p at r relative to the size of its terms.
double relative_residual(const poly::Coeffs& p, std::complex<double> r) {
  double scale = 0.0, pw = 1.0;
  for (double v : p) {
    scale += std::abs(v) * pw;
    pw *= std::abs(r);
  }
  return scale > 0.0 ? std::abs(poly::eval(p, r)) / scale : 0.0;
}

}  // namespace

TransferFunction::TransferFunction(poly::Coeffs num, poly::Coeffs den)
    : num_(poly::trim(std::move(num))), den_(poly::trim(std::move(den))) {
  for (double v : num_)
    if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "numerator coefficient not finite");
  for (double v : den_)
    if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "denominator coefficient not finite");
  if (den_.empty()) throw Error(Errc::degenerate_polynomial, "denominator is identically zero");
  if (num_.empty()) throw Error(Errc::degenerate_polynomial, "numerator is identically zero");
  if (num_.size() > den_.size())
    throw Error(Errc::improper_transfer_function, "improper transfer function");

  const auto ra = poly::roots(num_);
  const auto rd = poly::roots(den_);
  for (const auto& za : ra) {
    for (const auto& zd : rd) {
      if (std::abs(za - zd) <= 1e-9 * std::max(1.0, std::abs(zd)))
        throw Error(Errc::non_coprime, "non-coprime");
    }
    // Repeated roots are only located to about sqrt(eps); fall back on the residual.
    if (!rd.empty() && relative_residual(den_, za) <= 1e-12)
      throw Error(Errc::non_coprime, "non-coprime");
  }
}

std::complex<double> TransferFunction::eval(std::complex<double> s) const {
  return poly::eval(num_, s) / poly::eval(den_, s);
}

int TransferFunction::zero_pole_multiplicity() const noexcept {
  int k = 0;
  while (k < static_cast<int>(den_.size()) && den_[static_cast<std::size_t>(k)] == 0.0) ++k;
  return k;
}

std::complex<double> FilterRealization::transfer(std::complex<double> s) const {
  const int n = order();
  if (n == 0) return h;
  Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>();
  Eigen::VectorXcd y = M.partialPivLu().solve(b.cast<std::complex<double>>());
  return c.cast<std::complex<double>>().dot(y) + h;
}

FilterRealization realize(const TransferFunction& tf) {
  const auto& a = tf.num();
  const auto& d = tf.den();
  const int n = tf.den_degree();
  const double lead = d.back();

  FilterRealization fr;
  fr.h = (tf.num_degree() == n) ? a.back() / lead : 0.0;
  // Strictly proper remainder r = a - h d, scaled by the leading coefficient.
  poly::Coeffs r = poly::add(a, poly::scale(d, -fr.h));
  r.resize(static_cast<std::size_t>(n), 0.0);

  fr.A = Eigen::MatrixXd::Zero(n, n);
  fr.b = Eigen::VectorXd::Zero(n);
  fr.c = Eigen::VectorXd::Zero(n);
  for (int i = 0; i + 1 < n; ++i) fr.A(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) {
    fr.A(n - 1, j) = -d[static_cast<std::size_t>(j)] / lead;
    fr.c(j) = r[static_cast<std::size_t>(j)] / lead;
  }
  if (n > 0) fr.b(n - 1) = 1.0;
  return fr;
}

double realization_mismatch(const TransferFunction& tf, const FilterRealization& fr, int samples) {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.1, 5.0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const std::complex<double> s(re(rng), im(rng));
    const auto want = tf.eval(s);
    const auto got = fr.transfer(s);
    worst = std::max(worst, std::abs(got - want) / std::max(std::abs(want), 1e-300));
  }
  return worst;
}

FilterRealization custom_realization(const TransferFunction& tf, Eigen::MatrixXd A,
                                     Eigen::VectorXd b, Eigen::VectorXd c, double h) {
  const int n = tf.den_degree();
  if (A.rows() != n || A.cols() != n || b.size() != n || c.size() != n)
    throw Error(Errc::state_dimension, "state dimension: realization must have order " +
                                           std::to_string(n));
  FilterRealization fr{std::move(A), std::move(b), std::move(c), h};
  if (!(realization_mismatch(tf, fr) <= 1e-9))
    throw Error(Errc::invalid_argument, "realization does not reproduce the transfer function");
  return fr;
}

double dc_gain(const TransferFunction& tf) {
  if (tf.den().front() == 0.0) return std::numeric_limits<double>::infinity();
  return tf.num().front() / tf.den().front();
}

double impulse_response(const FilterRealization& fr, double t) {
  if (fr.order() == 0) return 0.0;
  return zero_input_response(fr, fr.b, t);
}

double zero_input_response(const FilterRealization& fr, const Eigen::VectorXd& x0, double t) {
  if (x0.size() != fr.order())
    throw Error(Errc::state_dimension, "state dimension: expected " + std::to_string(fr.order()));
  if (fr.order() == 0) return 0.0;
  const Eigen::MatrixXd E = (fr.A * t).exp();
  return fr.c.dot(E * x0);
}

}  // namespace pllranges
