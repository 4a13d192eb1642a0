#include "pllranges/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>

#include "pllranges/error.hpp"

namespace pllranges::poly {

Coeffs trim(Coeffs p) {
  while (!p.empty() && p.back() == 0.0) p.pop_back();
  return p;
}

int degree(const Coeffs& p) {
  for (std::size_t i = p.size(); i > 0; --i) {
    if (p[i - 1] != 0.0) return static_cast<int>(i - 1);
  }
  return -1;
}

double eval(const Coeffs& p, double s) {
  double acc = 0.0;
  for (std::size_t i = p.size(); i > 0; --i) acc = acc * s + p[i - 1];
  return acc;
}

std::complex<double> eval(const Coeffs& p, std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (std::size_t i = p.size(); i > 0; --i) acc = acc * s + p[i - 1];
  return acc;
}

Coeffs add(const Coeffs& a, const Coeffs& b) {
  Coeffs r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

Coeffs mul(const Coeffs& a, const Coeffs& b) {
  if (a.empty() || b.empty()) return {};
  Coeffs r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Coeffs scale(const Coeffs& a, double k) {
  Coeffs r(a);
  for (double& v : r) v *= k;
  return r;
}

Coeffs derivative(const Coeffs& p) {
  if (p.size() <= 1) return {};
  Coeffs r(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) r[i - 1] = p[i] * static_cast<double>(i);
  return r;
}

std::vector<std::complex<double>> roots(const Coeffs& p) {
  const int n = degree(p);
  if (n < 0) throw Error(Errc::degenerate_polynomial, "roots of the zero polynomial");
  std::vector<std::complex<double>> out;
  if (n == 0) return out;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  const double lead = p[static_cast<std::size_t>(n)];
  for (int i = 0; i < n; ++i) comp(0, i) = -p[static_cast<std::size_t>(n - 1 - i)] / lead;
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  const auto& ev = es.eigenvalues();
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(ev[i]);
  return out;
}

}  // namespace pllranges::poly
