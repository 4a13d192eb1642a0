#pragma once

#include <complex>
#include <vector>

// Real polynomials stored as ascending-power coefficient vectors.
namespace pllranges::poly {

using Coeffs = std::vector<double>;

// Drops trailing zero coefficients; the zero polynomial becomes empty.
Coeffs trim(Coeffs p);
// Degree of the trimmed polynomial, -1 for the zero polynomial.
int degree(const Coeffs& p);

double eval(const Coeffs& p, double s);
std::complex<double> eval(const Coeffs& p, std::complex<double> s);

Coeffs add(const Coeffs& a, const Coeffs& b);
Coeffs mul(const Coeffs& a, const Coeffs& b);
Coeffs scale(const Coeffs& a, double k);
Coeffs derivative(const Coeffs& p);

// Roots via eigenvalues of the companion matrix.
std::vector<std::complex<double>> roots(const Coeffs& p);

}  // namespace pllranges::poly
