#pragma once

#include <complex>

namespace calogero::specfun {

using cplx = std::complex<double>;

/// sin(pi x) and cos(pi x) with argument reduction done before the multiplication by pi,
/// so zeros at the integers (resp. half-integers) are exact.
double sin_pi(double x);
double cos_pi(double x);

/// Principal log-gamma. For Re z >= 0 this is the analytic branch (real on the positive axis);
/// for Re z < 0 it comes from the reflection formula with the imaginary part reduced to (-pi, pi].
/// Throws PoleError at non-positive integers.
cplx ln_gamma(cplx z);

struct SignedLog {
  double log_abs;
  int sign;
};

/// ln|Gamma(x)| and the sign of Gamma(x) for real x.
SignedLog ln_abs_gamma_signed(double x);

/// Re ln Gamma(x + iy) = ln|Gamma(x + iy)|.
double ln_abs_gamma(double x, double y);

double gamma(double x);
cplx gamma(cplx z);

/// 1/Gamma, which is entire: exactly zero at the non-positive integers.
double rgamma(double x);
cplx rgamma(cplx z);

/// Gamma(p)/Gamma(q) with the sign tracked through the reflection formula.
/// Overflow is reported as a signed infinity.
double gamma_ratio(double p, double q);

/// |Gamma(x + iy)|^2.
double abs_gamma_sq(double x, double y);

cplx digamma(cplx z);

/// Gauss hypergeometric F(a, b; c; z) for 0 <= z < 1. z = 1 is accepted when Re(c - a - b) > 0.
/// Series for z <= 1/2, the (1 - z) linear transformation above (requires non-integer c - a - b).
double gauss_2f1(double a, double b, double c, double z);
cplx gauss_2f1(cplx a, cplx b, double c, double z);
/// Same, with w = 1 - z supplied by the caller to avoid cancellation near z = 1.
cplx gauss_2f1(cplx a, cplx b, double c, double z, double w);

/// Kummer M(a, b, z) by its power series, z >= 0.
cplx kummer_m(cplx a, cplx b, double z, int max_terms = 20000);

/// Tricomi U(a, b, z) for non-integer b, z > 0.
cplx tricomi_u(cplx a, cplx b, double z);

/// U(a,b,z) = first * M(a,b,z) + second * z^(1-b) * M(a-b+1, 2-b, z).
struct TricomiCoefficients {
  cplx first;
  cplx second;
};
TricomiCoefficients tricomi_coefficients(cplx a, cplx b);

/// Generalized Laguerre L_m^s(z).
double laguerre(int m, double s, double z);

/// Gegenbauer C_l^nu(x).
double gegenbauer(int l, double nu, double x);

namespace testing {
/// Fault-injection hook: scales the leading Stirling coefficient of ln_gamma by (1 + delta).
/// Zero restores exact behaviour.
void set_gamma_perturbation(double delta);
}  // namespace testing

}  // namespace calogero::specfun
