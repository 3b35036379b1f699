#pragma once

#include <climits>
#include <complex>
#include <limits>
#include <vector>

namespace calogero::radial {

using cplx = std::complex<double>;

/// W[rho, phi_1]/W[rho, phi_2] at r = 0+ equals kappa; infinite means W[rho, phi_2] = 0.
/// Only consulted for lambda < 1.
struct RadialBoundary {
  double kappa = 0.0;
  bool infinite = false;

  static RadialBoundary zero() { return {0.0, false}; }
  static RadialBoundary infinity() { return {0.0, true}; }
  static RadialBoundary finite(double k) { return {k, false}; }
};

struct RadialLevel {
  double energy;
  int m;           ///< ordinal of the level (closed forms: the Laguerre degree)
  double epsilon;  ///< E / (4c)
};

struct Truncation {
  int max_levels = INT_MAX;
  double e_max = std::numeric_limits<double>::infinity();
};

/// Gamma(-eps + (1 - s)/2) / Gamma(-eps + (1 + s)/2), s = sqrt(lambda), 0 < lambda < 1.
/// Throws PoleError at the poles (1 - s)/2 + m.
double f_lambda(double lambda, double epsilon);
double f_lambda_pole(double lambda, int m);
double f_lambda_zero(double lambda, int m);
/// -Gamma(-s)/Gamma(s) kappa (infinite kappa is not allowed here).
double f_lambda_rhs(double lambda, const RadialBoundary& bc);
/// F_lambda(0) > rhs > 0: exactly one negative level.
bool has_negative_level(double lambda, const RadialBoundary& bc);

/// Spectrum for lambda > 0. lambda >= 1 or kappa = 0: E = 2c(2m + 1 + s); kappa = infinity:
/// E = 2c(2m + 1 - s); otherwise roots of F_lambda(eps) = rhs. lambda = 0 is rejected,
/// lambda < 0 must go through solve_radial_negative.
std::vector<RadialLevel> solve_radial(double lambda, const RadialBoundary& bc, double c, int n_levels);
std::vector<RadialLevel> solve_radial(double lambda, const RadialBoundary& bc, double c, Truncation t);

/// -Im psi(1/2 - y + ix/2), the eps-derivative of the smooth arg Gamma branch. Always negative.
double omega_integrand(double y, double x);
/// arg Gamma(1/2 + ix/2) + int_0^eps omega(y, x) dy.
double omega_phase(double epsilon, double x);
/// arccot(-kappa) - arg Gamma(1 - ix) - (x/2) ln c; pi for infinite kappa.
double theta_phase(double x, const RadialBoundary& bc, double c);

/// Levels with sqrt(lambda) = ix and eps in [eps_lo, eps_hi]; m is the branch index k of
/// Omega = theta + k pi.
std::vector<RadialLevel> solve_radial_negative(double x, const RadialBoundary& bc, double c, double eps_lo,
                                               double eps_hi);
/// |cot arg(c^{ix/2} Gamma(1 - ix) Gamma(-eps + (1 + ix)/2)) + kappa|, or |tan arg(...)| for infinite kappa.
double phase_condition_residual(double epsilon, double x, const RadialBoundary& bc, double c);

/// rho(r) = f(sigma), sigma = c r^2, f = sigma^q e^{-sigma/2} P(sigma).
class RadialFunction {
 public:
  enum class Kind { Laguerre, Kummer, Tricomi };

  RadialFunction(Kind kind, cplx s, double energy, double c, cplx q, cplx a, cplx b, int degree, double lambda);

  Kind kind() const { return kind_; }
  double energy() const { return energy_; }

  cplx value(double r) const;
  cplx derivative(double r) const;
  cplx second_derivative(double r) const;
  /// |-rho'' + (c^2 r^2 + (lambda - 1/4)/r^2 - E) rho| divided by the sum of the magnitudes of its terms.
  double ode_residual(double r) const;

 private:
  struct Jet {
    cplx f, df, d2f;
  };
  Jet jet_sigma(double sigma) const;

  Kind kind_;
  cplx s_;
  double energy_;
  double c_;
  cplx q_;
  cplx a_;
  cplx b_;
  int degree_;
  double lambda_;
};

/// Square-integrable eigenfunction for lambda > 0 at a level of the given boundary condition.
/// Throws DomainError if E is not an eigenvalue, ConvergenceError if the ODE check fails.
RadialFunction radial_eigenfunction(double lambda, double energy, double c, const RadialBoundary& bc);
/// Decaying solution with sqrt(lambda) = ix at a root of the phase condition.
RadialFunction radial_eigenfunction_negative(double x, double energy, double c, const RadialBoundary& bc);
/// rho_{E,1} (k = 1) or rho_{E,2} (k = 2), the solutions regular-ish at r = 0.
RadialFunction local_solution(double lambda, double energy, double c, int k);

}  // namespace calogero::radial
