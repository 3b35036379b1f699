#pragma once

#include <array>
#include <climits>
#include <complex>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "calogero/symmetry.hpp"

namespace calogero::angular {

using cplx = std::complex<double>;
using Mat2 = std::array<std::array<cplx, 2>, 2>;

/// Coupling g = 2 nu (nu - 1) with 1/2 < nu < 3/2, nu != 1.
class Coupling {
 public:
  explicit Coupling(double nu);
  /// nu = 1 (free particles); only meant for the oscillator-limit checks.
  static Coupling oscillator_limit();

  double nu() const { return nu_; }
  double g() const { return 2.0 * nu_ * (nu_ - 1.0); }
  bool is_oscillator_limit() const { return nu_ == 1.0; }

 private:
  struct Unchecked {};
  Coupling(double nu, Unchecked) : nu_(nu) {}
  double nu_;
};

/// U = [[A, B], [B, A]], A = e^{i alpha} cos beta, B = i e^{i alpha} sin beta.
/// Angles are stored canonicalized to (-pi, pi].
class ConnectionMatrix {
 public:
  ConnectionMatrix(double alpha, double beta);

  static ConnectionMatrix identity() { return {0.0, 0.0}; }
  static ConnectionMatrix minus_identity();
  static ConnectionMatrix sigma1();
  static ConnectionMatrix minus_sigma1();

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  cplx A() const;
  cplx B() const;
  Mat2 matrix() const;

  /// |sin beta| < 1e-12, i.e. U = e^{i alpha'} 1.
  bool is_separating() const;
  /// alpha' with U = e^{i alpha'} 1 for a separating U.
  double separating_alpha() const;

 private:
  double alpha_;
  double beta_;
};

double canonical_angle(double t);

struct MuValue {
  enum class Kind { Real, Imaginary };
  Kind kind = Kind::Real;
  double value = 0.0;  ///< mu for Real, x for Imaginary (mu = i x)

  static MuValue real(double mu) { return {Kind::Real, mu}; }
  static MuValue imaginary(double x) { return {Kind::Imaginary, x}; }
  bool is_real() const { return kind == Kind::Real; }
  cplx complex() const { return is_real() ? cplx(value, 0.0) : cplx(0.0, value); }
  /// lambda = (3 mu)^2
  double lambda() const { return is_real() ? 9.0 * value * value : -9.0 * value * value; }
};

enum class Series { SepA, SepB, APlus, AMinus, BPlus, BMinus, Type2Plus, Type2Minus };

std::string_view series_name(Series s);
Series series_from_name(std::string_view s);
bool is_type2(Series s);
/// +-1 for the type-1 series, +-1/2 for type 2. Throws for separating series.
double re_tau(Series s);
std::vector<symmetry::Rep> reps_of(Series s);
int multiplicity_of(Series s);

struct AngularLevel {
  MuValue mu;
  Series series;
  std::vector<symmetry::Rep> reps;
  int multiplicity;
};

AngularLevel make_level(MuValue mu, Series s);

/// Orders by lambda, then series.
bool level_less(const AngularLevel& a, const AngularLevel& b);

struct AbCoeffs {
  double a1, a2, b1, b2;
};

/// Boundary values of the two sector solutions at phi = pi/6. Entire in mu.
AbCoeffs ab_coeffs(const Coupling& c, MuValue mu);

/// Sector solutions on (0, pi/6]: v1 ~ |sin 3phi|^nu, v2 ~ |sin 3phi|^{1-nu}.
double v1(const Coupling& c, MuValue mu, double phi);
double v2(const Coupling& c, MuValue mu, double phi);

enum class Family { A, B };

/// F_A or F_B. Throws PoleError at the pole ladder.
double f_type1(Family f, const Coupling& c, MuValue mu);
/// m-th pole / zero of F_A or F_B on the real axis.
double type1_pole(Family f, const Coupling& c, int m);
double type1_zero(Family f, const Coupling& c, int m);

struct Rhs {
  double value = 0.0;
  bool divergent = false;  ///< |cos(theta)| < 1e-12: roots sit on the pole ladder
  bool vanishing = false;  ///< |sin(theta)| < 1e-12: roots sit on the zero ladder
};

/// Gamma(nu + 1/2)/Gamma(3/2 - nu) tan((alpha + sign beta)/2).
Rhs rhs_type1(const Coupling& c, const ConnectionMatrix& U, int sign);
/// Gamma(nu + 1/2)/Gamma(3/2 - nu) tan(alpha/2).
Rhs rhs_separating(const Coupling& c, double alpha);

/// The type-2 spectral function. Requires a non-separating U.
double f2(const Coupling& c, const ConnectionMatrix& U, MuValue mu);
/// e^{-pi x} F_2(ix), finite for all x.
double f2_scaled_imaginary(const Coupling& c, const ConnectionMatrix& U, double x);

/// e^{-pi x} F_2(ix) = kappa0 K0 + kappa_minus x^{1-2nu} K_minus + kappa_plus x^{2nu-1} K_plus.
struct F2Decomposition {
  double x;
  double nu;
  double kappa0, kappa_minus, kappa_plus;
  double K0, K_minus, K_plus;
  double scaled() const;
  double value() const;
};
F2Decomposition f2_decomposition(const Coupling& c, const ConnectionMatrix& U, double x);

struct Truncation {
  int max_levels = INT_MAX;
  double mu_max = std::numeric_limits<double>::infinity();
};

/// Type-1 levels of the non-separating U. Imaginary levels first, then real ones ascending.
std::vector<AngularLevel> solve_type1(const Coupling& c, const ConnectionMatrix& U, Family f, int sign, int n_levels);
std::vector<AngularLevel> solve_type1(const Coupling& c, const ConnectionMatrix& U, Family f, int sign, Truncation t);

/// Type-2 levels with Re tau = re_tau (+-1/2), one entry per tau-pair.
std::vector<AngularLevel> solve_type2(const Coupling& c, const ConnectionMatrix& U, double re_tau, int n_levels);
std::vector<AngularLevel> solve_type2(const Coupling& c, const ConnectionMatrix& U, double re_tau, Truncation t);

struct ImaginaryScan {
  std::vector<double> roots;
  double x_max = 0.0;
  bool certified = false;
};

/// Smallest X in {10, 20, ..., 320} beyond which |F_2(ix)| > 1 is guaranteed by the
/// decomposition bound; 320 with certified = false if none qualifies.
ImaginaryScan certified_cutoff(const Coupling& c, const ConnectionMatrix& U);
/// Roots x of F_2(ix) = re_tau on [0, x_max].
ImaginaryScan type2_imaginary_scan(const Coupling& c, const ConnectionMatrix& U, double re_tau);

/// Separating U = e^{i alpha} 1: merged SepA / SepB levels (multiplicity 6).
std::vector<AngularLevel> separating_spectrum(const Coupling& c, double alpha, int n_levels);
std::vector<AngularLevel> separating_spectrum(const Coupling& c, double alpha, Truncation t);

enum class ExplicitCase { DirichletMinusOne, NeumannPlusOne, FreeSigma1, MinusSigma1 };

std::string_view case_name(ExplicitCase e);
ExplicitCase case_from_name(std::string_view s);
ConnectionMatrix connection_of(ExplicitCase e);

/// (1/pi) arccos(cos(pi nu)/2).
double delta_nu(double nu);

std::vector<AngularLevel> explicit_spectrum(ExplicitCase e, const Coupling& c, int n_levels);
std::vector<AngularLevel> explicit_spectrum(ExplicitCase e, const Coupling& c, Truncation t);

struct TransportMatrix {
  Mat2 T;
  Mat2 n_plus;
  Mat2 n_minus;
  cplx x, y, z;
  cplx det_n_plus;
  cplx trace_half() const { return T[0][0]; }
};

/// T = N_+^{-1} N_-, mapping the coefficients of sector k to sector k+1.
TransportMatrix transport_matrix(const Coupling& c, const ConnectionMatrix& U, MuValue mu);

Mat2 mat_mul(const Mat2& a, const Mat2& b);
Mat2 mat_identity();
double mat_dist(const Mat2& a, const Mat2& b);

/// (1/6) sum_k conj(tau)^k T^k. Throws DomainError if the result is not idempotent.
Mat2 projector(cplx tau, const TransportMatrix& T);
/// Entries 1/2 on the diagonal, -2i y Im(tau)/(3 det N_+) and -2i z Im(tau)/(3 det N_+) off it.
Mat2 projector_closed_form(cplx tau, const TransportMatrix& T);

class AngularEigenfunction {
 public:
  AngularEigenfunction(const Coupling& c, MuValue mu, std::array<cplx, 6> c_plus, std::array<cplx, 6> c_minus);

  /// Throws DomainError at the singular points k pi/3.
  cplx operator()(double phi) const;
  double l2_norm() const;

  const Coupling& coupling() const { return coupling_; }
  MuValue mu() const { return mu_; }
  const AbCoeffs& ab() const { return ab_; }
  /// Sector index k = 1..6
  cplx c_plus(int k) const { return c_plus_[(k - 1) % 6]; }
  cplx c_minus(int k) const { return c_minus_[(k - 1) % 6]; }
  const std::array<cplx, 6>& c_plus() const { return c_plus_; }
  const std::array<cplx, 6>& c_minus() const { return c_minus_; }

 private:
  Coupling coupling_;
  MuValue mu_;
  AbCoeffs ab_;
  std::array<cplx, 6> c_plus_;
  std::array<cplx, 6> c_minus_;
};

/// `which` selects a basis vector of the eigenspace: sector 0..5 for separating levels,
/// Im tau > 0 (0) or < 0 (1) for type 2, ignored for type 1.
AngularEigenfunction build_eigenfunction(const AngularLevel& level, const Coupling& c, const ConnectionMatrix& U,
                                         int which = 0);

/// Boundary vectors (B_theta, B'_theta) at theta = j pi/3, j = 0..5.
struct BoundaryVectors {
  std::array<std::array<cplx, 2>, 6> B;
  std::array<std::array<cplx, 2>, 6> Bp;
};
BoundaryVectors boundary_vectors(const AngularEigenfunction& psi);

/// max_theta |(U - 1) B + i (U + 1) B'| normalised by max_theta (|B| + |B'|).
double boundary_residual(const AngularEigenfunction& psi, const Coupling& c, const ConnectionMatrix& U);

/// Irreducible content of the D6 action generated by psi: rotation eigenvalue and
/// reflection parities for type 1/2, character decomposition for single-sector states.
std::vector<symmetry::Rep> classify(const AngularEigenfunction& psi);

struct PermissibilityReport {
  bool permissible = true;
  std::vector<AngularLevel> negative_levels;
  std::vector<std::string> criteria_fired;
  std::vector<std::string> diagnostics;
};

PermissibilityReport permissibility(const Coupling& c, const ConnectionMatrix& U);

}  // namespace calogero::angular
