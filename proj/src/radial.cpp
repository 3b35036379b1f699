#include "calogero/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "calogero/errors.hpp"
#include "calogero/specfun.hpp"

namespace calogero::radial {

namespace sf = calogero::specfun;

namespace {

constexpr double kPi = std::numbers::pi;

template <class G>
double bisect(G&& g, double lo, double hi, int s_lo) {
  for (int it = 0; it < 4000; ++it) {
    double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    double v = g(mid);
    if (std::isnan(v)) throw ConvergenceError("bisection: function returned NaN");
    if (v == 0.0) return mid;
    if ((v > 0.0) == (s_lo > 0)) lo = mid;
    else hi = mid;
  }
  return lo + 0.5 * (hi - lo);
}

void check_lambda(double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
  if (lambda == 0.0)
    throw DomainError("lambda = 0 is not supported: the two local solutions degenerate and need a separate treatment");
}

void check_c(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c must be positive");
}

void check_fractional(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("F_lambda requires 0 < lambda < 1");
}

bool nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

RadialLevel level_at(double eps, int m, double c) { return {4.0 * c * eps, m, eps}; }

std::vector<RadialLevel> closed_ladder(double s, int sign, double c, Truncation t) {
  std::vector<RadialLevel> out;
  for (int m = 0; static_cast<int>(out.size()) < t.max_levels; ++m) {
    double e = 2.0 * c * (2.0 * m + 1.0 + sign * s);
    if (e > t.e_max) break;
    out.push_back({e, m, e / (4.0 * c)});
  }
  return out;
}

// int_a^b omega(y, x) dy
double omega_integral(double a, double b, double x) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  auto f = [x](double y) { return omega_integrand(y, x); };
  // pieces no longer than the distance x/2 of the digamma poles from the real axis
  const double h = std::min(1.0, 0.5 * x);
  double total = 0.0;
  for (double lo = a; lo < b;) {
    double hi = std::min(b, h * (std::floor(lo / h) + 1.0));
    if (hi <= lo) hi = std::min(b, lo + h);
    // left of the origin the poles are at least |y| away
    if (lo < -2.0) hi = std::min(b, std::max(hi, 0.5 * lo));
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 4, 1e-13, &err);
    if (!(err <= 1e-9 * std::max(1.0, std::abs(total))))
      throw ConvergenceError("omega_phase: quadrature did not converge");
    lo = hi;
  }
  return sign * total;
}

}  // namespace

// ---------------------------------------------------------------- 0 < lambda < 1

double f_lambda(double lambda, double epsilon) {
  check_fractional(lambda);
  double s = std::sqrt(lambda);
  double p = -epsilon + 0.5 * (1.0 - s), q = -epsilon + 0.5 * (1.0 + s);
  if (nonpositive_integer(p)) throw PoleError("f_lambda: pole");
  if (nonpositive_integer(q)) return 0.0;
  return sf::gamma_ratio(p, q);
}

double f_lambda_pole(double lambda, int m) { return 0.5 * (1.0 - std::sqrt(lambda)) + m; }
double f_lambda_zero(double lambda, int m) { return 0.5 * (1.0 + std::sqrt(lambda)) + m; }

double f_lambda_rhs(double lambda, const RadialBoundary& bc) {
  check_fractional(lambda);
  if (bc.infinite) throw DomainError("f_lambda_rhs: infinite kappa has no finite right-hand side");
  double s = std::sqrt(lambda);
  return -sf::gamma_ratio(-s, s) * bc.kappa;
}

bool has_negative_level(double lambda, const RadialBoundary& bc) {
  check_fractional(lambda);
  if (bc.infinite || bc.kappa == 0.0) return false;
  double rhs = f_lambda_rhs(lambda, bc);
  return rhs > 0.0 && f_lambda(lambda, 0.0) > rhs;
}

std::vector<RadialLevel> solve_radial(double lambda, const RadialBoundary& bc, double c, int n_levels) {
  if (n_levels < 1) throw DomainError("solve_radial: n_levels must be at least 1");
  return solve_radial(lambda, bc, c, Truncation{n_levels});
}

std::vector<RadialLevel> solve_radial(double lambda, const RadialBoundary& bc, double c, Truncation t) {
  check_lambda(lambda);
  check_c(c);
  if (lambda < 0.0)
    throw DomainError("solve_radial: lambda < 0 has a spectrum unbounded in both directions; use solve_radial_negative");
  double s = std::sqrt(lambda);
  if (lambda >= 1.0 || (!bc.infinite && bc.kappa == 0.0)) return closed_ladder(s, +1, c, t);
  if (bc.infinite) return closed_ladder(s, -1, c, t);

  const double rhs = f_lambda_rhs(lambda, bc);
  auto g = [&](double eps) { return f_lambda(lambda, eps) - rhs; };
  std::vector<RadialLevel> out;
  auto push = [&](double eps) {
    if (4.0 * c * eps > t.e_max) return false;
    out.push_back(level_at(eps, static_cast<int>(out.size()), c));
    return true;
  };
  // F rises from 0 to +inf on (-inf, p0)
  if (rhs > 0.0) {
    double lo = std::min(-1.0, f_lambda_pole(lambda, 0) - 1.0);
    int grow = 0;
    while (g(lo) >= 0.0) {
      if (++grow > 2000) throw ConvergenceError("solve_radial: lower bracket not found");
      lo *= 2.0;
    }
    if (!push(bisect(g, lo, f_lambda_pole(lambda, 0), -1))) return out;
  }
  for (int m = 0; static_cast<int>(out.size()) < t.max_levels; ++m) {
    double lo = f_lambda_pole(lambda, m);
    if (4.0 * c * lo > t.e_max) break;
    if (!push(bisect(g, lo, f_lambda_pole(lambda, m + 1), -1))) break;
  }
  if (static_cast<int>(out.size()) > t.max_levels) out.resize(t.max_levels);
  return out;
}

// ---------------------------------------------------------------- lambda < 0

double omega_integrand(double y, double x) { return -sf::digamma(cplx(0.5 - y, 0.5 * x)).imag(); }

double omega_phase(double epsilon, double x) {
  if (!(x > 0.0)) throw DomainError("omega_phase: x must be positive");
  return sf::ln_gamma(cplx(0.5, 0.5 * x)).imag() + omega_integral(0.0, epsilon, x);
}

double theta_phase(double x, const RadialBoundary& bc, double c) {
  check_c(c);
  double arccot = bc.infinite ? kPi : std::atan2(1.0, -bc.kappa);
  return arccot - sf::ln_gamma(cplx(1.0, -x)).imag() - 0.5 * x * std::log(c);
}

std::vector<RadialLevel> solve_radial_negative(double x, const RadialBoundary& bc, double c, double eps_lo,
                                               double eps_hi) {
  if (!(x > 0.0)) throw DomainError("solve_radial_negative: x must be positive");
  check_c(c);
  if (!(eps_lo < eps_hi) || !std::isfinite(eps_lo) || !std::isfinite(eps_hi))
    throw DomainError("solve_radial_negative: window must be a finite interval lo < hi");
  const double theta = theta_phase(x, bc, c);
  const double w_lo = omega_phase(eps_lo, x);
  const double w_hi = w_lo + omega_integral(eps_lo, eps_hi, x);
  // Omega decreases: Omega(lo) >= theta + k pi >= Omega(hi)
  const long k_first = static_cast<long>(std::ceil((w_hi - theta) / kPi));
  const long k_last = static_cast<long>(std::floor((w_lo - theta) / kPi));
  std::vector<RadialLevel> out;
  double a = eps_lo, wa = w_lo;
  for (long k = k_last; k >= k_first; --k) {
    const double target = theta + k * kPi;
    if (wa == target) {
      out.push_back(level_at(a, static_cast<int>(k), c));
      continue;
    }
    double lo = a, w_at_lo = wa, hi = eps_hi;
    for (int it = 0; it < 200; ++it) {
      double mid = lo + 0.5 * (hi - lo);
      if (!(mid > lo && mid < hi)) break;
      double wm = w_at_lo + omega_integral(lo, mid, x);
      if (wm > target) {
        lo = mid;
        w_at_lo = wm;
      } else {
        hi = mid;
      }
    }
    double root = lo + 0.5 * (hi - lo);
    out.push_back(level_at(root, static_cast<int>(k), c));
    a = lo;
    wa = w_at_lo;
  }
  return out;
}

double phase_condition_residual(double epsilon, double x, const RadialBoundary& bc, double c) {
  check_c(c);
  cplx l = cplx(0.0, 0.5 * x * std::log(c)) + sf::ln_gamma(cplx(1.0, -x)) + sf::ln_gamma(cplx(0.5 - epsilon, 0.5 * x));
  double arg = l.imag();
  if (bc.infinite) return std::abs(std::tan(arg));
  return std::abs(std::cos(arg) / std::sin(arg) + bc.kappa);
}

// ---------------------------------------------------------------- eigenfunctions

RadialFunction::RadialFunction(Kind kind, cplx s, double energy, double c, cplx q, cplx a, cplx b, int degree,
                               double lambda)
    : kind_(kind), s_(s), energy_(energy), c_(c), q_(q), a_(a), b_(b), degree_(degree), lambda_(lambda) {}

RadialFunction::Jet RadialFunction::jet_sigma(double sigma) const {
  cplx p, dp, d2p;
  switch (kind_) {
    case Kind::Laguerre: {
      double alpha = a_.real();
      p = sf::laguerre(degree_, alpha, sigma);
      dp = degree_ >= 1 ? -sf::laguerre(degree_ - 1, alpha + 1.0, sigma) : 0.0;
      d2p = degree_ >= 2 ? sf::laguerre(degree_ - 2, alpha + 2.0, sigma) : 0.0;
      break;
    }
    case Kind::Kummer:
      p = sf::kummer_m(a_, b_, sigma);
      dp = a_ / b_ * sf::kummer_m(a_ + 1.0, b_ + 1.0, sigma);
      d2p = a_ * (a_ + 1.0) / (b_ * (b_ + 1.0)) * sf::kummer_m(a_ + 2.0, b_ + 2.0, sigma);
      break;
    case Kind::Tricomi:
      p = sf::tricomi_u(a_, b_, sigma);
      dp = -a_ * sf::tricomi_u(a_ + 1.0, b_ + 1.0, sigma);
      d2p = a_ * (a_ + 1.0) * sf::tricomi_u(a_ + 2.0, b_ + 2.0, sigma);
      break;
  }
  cplx g = std::exp(q_ * std::log(sigma) - 0.5 * sigma);
  cplx h = q_ / sigma - 0.5;
  cplx dg = g * h;
  cplx d2g = g * (h * h - q_ / (sigma * sigma));
  return {g * p, dg * p + g * dp, d2g * p + 2.0 * dg * dp + g * d2p};
}

cplx RadialFunction::value(double r) const {
  if (!(r > 0.0)) throw DomainError("radial function evaluated at r <= 0");
  return jet_sigma(c_ * r * r).f;
}

cplx RadialFunction::derivative(double r) const {
  if (!(r > 0.0)) throw DomainError("radial function evaluated at r <= 0");
  return jet_sigma(c_ * r * r).df * (2.0 * c_ * r);
}

cplx RadialFunction::second_derivative(double r) const {
  if (!(r > 0.0)) throw DomainError("radial function evaluated at r <= 0");
  Jet j = jet_sigma(c_ * r * r);
  double t = 2.0 * c_ * r;
  return j.d2f * t * t + j.df * (2.0 * c_);
}

double RadialFunction::ode_residual(double r) const {
  if (!(r > 0.0)) throw DomainError("radial function evaluated at r <= 0");
  Jet j = jet_sigma(c_ * r * r);
  double t = 2.0 * c_ * r;
  cplx d2 = j.d2f * t * t + j.df * (2.0 * c_);
  cplx pot = (c_ * c_ * r * r + (lambda_ - 0.25) / (r * r)) * j.f;
  cplx en = energy_ * j.f;
  double scale = std::abs(d2) + std::abs(pot) + std::abs(en);
  if (scale == 0.0) return 0.0;
  return std::abs(-d2 + pot - en) / scale;
}

namespace {

void check_ode(const RadialFunction& f) {
  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    double res = f.ode_residual(r);
    if (!(res < 1e-6)) {
      std::ostringstream os;
      os << "radial eigenfunction fails the ODE check at r = " << r << " (residual " << res << ")";
      throw ConvergenceError(os.str());
    }
  }
}

int ladder_index(double energy, double c, double s, int sign) {
  double m = (energy / (2.0 * c) - 1.0 - sign * s) / 2.0;
  double k = std::round(m);
  if (k < 0 || std::abs(m - k) > 1e-9 * std::max(1.0, std::abs(m)))
    throw DomainError("radial_eigenfunction: energy is not on the closed-form ladder");
  return static_cast<int>(k);
}

}  // namespace

RadialFunction radial_eigenfunction(double lambda, double energy, double c, const RadialBoundary& bc) {
  check_lambda(lambda);
  check_c(c);
  if (lambda < 0.0) throw DomainError("radial_eigenfunction: use radial_eigenfunction_negative for lambda < 0");
  const double s = std::sqrt(lambda);
  using K = RadialFunction::Kind;
  if (lambda >= 1.0 || (!bc.infinite && bc.kappa == 0.0)) {
    int m = ladder_index(energy, c, s, +1);
    RadialFunction f(K::Laguerre, s, energy, c, 0.5 * (0.5 + s), s, 0.0, m, lambda);
    check_ode(f);
    return f;
  }
  if (bc.infinite) {
    int m = ladder_index(energy, c, s, -1);
    RadialFunction f(K::Laguerre, s, energy, c, 0.5 * (0.5 - s), -s, 0.0, m, lambda);
    check_ode(f);
    return f;
  }
  const double eps = energy / (4.0 * c);
  const double rhs = f_lambda_rhs(lambda, bc);
  const double d = 1e-9 * std::max(1.0, std::abs(eps));
  double gl = f_lambda(lambda, eps - d) - rhs, gh = f_lambda(lambda, eps + d) - rhs;
  if (!(gl <= 0.0 && gh >= 0.0)) throw DomainError("radial_eigenfunction: energy does not solve the spectral condition");
  RadialFunction f(K::Tricomi, s, energy, c, 0.5 * (0.5 + s), -eps + 0.5 * (1.0 + s), 1.0 + s, 0, lambda);
  check_ode(f);
  return f;
}

RadialFunction radial_eigenfunction_negative(double x, double energy, double c, const RadialBoundary& bc) {
  if (!(x > 0.0)) throw DomainError("radial_eigenfunction_negative: x must be positive");
  check_c(c);
  const double eps = energy / (4.0 * c);
  if (!(phase_condition_residual(eps, x, bc, c) < 1e-6))
    throw DomainError("radial_eigenfunction_negative: energy does not solve the phase condition");
  const cplx s(0.0, x);
  RadialFunction f(RadialFunction::Kind::Tricomi, s, energy, c, 0.5 * (0.5 + s), -eps + 0.5 * (1.0 + s), 1.0 + s, 0,
                   -x * x);
  check_ode(f);
  return f;
}

RadialFunction local_solution(double lambda, double energy, double c, int k) {
  check_lambda(lambda);
  check_c(c);
  if (k != 1 && k != 2) throw DomainError("local_solution: k must be 1 or 2");
  const cplx s = lambda > 0.0 ? cplx(std::sqrt(lambda), 0.0) : cplx(0.0, std::sqrt(-lambda));
  const double eps = energy / (4.0 * c);
  const cplx a1 = -eps + 0.5 * (1.0 + s);  // -xi
  if (k == 1) return RadialFunction(RadialFunction::Kind::Kummer, s, energy, c, 0.5 * (0.5 + s), a1, 1.0 + s, 0, lambda);
  return RadialFunction(RadialFunction::Kind::Kummer, s, energy, c, 0.5 * (0.5 - s), a1 - s, 1.0 - s, 0, lambda);
}

}  // namespace calogero::radial
