#include "calogero/specfun.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "calogero/errors.hpp"

namespace calogero::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;
constexpr double kLnPi = 1.144729885849400174143427351353;
constexpr double kShiftRadius = 15.0;

// B_{2k} / (2k (2k-1)), k = 1..10
constexpr std::array<double, 10> kStirling = {
    1.0 / 12.0,          -1.0 / 360.0,         1.0 / 1260.0,       -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0,    1.0 / 156.0,        -3617.0 / 122400.0,
    43867.0 / 244188.0,  -174611.0 / 125400.0};

// B_{2k} / (2k), k = 1..10
constexpr std::array<double, 10> kDigammaAsym = {
    1.0 / 12.0,         -1.0 / 120.0,       1.0 / 252.0,     -1.0 / 240.0,
    1.0 / 132.0,        -691.0 / 32760.0,   1.0 / 12.0,      -3617.0 / 8160.0,
    43867.0 / 14364.0,  -174611.0 / 6600.0};

std::atomic<double> g_gamma_perturbation{0.0};

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

bool is_nonpositive_integer(cplx z) { return z.imag() == 0.0 && is_nonpositive_integer(z.real()); }

void require_finite(cplx z, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError(std::string(what) + ": non-finite argument");
}

double wrap_angle(double t) {
  double r = std::remainder(t, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

cplx stirling_ln_gamma(cplx z) {
  cplx w = 1.0 / z;
  cplx w2 = w * w;
  cplx series = kStirling.back();
  for (int k = static_cast<int>(kStirling.size()) - 2; k >= 1; --k) series = series * w2 + kStirling[k];
  double lead = kStirling[0] * (1.0 + g_gamma_perturbation.load(std::memory_order_relaxed));
  series = (series * w2 + lead) * w;
  return (z - 0.5) * std::log(z) - z + kLnSqrt2Pi + series;
}

// log sin(pi z), accurate for large |Im z|
cplx log_sin_pi(cplx z) {
  double x = z.real();
  double y = z.imag();
  if (std::abs(y) < 20.0) {
    return std::log(cplx(sin_pi(x) * std::cosh(kPi * y), cos_pi(x) * std::sinh(kPi * y)));
  }
  bool lower = y < 0.0;
  if (lower) y = -y;
  cplx e2iw = std::polar(std::exp(-2.0 * kPi * y), 2.0 * kPi * x);
  cplx r = cplx(kPi * y - std::log(2.0), kPi / 2.0 - kPi * x) + std::log(1.0 - e2iw);
  return lower ? std::conj(r) : r;
}

cplx cot_pi(cplx z) {
  double y = z.imag();
  if (std::abs(y) > 20.0) return cplx(0.0, y > 0.0 ? -1.0 : 1.0);
  double sa = sin_pi(z.real());
  double ca = cos_pi(z.real());
  double sb = std::sinh(kPi * y);
  double cb = std::cosh(kPi * y);
  double den = sb * sb + sa * sa;
  return cplx(sa * ca, -sb * cb) / den;
}

cplx hyp2f1_series(cplx a, cplx b, cplx c, double z) {
  cplx term = 1.0;
  cplx sum = 1.0;
  constexpr int kMaxTerms = 200000;
  int quiet = 0;
  for (int n = 0; n < kMaxTerms; ++n) {
    double dn = n;
    term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
    sum += term;
    if (term == 0.0) return sum;
    if (std::abs(term) <= 1e-17 * std::abs(sum) || std::abs(term) < 1e-300) {
      if (++quiet >= 2) return sum;
    } else {
      quiet = 0;
    }
  }
  throw ConvergenceError("gauss_2f1: series did not converge");
}

bool near_integer(cplx d) {
  return std::abs(d.imag()) < 1e-14 && std::abs(d.real() - std::round(d.real())) < 1e-12;
}

std::optional<cplx> tricomi_asymptotic(cplx a, cplx b, double z) {
  cplx a2 = a - b + 1.0;
  cplx term = 1.0;
  cplx sum = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 0; n < 4000; ++n) {
    double dn = n;
    term *= -(a + dn) * (a2 + dn) / ((dn + 1.0) * z);
    double mag = std::abs(term);
    if (mag == 0.0) return sum * std::pow(cplx(z, 0.0), -a);
    if (mag > prev && n > 2) return std::nullopt;
    sum += term;
    if (mag <= 1e-16 * std::abs(sum)) return sum * std::pow(cplx(z, 0.0), -a);
    prev = mag;
  }
  return std::nullopt;
}

std::optional<cplx> tricomi_kummer(cplx a, cplx b, double z) {
  TricomiCoefficients k = tricomi_coefficients(a, b);
  cplx t1 = k.first == 0.0 ? cplx(0.0) : k.first * kummer_m(a, b, z);
  cplx t2 = k.second == 0.0 ? cplx(0.0)
                            : k.second * std::pow(cplx(z, 0.0), 1.0 - b) * kummer_m(a - b + 1.0, 2.0 - b, z);
  cplx u = t1 + t2;
  double scale = std::max(std::abs(t1), std::abs(t2));
  if (scale == 0.0) return u;
  if (std::abs(u) * 1e3 < scale) return std::nullopt;
  return u;
}

// Integrates the Kummer equation inward from a point where the asymptotic series is accurate.
// The recessive direction of U is outward, so inward integration is stable.
cplx tricomi_ode(cplx a, cplx b, double z) {
  double z0 = std::max(2.0 * z, 20.0);
  std::optional<cplx> w0;
  std::optional<cplx> w1;
  for (int attempt = 0; attempt < 40; ++attempt, z0 *= 1.5) {
    w0 = tricomi_asymptotic(a, b, z0);
    w1 = tricomi_asymptotic(a + 1.0, b + 1.0, z0);
    if (w0 && w1) break;
  }
  if (!w0 || !w1) throw ConvergenceError("tricomi_u: no accurate starting point for continuation");
  cplx dw0 = -a * *w1;

  using State = std::array<double, 4>;
  namespace odeint = boost::numeric::odeint;
  State s = {w0->real(), w0->imag(), dw0.real(), dw0.imag()};
  auto system = [a, b](const State& st, State& ds, double t) {
    cplx w(st[0], st[1]);
    cplx dw(st[2], st[3]);
    cplx d2 = ((t - b) * dw + a * w) / t;
    ds = {dw.real(), dw.imag(), d2.real(), d2.imag()};
  };
  auto stepper = odeint::make_controlled(1e-300, 1e-14, odeint::runge_kutta_fehlberg78<State>());
  odeint::integrate_adaptive(stepper, system, s, z0, z, -0.05 * (z0 - z));
  return cplx(s[0], s[1]);
}

}  // namespace

double sin_pi(double x) {
  if (!std::isfinite(x)) throw DomainError("sin_pi: non-finite argument");
  double r = x - 2.0 * std::round(0.5 * x);
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(kPi * r);
}

double cos_pi(double x) {
  if (!std::isfinite(x)) throw DomainError("cos_pi: non-finite argument");
  double r = std::abs(x - 2.0 * std::round(0.5 * x));
  return sin_pi(0.5 - r);
}

cplx ln_gamma(cplx z) {
  require_finite(z, "ln_gamma");
  if (is_nonpositive_integer(z)) throw PoleError("ln_gamma: pole at non-positive integer");
  if (z.real() < 0.0) {
    cplx r = kLnPi - log_sin_pi(z) - ln_gamma(1.0 - z);
    return cplx(r.real(), wrap_angle(r.imag()));
  }
  cplx shift = 0.0;
  while (std::abs(z) < kShiftRadius) {
    shift += std::log(z);
    z += 1.0;
  }
  return stirling_ln_gamma(z) - shift;
}

SignedLog ln_abs_gamma_signed(double x) {
  if (is_nonpositive_integer(x)) throw PoleError("gamma: pole at non-positive integer");
  double la = ln_gamma(cplx(x, 0.0)).real();
  int sign = 1;
  if (x < 0.0) sign = (static_cast<long long>(std::floor(x)) % 2 == 0) ? 1 : -1;
  return {la, sign};
}

double ln_abs_gamma(double x, double y) { return ln_gamma(cplx(x, y)).real(); }

double gamma(double x) {
  SignedLog s = ln_abs_gamma_signed(x);
  return s.sign * std::exp(s.log_abs);
}

cplx gamma(cplx z) { return std::exp(ln_gamma(z)); }

double rgamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  SignedLog s = ln_abs_gamma_signed(x);
  return s.sign * std::exp(-s.log_abs);
}

cplx rgamma(cplx z) {
  if (is_nonpositive_integer(z)) return 0.0;
  return std::exp(-ln_gamma(z));
}

double gamma_ratio(double p, double q) {
  if (p == q) {
    if (is_nonpositive_integer(p)) throw PoleError("gamma_ratio: pole at non-positive integer");
    return 1.0;
  }
  SignedLog lp = ln_abs_gamma_signed(p);
  SignedLog lq = ln_abs_gamma_signed(q);
  return lp.sign * lq.sign * std::exp(lp.log_abs - lq.log_abs);
}

double abs_gamma_sq(double x, double y) {
  if (y == 0.0 && is_nonpositive_integer(x)) throw PoleError("abs_gamma_sq: pole at non-positive integer");
  return std::exp(2.0 * ln_abs_gamma(x, y));
}

cplx digamma(cplx z) {
  require_finite(z, "digamma");
  if (is_nonpositive_integer(z)) throw PoleError("digamma: pole at non-positive integer");
  if (z.real() < 0.0) return digamma(1.0 - z) - kPi * cot_pi(z);
  cplx acc = 0.0;
  while (std::abs(z) < kShiftRadius) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  cplx w = 1.0 / z;
  cplx w2 = w * w;
  cplx series = kDigammaAsym.back();
  for (int k = static_cast<int>(kDigammaAsym.size()) - 2; k >= 0; --k) series = series * w2 + kDigammaAsym[k];
  series *= w2;
  return acc + std::log(z) - 0.5 * w - series;
}

double gauss_2f1(double a, double b, double c, double z) {
  return gauss_2f1(cplx(a, 0.0), cplx(b, 0.0), c, z).real();
}

cplx gauss_2f1(cplx a, cplx b, double c, double z) { return gauss_2f1(a, b, c, z, 1.0 - z); }

cplx gauss_2f1(cplx a, cplx b, double c, double z, double w) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("gauss_2f1: z outside [0, 1)");
  if (is_nonpositive_integer(c)) throw PoleError("gauss_2f1: c is a non-positive integer");
  if (z <= 0.5) return hyp2f1_series(a, b, c, z);
  cplx d = c - a - b;
  if (near_integer(d)) throw DomainError("gauss_2f1: integer c - a - b is not supported for z > 1/2");
  if (!(w >= 0.0)) throw DomainError("gauss_2f1: 1 - z must be non-negative");
  cplx gc = gamma(cplx(c, 0.0));
  cplx t1 = gc * gamma(d) * rgamma(c - a) * rgamma(c - b);
  if (t1 != 0.0) t1 *= hyp2f1_series(a, b, 1.0 - d, w);
  if (w == 0.0) {
    if (d.real() <= 0.0) throw DomainError("gauss_2f1: divergent at z = 1");
    return t1;
  }
  cplx t2 = gc * gamma(-d) * rgamma(a) * rgamma(b);
  if (t2 != 0.0) t2 *= std::pow(cplx(w, 0.0), d) * hyp2f1_series(c - a, c - b, 1.0 + d, w);
  return t1 + t2;
}

cplx kummer_m(cplx a, cplx b, double z, int max_terms) {
  if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("kummer_m: z must be finite and non-negative");
  if (is_nonpositive_integer(b)) throw PoleError("kummer_m: b is a non-positive integer");
  cplx term = 1.0;
  cplx sum = 1.0;
  int quiet = 0;
  double horizon = z + std::abs(a) + 2.0;
  for (int n = 0; n < max_terms; ++n) {
    double dn = n;
    term *= (a + dn) / ((b + dn) * (dn + 1.0)) * z;
    sum += term;
    if (term == 0.0) return sum;
    if (dn > horizon && (std::abs(term) <= 1e-17 * std::abs(sum) || std::abs(term) < 1e-300)) {
      if (++quiet >= 2) return sum;
    } else {
      quiet = 0;
    }
  }
  throw ConvergenceError("kummer_m: term budget exhausted");
}

TricomiCoefficients tricomi_coefficients(cplx a, cplx b) {
  if (near_integer(b)) throw DomainError("tricomi_u: integer b is not supported");
  return {gamma(1.0 - b) * rgamma(a - b + 1.0), gamma(b - 1.0) * rgamma(a)};
}

cplx tricomi_u(cplx a, cplx b, double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("tricomi_u: z must be positive");
  if (near_integer(b)) throw DomainError("tricomi_u: integer b is not supported");
  if (auto u = tricomi_asymptotic(a, b, z)) return *u;
  if (auto u = tricomi_kummer(a, b, z)) return *u;
  return tricomi_ode(a, b, z);
}

double laguerre(int m, double s, double z) {
  if (m < 0) throw DomainError("laguerre: negative degree");
  double prev = 1.0;
  if (m == 0) return prev;
  double cur = 1.0 + s - z;
  for (int k = 1; k < m; ++k) {
    double next = ((2.0 * k + 1.0 + s - z) * cur - (k + s) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double gegenbauer(int l, double nu, double x) {
  if (l < 0) throw DomainError("gegenbauer: negative degree");
  double prev = 1.0;
  if (l == 0) return prev;
  double cur = 2.0 * nu * x;
  for (int n = 2; n <= l; ++n) {
    double next = (2.0 * x * (n + nu - 1.0) * cur - (n + 2.0 * nu - 2.0) * prev) / n;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace testing {
void set_gamma_perturbation(double delta) { g_gamma_perturbation.store(delta, std::memory_order_relaxed); }
}  // namespace testing

}  // namespace calogero::specfun
