#include "calogero/angular.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "calogero/errors.hpp"
#include "calogero/specfun.hpp"

namespace calogero::angular {

namespace sf = calogero::specfun;
using symmetry::Rep;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.772453850905516027298167483341;
constexpr double kSectorWidth = kPi / 3.0;
constexpr double kSeparatingTol = 1e-12;
constexpr double kTanTol = 1e-12;

// Sign-bracketed bisection. g(lo) has sign s_lo (never evaluated at the endpoints),
// the opposite sign holds at hi. Runs to adjacent doubles.
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

int idx(int k) { return ((k - 1) % 6 + 6) % 6; }

double log_gamma_half_shift(double nu) { return sf::ln_abs_gamma_signed(nu + 0.5).log_abs; }
double log_gamma_three_half_shift(double nu) { return sf::ln_abs_gamma_signed(1.5 - nu).log_abs; }

// ln(6 Gamma(nu+1/2)^2 2^{2(nu-1)}) and ln(6 Gamma(3/2-nu)^2 2^{-2nu})
double ln_ab1_const(double nu) { return std::log(6.0) + 2.0 * log_gamma_half_shift(nu) + 2.0 * (nu - 1.0) * std::log(2.0); }
double ln_ab2_const(double nu) { return std::log(6.0) + 2.0 * log_gamma_three_half_shift(nu) - 2.0 * nu * std::log(2.0); }

struct TypeOneArgs {
  double p1, p2, q1, q2;
};

TypeOneArgs type1_args(Family f, double nu, double mu) {
  if (f == Family::A) return {(1 + nu + mu) / 2, (1 + nu - mu) / 2, (2 - nu + mu) / 2, (2 - nu - mu) / 2};
  return {(nu + mu) / 2, (nu - mu) / 2, (1 - nu + mu) / 2, (1 - nu - mu) / 2};
}

bool nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

double ratio_constant(const Coupling& c) {
  return sf::gamma_ratio(c.nu() + 0.5, 1.5 - c.nu());
}

std::vector<double> ladder(int n_max, double mu_max, const std::function<double(int)>& at) {
  std::vector<double> out;
  for (int m = 0; static_cast<int>(out.size()) < n_max; ++m) {
    double mu = at(m);
    if (mu > mu_max) break;
    out.push_back(mu);
  }
  return out;
}

std::vector<double> real_type1_roots(Family f, const Coupling& c, const Rhs& rhs, Truncation t) {
  if (rhs.divergent) return ladder(t.max_levels, t.mu_max, [&](int m) { return type1_pole(f, c, m); });
  if (rhs.vanishing) return ladder(t.max_levels, t.mu_max, [&](int m) { return type1_zero(f, c, m); });
  auto g = [&](double mu) { return f_type1(f, c, MuValue::real(mu)) - rhs.value; };
  std::vector<double> roots;
  double g0 = g(0.0);
  if (g0 >= 0.0) {
    double r = g0 == 0.0 ? 0.0 : bisect(g, 0.0, type1_pole(f, c, 0), +1);
    if (r <= t.mu_max) roots.push_back(r);
  }
  for (int m = 0; static_cast<int>(roots.size()) < t.max_levels; ++m) {
    double lo = type1_pole(f, c, m);
    if (lo > t.mu_max) break;
    double r = bisect(g, lo, type1_pole(f, c, m + 1), +1);
    if (r > t.mu_max) break;
    roots.push_back(r);
  }
  return roots;
}

// The unique x > 0 with F(ix) = rhs, if F(0) < rhs.
std::optional<double> imaginary_type1_root(Family f, const Coupling& c, const Rhs& rhs) {
  if (rhs.divergent || rhs.vanishing) return std::nullopt;
  double f0 = f_type1(f, c, MuValue::real(0.0));
  if (!(f0 < rhs.value)) return std::nullopt;
  auto g = [&](double x) { return f_type1(f, c, MuValue::imaginary(x)) - rhs.value; };
  double p = 2.0 * c.nu() - 1.0;
  double hi = 2.0 * std::pow(std::max(rhs.value, 1.0), 1.0 / p);
  if (!std::isfinite(hi) || hi > 1e300) hi = 1e300;
  hi = std::max(hi, 1.0);
  int grow = 0;
  while (g(hi) <= 0.0) {
    if (++grow > 2000 || hi > 1e300) throw ConvergenceError("imaginary type-1 root: upper bracket not found");
    hi *= 2.0;
  }
  return bisect(g, 0.0, hi, -1);
}

Series type1_series(Family f, int sign) {
  if (f == Family::A) return sign > 0 ? Series::APlus : Series::AMinus;
  return sign > 0 ? Series::BPlus : Series::BMinus;
}

std::vector<AngularLevel> finish(std::vector<AngularLevel> levels, int max_levels) {
  std::stable_sort(levels.begin(), levels.end(), level_less);
  if (static_cast<int>(levels.size()) > max_levels) levels.resize(max_levels);
  return levels;
}

void require_non_separating(const ConnectionMatrix& U, const char* what) {
  if (U.is_separating()) throw DomainError(std::string(what) + ": requires a non-separating connection matrix");
}

double f2_coefficient_minus(const ConnectionMatrix& U, double nu) {
  return (std::cos(U.beta()) - std::cos(U.alpha())) / ((6.0 * nu - 3.0) * std::sin(U.beta()));
}
double f2_coefficient_plus(const ConnectionMatrix& U, double nu) {
  return (std::cos(U.beta()) + std::cos(U.alpha())) / ((6.0 * nu - 3.0) * std::sin(U.beta()));
}

// 2 pi x^{2s-1} e^{-pi x} / |Gamma(s + ix)|^2, tends to 1. The pi x terms are cancelled
// analytically for large x.
double sampled_k(double s, double x) {
  if (x < 10.0) {
    return std::exp(std::log(2.0 * kPi) + (2.0 * s - 1.0) * std::log(x) - kPi * x - 2.0 * sf::ln_abs_gamma(s, x));
  }
  const cplx z(s, x);
  const cplx w = 1.0 / z, w2 = w * w;
  double stirling = (w * (1.0 / 12.0 - w2 * (1.0 / 360.0 - w2 / 1260.0))).real();
  double ln_k = -(2.0 * s - 1.0) * 0.5 * std::log1p(s * s / (x * x)) - 2.0 * x * std::atan(s / x) + 2.0 * s -
                2.0 * stirling;
  return std::exp(ln_k);
}

// ln|Gamma(p + iy)|^2 - ln|Gamma(q + iy)|^2
double ln_modulus_ratio(double p, double q, double y) {
  if (y < 1e3) return 2.0 * (sf::ln_abs_gamma(p, y) - sf::ln_abs_gamma(q, y));
  auto b3 = [](double t) { return t * t * t - 1.5 * t * t + 0.5 * t; };
  return 2.0 * ((p - q) * std::log(y) + (b3(p) - b3(q)) / (6.0 * y * y));
}

// inf over t >= T of A + B t + C / t
double inf_bound(double A, double B, double C, double T) {
  if (B < 0.0) return -std::numeric_limits<double>::infinity();
  if (B == 0.0) return C >= 0.0 ? A : A + C / T;
  if (C <= 0.0) return A + B * T + C / T;
  double ts = std::sqrt(C / B);
  if (ts <= T) return A + B * T + C / T;
  return A + 2.0 * std::sqrt(B * C);
}

Mat2 scale(const Mat2& m, cplx s) {
  Mat2 r = m;
  for (auto& row : r)
    for (auto& v : row) v *= s;
  return r;
}

Mat2 add(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

double mat_norm(const Mat2& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (const auto& v : row) s += std::norm(v);
  return std::sqrt(s);
}

// D6 action on the 12 coefficients (C_+^1..C_+^6, C_-^1..C_-^6).
using Coeffs = std::array<cplx, 12>;

Coeffs act_rotation(const Coeffs& v) {
  Coeffs r;
  for (int k = 1; k <= 6; ++k) {
    r[idx(k)] = v[idx(k + 1)];
    r[6 + idx(k)] = v[6 + idx(k + 1)];
  }
  return r;
}

// reflection phi -> pi/3 - phi: sector k <-> 2 - k, eta_+ even, eta_- odd
Coeffs act_reflection(const Coeffs& v) {
  Coeffs r;
  for (int k = 1; k <= 6; ++k) {
    r[idx(k)] = v[idx(2 - k)];
    r[6 + idx(k)] = -v[6 + idx(2 - k)];
  }
  return r;
}

// exchange phi -> -phi: sector k <-> 1 - k
Coeffs act_exchange(const Coeffs& v) {
  Coeffs r;
  for (int k = 1; k <= 6; ++k) {
    r[idx(k)] = v[idx(1 - k)];
    r[6 + idx(k)] = -v[6 + idx(1 - k)];
  }
  return r;
}

cplx dot(const Coeffs& a, const Coeffs& b) {
  cplx s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

// ---------------------------------------------------------------- parameters

Coupling::Coupling(double nu) : nu_(nu) {
  if (!(nu > 0.5 && nu < 1.5) || nu == 1.0) {
    std::ostringstream os;
    os << "nu must lie in (1/2, 3/2) with nu != 1; got " << nu;
    throw DomainError(os.str());
  }
}

Coupling Coupling::oscillator_limit() { return Coupling(1.0, Unchecked{}); }

double canonical_angle(double t) {
  if (!std::isfinite(t)) throw DomainError("angle must be finite");
  double r = std::remainder(t, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

ConnectionMatrix::ConnectionMatrix(double alpha, double beta)
    : alpha_(canonical_angle(alpha)), beta_(canonical_angle(beta)) {}

ConnectionMatrix ConnectionMatrix::minus_identity() { return {kPi, 0.0}; }
ConnectionMatrix ConnectionMatrix::sigma1() { return {-kPi / 2, kPi / 2}; }
ConnectionMatrix ConnectionMatrix::minus_sigma1() { return {kPi / 2, kPi / 2}; }

cplx ConnectionMatrix::A() const { return std::polar(1.0, alpha_) * std::cos(beta_); }
cplx ConnectionMatrix::B() const { return cplx(0.0, 1.0) * std::polar(1.0, alpha_) * std::sin(beta_); }

Mat2 ConnectionMatrix::matrix() const {
  cplx a = A(), b = B();
  return Mat2{{{a, b}, {b, a}}};
}

bool ConnectionMatrix::is_separating() const { return std::abs(std::sin(beta_)) < kSeparatingTol; }

double ConnectionMatrix::separating_alpha() const {
  return std::cos(beta_) > 0.0 ? alpha_ : canonical_angle(alpha_ + kPi);
}

// ---------------------------------------------------------------- series bookkeeping

std::string_view series_name(Series s) {
  switch (s) {
    case Series::SepA: return "SepA";
    case Series::SepB: return "SepB";
    case Series::APlus: return "A+";
    case Series::AMinus: return "A-";
    case Series::BPlus: return "B+";
    case Series::BMinus: return "B-";
    case Series::Type2Plus: return "T2+";
    case Series::Type2Minus: return "T2-";
  }
  return "?";
}

Series series_from_name(std::string_view s) {
  for (Series x : {Series::SepA, Series::SepB, Series::APlus, Series::AMinus, Series::BPlus, Series::BMinus,
                   Series::Type2Plus, Series::Type2Minus})
    if (series_name(x) == s) return x;
  throw DomainError("unknown series tag: " + std::string(s));
}

bool is_type2(Series s) { return s == Series::Type2Plus || s == Series::Type2Minus; }

double re_tau(Series s) {
  switch (s) {
    case Series::APlus: return -1.0;
    case Series::AMinus: return 1.0;
    case Series::BPlus: return 1.0;
    case Series::BMinus: return -1.0;
    case Series::Type2Plus: return 0.5;
    case Series::Type2Minus: return -0.5;
    default: throw DomainError("separating levels carry no single rotation eigenvalue");
  }
}

std::vector<Rep> reps_of(Series s) {
  switch (s) {
    case Series::SepA: return {Rep::MinusPlus, Rep::MinusMinus, Rep::Defining, Rep::Twisted};
    case Series::SepB: return {Rep::PlusPlus, Rep::PlusMinus, Rep::Defining, Rep::Twisted};
    case Series::APlus: return {Rep::MinusPlus};
    case Series::AMinus: return {Rep::MinusMinus};
    case Series::BPlus: return {Rep::PlusPlus};
    case Series::BMinus: return {Rep::PlusMinus};
    case Series::Type2Plus: return {Rep::Defining};
    case Series::Type2Minus: return {Rep::Twisted};
  }
  return {};
}

int multiplicity_of(Series s) {
  if (s == Series::SepA || s == Series::SepB) return 6;
  return is_type2(s) ? 2 : 1;
}

AngularLevel make_level(MuValue mu, Series s) { return {mu, s, reps_of(s), multiplicity_of(s)}; }

bool level_less(const AngularLevel& a, const AngularLevel& b) {
  double la = a.mu.lambda(), lb = b.mu.lambda();
  if (la != lb) return la < lb;
  return a.series < b.series;
}

// ---------------------------------------------------------------- coefficient functions

AbCoeffs ab_coeffs(const Coupling& c, MuValue mu) {
  const double nu = c.nu();
  const double k1 = sf::gamma(nu + 0.5) * kSqrtPi;
  const double k2 = sf::gamma(1.5 - nu) * kSqrtPi;
  if (mu.is_real()) {
    double m = mu.value;
    return {k1 * sf::rgamma((nu + 1 + m) / 2) * sf::rgamma((nu + 1 - m) / 2),
            k2 * sf::rgamma((2 - nu + m) / 2) * sf::rgamma((2 - nu - m) / 2),
            6.0 * k1 * sf::rgamma((nu + m) / 2) * sf::rgamma((nu - m) / 2),
            6.0 * k2 * sf::rgamma((1 - nu + m) / 2) * sf::rgamma((1 - nu - m) / 2)};
  }
  double h = mu.value / 2;
  return {k1 * std::exp(-2.0 * sf::ln_abs_gamma((nu + 1) / 2, h)),
          k2 * std::exp(-2.0 * sf::ln_abs_gamma((2 - nu) / 2, h)),
          6.0 * k1 * std::exp(-2.0 * sf::ln_abs_gamma(nu / 2, h)),
          6.0 * k2 * std::exp(-2.0 * sf::ln_abs_gamma((1 - nu) / 2, h))};
}

double v1(const Coupling& c, MuValue mu, double phi) {
  double s = std::abs(std::sin(3.0 * phi));
  if (c.is_oscillator_limit()) {
    if (mu.is_real()) return mu.value == 0.0 ? 3.0 * phi : std::sin(3.0 * mu.value * phi) / mu.value;
    return std::sinh(3.0 * mu.value * phi) / mu.value;
  }
  const double nu = c.nu();
  cplx m = mu.complex();
  double cs = std::cos(3.0 * phi);
  return std::pow(s, nu) * sf::gauss_2f1((nu - m) / 2.0, (nu + m) / 2.0, nu + 0.5, std::min(s * s, 1.0), cs * cs).real();
}

double v2(const Coupling& c, MuValue mu, double phi) {
  double s = std::abs(std::sin(3.0 * phi));
  if (c.is_oscillator_limit()) {
    if (mu.is_real()) return std::cos(3.0 * mu.value * phi);
    return std::cosh(3.0 * mu.value * phi);
  }
  const double nu = c.nu();
  cplx m = mu.complex();
  double cs = std::cos(3.0 * phi);
  return std::pow(s, 1.0 - nu) *
         sf::gauss_2f1((1 - nu - m) / 2.0, (1 - nu + m) / 2.0, 1.5 - nu, std::min(s * s, 1.0), cs * cs).real();
}

double f_type1(Family f, const Coupling& c, MuValue mu) {
  const double nu = c.nu();
  if (!mu.is_real()) {
    TypeOneArgs r = type1_args(f, nu, 0.0);
    return std::exp(ln_modulus_ratio(r.p1, r.q1, mu.value / 2));
  }
  TypeOneArgs r = type1_args(f, nu, mu.value);
  if (nonpositive_integer(r.p1) || nonpositive_integer(r.p2))
    throw PoleError(std::string("f_type1: pole of F_") + (f == Family::A ? "A" : "B"));
  if (nonpositive_integer(r.q1) || nonpositive_integer(r.q2)) return 0.0;
  sf::SignedLog a = sf::ln_abs_gamma_signed(r.p1), b = sf::ln_abs_gamma_signed(r.p2);
  sf::SignedLog d = sf::ln_abs_gamma_signed(r.q1), e = sf::ln_abs_gamma_signed(r.q2);
  return a.sign * b.sign * d.sign * e.sign * std::exp(a.log_abs + b.log_abs - d.log_abs - e.log_abs);
}

double type1_pole(Family f, const Coupling& c, int m) {
  return f == Family::A ? c.nu() + 1.0 + 2.0 * m : c.nu() + 2.0 * m;
}

double type1_zero(Family f, const Coupling& c, int m) {
  return f == Family::A ? 2.0 - c.nu() + 2.0 * m : std::abs(1.0 - c.nu() + 2.0 * m);
}

namespace {
Rhs rhs_from_angle(const Coupling& c, double theta) {
  Rhs r;
  if (std::abs(std::cos(theta)) < kTanTol) {
    r.divergent = true;
    r.value = std::numeric_limits<double>::infinity();
    return r;
  }
  if (std::abs(std::sin(theta)) < kTanTol) {
    r.vanishing = true;
    return r;
  }
  r.value = ratio_constant(c) * std::tan(theta);
  return r;
}
}  // namespace

Rhs rhs_type1(const Coupling& c, const ConnectionMatrix& U, int sign) {
  return rhs_from_angle(c, (U.alpha() + (sign > 0 ? U.beta() : -U.beta())) / 2.0);
}

Rhs rhs_separating(const Coupling& c, double alpha) { return rhs_from_angle(c, canonical_angle(alpha) / 2.0); }

double f2(const Coupling& c, const ConnectionMatrix& U, MuValue mu) {
  require_non_separating(U, "f2");
  const double nu = c.nu();
  double lead = std::sin(U.alpha()) / std::sin(U.beta()) / sf::cos_pi(nu);
  double ab1, ab2, cosine;
  if (mu.is_real()) {
    double m = mu.value;
    cosine = sf::cos_pi(m);
    ab1 = std::exp(ln_ab1_const(nu)) * sf::rgamma(nu + m) * sf::rgamma(nu - m);
    ab2 = std::exp(ln_ab2_const(nu)) * sf::rgamma(1 - nu + m) * sf::rgamma(1 - nu - m);
  } else {
    double x = mu.value;
    cosine = std::cosh(kPi * x);
    ab1 = std::exp(ln_ab1_const(nu) - 2.0 * sf::ln_abs_gamma(nu, x));
    ab2 = std::exp(ln_ab2_const(nu) - 2.0 * sf::ln_abs_gamma(1 - nu, x));
  }
  return lead * cosine + f2_coefficient_minus(U, nu) * ab1 + f2_coefficient_plus(U, nu) * ab2;
}

double f2_scaled_imaginary(const Coupling& c, const ConnectionMatrix& U, double x) {
  require_non_separating(U, "f2");
  const double nu = c.nu();
  double lead = std::sin(U.alpha()) / std::sin(U.beta()) / sf::cos_pi(nu) * 0.5 * (1.0 + std::exp(-2.0 * kPi * x));
  double ab1 = std::exp(ln_ab1_const(nu) - 2.0 * sf::ln_abs_gamma(nu, x) - kPi * x);
  double ab2 = std::exp(ln_ab2_const(nu) - 2.0 * sf::ln_abs_gamma(1 - nu, x) - kPi * x);
  return lead + f2_coefficient_minus(U, nu) * ab1 + f2_coefficient_plus(U, nu) * ab2;
}

double F2Decomposition::scaled() const {
  return kappa0 * K0 + kappa_minus * std::pow(x, 1.0 - 2.0 * nu) * K_minus +
         kappa_plus * std::pow(x, 2.0 * nu - 1.0) * K_plus;
}

double F2Decomposition::value() const { return std::exp(kPi * x) * scaled(); }

F2Decomposition f2_decomposition(const Coupling& c, const ConnectionMatrix& U, double x) {
  require_non_separating(U, "f2_decomposition");
  if (!(x > 0.0)) throw DomainError("f2_decomposition: x must be positive");
  const double nu = c.nu();
  const double sb = std::sin(U.beta());
  const double ca = std::cos(U.alpha()), cb = std::cos(U.beta());
  F2Decomposition d;
  d.x = x;
  d.nu = nu;
  d.kappa0 = std::sin(U.alpha()) / (2.0 * sf::cos_pi(nu) * sb);
  double gm = sf::gamma(nu + 0.5), gp = sf::gamma(1.5 - nu);
  d.kappa_minus = gm * gm * std::pow(2.0, 2.0 * (nu - 1.0)) / (kPi * (2.0 * nu - 1.0)) * (cb - ca) / sb;
  d.kappa_plus = gp * gp * std::pow(2.0, -2.0 * nu) / (kPi * (2.0 * nu - 1.0)) * (cb + ca) / sb;
  d.K0 = 1.0 + std::exp(-2.0 * kPi * x);
  d.K_minus = sampled_k(nu, x);
  d.K_plus = sampled_k(1.0 - nu, x);
  return d;
}

// ---------------------------------------------------------------- solvers

std::vector<AngularLevel> solve_type1(const Coupling& c, const ConnectionMatrix& U, Family f, int sign, int n_levels) {
  if (n_levels < 1) throw DomainError("solve_type1: n_levels must be at least 1");
  return solve_type1(c, U, f, sign, Truncation{n_levels});
}

std::vector<AngularLevel> solve_type1(const Coupling& c, const ConnectionMatrix& U, Family f, int sign, Truncation t) {
  require_non_separating(U, "solve_type1");
  Rhs rhs = rhs_type1(c, U, sign);
  Series s = type1_series(f, sign);
  std::vector<AngularLevel> out;
  if (auto x = imaginary_type1_root(f, c, rhs)) out.push_back(make_level(MuValue::imaginary(*x), s));
  for (double mu : real_type1_roots(f, c, rhs, t)) out.push_back(make_level(MuValue::real(mu), s));
  return finish(std::move(out), t.max_levels);
}

std::vector<AngularLevel> separating_spectrum(const Coupling& c, double alpha, int n_levels) {
  if (n_levels < 1) throw DomainError("separating_spectrum: n_levels must be at least 1");
  return separating_spectrum(c, alpha, Truncation{n_levels});
}

std::vector<AngularLevel> separating_spectrum(const Coupling& c, double alpha, Truncation t) {
  Rhs rhs = rhs_separating(c, alpha);
  std::vector<AngularLevel> out;
  for (Family f : {Family::A, Family::B}) {
    Series s = f == Family::A ? Series::SepA : Series::SepB;
    if (auto x = imaginary_type1_root(f, c, rhs)) out.push_back(make_level(MuValue::imaginary(*x), s));
    for (double mu : real_type1_roots(f, c, rhs, t)) out.push_back(make_level(MuValue::real(mu), s));
  }
  return finish(std::move(out), t.max_levels);
}

std::vector<AngularLevel> solve_type2(const Coupling& c, const ConnectionMatrix& U, double re_tau_value, int n_levels) {
  if (n_levels < 1) throw DomainError("solve_type2: n_levels must be at least 1");
  return solve_type2(c, U, re_tau_value, Truncation{n_levels});
}

std::vector<AngularLevel> solve_type2(const Coupling& c, const ConnectionMatrix& U, double re_tau_value, Truncation t) {
  require_non_separating(U, "solve_type2");
  if (std::abs(std::abs(re_tau_value) - 0.5) > 1e-15) throw DomainError("solve_type2: re_tau must be +1/2 or -1/2");
  const Series s = re_tau_value > 0 ? Series::Type2Plus : Series::Type2Minus;
  std::vector<AngularLevel> out;
  for (double x : type2_imaginary_scan(c, U, re_tau_value).roots) out.push_back(make_level(MuValue::imaginary(x), s));

  auto g = [&](double mu) { return f2(c, U, MuValue::real(mu)) - re_tau_value; };
  const double coarse = 1e-2, window = 2e-2;
  const int subdivisions = 100;
  const bool bounded = std::isfinite(t.mu_max);
  const double limit = bounded ? t.mu_max : 4.0 * t.max_levels + 20.0;
  const int wanted = t.max_levels - static_cast<int>(out.size());
  int found = 0;
  double mu = 0.0;
  double gv = g(mu);
  if (gv == 0.0) {
    out.push_back(make_level(MuValue::real(0.0), s));
    ++found;
  }
  while (mu < limit && found < wanted) {
    double next = mu + coarse;
    double d = std::abs(std::remainder(mu + 0.5 * coarse + c.nu(), 1.0));
    int sub = d < window + coarse ? subdivisions : 1;
    double prev = mu;
    for (int i = 1; i <= sub && found < wanted; ++i) {
      double xk = i == sub ? next : mu + coarse * i / sub;
      double gk = g(xk);
      double root = std::numeric_limits<double>::quiet_NaN();
      if (gk == 0.0) root = xk;
      else if ((gv < 0.0 && gk > 0.0) || (gv > 0.0 && gk < 0.0)) root = bisect(g, prev, xk, gv > 0.0 ? 1 : -1);
      if (!std::isnan(root) && root <= limit) {
        out.push_back(make_level(MuValue::real(root), s));
        ++found;
      }
      prev = xk;
      gv = gk;
    }
    mu = next;
  }
  if (!bounded && found < wanted)
    throw ConvergenceError("solve_type2: fewer real roots than requested in the scanned range");
  return finish(std::move(out), t.max_levels);
}

ImaginaryScan certified_cutoff(const Coupling& c, const ConnectionMatrix& U) {
  require_non_separating(U, "certified_cutoff");
  const double nu = c.nu();
  F2Decomposition d = f2_decomposition(c, U, 1.0);
  const double p = 2.0 * nu - 1.0;
  ImaginaryScan out;
  for (double X = 10.0; X <= 320.0; X *= 2.0) {
    double km_lo = 1.0, km_hi = 1.0, kp_lo = 1.0, kp_hi = 1.0;
    for (int j = 0; j <= 60; ++j) {
      double x = X * std::ldexp(1.0, j);
      double km = sampled_k(nu, x), kp = sampled_k(1.0 - nu, x);
      km_lo = std::min(km_lo, km);
      km_hi = std::max(km_hi, km);
      kp_lo = std::min(kp_lo, kp);
      kp_hi = std::max(kp_hi, kp);
    }
    const double margin = 1e-9;
    km_lo *= 1.0 - margin;
    kp_lo *= 1.0 - margin;
    km_hi *= 1.0 + margin;
    kp_hi *= 1.0 + margin;
    const double k0_lo = 1.0, k0_hi = 1.0 + std::exp(-2.0 * kPi * X);
    auto pick = [](double kappa, double lo, double hi, bool lower) { return kappa * ((kappa >= 0.0) == lower ? lo : hi); };
    const double T = std::pow(X, p);
    double lower = inf_bound(pick(d.kappa0, k0_lo, k0_hi, true), pick(d.kappa_plus, kp_lo, kp_hi, true),
                             pick(d.kappa_minus, km_lo, km_hi, true), T);
    double upper = -inf_bound(-pick(d.kappa0, k0_lo, k0_hi, false), -pick(d.kappa_plus, kp_lo, kp_hi, false),
                              -pick(d.kappa_minus, km_lo, km_hi, false), T);
    bool ok = (lower > 0.0 && std::log(lower) + kPi * X > 0.0) || (upper < 0.0 && std::log(-upper) + kPi * X > 0.0);
    if (ok) {
      out.x_max = X;
      out.certified = true;
      return out;
    }
  }
  out.x_max = 320.0;
  out.certified = false;
  return out;
}

ImaginaryScan type2_imaginary_scan(const Coupling& c, const ConnectionMatrix& U, double re_tau_value) {
  ImaginaryScan scan = certified_cutoff(c, U);
  auto h = [&](double x) { return f2_scaled_imaginary(c, U, x) - re_tau_value * std::exp(-kPi * x); };
  double x = 0.0;
  double hv = h(x);
  while (x < scan.x_max) {
    double step = x < 2.0 ? 1e-3 : (x < 20.0 ? 1e-2 : 1e-3 * x);
    double xn = std::min(x + step, scan.x_max);
    double hn = h(xn);
    if (hn == 0.0) scan.roots.push_back(xn);
    else if ((hv < 0.0 && hn > 0.0) || (hv > 0.0 && hn < 0.0)) scan.roots.push_back(bisect(h, x, xn, hv > 0.0 ? 1 : -1));
    x = xn;
    hv = hn;
  }
  return scan;
}

// ---------------------------------------------------------------- explicit cases

std::string_view case_name(ExplicitCase e) {
  switch (e) {
    case ExplicitCase::DirichletMinusOne: return "dirichlet";
    case ExplicitCase::NeumannPlusOne: return "neumann";
    case ExplicitCase::FreeSigma1: return "free";
    case ExplicitCase::MinusSigma1: return "minus_sigma1";
  }
  return "?";
}

ExplicitCase case_from_name(std::string_view s) {
  for (ExplicitCase e : {ExplicitCase::DirichletMinusOne, ExplicitCase::NeumannPlusOne, ExplicitCase::FreeSigma1,
                         ExplicitCase::MinusSigma1})
    if (case_name(e) == s) return e;
  throw DomainError("unknown case '" + std::string(s) + "' (expected dirichlet, neumann, free or minus_sigma1)");
}

ConnectionMatrix connection_of(ExplicitCase e) {
  switch (e) {
    case ExplicitCase::DirichletMinusOne: return ConnectionMatrix::minus_identity();
    case ExplicitCase::NeumannPlusOne: return ConnectionMatrix::identity();
    case ExplicitCase::FreeSigma1: return ConnectionMatrix::sigma1();
    case ExplicitCase::MinusSigma1: return ConnectionMatrix::minus_sigma1();
  }
  return ConnectionMatrix::identity();
}

double delta_nu(double nu) { return std::acos(sf::cos_pi(nu) / 2.0) / kPi; }

std::vector<AngularLevel> explicit_spectrum(ExplicitCase e, const Coupling& c, int n_levels) {
  if (n_levels < 1) throw DomainError("explicit_spectrum: n_levels must be at least 1");
  return explicit_spectrum(e, c, Truncation{n_levels});
}

std::vector<AngularLevel> explicit_spectrum(ExplicitCase e, const Coupling& c, Truncation t) {
  const double nu = c.nu();
  const double dl = delta_nu(nu);
  using Ladder = std::function<double(int)>;
  const Ladder odd_nu = [nu](int n) { return 2.0 * n + 1.0 + nu; };
  const Ladder odd_conj = [nu](int n) { return 2.0 * n + 2.0 - nu; };
  const Ladder even_nu = [nu](int n) { return 2.0 * n + nu; };
  const Ladder even_conj = [nu](int n) { return std::abs(2.0 * n + 1.0 - nu); };
  // merged type-2 ladders: {2n+1-D, 2n+1+D} and {2n+D, 2n+2-D}
  const Ladder odd_delta = [dl](int k) { return 2.0 * (k / 2) + 1.0 + (k % 2 == 0 ? -dl : dl); };
  const Ladder even_delta = [dl](int k) { return 2.0 * (k / 2) + (k % 2 == 0 ? dl : 2.0 - dl); };

  std::vector<std::pair<Series, Ladder>> parts;
  switch (e) {
    case ExplicitCase::DirichletMinusOne:
      parts = {{Series::SepA, odd_nu}, {Series::SepB, even_nu}};
      break;
    case ExplicitCase::NeumannPlusOne:
      parts = {{Series::SepA, odd_conj}, {Series::SepB, even_conj}};
      break;
    case ExplicitCase::FreeSigma1:
      parts = {{Series::AMinus, odd_nu},       {Series::BPlus, even_conj},       {Series::BMinus, even_nu},
               {Series::APlus, odd_conj},      {Series::Type2Plus, odd_delta},   {Series::Type2Minus, even_delta}};
      break;
    case ExplicitCase::MinusSigma1:
      parts = {{Series::APlus, odd_nu},        {Series::BMinus, even_conj},      {Series::BPlus, even_nu},
               {Series::AMinus, odd_conj},     {Series::Type2Plus, even_delta},  {Series::Type2Minus, odd_delta}};
      break;
  }
  std::vector<AngularLevel> out;
  for (const auto& [s, at] : parts)
    for (double mu : ladder(t.max_levels, t.mu_max, at)) out.push_back(make_level(MuValue::real(mu), s));
  return finish(std::move(out), t.max_levels);
}

// ---------------------------------------------------------------- transport

Mat2 mat_mul(const Mat2& a, const Mat2& b) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

Mat2 mat_identity() { return Mat2{{{1.0, 0.0}, {0.0, 1.0}}}; }

double mat_dist(const Mat2& a, const Mat2& b) { return mat_norm(add(a, scale(b, -1.0))); }

TransportMatrix transport_matrix(const Coupling& c, const ConnectionMatrix& U, MuValue mu) {
  require_non_separating(U, "transport_matrix");
  AbCoeffs ab = ab_coeffs(c, mu);
  const cplx a(ab.a1, ab.a2), b(ab.b1, ab.b2);
  const cplx ac = std::conj(a), bc = std::conj(b);
  const cplx A = U.A(), B = U.B();
  TransportMatrix t;
  t.n_plus = Mat2{{{b - bc * A, a - ac * A}, {-bc * B, -ac * B}}};
  t.n_minus = Mat2{{{bc * B, -ac * B}, {-b + bc * A, a - ac * A}}};
  t.det_n_plus = cplx(0.0, -2.0) * (3.0 - 6.0 * c.nu()) * B;
  t.x = -ac * bc * B * B + (ac * A - a) * (bc * A - b);
  t.y = ac * ac * B * B - (ac * A - a) * (ac * A - a);
  t.z = bc * bc * B * B - (bc * A - b) * (bc * A - b);
  t.T = Mat2{{{t.x / t.det_n_plus, t.y / t.det_n_plus}, {t.z / t.det_n_plus, t.x / t.det_n_plus}}};
  if (!c.is_oscillator_limit()) {
    double scale2 = std::norm(a) + std::norm(b);
    if (std::abs(t.y) < 1e-14 * scale2 && std::abs(t.z) < 1e-14 * scale2) {
      std::ostringstream os;
      os << "transport_matrix: y and z vanish simultaneously at nu=" << c.nu() << " mu=" << mu.value
         << " alpha=" << U.alpha() << " beta=" << U.beta();
      throw ConvergenceError(os.str());
    }
  }
  return t;
}

Mat2 projector(cplx tau, const TransportMatrix& T) {
  Mat2 sum{};
  Mat2 power = mat_identity();
  cplx w = 1.0;
  for (int k = 1; k <= 6; ++k) {
    power = mat_mul(power, T.T);
    w *= std::conj(tau);
    sum = add(sum, scale(power, w));
  }
  Mat2 p = scale(sum, 1.0 / 6.0);
  if (mat_dist(mat_mul(p, p), p) > 1e-9 * std::max(1.0, mat_norm(p)))
    throw DomainError("projector: tau is not an eigenvalue of the transport matrix");
  return p;
}

Mat2 projector_closed_form(cplx tau, const TransportMatrix& T) {
  const cplx f = cplx(0.0, -2.0) * tau.imag() / (3.0 * T.det_n_plus);
  return Mat2{{{0.5, f * T.y}, {f * T.z, 0.5}}};
}

// ---------------------------------------------------------------- eigenfunctions

AngularEigenfunction::AngularEigenfunction(const Coupling& c, MuValue mu, std::array<cplx, 6> c_plus,
                                           std::array<cplx, 6> c_minus)
    : coupling_(c), mu_(mu), ab_(ab_coeffs(c, mu)), c_plus_(c_plus), c_minus_(c_minus) {}

cplx AngularEigenfunction::operator()(double phi) const {
  double t = std::fmod(phi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  int k = std::min(5, static_cast<int>(std::floor(t / kSectorWidth)));
  double local = t - k * kSectorWidth;
  if (local <= 0.0 || local >= kSectorWidth) throw DomainError("angular eigenfunction evaluated at a singular point");
  bool first_half = local <= kSectorWidth / 2.0;
  double h = first_half ? local : kSectorWidth - local;
  double w1 = v1(coupling_, mu_, h), w2 = v2(coupling_, mu_, h);
  double ep = ab_.b2 * w1 - ab_.b1 * w2;
  double em = (first_half ? 1.0 : -1.0) * (ab_.a2 * w1 - ab_.a1 * w2);
  return c_plus_[k] * ep + c_minus_[k] * em;
}

double AngularEigenfunction::l2_norm() const {
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto ip = integrator.integrate([&](double h) {
    double e = ab_.b2 * v1(coupling_, mu_, h) - ab_.b1 * v2(coupling_, mu_, h);
    return e * e;
  }, 0.0, kSectorWidth / 2.0);
  auto im = integrator.integrate([&](double h) {
    double e = ab_.a2 * v1(coupling_, mu_, h) - ab_.a1 * v2(coupling_, mu_, h);
    return e * e;
  }, 0.0, kSectorWidth / 2.0);
  double sp = 0.0, sm = 0.0;
  for (int k = 0; k < 6; ++k) {
    sp += std::norm(c_plus_[k]);
    sm += std::norm(c_minus_[k]);
  }
  return std::sqrt(2.0 * (sp * ip + sm * im));
}

AngularEigenfunction build_eigenfunction(const AngularLevel& level, const Coupling& c, const ConnectionMatrix& U,
                                         int which) {
  std::array<cplx, 6> cp{}, cm{};
  AbCoeffs ab = ab_coeffs(c, level.mu);
  if (!std::isfinite(ab.a1) || !std::isfinite(ab.a2) || !std::isfinite(ab.b1) || !std::isfinite(ab.b2))
    throw ConvergenceError("build_eigenfunction: sector coefficients overflow at this eigenvalue");
  auto alternating = [](int k) { return k % 2 == 0 ? 1.0 : -1.0; };
  switch (level.series) {
    case Series::SepA:
    case Series::SepB:
      if (which < 0 || which > 5) throw DomainError("build_eigenfunction: sector index must be 0..5");
      (level.series == Series::SepA ? cm : cp)[which] = 1.0;
      break;
    case Series::APlus:
      for (int k = 0; k < 6; ++k) cm[k] = alternating(k);
      break;
    case Series::AMinus:
      cm.fill(1.0);
      break;
    case Series::BPlus:
      cp.fill(1.0);
      break;
    case Series::BMinus:
      for (int k = 0; k < 6; ++k) cp[k] = alternating(k);
      break;
    case Series::Type2Plus:
    case Series::Type2Minus: {
      const double re = re_tau(level.series);
      const cplx tau(re, (which == 0 ? 1.0 : -1.0) * std::sqrt(3.0) / 2.0);
      TransportMatrix T = transport_matrix(c, U, level.mu);
      // closed form: the power sum loses ~|T|^6 eps for imaginary mu
      Mat2 P = projector_closed_form(tau, T);
      std::array<cplx, 2> seed = {P[0][0], P[1][0]};
      if (std::abs(seed[1]) < 1e-8 * std::abs(seed[0])) seed = {P[0][1], P[1][1]};
      double nt = mat_norm(T.T), ns = std::hypot(std::abs(seed[0]), std::abs(seed[1]));
      cplx r0 = T.T[0][0] * seed[0] + T.T[0][1] * seed[1] - tau * seed[0];
      cplx r1 = T.T[1][0] * seed[0] + T.T[1][1] * seed[1] - tau * seed[1];
      if (!(ns > 0.0) || !std::isfinite(ns)) throw DomainError("build_eigenfunction: projected eigenvector vanishes");
      if (std::hypot(std::abs(r0), std::abs(r1)) > 1e-8 * nt * ns)
        throw DomainError("build_eigenfunction: tau is not an eigenvalue of the transport matrix");
      cplx w = 1.0;
      for (int k = 0; k < 6; ++k) {
        cp[k] = w * seed[0];
        cm[k] = w * seed[1];
        w *= tau;
      }
      break;
    }
  }
  return AngularEigenfunction(c, level.mu, cp, cm);
}

BoundaryVectors boundary_vectors(const AngularEigenfunction& psi) {
  const double nu = psi.coupling().nu();
  const double s = std::sqrt(3.0 * (2.0 * nu - 1.0));
  const AbCoeffs& ab = psi.ab();
  BoundaryVectors out;
  for (int j = 0; j < 6; ++j) {
    // sector on the right of theta = j pi/3 is j+1, on the left j (cyclically)
    cplx pr = psi.c_plus(j + 1), mr = psi.c_minus(j + 1);
    cplx pl = psi.c_plus(j == 0 ? 6 : j), ml = psi.c_minus(j == 0 ? 6 : j);
    std::array<cplx, 2> b = {s * (-pr * ab.b1 - mr * ab.a1), s * (-pl * ab.b1 + ml * ab.a1)};
    std::array<cplx, 2> bp = {s * (pr * ab.b2 + mr * ab.a2), s * (pl * ab.b2 - ml * ab.a2)};
    if (j % 2 == 1) {
      std::swap(b[0], b[1]);
      std::swap(bp[0], bp[1]);
    }
    out.B[j] = b;
    out.Bp[j] = bp;
  }
  return out;
}

double boundary_residual(const AngularEigenfunction& psi, const Coupling&, const ConnectionMatrix& U) {
  BoundaryVectors bv = boundary_vectors(psi);
  Mat2 u = U.matrix();
  const cplx I(0.0, 1.0);
  double worst = 0.0, scale_v = 0.0;
  for (int j = 0; j < 6; ++j) {
    const auto& b = bv.B[j];
    const auto& bp = bv.Bp[j];
    std::array<cplx, 2> r;
    for (int i = 0; i < 2; ++i) {
      cplx ub = u[i][0] * b[0] + u[i][1] * b[1];
      cplx ubp = u[i][0] * bp[0] + u[i][1] * bp[1];
      r[i] = (ub - b[i]) + I * (ubp + bp[i]);
    }
    worst = std::max(worst, std::hypot(std::abs(r[0]), std::abs(r[1])));
    scale_v = std::max(scale_v, std::hypot(std::abs(b[0]), std::abs(b[1])) + std::hypot(std::abs(bp[0]), std::abs(bp[1])));
  }
  if (scale_v == 0.0) throw DomainError("boundary_residual: eigenfunction has vanishing boundary data");
  return worst / scale_v;
}

std::vector<Rep> classify(const AngularEigenfunction& psi) {
  Coeffs v{};
  for (int k = 0; k < 6; ++k) {
    v[k] = psi.c_plus()[k];
    v[6 + k] = psi.c_minus()[k];
  }
  // orbit of psi under the 12 group elements, orthonormalised
  std::vector<Coeffs> basis;
  auto absorb = [&](Coeffs w) {
    for (const auto& b : basis) {
      cplx p = dot(b, w);
      for (size_t i = 0; i < w.size(); ++i) w[i] -= p * b[i];
    }
    double n = std::sqrt(std::abs(dot(w, w)));
    if (n > 1e-8) {
      for (auto& x : w) x /= n;
      basis.push_back(w);
    }
  };
  double n0 = std::sqrt(std::abs(dot(v, v)));
  if (n0 == 0.0) throw DomainError("classify: zero eigenfunction");
  for (auto& x : v) x /= n0;
  Coeffs r = v;
  for (int k = 0; k < 6; ++k) {
    absorb(r);
    absorb(act_reflection(r));
    r = act_rotation(r);
  }
  auto trace = [&](auto&& act) {
    cplx t = 0.0;
    for (const auto& b : basis) t += dot(b, act(b));
    return static_cast<int>(std::lround(t.real()));
  };
  symmetry::CharacterVector chi = {
      static_cast<int>(basis.size()),
      trace([](const Coeffs& w) { return act_reflection(w); }),
      trace([](const Coeffs& w) { return act_exchange(w); }),
      trace([](const Coeffs& w) { return act_rotation(w); }),
      trace([](const Coeffs& w) { return act_rotation(act_rotation(w)); }),
      trace([](const Coeffs& w) { return act_rotation(act_rotation(act_rotation(w))); }),
  };
  std::vector<Rep> out;
  for (const auto& [rep, m] : symmetry::decompose(chi))
    for (int i = 0; i < m; ++i) out.push_back(rep);
  return out;
}

// ---------------------------------------------------------------- permissibility

PermissibilityReport permissibility(const Coupling& c, const ConnectionMatrix& U) {
  PermissibilityReport rep;
  if (U.is_separating()) {
    Rhs rhs = rhs_separating(c, U.separating_alpha());
    for (Family f : {Family::A, Family::B}) {
      if (auto x = imaginary_type1_root(f, c, rhs)) {
        rep.negative_levels.push_back(make_level(MuValue::imaginary(*x), f == Family::A ? Series::SepA : Series::SepB));
        rep.criteria_fired.push_back(f == Family::A ? "separating-imaginary:A" : "separating-imaginary:B");
      }
    }
  } else {
    for (Family f : {Family::A, Family::B}) {
      for (int sign : {+1, -1}) {
        Rhs rhs = rhs_type1(c, U, sign);
        if (auto x = imaginary_type1_root(f, c, rhs)) {
          Series s = type1_series(f, sign);
          rep.negative_levels.push_back(make_level(MuValue::imaginary(*x), s));
          rep.criteria_fired.push_back("type1-imaginary:" + std::string(series_name(s)));
        }
      }
    }
    bool fired = false;
    for (double rt : {0.5, -0.5}) {
      ImaginaryScan scan = type2_imaginary_scan(c, U, rt);
      if (!scan.certified) {
        std::ostringstream os;
        os << "type-2 imaginary scan: cutoff not certified, scanned up to x = " << scan.x_max;
        if (std::find(rep.diagnostics.begin(), rep.diagnostics.end(), os.str()) == rep.diagnostics.end())
          rep.diagnostics.push_back(os.str());
      }
      for (double x : scan.roots) {
        rep.negative_levels.push_back(make_level(MuValue::imaginary(x), rt > 0 ? Series::Type2Plus : Series::Type2Minus));
        fired = true;
      }
    }
    if (fired) rep.criteria_fired.push_back("type2-imaginary-scan");
  }
  std::stable_sort(rep.negative_levels.begin(), rep.negative_levels.end(), level_less);
  rep.permissible = rep.negative_levels.empty();
  return rep;
}

}  // namespace calogero::angular
