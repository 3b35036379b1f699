#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "calogero/angular.hpp"
#include "calogero/errors.hpp"
#include "doctest.h"

using namespace calogero;
using namespace calogero::angular;
using symmetry::Rep;

namespace {

constexpr double pi = std::numbers::pi;
using cd = std::complex<double>;

// |Gamma(p + iy)|^2 / |Gamma(q + iy)|^2 by the Weierstrass product, independent of the library.
double gamma_modulus_ratio(double p, double q, double y) {
  double r = std::pow(std::tgamma(p) / std::tgamma(q), 2);
  for (int n = 0; n < 200000; ++n) r *= (1.0 + y * y / ((q + n) * (q + n))) / (1.0 + y * y / ((p + n) * (p + n)));
  return r;
}

double fa_imag_oracle(double nu, double x) { return gamma_modulus_ratio((1 + nu) / 2, (2 - nu) / 2, x / 2); }

// a1, a2, b1, b2 straight from tgamma, real mu
std::array<double, 4> ab_oracle(double nu, double mu) {
  double k1 = std::tgamma(nu + 0.5) * std::sqrt(pi), k2 = std::tgamma(1.5 - nu) * std::sqrt(pi);
  auto rg = [](double x) { return (x <= 0 && x == std::floor(x)) ? 0.0 : 1.0 / std::tgamma(x); };
  return {k1 * rg((nu + 1 + mu) / 2) * rg((nu + 1 - mu) / 2), k2 * rg((2 - nu + mu) / 2) * rg((2 - nu - mu) / 2),
          6 * k1 * rg((nu + mu) / 2) * rg((nu - mu) / 2), 6 * k2 * rg((1 - nu + mu) / 2) * rg((1 - nu - mu) / 2)};
}

// all sign changes of g on (lo, hi) with step h, refined by bisection
template <class G>
std::vector<double> scan_roots(G g, double lo, double hi, double h) {
  std::vector<double> out;
  double x0 = lo, g0 = g(lo);
  for (double x = lo + h; x <= hi + 1e-15; x += h) {
    double g1 = g(x);
    if (g0 == 0.0) out.push_back(x0);
    else if (g0 * g1 < 0) {
      double a = x0, b = x;
      for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (a + b);
        if ((g(m) > 0) == (g0 > 0)) a = m;
        else b = m;
      }
      out.push_back(0.5 * (a + b));
    }
    x0 = x;
    g0 = g1;
  }
  return out;
}

// F_2 assembled from individual coefficients and the Wronskian-sum form of cos(pi mu)/cos(pi nu)
double f2_oracle(double nu, double alpha, double beta, double mu) {
  auto [a1, a2, b1, b2] = ab_oracle(nu, mu);
  double sb = std::sin(beta);
  return std::sin(alpha) / sb * (a1 * b2 + b1 * a2) / (3 - 6 * nu) +
         (std::cos(beta) - std::cos(alpha)) / ((6 * nu - 3) * sb) * a1 * b1 +
         (std::cos(beta) + std::cos(alpha)) / ((6 * nu - 3) * sb) * a2 * b2;
}

Mat2 inverse(const Mat2& m) {
  cd d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return Mat2{{{m[1][1] / d, -m[0][1] / d}, {-m[1][0] / d, m[0][0] / d}}};
}

std::vector<double> mus(const std::vector<AngularLevel>& v) {
  std::vector<double> out;
  for (const auto& l : v) out.push_back(l.mu.value);
  return out;
}

}  // namespace

TEST_CASE("coupling and connection matrix") {
  CHECK_THROWS_AS(Coupling(1.0), DomainError);
  CHECK_THROWS_AS(Coupling(0.5), DomainError);
  CHECK_THROWS_AS(Coupling(1.5), DomainError);
  CHECK(Coupling(0.8).g() == doctest::Approx(2 * 0.8 * -0.2));
  CHECK(Coupling::oscillator_limit().nu() == 1.0);

  ConnectionMatrix u(0.3 + 2 * pi, 1.0 - 4 * pi);
  CHECK(u.alpha() == doctest::Approx(0.3));
  CHECK(u.beta() == doctest::Approx(1.0));
  CHECK(ConnectionMatrix(-pi, 0).alpha() == doctest::Approx(pi));

  // unitary and sigma1 U sigma1 = U
  Mat2 m = ConnectionMatrix(0.7, -1.1).matrix();
  Mat2 mh{{{std::conj(m[0][0]), std::conj(m[1][0])}, {std::conj(m[0][1]), std::conj(m[1][1])}}};
  CHECK(mat_dist(mat_mul(m, mh), mat_identity()) < 1e-14);
  CHECK(m[0][0] == m[1][1]);
  CHECK(m[0][1] == m[1][0]);

  CHECK(std::abs(ConnectionMatrix::sigma1().A()) < 1e-15);
  CHECK(std::abs(ConnectionMatrix::sigma1().B() - cd(1, 0)) < 1e-15);
  CHECK(std::abs(ConnectionMatrix::minus_sigma1().B() - cd(-1, 0)) < 1e-15);
  CHECK(ConnectionMatrix(0.4, pi).is_separating());
  CHECK(ConnectionMatrix(0.4, pi).separating_alpha() == doctest::Approx(0.4 - pi));
}

TEST_CASE("ab coefficients") {
  SUBCASE("wronskian difference") {
    Coupling c(2.0 / 3.0);
    AbCoeffs ab = ab_coeffs(c, MuValue::real(0.37));
    CHECK(std::abs(ab.a1 * ab.b2 - ab.b1 * ab.a2 + 1.0) < 1e-11);
  }
  SUBCASE("wronskian sum") {
    Coupling c(0.8);
    AbCoeffs ab = ab_coeffs(c, MuValue::real(0.25));
    CHECK(std::abs(ab.a1 * ab.b2 + ab.b1 * ab.a2 - (3 - 6 * 0.8) * std::cos(pi * 0.25) / std::cos(pi * 0.8)) < 1e-11);
  }
  SUBCASE("oscillator limit") {
    AbCoeffs ab = ab_coeffs(Coupling::oscillator_limit(), MuValue::real(0.6));
    double mu = 0.6;
    CHECK(ab.a1 == doctest::Approx(std::sin(pi * mu / 2) / mu).epsilon(1e-13));
    CHECK(ab.a2 == doctest::Approx(std::cos(pi * mu / 2)).epsilon(1e-13));
    CHECK(ab.b1 == doctest::Approx(3 * std::cos(pi * mu / 2)).epsilon(1e-13));
    CHECK(ab.b2 == doctest::Approx(-3 * mu * std::sin(pi * mu / 2)).epsilon(1e-13));
  }
  SUBCASE("matches direct gamma evaluation") {
    for (double nu : {0.6, 0.9, 1.3})
      for (double mu : {0.0, 0.45, 1.7, 3.2}) {
        auto o = ab_oracle(nu, mu);
        AbCoeffs ab = ab_coeffs(Coupling(nu), MuValue::real(mu));
        CHECK(ab.a1 == doctest::Approx(o[0]).epsilon(1e-12));
        CHECK(ab.a2 == doctest::Approx(o[1]).epsilon(1e-12));
        CHECK(ab.b1 == doctest::Approx(o[2]).epsilon(1e-12));
        CHECK(ab.b2 == doctest::Approx(o[3]).epsilon(1e-12));
      }
  }
  SUBCASE("wronskian identities on random samples") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dn(0.52, 1.48), dm(0.0, 6.0);
    for (int i = 0; i < 200; ++i) {
      double nu = dn(rng);
      if (std::abs(nu - 1) < 1e-3) continue;
      bool imag = i % 3 == 0;
      MuValue mu = imag ? MuValue::imaginary(dm(rng)) : MuValue::real(dm(rng));
      AbCoeffs ab = ab_coeffs(Coupling(nu), mu);
      double cosine = imag ? std::cosh(pi * mu.value) : std::cos(pi * mu.value);
      double scale = std::max({1.0, std::abs(ab.a1 * ab.b2), std::abs(ab.b1 * ab.a2)});
      CHECK(std::abs(ab.a1 * ab.b2 - ab.b1 * ab.a2 - (3 - 6 * nu)) < 1e-11 * scale);
      CHECK(std::abs(ab.a1 * ab.b2 + ab.b1 * ab.a2 - (3 - 6 * nu) * cosine / std::cos(pi * nu)) < 1e-11 * scale);
    }
  }
  SUBCASE("imaginary mu gives conjugate-pair products") {
    double nu = 0.7, x = 1.3;
    AbCoeffs ab = ab_coeffs(Coupling(nu), MuValue::imaginary(x));
    double k1 = std::tgamma(nu + 0.5) * std::sqrt(pi);
    double y = x / 2;
    // |Gamma(1 + iy)|^2 = pi y / sinh(pi y)
    double expect = k1 / (gamma_modulus_ratio((nu + 1) / 2, 1.0, y) * pi * y / std::sinh(pi * y));
    CHECK(ab.a1 == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("sector functions") {
  // at z = sin^2 = 1 the values are a1, b1 and the slopes relate to a2, b2 via the Wronskian
  Coupling c(0.75);
  MuValue mu = MuValue::real(0.9);
  AbCoeffs ab = ab_coeffs(c, mu);
  CHECK(v1(c, mu, pi / 6) == doctest::Approx(ab.a1).epsilon(1e-12));
  CHECK(v2(c, mu, pi / 6) == doctest::Approx(ab.a2).epsilon(1e-12));
  // one-sided slopes at pi/6 are b1, b2
  double h = 1e-7;
  CHECK((v1(c, mu, pi / 6) - v1(c, mu, pi / 6 - h)) / h == doctest::Approx(ab.b1).epsilon(1e-5));
  CHECK((v2(c, mu, pi / 6) - v2(c, mu, pi / 6 - h)) / h == doctest::Approx(ab.b2).epsilon(1e-5));
  // constant Wronskian 3 - 6 nu
  for (double p : {0.1, 0.3, 0.45}) {
    double d = 1e-5;
    double w = v1(c, mu, p) * (v2(c, mu, p + d) - v2(c, mu, p - d)) / (2 * d) -
               (v1(c, mu, p + d) - v1(c, mu, p - d)) / (2 * d) * v2(c, mu, p);
    CHECK(w == doctest::Approx(3 - 6 * 0.75).epsilon(1e-7));
  }
  // small-angle behaviour
  double phi = 1e-6;
  CHECK(v1(c, mu, phi) / std::pow(3 * phi, 0.75) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(v2(c, mu, phi) / std::pow(3 * phi, 0.25) == doctest::Approx(1.0).epsilon(1e-8));

  // ODE -v'' + (9 nu(nu-1)/sin^2 3phi... ) v = 9 mu^2 v checked by finite differences
  for (double p : {0.2, 0.35, 0.5}) {
    double h = 1e-4;
    for (int which = 0; which < 2; ++which) {
      auto v = [&](double t) { return which == 0 ? v1(c, mu, t) : v2(c, mu, t); };
      double d2 = (v(p + h) - 2 * v(p) + v(p - h)) / (h * h);
      double pot = 9.0 * 0.75 * (0.75 - 1.0) / std::pow(std::sin(3 * p), 2);
      double lhs = -d2 + pot * v(p);
      CHECK(lhs == doctest::Approx(9 * 0.81 * v(p)).epsilon(1e-5));
    }
  }
  // oscillator-limit closed forms
  Coupling one = Coupling::oscillator_limit();
  CHECK(v1(one, MuValue::real(0.4), 0.3) == doctest::Approx(std::sin(3 * 0.4 * 0.3) / 0.4));
  CHECK(v2(one, MuValue::imaginary(0.4), 0.3) == doctest::Approx(std::cosh(3 * 0.4 * 0.3)));
}

TEST_CASE("type-1 spectral functions") {
  Coupling c(0.8);
  CHECK(std::abs(f_type1(Family::A, c, MuValue::real(1.2))) < 1e-10);
  double lo = f_type1(Family::B, c, MuValue::real(0.8 - 1e-6));
  double hi = f_type1(Family::B, c, MuValue::real(0.8 + 1e-6));
  CHECK(std::abs(lo) > 1e4);
  CHECK(std::abs(hi) > 1e4);
  CHECK(lo * hi < 0);
  CHECK_THROWS_AS(f_type1(Family::B, c, MuValue::real(0.8)), PoleError);

  Coupling c7(0.7);
  double x = 80;
  CHECK(f_type1(Family::A, c7, MuValue::imaginary(x)) / std::pow(x / 2, 2 * 0.7 - 1) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(f_type1(Family::A, c7, MuValue::imaginary(3.3)) == doctest::Approx(fa_imag_oracle(0.7, 3.3)).epsilon(1e-8));

  CHECK(type1_pole(Family::A, c, 1) == doctest::Approx(3.8));
  CHECK(type1_zero(Family::B, c, 0) == doctest::Approx(0.2));
  CHECK(type1_zero(Family::B, Coupling(1.3), 0) == doctest::Approx(0.3));
  CHECK(type1_zero(Family::B, Coupling(1.3), 1) == doctest::Approx(1.7));

  Rhs r0 = rhs_type1(c, ConnectionMatrix(0, 0), +1);
  CHECK(r0.vanishing);
  CHECK(r0.value == 0.0);
  CHECK(rhs_type1(c, ConnectionMatrix(pi, 0), +1).divergent);
  Rhs r = rhs_type1(c, ConnectionMatrix(pi / 3, pi / 6), +1);
  CHECK(!r.divergent);
  CHECK(r.value == doctest::Approx(std::tgamma(1.3) / std::tgamma(0.7)).epsilon(1e-13));
}

TEST_CASE("type-1 monotonicity and interlacing") {
  for (double nu : {0.6, 0.8, 1.2, 1.4}) {
    Coupling c(nu);
    for (Family f : {Family::A, Family::B}) {
      double prev = f_type1(f, c, MuValue::imaginary(0.0));
      for (double x = 1e-3; x <= 40.0; x += 1e-3) {
        double v = f_type1(f, c, MuValue::imaginary(x));
        REQUIRE(v > prev);
        prev = v;
      }
      // decreasing on each inter-pole interval up to mu = 20
      double start = 0.0;
      for (int m = 0; start < 20.0; ++m) {
        double end = type1_pole(f, c, m);
        double p = f_type1(f, c, MuValue::real(start + 1e-3));
        for (double mu = start + 2e-3; mu < std::min(end, 20.0) - 1e-3; mu += 1e-3) {
          double v = f_type1(f, c, MuValue::real(mu));
          REQUIRE(v < p);
          p = v;
        }
        start = end;
      }
    }
    // roots interlace with the zero and pole ladders
    for (auto [alpha, beta] : {std::pair{0.4, 0.9}, {-1.0, 2.0}, {2.5, -0.3}}) {
      ConnectionMatrix U(alpha, beta);
      for (Family f : {Family::A, Family::B})
        for (int sign : {+1, -1}) {
          auto levels = solve_type1(c, U, f, sign, 12);
          Rhs rhs = rhs_type1(c, U, sign);
          std::vector<double> real;
          for (const auto& l : levels)
            if (l.mu.is_real()) real.push_back(l.mu.value);
          int m0 = 0;
          if (!real.empty() && real[0] < type1_pole(f, c, 0)) m0 = -1;
          for (size_t i = 0; i < real.size(); ++i) {
            int m = static_cast<int>(i) + m0;
            if (m >= 0) {
              CHECK(real[i] > type1_pole(f, c, m));
              CHECK(real[i] < type1_pole(f, c, m + 1));
            }
            // sign of RHS decides which side of the zero the root lies on
            if (m + 1 >= 0 && rhs.value < 0) CHECK(real[i] > type1_zero(f, c, m + 1) - 1e-12);
            if (m + 1 >= 0 && rhs.value > 0) CHECK(real[i] < type1_zero(f, c, m + 1) + 1e-12);
          }
        }
    }
  }
}

TEST_CASE("type-1 solver") {
  Coupling c(0.8);
  SUBCASE("dirichlet and neumann branches") {
    auto d = separating_spectrum(c, pi, 40);
    std::vector<double> b;
    for (const auto& l : d)
      if (l.series == Series::SepB) b.push_back(l.mu.value);
    REQUIRE(b.size() >= 3);
    CHECK(b[0] == doctest::Approx(0.8));
    CHECK(b[1] == doctest::Approx(2.8));
    CHECK(b[2] == doctest::Approx(4.8));
    auto n = separating_spectrum(c, 0.0, 40);
    b.clear();
    for (const auto& l : n)
      if (l.series == Series::SepB) b.push_back(l.mu.value);
    CHECK(b[0] == doctest::Approx(0.2));
    CHECK(b[1] == doctest::Approx(2.2));
    CHECK(b[2] == doctest::Approx(4.2));
  }
  SUBCASE("near-divergent tangent approaches the pole ladder") {
    for (double nu : {0.6, 1.4}) {
      Coupling cn(nu);
      auto lv = separating_spectrum(cn, pi + 1e-8, 20);
      for (const auto& l : lv) {
        REQUIRE(l.mu.is_real());
        double base = l.series == Series::SepA ? 1 + nu : nu;
        double k = std::round((l.mu.value - base) / 2);
        CHECK(std::abs(l.mu.value - (base + 2 * k)) < 1e-6);
      }
    }
  }
  SUBCASE("negative eigenvalue") {
    ConnectionMatrix U(1.4, 1.0);
    Rhs rhs = rhs_type1(c, U, +1);
    double fa0 = std::pow(std::tgamma(0.9) / std::tgamma(0.6), 2);
    REQUIRE(rhs.value > fa0);
    auto lv = solve_type1(c, U, Family::A, +1, 5);
    int imag = 0;
    for (const auto& l : lv) imag += !l.mu.is_real();
    CHECK(imag == 1);
    CHECK(!lv[0].mu.is_real());
    CHECK(lv[0].mu.lambda() < 0);
    auto oracle = scan_roots([&](double x) { return fa_imag_oracle(0.8, x) - rhs.value; }, 0.0, 40.0, 1e-2);
    REQUIRE(oracle.size() == 1);
    CHECK(lv[0].mu.value == doctest::Approx(oracle[0]).epsilon(1e-7));
    // series label and rep
    CHECK(lv[0].series == Series::APlus);
    CHECK(lv[0].reps == std::vector<Rep>{Rep::MinusPlus});
  }
  SUBCASE("imaginary root present iff F(0) < rhs") {
    for (double alpha : {-2.5, -1.0, 0.0, 0.7, 1.3, 2.0, 2.9})
      for (double beta : {0.3, 1.1, 2.0}) {
        ConnectionMatrix U(alpha, beta);
        for (Family f : {Family::A, Family::B})
          for (int sign : {+1, -1}) {
            Rhs rhs = rhs_type1(c, U, sign);
            bool predicted = !rhs.divergent && f_type1(f, c, MuValue::real(0)) < rhs.value;
            auto lv = solve_type1(c, U, f, sign, 3);
            int imag = 0;
            for (const auto& l : lv) imag += !l.mu.is_real();
            CHECK(imag == (predicted ? 1 : 0));
          }
      }
  }
  SUBCASE("generic separating roots against an entire-function scan") {
    double nu = 0.8, cot = 1.0 / std::tan(pi / 4);
    auto lv = separating_spectrum(c, pi / 2, Truncation{1000, 9.0});
    auto a = scan_roots([&](double mu) { auto o = ab_oracle(nu, mu); return o[0] - cot * o[1]; }, 0.0, 9.0, 1e-3);
    auto b = scan_roots([&](double mu) { auto o = ab_oracle(nu, mu); return o[2] - cot * o[3]; }, 0.0, 9.0, 1e-3);
    std::vector<double> la, lb;
    for (const auto& l : lv)
      if (l.mu.is_real()) (l.series == Series::SepA ? la : lb).push_back(l.mu.value);
    REQUIRE(la.size() == a.size());
    REQUIRE(lb.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(la[i] == doctest::Approx(a[i]).epsilon(1e-9));
    for (size_t i = 0; i < b.size(); ++i) CHECK(lb[i] == doctest::Approx(b[i]).epsilon(1e-9));
    for (const auto& l : lv) CHECK(l.multiplicity == 6);
  }
  SUBCASE("exactly one root per inter-pole interval") {
    ConnectionMatrix U(0.9, 0.5);
    Rhs rhs = rhs_type1(c, U, -1);
    auto lv = solve_type1(c, U, Family::B, -1, Truncation{1000, 15.0});
    auto oracle = scan_roots([&](double mu) {
      if (std::abs(std::remainder(mu - 0.8, 2.0)) < 1e-9) return 1.0;
      return f_type1(Family::B, c, MuValue::real(mu)) - rhs.value; }, 0.0, 15.0, 1e-3);
    // the scan also reports the sign flip at each pole; keep the genuine roots
    std::vector<double> genuine;
    for (double r : oracle)
      if (std::abs(f_type1(Family::B, c, MuValue::real(r)) - rhs.value) < 1e-6) genuine.push_back(r);
    std::vector<AngularLevel> real;
    for (const auto& l : lv)
      if (l.mu.is_real()) real.push_back(l);
    REQUIRE(mus(real).size() == genuine.size());
    for (size_t i = 0; i < genuine.size(); ++i) CHECK(real[i].mu.value == doctest::Approx(genuine[i]).epsilon(1e-9));
  }
  CHECK_THROWS_AS(solve_type1(c, ConnectionMatrix(0.3, 0.0), Family::A, 1, 3), DomainError);
  CHECK_THROWS_AS(solve_type1(c, ConnectionMatrix(0.3, 0.2), Family::A, 1, 0), DomainError);
}

TEST_CASE("type-2 spectral function") {
  SUBCASE("free case reduces to the cosine ratio") {
    Coupling c(0.8);
    ConnectionMatrix s1 = ConnectionMatrix::sigma1();
    CHECK(std::abs(f2(c, s1, MuValue::real(0.5))) < 1e-13);
    for (double mu = 0; mu < 8; mu += 0.037)
      CHECK(std::abs(f2(c, s1, MuValue::real(mu)) + std::cos(pi * mu) / std::cos(pi * 0.8)) < 1e-12);
  }
  SUBCASE("matches coefficient-level assembly") {
    for (double nu : {0.65, 1.25})
      for (double mu : {0.1, 0.77, 2.3, 4.05}) {
        double o = f2_oracle(nu, 0.4, 0.9, mu);
        CHECK(f2(Coupling(nu), ConnectionMatrix(0.4, 0.9), MuValue::real(mu)) ==
              doctest::Approx(o).epsilon(1e-10).scale(1.0));
      }
  }
  SUBCASE("lower bound on the imaginary axis") {
    Coupling c(0.9);
    ConnectionMatrix U(-pi / 2, pi / 3);
    double v = f2(c, U, MuValue::imaginary(0.4));
    CHECK(v >= 1.0 / (std::sin(pi / 3) * std::abs(std::cos(pi * 0.9))));
    CHECK(v > 1);
  }
  SUBCASE("decomposition") {
    Coupling c(0.7);
    ConnectionMatrix U(0.4, 0.9);
    F2Decomposition d = f2_decomposition(c, U, 1.2);
    double direct = f2(c, U, MuValue::imaginary(1.2));
    CHECK(std::abs(d.value() - direct) < 1e-8 * std::max(1.0, std::abs(direct)));
    CHECK(d.scaled() == doctest::Approx(f2_scaled_imaginary(c, U, 1.2)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(f2(Coupling(0.8), ConnectionMatrix(0.2, 0.0), MuValue::real(1)), DomainError);
}

TEST_CASE("type-2 solver") {
  SUBCASE("free case closed form") {
    for (double nu : {0.6, 0.8, 1.2, 1.4}) {
      Coupling c(nu);
      double dl = delta_nu(nu);
      CHECK(dl > 0.5);
      CHECK(dl < 2.0 / 3.0);
      CHECK(dl < nu);
      auto plus = solve_type2(c, ConnectionMatrix::sigma1(), 0.5, 8);
      auto minus = solve_type2(c, ConnectionMatrix::sigma1(), -0.5, 8);
      REQUIRE(plus.size() == 8);
      REQUIRE(minus.size() == 8);
      for (int k = 0; k < 8; ++k) {
        double ep = 2.0 * (k / 2) + 1.0 + (k % 2 == 0 ? -dl : dl);
        double em = 2.0 * (k / 2) + (k % 2 == 0 ? dl : 2.0 - dl);
        CHECK(std::abs(plus[k].mu.value - ep) < 1e-9);
        CHECK(std::abs(minus[k].mu.value - em) < 1e-9);
        CHECK(plus[k].multiplicity == 2);
      }
      CHECK(plus[0].reps == std::vector<Rep>{Rep::Defining});
      CHECK(minus[0].reps == std::vector<Rep>{Rep::Twisted});
    }
  }
  SUBCASE("generic roots match a fine oracle scan") {
    double nu = 0.7, alpha = 0.3, beta = 1.0;
    auto lv = solve_type2(Coupling(nu), ConnectionMatrix(alpha, beta), 0.5, Truncation{1000, 6.0});
    auto o = scan_roots([&](double mu) { return f2_oracle(nu, alpha, beta, mu) - 0.5; }, 0.0, 6.0, 2e-4);
    std::vector<double> real;
    for (const auto& l : lv)
      if (l.mu.is_real()) real.push_back(l.mu.value);
    REQUIRE(real.size() == o.size());
    for (size_t i = 0; i < o.size(); ++i) CHECK(real[i] == doctest::Approx(o[i]).epsilon(1e-9));
  }
  SUBCASE("four negative levels") {
    Coupling c(21.0 / 20.0);
    ConnectionMatrix U(11 * pi / 20, pi / 10);
    auto p = type2_imaginary_scan(c, U, 0.5);
    auto m = type2_imaginary_scan(c, U, -0.5);
    CHECK(p.roots.size() + m.roots.size() == 4);
    CHECK(p.certified);
    for (double x : p.roots) CHECK(std::abs(f2(c, U, MuValue::imaginary(x)) - 0.5) < 1e-8);
    for (double x : m.roots) CHECK(std::abs(f2(c, U, MuValue::imaginary(x)) + 0.5) < 1e-8);
  }
  SUBCASE("no negative levels at alpha = -pi/2") {
    Coupling c(0.9);
    ConnectionMatrix U(-pi / 2, pi / 3);
    CHECK(type2_imaginary_scan(c, U, 0.5).roots.empty());
    CHECK(type2_imaginary_scan(c, U, -0.5).roots.empty());
    CHECK(certified_cutoff(c, U).certified);
  }
  CHECK_THROWS_AS(solve_type2(Coupling(0.8), ConnectionMatrix(0.2, 0.3), 0.3, 3), DomainError);
}

TEST_CASE("explicit spectra") {
  Coupling c(0.8);
  auto free = explicit_spectrum(ExplicitCase::FreeSigma1, c, 60);
  auto minus = explicit_spectrum(ExplicitCase::MinusSigma1, c, 60);
  REQUIRE(free.size() == minus.size());
  CHECK(free[0].series == Series::BPlus);
  CHECK(free[0].mu.value == doctest::Approx(0.2));
  for (size_t i = 0; i < free.size(); ++i) CHECK(free[i].mu.value == doctest::Approx(minus[i].mu.value));

  auto swap = [](Series s) {
    switch (s) {
      case Series::APlus: return Series::AMinus;
      case Series::AMinus: return Series::APlus;
      case Series::BPlus: return Series::BMinus;
      case Series::BMinus: return Series::BPlus;
      case Series::Type2Plus: return Series::Type2Minus;
      case Series::Type2Minus: return Series::Type2Plus;
      default: return s;
    }
  };
  auto count = [](const std::vector<AngularLevel>& v, Series s, double mu) {
    int n = 0;
    for (const auto& l : v) n += l.series == s && std::abs(l.mu.value - mu) < 1e-12;
    return n;
  };
  for (const auto& l : free) {
    if (l.mu.value > 20) continue;
    CHECK(count(minus, swap(l.series), l.mu.value) == 1);
  }

  // the generic solvers reproduce the explicit ladders for +-sigma1
  for (ExplicitCase e : {ExplicitCase::FreeSigma1, ExplicitCase::MinusSigma1}) {
    ConnectionMatrix U = connection_of(e);
    auto ex = explicit_spectrum(e, c, Truncation{10000, 10.0});
    for (Family f : {Family::A, Family::B})
      for (int sign : {+1, -1}) {
        auto lv = solve_type1(c, U, f, sign, Truncation{10000, 10.0});
        for (const auto& l : lv) {
          bool found = false;
          for (const auto& x : ex) found |= x.series == l.series && std::abs(x.mu.value - l.mu.value) < 1e-9;
          CHECK(found);
        }
      }
  }
  CHECK(case_from_name("dirichlet") == ExplicitCase::DirichletMinusOne);
  CHECK_THROWS_AS(case_from_name("nope"), DomainError);
}

TEST_CASE("transport matrix") {
  Coupling c(0.7);
  ConnectionMatrix U(0.3, 1.0);
  TransportMatrix t = transport_matrix(c, U, MuValue::real(0.45));
  cd det = t.T[0][0] * t.T[1][1] - t.T[0][1] * t.T[1][0];
  CHECK(std::abs(det - 1.0) < 1e-10);
  Mat2 numeric = mat_mul(inverse(t.n_plus), t.n_minus);
  CHECK(mat_dist(numeric, t.T) < 1e-12 * std::max(1.0, std::abs(t.T[0][1]) + std::abs(t.T[1][0])));
  cd dn = t.n_plus[0][0] * t.n_plus[1][1] - t.n_plus[0][1] * t.n_plus[1][0];
  CHECK(std::abs(dn - t.det_n_plus) < 1e-12 * std::abs(dn));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dn_(0.55, 1.45), da(-pi, pi), dm(0, 5);
  for (int i = 0; i < 200; ++i) {
    double nu = dn_(rng), beta = da(rng);
    if (std::abs(nu - 1) < 1e-3 || std::abs(std::sin(beta)) < 1e-3) continue;
    MuValue mu = i % 4 == 0 ? MuValue::imaginary(dm(rng)) : MuValue::real(dm(rng));
    TransportMatrix tm = transport_matrix(Coupling(nu), ConnectionMatrix(da(rng), beta), mu);
    cd d = tm.T[0][0] * tm.T[1][1] - tm.T[0][1] * tm.T[1][0];
    double scale = std::max(1.0, std::abs(tm.T[0][1] * tm.T[1][0]));
    CHECK(std::abs(d - 1.0) < 1e-10 * scale);
  }

  SUBCASE("type-1 roots make T triangular") {
    ConnectionMatrix V(0.9, 0.5);
    for (int sign : {+1, -1}) {
      auto lv = solve_type1(c, V, Family::A, sign, 3);
      for (const auto& l : lv) {
        TransportMatrix tt = transport_matrix(c, V, l.mu);
        double scale = std::abs(tt.x) + std::abs(tt.z) + 1;
        CHECK(std::abs(tt.y) < 1e-8 * scale);
        CHECK(std::abs(tt.T[0][0] - (sign > 0 ? -1.0 : 1.0)) < 1e-8);
        CHECK(std::abs(tt.x / tt.det_n_plus - re_tau(l.series)) < 1e-8);
      }
    }
  }
}

TEST_CASE("projectors at type-2 levels") {
  Coupling c(0.8);
  ConnectionMatrix s1 = ConnectionMatrix::sigma1();
  auto lv = solve_type2(c, s1, 0.5, 3);
  for (const auto& l : lv) {
    TransportMatrix t = transport_matrix(c, s1, l.mu);
    CHECK(std::abs(t.x / t.det_n_plus - 0.5) < 1e-9);
    Mat2 t6 = mat_identity();
    for (int k = 0; k < 6; ++k) t6 = mat_mul(t6, t.T);
    CHECK(mat_dist(t6, mat_identity()) < 1e-8);
    cd tau(0.5, std::sqrt(3.0) / 2);
    Mat2 p = projector(tau, t), q = projector(std::conj(tau), t);
    CHECK(mat_dist(mat_mul(p, p), p) < 1e-9);
    Mat2 sum{{{p[0][0] + q[0][0], p[0][1] + q[0][1]}, {p[1][0] + q[1][0], p[1][1] + q[1][1]}}};
    CHECK(mat_dist(sum, mat_identity()) < 1e-9);
    CHECK(std::abs(p[0][0] + p[1][1] - 1.0) < 1e-12);
    Mat2 tp = mat_mul(t.T, p);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(tp[i][j] - tau * p[i][j]) < 1e-9);
    Mat2 cf = projector_closed_form(tau, t);
    CHECK(mat_dist(cf, p) < 1e-9);
  }
  TransportMatrix off = transport_matrix(c, ConnectionMatrix(0.3, 1.0), MuValue::real(0.45));
  CHECK_THROWS_AS(projector(cd(0.5, std::sqrt(3.0) / 2), off), DomainError);
}

TEST_CASE("eigenfunctions") {
  SUBCASE("dirichlet states are sector-local v1 up to sign") {
    Coupling c(0.8);
    auto lv = separating_spectrum(c, pi, 4);
    for (const auto& l : lv) {
      auto psi = build_eigenfunction(l, c, ConnectionMatrix::minus_identity(), 2);
      CHECK(std::abs(psi(0.3)) == 0.0);
      double base = l.mu.value;
      double r0 = psi(2 * pi / 3 + 0.2).real() / v1(c, l.mu, 0.2);
      for (double t : {0.05, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        double h = t <= pi / 6 ? t : pi / 3 - t;
        double sign = (l.series == Series::SepA && t > pi / 6) ? -1.0 : 1.0;
        CHECK(psi(2 * pi / 3 + t).real() == doctest::Approx(sign * r0 * v1(c, l.mu, h)).epsilon(1e-10));
      }
      (void)base;
      CHECK(boundary_residual(psi, c, ConnectionMatrix::minus_identity()) < 1e-8);
      double wrong = boundary_residual(psi, c, ConnectionMatrix::identity());
      CHECK(wrong > 0.1);
    }
  }
  SUBCASE("oscillator limit type 2 is a plane wave") {
    Coupling one = Coupling::oscillator_limit();
    ConnectionMatrix s1 = ConnectionMatrix::sigma1();
    for (const auto& l : explicit_spectrum(ExplicitCase::FreeSigma1, one, 12)) {
      if (!is_type2(l.series) || std::abs(l.mu.value - std::round(l.mu.value)) < 1e-9) continue;
      for (int which : {0, 1}) {
        auto psi = build_eigenfunction(l, one, s1, which);
        double mu = l.mu.value;
        cd ref = psi(0.1);
        double best = 1e300;
        for (double sgn : {1.0, -1.0}) {
          double dev = 0;
          for (double phi = 0.05; phi < 2 * pi; phi += 0.1) {
            if (std::abs(std::remainder(phi, pi / 3)) < 1e-6) continue;
            cd expect = ref * std::exp(cd(0, sgn * 3 * mu * (phi - 0.1)));
            dev = std::max(dev, std::abs(psi(phi) - expect) / std::abs(ref));
          }
          best = std::min(best, dev);
        }
        CHECK(best < 1e-8);
      }
    }
  }
  SUBCASE("free-case sector-1 profile") {
    double nu = 0.8;
    Coupling c(nu);
    ConnectionMatrix s1 = ConnectionMatrix::sigma1();
    for (double rt : {0.5, -0.5}) {
      for (const auto& l : solve_type2(c, s1, rt, 3)) {
        double mu = l.mu.value;
        double q = 3 * std::pow(std::cos(pi * nu), 2) / (2 * pi * pi) * std::pow(2.0, -2 * nu) * std::tgamma(0.5 - nu) *
                   std::tgamma(1.5 - nu) * std::tgamma(nu + mu) * std::tgamma(nu - mu);
        for (int which : {0, 1}) {
          auto psi = build_eigenfunction(l, c, s1, which);
          double imt = (which == 0 ? 1 : -1) * std::sqrt(3.0) / 2;
          // sector 1, first half: psi = (C+ b2 + C- a2) v1 - (C+ b1 + C- a1) v2
          const AbCoeffs& ab = psi.ab();
          cd k1 = psi.c_plus(1) * ab.b2 + psi.c_minus(1) * ab.a2;
          cd k2 = -(psi.c_plus(1) * ab.b1 + psi.c_minus(1) * ab.a1);
          cd ratio = k1 / k2;
          CHECK(std::abs(std::abs(ratio) - std::abs(q / imt)) < 1e-8 * std::max(1.0, std::abs(q / imt)));
          CHECK(std::abs(ratio.real()) < 1e-8 * std::max(1.0, std::abs(ratio)));
        }
      }
    }
  }
  SUBCASE("normalisation") {
    Coupling c(0.7);
    auto lv = solve_type1(c, ConnectionMatrix(0.4, 0.9), Family::B, +1, 2);
    auto psi = build_eigenfunction(lv[0], c, ConnectionMatrix(0.4, 0.9));
    double n = psi.l2_norm();
    CHECK(std::isfinite(n));
    CHECK(n > 0);
    // plain midpoint oracle away from the integrable endpoint singularities
    double s = 0;
    int N = 600000;
    double h = 2 * pi / N;
    for (int i = 0; i < N; ++i) s += std::norm(psi((i + 0.5) * h)) * h;
    CHECK(std::sqrt(s) == doctest::Approx(n).epsilon(1e-3));
  }
  CHECK_THROWS_AS(build_eigenfunction(separating_spectrum(Coupling(0.8), pi, 1)[0], Coupling(0.8),
                                      ConnectionMatrix::minus_identity(), 2)(pi / 3),
                  DomainError);
}

namespace {
void check_levels(double nu, double alpha, double beta, bool real_only) {
  Coupling c(nu);
  ConnectionMatrix U(alpha, beta);
  std::vector<AngularLevel> all;
  for (Family f : {Family::A, Family::B})
    for (int sign : {+1, -1})
      for (auto& l : solve_type1(c, U, f, sign, 3)) all.push_back(l);
  for (double rt : {0.5, -0.5})
    for (auto& l : solve_type2(c, U, rt, 3)) all.push_back(l);
  for (const auto& l : all) {
    if (real_only && !l.mu.is_real()) continue;
    int nb = is_type2(l.series) ? 2 : 1;
    for (int which = 0; which < nb; ++which) {
      auto psi = build_eigenfunction(l, c, U, which);
      CHECK(boundary_residual(psi, c, U) < 1e-8);
      CHECK(classify(psi) == l.reps);
    }
  }
}
}  // namespace

TEST_CASE("boundary residual and representation consistency over parameter grids") {
  // permissible grid: every solved level
  for (double nu : {0.65, 0.85, 1.3})
    for (double alpha : {-2.0, -1.6, -1.2})
      for (double beta : {0.3, 0.8, 1.1}) {
        REQUIRE(permissibility(Coupling(nu), ConnectionMatrix(alpha, beta)).permissible);
        check_levels(nu, alpha, beta, false);
      }
  // generic grid, some of it impermissible: non-negative levels
  for (double nu : {0.65, 0.85, 1.3})
    for (double alpha : {-2.0, 0.5, 2.2})
      for (double beta : {0.4, 1.3, -2.5}) check_levels(nu, alpha, beta, true);
  // separating grid
  for (double alpha : {-1.0, 0.0, 2.0, pi}) {
    Coupling c(0.9);
    ConnectionMatrix U(alpha, 0.0);
    for (const auto& l : separating_spectrum(c, alpha, 4)) {
      auto psi = build_eigenfunction(l, c, U, 3);
      CHECK(boundary_residual(psi, c, U) < 1e-8);
      CHECK(classify(psi) == l.reps);
    }
  }
}

TEST_CASE("residual grows linearly off a root") {
  Coupling c(0.8);
  ConnectionMatrix U(0.9, 0.5);
  auto l = solve_type1(c, U, Family::B, +1, 2)[1];
  std::vector<double> res;
  for (double d : {1e-3, 2e-3, 4e-3}) {
    AngularLevel p = l;
    p.mu.value += d;
    res.push_back(boundary_residual(build_eigenfunction(p, c, U), c, U));
  }
  CHECK(res[0] > 1e-6);
  CHECK(res[1] / res[0] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(res[2] / res[1] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("permissibility") {
  auto r = permissibility(Coupling(0.8), ConnectionMatrix(-pi / 2, pi / 4));
  CHECK(r.permissible);
  CHECK(r.negative_levels.empty());

  auto bad = permissibility(Coupling(21.0 / 20.0), ConnectionMatrix(11 * pi / 20, pi / 10));
  CHECK(!bad.permissible);
  // four type-2 levels from the scan; all four type-1 inequalities hold as well at these parameters
  int t2 = 0;
  for (const auto& l : bad.negative_levels) t2 += is_type2(l.series);
  CHECK(t2 == 4);
  CHECK(bad.negative_levels.size() == 8);
  CHECK(bad.criteria_fired.back() == "type2-imaginary-scan");

  for (double nu : {0.7, 1.2})
    for (ExplicitCase e : {ExplicitCase::DirichletMinusOne, ExplicitCase::NeumannPlusOne, ExplicitCase::FreeSigma1,
                           ExplicitCase::MinusSigma1})
      CHECK(permissibility(Coupling(nu), connection_of(e)).permissible);

  auto sep = permissibility(Coupling(0.8), ConnectionMatrix(2.0, 0.0));
  Rhs rhs = rhs_separating(Coupling(0.8), 2.0);
  bool predicted = f_type1(Family::A, Coupling(0.8), MuValue::real(0)) < rhs.value ||
                   f_type1(Family::B, Coupling(0.8), MuValue::real(0)) < rhs.value;
  CHECK(sep.permissible == !predicted);

  // canonical range: spectra depend only on U
  auto a = solve_type2(Coupling(0.7), ConnectionMatrix(0.3, 1.0), 0.5, 4);
  auto b = solve_type2(Coupling(0.7), ConnectionMatrix(0.3 + 2 * pi, 1.0 - 2 * pi), 0.5, 4);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].mu.value == b[i].mu.value);
}
