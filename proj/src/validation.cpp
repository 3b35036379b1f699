#include "calogero/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <tuple>

#include "calogero/angular.hpp"
#include "calogero/assembly.hpp"
#include "calogero/errors.hpp"
#include "calogero/radial.hpp"

namespace calogero::validation {

namespace {

using namespace calogero::angular;
using radial::RadialBoundary;

constexpr double kPi = std::numbers::pi;

// running record of the worst deviation and the first violation
struct Tally {
  bool ok = true;
  double worst = 0.0;
  std::string first;
  long checks = 0;

  void expect(bool cond, const std::string& what) {
    ++checks;
    if (!cond && ok) first = what;
    ok = ok && cond;
  }
  void within(double dev, double tol, const std::string& what) {
    worst = std::max(worst, std::isnan(dev) ? INFINITY : dev);
    std::ostringstream os;
    os << what << " (deviation " << dev << " > " << tol << ")";
    expect(dev < tol, os.str());
  }
  std::string summary() const {
    std::ostringstream os;
    os << checks << " checks, worst deviation " << worst;
    if (!ok) os << "; first failure: " << first;
    return os.str();
  }
};

std::string str(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::vector<double> series_values(const std::vector<AngularLevel>& lv, Series s, std::size_t n) {
  std::vector<double> out;
  for (const auto& l : lv)
    if (l.series == s && l.mu.is_real() && out.size() < n) out.push_back(l.mu.value);
  return out;
}

// ---------------------------------------------------------------- criteria

CriterionResult c1() {
  Tally t;
  for (double nu : {0.6, 0.8, 1.2, 1.4}) {
    Coupling c(nu);
    // tan -> -infinity just past pi, tan -> 0 just past 0
    auto d = separating_spectrum(c, kPi + 1e-8, Truncation{INT_MAX, 24.0});
    auto n = separating_spectrum(c, 1e-8, Truncation{INT_MAX, 24.0});
    auto a_d = series_values(d, Series::SepA, 10), b_d = series_values(d, Series::SepB, 10);
    auto a_n = series_values(n, Series::SepA, 10), b_n = series_values(n, Series::SepB, 10);
    t.expect(a_d.size() == 10 && b_d.size() == 10 && a_n.size() == 10 && b_n.size() == 10,
             "fewer than 10 levels at nu = " + str(nu));
    for (std::size_t k = 0; k < 10 && k < a_d.size(); ++k) t.within(std::abs(a_d[k] - (2.0 * k + 1 + nu)), 1e-6, "2n+1+nu");
    for (std::size_t k = 0; k < 10 && k < b_d.size(); ++k) t.within(std::abs(b_d[k] - (2.0 * k + nu)), 1e-6, "2n+nu");
    for (std::size_t k = 0; k < 10 && k < a_n.size(); ++k) t.within(std::abs(a_n[k] - (2.0 * k + 2 - nu)), 1e-6, "2n+1+(1-nu)");
    for (std::size_t k = 0; k < 10 && k < b_n.size(); ++k)
      t.within(std::abs(b_n[k] - std::abs(2.0 * k + 1 - nu)), 1e-6, "|2n+(1-nu)|");
  }
  return {1, "exact-case type-1 ladders", t.ok, t.summary(), 0};
}

CriterionResult c2() {
  Tally t;
  for (double nu : {0.6, 0.8, 1.2, 1.4}) {
    Coupling c(nu);
    double dl = delta_nu(nu);
    t.expect(dl > 0.5 && dl < 2.0 / 3.0 && dl < nu, "Delta bounds at nu = " + str(nu));
    auto plus = solve_type2(c, ConnectionMatrix::sigma1(), 0.5, 8);
    auto minus = solve_type2(c, ConnectionMatrix::sigma1(), -0.5, 8);
    t.expect(plus.size() == 8 && minus.size() == 8, "fewer than 8 type-2 levels");
    for (int k = 0; k < 8 && k < static_cast<int>(std::min(plus.size(), minus.size())); ++k) {
      double ep = 2.0 * (k / 2) + 1.0 + (k % 2 == 0 ? -dl : dl);
      double em = 2.0 * (k / 2) + (k % 2 == 0 ? dl : 2.0 - dl);
      t.within(std::abs(plus[k].mu.value - ep), 1e-9, "Re tau = 1/2 ladder");
      t.within(std::abs(minus[k].mu.value - em), 1e-9, "Re tau = -1/2 ladder");
    }
  }
  return {2, "free-case type-2 closed form", t.ok, t.summary(), 0};
}

CriterionResult c3() {
  Coupling c(21.0 / 20.0);
  ConnectionMatrix U(11 * kPi / 20, kPi / 10);
  auto p = type2_imaginary_scan(c, U, 0.5);
  auto m = type2_imaginary_scan(c, U, -0.5);
  std::size_t n = p.roots.size() + m.roots.size();
  std::ostringstream os;
  os << n << " solutions of |F_2(ix)| = 1/2 (" << p.roots.size() << " at +1/2, " << m.roots.size() << " at -1/2), cutoff x = "
     << std::max(p.x_max, m.x_max) << (p.certified && m.certified ? " certified" : " not certified");
  return {3, "four imaginary type-2 solutions", n == 4, os.str(), 0};
}

CriterionResult c4() {
  Tally t;
  int uncertified = 0;
  for (double nu : {0.7, 0.9, 1.1, 1.3})
    for (int i = 0; i < 20; ++i) {
      double beta = 0.05 + (kPi / 2 - 0.1) * (i + 0.5) / 20.0;
      auto r = permissibility(Coupling(nu), ConnectionMatrix(-kPi / 2, beta));
      t.expect(r.negative_levels.empty(), "negative level at nu = " + str(nu) + ", beta = " + str(beta));
      uncertified += !r.diagnostics.empty();
    }
  std::string d = t.summary();
  if (uncertified) d += "; " + std::to_string(uncertified) + " cells without a certified cutoff";
  return {4, "positivity region alpha = -pi/2", t.ok, d, 0};
}

CriterionResult c5() {
  Tally t;
  for (double c : {1.0, 0.7, 2.5}) {
    auto lv = radial::solve_radial(4.0, RadialBoundary::finite(1.3), c, 10);
    for (int m = 0; m < 10; ++m) t.expect(lv[m].energy == 2 * c * (2 * m + 3), "lambda = 4 ladder not exact");
    auto inf = radial::solve_radial(0.25, RadialBoundary::infinity(), c, 10);
    for (int m = 0; m < 10; ++m) t.within(std::abs(inf[m].energy - 2 * c * (2 * m + 0.5)), 1e-9, "kappa = inf ladder");
    for (double lam : {0.1, 0.25, 0.5, 0.9}) {
      auto big = radial::solve_radial(lam, RadialBoundary::finite(1e6), c, 10);
      auto ref = radial::solve_radial(lam, RadialBoundary::infinity(), c, 10);
      for (int m = 0; m < 10; ++m) t.within(std::abs(big[m].energy - ref[m].energy), 1e-3, "kappa = 1e6 vs infinity");
    }
  }
  return {5, "radial closed forms", t.ok, t.summary(), 0};
}

// sign changes of F_lambda - rhs on eps = -e^u, u in [-14, 16]
int negative_root_scan(double lambda, double rhs) {
  double s = std::sqrt(lambda);
  auto g = [&](double u) {
    double e = -std::exp(u);
    return std::exp(std::lgamma(-e + (1 - s) / 2) - std::lgamma(-e + (1 + s) / 2)) - rhs;
  };
  int n = 0;
  double prev = g(-14.0);
  for (double u = -14.0 + 1e-3; u <= 16.0; u += 1e-3) {
    double v = g(u);
    n += (prev > 0) != (v > 0);
    prev = v;
  }
  return n;
}

CriterionResult c6() {
  Tally t;
  int with_root = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      double lam = 0.05 + 0.09 * i, kappa = 0.05 * std::pow(1.8, j);
      auto bc = RadialBoundary::finite(kappa);
      double rhs = radial::f_lambda_rhs(lam, bc);
      bool ineq = radial::f_lambda(lam, 0.0) > rhs && rhs > 0;
      bool pred = radial::has_negative_level(lam, bc);
      int solver = 0;
      for (const auto& l : radial::solve_radial(lam, bc, 1.0, 3)) solver += l.energy < 0;
      int scan = negative_root_scan(lam, rhs);
      std::string at = " at lambda = " + str(lam) + ", kappa = " + str(kappa);
      t.expect(pred == ineq, "predicate disagrees with the inequality" + at);
      t.expect(solver == (ineq ? 1 : 0), "solver count" + at);
      t.expect(scan == solver, "bracketing scan count" + at);
      with_root += ineq;
    }
  return {6, "negative radial level predicate", t.ok, t.summary() + "; " + std::to_string(with_root) + "/100 cells with a root",
          0};
}

CriterionResult c7() {
  Tally t;
  auto bc = RadialBoundary::finite(1.0);
  std::ostringstream os;
  for (auto [lo, hi] : {std::pair{-30.0, -10.0}, std::pair{-60.0, -40.0}}) {
    auto lv = radial::solve_radial_negative(1.0, bc, 1.0, lo, hi);
    os << "[" << lo << "," << hi << "]: " << lv.size() << " roots; ";
    t.expect(lv.size() >= 2, "fewer than 2 roots in [" + str(lo) + ", " + str(hi) + "]");
    for (const auto& l : lv) t.within(radial::phase_condition_residual(l.epsilon, 1.0, bc, 1.0), 1e-8, "phase condition");
  }
  return {7, "unbounded-below windows at x = 1", t.ok, os.str() + t.summary(), 0};
}

CriterionResult c8() {
  Tally t;
  for (double omega : {1.0, std::sqrt(8.0 / 3.0)}) {
    double c = std::sqrt(3.0 / 8.0) * omega;
    auto rep = assembly::oscillator_limit_check(omega, 2 * c * 7.5);
    t.expect(rep.exact.size() == 7 && rep.near_limit.size() == 7, "shell count");
    t.expect(rep.stray_exact == 0 && rep.stray_near == 0, "levels off the shells");
    for (const auto& s : rep.exact) {
      t.expect(s.found == s.expected, "nu = 1 shell " + std::to_string(s.n) + " degeneracy " + std::to_string(s.found));
      t.within(s.max_deviation, 1e-9 * 2 * c, "nu = 1 shell energy");
    }
    for (const auto& s : rep.near_limit) {
      t.expect(s.found == s.expected, "nu = 1-1e-6 shell " + std::to_string(s.n) + " degeneracy " + std::to_string(s.found));
      t.within(s.max_deviation, 2 * c * 1e-5, "nu = 1-1e-6 shell energy");
    }
    t.expect(rep.ok, "oscillator report");
  }
  return {8, "oscillator limit", t.ok, t.summary(), 0};
}

CriterionResult c9() {
  Tally t;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> dn(0.52, 1.48), da(-kPi, kPi), dm(0.0, 6.0);
  int samples = 0;
  while (samples < 200) {
    double nu = dn(rng), alpha = da(rng), beta = da(rng), m = dm(rng);
    bool imag = samples % 3 == 0;
    if (std::abs(nu - 1) < 1e-3 || std::abs(std::sin(beta)) < 1e-3) continue;
    ++samples;
    MuValue mu = imag ? MuValue::imaginary(m) : MuValue::real(m);
    Coupling c(nu);
    AbCoeffs ab = ab_coeffs(c, mu);
    double cosine = imag ? std::cosh(kPi * m) : std::cos(kPi * m);
    double scale = std::max({1.0, std::abs(ab.a1 * ab.b2), std::abs(ab.b1 * ab.a2)});
    t.within(std::abs(ab.a1 * ab.b2 - ab.b1 * ab.a2 - (3 - 6 * nu)) / scale, 1e-11, "Wronskian difference");
    t.within(std::abs(ab.a1 * ab.b2 + ab.b1 * ab.a2 - (3 - 6 * nu) * cosine / std::cos(kPi * nu)) / scale, 1e-11,
             "Wronskian sum");
    auto tm = transport_matrix(c, ConnectionMatrix(alpha, beta), mu);
    cplx det = tm.T[0][0] * tm.T[1][1] - tm.T[0][1] * tm.T[1][0];
    t.within(std::abs(det - 1.0) / std::max(1.0, std::abs(tm.T[0][1] * tm.T[1][0])), 1e-10, "det T");
  }

  int type2 = 0;
  for (auto [nu, alpha, beta] : {std::tuple{0.8, kPi / 2, kPi / 2}, std::tuple{0.7, 0.3, 1.0}, std::tuple{1.2, -1.6, 0.8},
                                 std::tuple{0.9, -2.0, 0.4}, std::tuple{1.35, 1.0, 2.0}}) {
    Coupling c(nu);
    ConnectionMatrix U(alpha, beta);
    for (double rt : {0.5, -0.5})
      for (const auto& l : solve_type2(c, U, rt, 4)) {
        if (!l.mu.is_real() || type2 >= 20) continue;
        ++type2;
        auto tm = transport_matrix(c, U, l.mu);
        Mat2 t6 = mat_identity();
        for (int k = 0; k < 6; ++k) t6 = mat_mul(t6, tm.T);
        t.within(mat_dist(t6, mat_identity()), 1e-8, "T^6 = 1");
        cplx tau(rt, std::sqrt(3.0) / 2);
        Mat2 p = projector(tau, tm);
        t.within(mat_dist(mat_mul(p, p), p), 1e-9, "projector idempotent");
      }
  }
  t.expect(type2 == 20, "only " + std::to_string(type2) + " type-2 levels");

  int residuals = 0;
  for (double nu : {0.65, 0.85, 1.3})
    for (double alpha : {-2.0, -1.6, -1.2})
      for (double beta : {0.3, 0.8, 1.1}) {
        Coupling c(nu);
        ConnectionMatrix U(alpha, beta);
        std::vector<AngularLevel> all;
        for (Family f : {Family::A, Family::B})
          for (int sign : {+1, -1})
            for (auto& l : solve_type1(c, U, f, sign, 3)) all.push_back(l);
        for (double rt : {0.5, -0.5})
          for (auto& l : solve_type2(c, U, rt, 3)) all.push_back(l);
        for (const auto& l : all)
          for (int which = 0; which < (is_type2(l.series) ? 2 : 1); ++which) {
            ++residuals;
            t.within(boundary_residual(build_eigenfunction(l, c, U, which), c, U), 1e-8, "boundary residual");
          }
      }
  return {9, "structural invariants", t.ok, t.summary() + "; " + std::to_string(residuals) + " eigenfunctions", 0};
}

CriterionResult c10() {
  Tally t;
  for (double nu : {0.6, 0.8, 1.2, 1.4}) {
    Coupling c(nu);
    for (Family f : {Family::A, Family::B}) {
      const std::string name = f == Family::A ? "F_A" : "F_B";
      double prev = f_type1(f, c, MuValue::imaginary(0.0));
      for (double x = 1e-3; x <= 40.0; x += 1e-3) {
        double v = f_type1(f, c, MuValue::imaginary(x));
        t.expect(v > prev, name + "(ix) not increasing at x = " + str(x));
        prev = v;
      }
      double start = 0.0;
      for (int m = 0; start < 20.0; ++m) {
        double end = type1_pole(f, c, m);
        double p = f_type1(f, c, MuValue::real(start + 1e-3));
        for (double mu = start + 2e-3; mu < std::min(end, 20.0) - 1e-3; mu += 1e-3) {
          double v = f_type1(f, c, MuValue::real(mu));
          t.expect(v < p, name + " not decreasing at mu = " + str(mu));
          p = v;
        }
        start = end;
        // zero/pole interlacing of the ladders themselves
        t.expect(type1_zero(f, c, m) < type1_pole(f, c, m) && type1_pole(f, c, m) < type1_zero(f, c, m + 1),
                 name + " ladders do not interlace");
      }
    }
    for (auto [alpha, beta] : {std::pair{0.4, 0.9}, std::pair{-1.0, 2.0}, std::pair{2.5, -0.3}}) {
      ConnectionMatrix U(alpha, beta);
      for (Family f : {Family::A, Family::B})
        for (int sign : {+1, -1}) {
          std::vector<double> real;
          for (const auto& l : solve_type1(c, U, f, sign, 12))
            if (l.mu.is_real()) real.push_back(l.mu.value);
          int m0 = !real.empty() && real[0] < type1_pole(f, c, 0) ? -1 : 0;
          for (std::size_t i = 0; i < real.size(); ++i) {
            int m = static_cast<int>(i) + m0;
            bool in = m < 0 ? real[i] < type1_pole(f, c, 0)
                            : real[i] > type1_pole(f, c, m) && real[i] < type1_pole(f, c, m + 1);
            t.expect(in, "type-1 root outside its pole interval");
          }
        }
    }
  }
  for (double lam : {0.1, 0.25, 0.5, 0.9}) {
    for (int m = -1; m < 16; ++m) {
      double lo = m < 0 ? -15.0 : radial::f_lambda_pole(lam, m);
      double hi = radial::f_lambda_pole(lam, m + 1);
      if (lo > 15) break;
      double prev = -INFINITY;
      for (double e = lo + 1e-3; e < std::min(hi, 15.0) - 1e-3; e += 1e-3) {
        double v = radial::f_lambda(lam, e);
        t.expect(v > prev, "F_lambda not increasing at eps = " + str(e));
        prev = v;
      }
      if (m >= 0)
        t.expect(radial::f_lambda_pole(lam, m) < radial::f_lambda_zero(lam, m) &&
                     radial::f_lambda_zero(lam, m) < radial::f_lambda_pole(lam, m + 1),
                 "F_lambda ladders do not interlace");
    }
    for (double kappa : {-2.0, 0.3, 7.0}) {
      for (const auto& l : radial::solve_radial(lam, RadialBoundary::finite(kappa), 1.0, 12)) {
        if (l.epsilon < radial::f_lambda_pole(lam, 0)) continue;
        int m = static_cast<int>(std::floor(l.epsilon - radial::f_lambda_pole(lam, 0)));
        t.expect(l.epsilon > radial::f_lambda_pole(lam, m) && l.epsilon < radial::f_lambda_pole(lam, m + 1),
                 "radial root outside its pole interval");
      }
    }
  }
  return {10, "monotonicity and interlacing", t.ok, t.summary(), 0};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::vector<int>& only) {
  const std::vector<std::function<CriterionResult()>> all = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
  const char* names[] = {"exact-case type-1 ladders",      "free-case type-2 closed form",
                         "four imaginary type-2 solutions", "positivity region alpha = -pi/2",
                         "radial closed forms",            "negative radial level predicate",
                         "unbounded-below windows at x = 1", "oscillator limit",
                         "structural invariants",          "monotonicity and interlacing"};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 10; ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r{id, names[id - 1], false, "", 0};
    try {
      r = all[id - 1]();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(r);
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << "criterion " << r.id << " " << (r.pass ? "PASS" : "FAIL") << " " << r.name << ": " << r.detail;
  return os.str();
}

}  // namespace calogero::validation
