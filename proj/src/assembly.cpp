#include "calogero/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "calogero/errors.hpp"

namespace calogero::assembly {

namespace {

constexpr double kPi = std::numbers::pi;

radial::RadialBoundary boundary_for(const ModelConfig& cfg, double lambda) {
  if (lambda >= 1.0) return RadialBoundary::zero();
  return cfg.kappa.at(lambda);
}

std::vector<EnergyLevel> radial_tower(const ModelConfig& cfg, const AngularLevel& lv, double e_max) {
  const double c = cfg.c();
  const double lambda = lv.mu.lambda();
  std::vector<EnergyLevel> out;
  auto emit = [&](double e, int m, RadialBoundary bc) {
    out.push_back({e, m, lv, lv.reps, lv.multiplicity, bc});
  };
  if (lambda == 0.0) {
    // only reachable at nu = 1; kappa = 0 limit of the lambda > 0 ladder
    for (int m = 0; 2.0 * c * (2.0 * m + 1.0) <= e_max; ++m) emit(2.0 * c * (2.0 * m + 1.0), m, RadialBoundary::zero());
    return out;
  }
  RadialBoundary bc = boundary_for(cfg, lambda);
  for (const auto& r : radial::solve_radial(lambda, bc, c, radial::Truncation{INT_MAX, e_max})) emit(r.energy, r.m, bc);
  return out;
}

bool energy_less(const EnergyLevel& a, const EnergyLevel& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  return a.angular.series < b.angular.series;
}

void merge_reps(std::vector<symmetry::Rep>& into, const std::vector<symmetry::Rep>& from) {
  for (auto r : from)
    if (std::find(into.begin(), into.end(), r) == into.end()) into.push_back(r);
  std::sort(into.begin(), into.end());
}

}  // namespace

ModelConfig::ModelConfig(Coupling c, ConnectionMatrix u, double omega_, KappaPolicy k)
    : coupling(c), U(u), omega(omega_), kappa(std::move(k)) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("omega must be positive and finite");
  if (!kappa.at) throw DomainError("kappa policy is empty");
}

ModelConfig ModelConfig::for_case(angular::ExplicitCase e, Coupling c, double omega_, KappaPolicy k) {
  ModelConfig cfg(c, angular::connection_of(e), omega_, std::move(k));
  cfg.explicit_case = e;
  return cfg;
}

double ModelConfig::c() const { return std::sqrt(3.0 / 8.0) * omega; }

std::vector<AngularLevel> angular_levels(const ModelConfig& cfg, double e_max) {
  if (!(e_max > 0.0)) throw DomainError("e_max must be positive");
  const angular::Truncation t{INT_MAX, (e_max / (2.0 * cfg.c()) + 1.0) / 3.0};
  const Coupling& cp = cfg.coupling;
  std::vector<AngularLevel> out;
  if (cfg.explicit_case) {
    out = angular::explicit_spectrum(*cfg.explicit_case, cp, t);
  } else if (cfg.U.is_separating()) {
    out = angular::separating_spectrum(cp, cfg.U.separating_alpha(), t);
  } else {
    for (auto f : {angular::Family::A, angular::Family::B})
      for (int sign : {+1, -1})
        for (auto& l : angular::solve_type1(cp, cfg.U, f, sign, t)) out.push_back(l);
    for (double rt : {0.5, -0.5})
      for (auto& l : angular::solve_type2(cp, cfg.U, rt, t)) out.push_back(l);
  }
  std::erase_if(out, [](const AngularLevel& l) { return !l.mu.is_real(); });
  std::stable_sort(out.begin(), out.end(), angular::level_less);
  return out;
}

std::vector<EnergyGroup> collate(const std::vector<EnergyLevel>& levels, double tol) {
  std::vector<EnergyGroup> out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    if (!out.empty() && std::abs(l.energy - out.back().energy) < tol) {
      auto& g = out.back();
      g.multiplicity += l.total_multiplicity;
      merge_reps(g.reps, l.reps);
      g.members.push_back(i);
      continue;
    }
    EnergyGroup g{l.energy, l.total_multiplicity, {}, {i}};
    merge_reps(g.reps, l.reps);
    out.push_back(std::move(g));
  }
  return out;
}

EnergySpectrum energy_spectrum(const ModelConfig& cfg, double e_max, const SpectrumOptions& opts) {
  if (!(e_max > 0.0) || !std::isfinite(e_max)) throw DomainError("e_max must be positive and finite");
  EnergySpectrum spec{cfg, e_max, {}, {}, {}, {}};
  const double c = cfg.c();

  if (cfg.coupling.is_oscillator_limit()) {
    if (!cfg.explicit_case) throw DomainError("nu = 1 is only supported for the explicit cases");
    spec.permissibility.diagnostics.push_back("nu = 1: closed-form ladders, no negative angular levels");
  } else {
    spec.permissibility = angular::permissibility(cfg.coupling, cfg.U);
  }

  if (!spec.permissibility.permissible) {
    if (opts.negative_window) {
      auto [lo, hi] = *opts.negative_window;
      for (const auto& a : spec.permissibility.negative_levels) {
        double x = 3.0 * a.mu.value;
        auto bc = cfg.kappa.at(a.mu.lambda());
        for (const auto& r : radial::solve_radial_negative(x, bc, c, lo, hi)) spec.negative_window.push_back({a, r});
      }
    }
    return spec;
  }

  const auto ang = angular_levels(cfg, e_max);
  std::vector<std::vector<EnergyLevel>> towers(ang.size());
  if (opts.parallel && ang.size() > 1) {
    std::vector<std::future<std::vector<EnergyLevel>>> jobs;
    jobs.reserve(ang.size());
    for (const auto& a : ang)
      jobs.push_back(std::async(std::launch::async, [&cfg, &a, e_max] { return radial_tower(cfg, a, e_max); }));
    for (std::size_t i = 0; i < jobs.size(); ++i) towers[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < ang.size(); ++i) towers[i] = radial_tower(cfg, ang[i], e_max);
  }
  for (auto& t : towers)
    for (auto& l : t)
      if (l.energy <= e_max) spec.levels.push_back(std::move(l));
  std::stable_sort(spec.levels.begin(), spec.levels.end(), energy_less);
  spec.groups = collate(spec.levels, 1e-9 * 2.0 * c);
  return spec;
}

namespace {

std::vector<Shell> shells(const EnergySpectrum& s, double tol, int& stray) {
  const double c = s.config.c();
  std::vector<Shell> out;
  for (int n = 0; 2.0 * c * (n + 1.0) + tol <= s.e_max; ++n) out.push_back({n, 2.0 * c * (n + 1.0), n + 1, 0, 0.0});
  stray = 0;
  for (const auto& l : s.levels) {
    double k = l.energy / (2.0 * c) - 1.0;
    long n = std::lround(k);
    double dev = std::abs(l.energy - 2.0 * c * (n + 1.0));
    if (n < 0 || dev >= tol) {
      ++stray;
      continue;
    }
    if (n >= static_cast<long>(out.size())) continue;
    out[n].found += l.total_multiplicity;
    out[n].max_deviation = std::max(out[n].max_deviation, dev);
  }
  return out;
}

}  // namespace

OscillatorReport oscillator_limit_check(double omega, double e_max) {
  using angular::ExplicitCase;
  OscillatorReport rep;
  auto exact = energy_spectrum(ModelConfig::for_case(ExplicitCase::FreeSigma1, Coupling::oscillator_limit(), omega), e_max);
  auto near = energy_spectrum(ModelConfig::for_case(ExplicitCase::FreeSigma1, Coupling(1.0 - 1e-6), omega), e_max);
  rep.c = exact.config.c();
  rep.exact = shells(exact, 1e-9 * 2.0 * rep.c, rep.stray_exact);
  rep.near_limit = shells(near, 2.0 * rep.c * 1e-5, rep.stray_near);
  rep.ok = rep.stray_exact == 0 && rep.stray_near == 0 && !rep.exact.empty();
  for (const auto* v : {&rep.exact, &rep.near_limit})
    for (const auto& sh : *v) rep.ok = rep.ok && sh.found == sh.expected;
  return rep;
}

std::array<double, 3> jacobi_coords(double r, double phi) {
  const double k = r * std::sqrt(2.0);
  return {k * std::sin(phi), k * std::sin(phi + 2.0 * kPi / 3.0), k * std::sin(phi + 4.0 * kPi / 3.0)};
}

}  // namespace calogero::assembly
