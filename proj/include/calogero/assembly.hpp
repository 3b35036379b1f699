#pragma once

#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "calogero/angular.hpp"
#include "calogero/radial.hpp"

namespace calogero::assembly {

using angular::AngularLevel;
using angular::ConnectionMatrix;
using angular::Coupling;
using radial::RadialBoundary;

/// kappa(lambda) for 0 < lambda < 1; ignored elsewhere. Default kappa = 0.
struct KappaPolicy {
  std::function<RadialBoundary(double lambda)> at = [](double) { return RadialBoundary::zero(); };

  static KappaPolicy constant(RadialBoundary bc) {
    return {[bc](double) { return bc; }};
  }
};

/// hbar = 2m = 1 throughout.
struct ModelConfig {
  Coupling coupling;
  ConnectionMatrix U;
  double omega = 1.0;
  KappaPolicy kappa;
  /// When set, the angular ladders come from the closed forms and U must match the case.
  std::optional<angular::ExplicitCase> explicit_case;

  ModelConfig(Coupling c, ConnectionMatrix u, double omega_, KappaPolicy k = {});
  static ModelConfig for_case(angular::ExplicitCase e, Coupling c, double omega_, KappaPolicy k = {});

  /// sqrt(3/8) omega
  double c() const;
};

struct EnergyLevel {
  double energy;
  int m;
  AngularLevel angular;
  std::vector<symmetry::Rep> reps;
  int total_multiplicity;
  radial::RadialBoundary kappa;  ///< the boundary actually used (kappa = 0 when lambda >= 1)
};

/// Levels closer than 1e-9 * 2c, multiplicities summed, labels merged.
struct EnergyGroup {
  double energy;
  int multiplicity;
  std::vector<symmetry::Rep> reps;
  std::vector<std::size_t> members;
};

struct NegativeWindowLevel {
  AngularLevel angular;
  radial::RadialLevel radial;
};

struct EnergySpectrum {
  ModelConfig config;
  double e_max;
  angular::PermissibilityReport permissibility;
  std::vector<EnergyLevel> levels;
  std::vector<EnergyGroup> groups;
  /// Only filled for impermissible configs when a window was requested.
  std::vector<NegativeWindowLevel> negative_window;
};

struct SpectrumOptions {
  /// epsilon window for the lambda < 0 radial solutions of an impermissible config
  std::optional<std::pair<double, double>> negative_window;
  bool parallel = true;
};

/// All angular levels with 3 mu <= e_max/(2c) + 1 (real levels only; negative ones go to the report).
std::vector<AngularLevel> angular_levels(const ModelConfig& config, double e_max);

EnergySpectrum energy_spectrum(const ModelConfig& config, double e_max, const SpectrumOptions& opts = {});

/// Merge levels with |dE| < tol; input must be sorted by energy.
std::vector<EnergyGroup> collate(const std::vector<EnergyLevel>& levels, double tol);

struct Shell {
  int n;
  double energy;
  int expected;
  int found;
  double max_deviation;  ///< |E - 2c(N + 1)| over the members
};

struct OscillatorReport {
  double c;
  std::vector<Shell> exact;        ///< nu = 1
  std::vector<Shell> near_limit;   ///< nu = 1 - 1e-6
  int stray_exact = 0;             ///< levels on no shell
  int stray_near = 0;
  bool ok = false;
};

/// Shell structure E = 2c(N + 1), degeneracy N + 1, for U = sigma1 at nu = 1 and nu = 1 - 1e-6.
OscillatorReport oscillator_limit_check(double omega, double e_max);

/// (x1 - x2, x2 - x3, x3 - x1) = r sqrt(2) (sin phi, sin(phi + 2pi/3), sin(phi + 4pi/3)).
std::array<double, 3> jacobi_coords(double r, double phi);

}  // namespace calogero::assembly
