#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "calogero/assembly.hpp"

namespace calogero::io {

inline constexpr int kSchemaVersion = 1;

/// Everything needed to rebuild the run: the spectrum config plus the kappa used for lambda < 1.
struct RunInfo {
  double kappa = 0.0;
  bool kappa_infinite = false;
  int max_levels = -1;  ///< -1: all levels up to e_max
};

/// %.12e, with "inf"/"-inf"/"nan" spelled out (only reachable for diagnostics).
std::string format_real(double x);

/// Sorted keys, two-space indent, every float through format_real. Ends with a newline.
std::string spectrum_json(const assembly::EnergySpectrum& s, const RunInfo& info);
/// First line "# schema_version=1", then "E,m,mu,lambda,series,reps,multiplicity".
std::string spectrum_csv(const assembly::EnergySpectrum& s, const RunInfo& info);

/// Parses spectrum_json output back; levels are rebuilt with their angular labels.
struct ParsedSpectrum {
  assembly::EnergySpectrum spectrum;
  RunInfo info;
};
ParsedSpectrum parse_spectrum_json(const std::string& text);

/// RFC 4180-ish row with the first line carrying the schema version.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  std::string str() const;

 private:
  std::size_t width_;
  std::string out_;
};

}  // namespace calogero::io
