#include "calogero/io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "calogero/errors.hpp"

namespace calogero::io {

using nlohmann::json;

namespace {

void dump(const json& j, std::string& out, int indent) {
  const std::string pad(indent, ' '), inner(indent + 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        dump(it.value(), out, indent + 2);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump(j[i], out, indent + 2);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      double v = j.get<double>();
      out += std::isfinite(v) ? format_real(v) : json(format_real(v)).dump();
      return;
    }
    default:
      out += j.dump();
  }
}

double real_of(const json& j) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw DomainError("not a number: " + s);
  }
  return j.get<double>();
}

json reps_json(const std::vector<symmetry::Rep>& reps) {
  json a = json::array();
  for (auto r : reps) a.push_back(std::string(symmetry::label(r)));
  return a;
}

std::string reps_cell(const std::vector<symmetry::Rep>& reps) {
  std::string s;
  for (auto r : reps) {
    if (!s.empty()) s += ';';
    s += symmetry::label(r);
  }
  return s;
}

// lambda from the printed mu, so a re-parsed spectrum serializes to the same bytes
double printed_lambda(angular::MuValue mu) {
  mu.value = std::stod(format_real(mu.value));
  return mu.lambda();
}

json negative_json(const angular::AngularLevel& l) {
  return {{"lambda", printed_lambda(l.mu)}, {"mu_imag", l.mu.value}, {"series", std::string(angular::series_name(l.series))}};
}

}  // namespace

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

std::string spectrum_json(const assembly::EnergySpectrum& s, const RunInfo& info) {
  const auto& cfg = s.config;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = {{"nu", cfg.coupling.nu()},
                 {"alpha", cfg.U.alpha()},
                 {"beta", cfg.U.beta()},
                 {"omega", cfg.omega},
                 {"c", cfg.c()},
                 {"emax", s.e_max},
                 {"max_levels", info.max_levels},
                 {"case", cfg.explicit_case ? json(std::string(angular::case_name(*cfg.explicit_case))) : json()}};
  j["config"]["kappa"] = info.kappa_infinite ? json("inf") : json(info.kappa);
  j["permissible"] = s.permissibility.permissible;
  j["permissibility"] = {{"criteria_fired", s.permissibility.criteria_fired},
                         {"diagnostics", s.permissibility.diagnostics}};
  j["negative_levels"] = json::array();
  for (const auto& l : s.permissibility.negative_levels) j["negative_levels"].push_back(negative_json(l));
  j["levels"] = json::array();
  for (const auto& l : s.levels)
    j["levels"].push_back({{"E", l.energy},
                           {"m", l.m},
                           {"mu", l.angular.mu.value},
                           {"lambda", printed_lambda(l.angular.mu)},
                           {"series", std::string(angular::series_name(l.angular.series))},
                           {"reps", reps_json(l.reps)},
                           {"multiplicity", l.total_multiplicity}});
  j["groups"] = json::array();
  for (const auto& g : s.groups)
    j["groups"].push_back({{"E", g.energy}, {"multiplicity", g.multiplicity}, {"reps", reps_json(g.reps)}, {"members", g.members}});
  j["negative_window"] = json::array();
  for (const auto& n : s.negative_window) {
    json e = negative_json(n.angular);
    e["E"] = n.radial.energy;
    e["epsilon"] = n.radial.epsilon;
    e["k"] = n.radial.m;
    j["negative_window"].push_back(e);
  }
  std::string out;
  dump(j, out, 0);
  out += '\n';
  return out;
}

std::string spectrum_csv(const assembly::EnergySpectrum& s, const RunInfo&) {
  CsvWriter w({"E", "m", "mu", "lambda", "series", "reps", "multiplicity"});
  for (const auto& l : s.levels)
    w.row({format_real(l.energy), std::to_string(l.m), format_real(l.angular.mu.value), format_real(printed_lambda(l.angular.mu)),
           std::string(angular::series_name(l.angular.series)), reps_cell(l.reps), std::to_string(l.total_multiplicity)});
  return w.str();
}

ParsedSpectrum parse_spectrum_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("schema_version").get<int>() != kSchemaVersion) throw DomainError("unsupported schema_version");
  const json& c = j.at("config");
  RunInfo info;
  info.max_levels = c.at("max_levels").get<int>();
  double kappa = real_of(c.at("kappa"));
  info.kappa_infinite = std::isinf(kappa);
  info.kappa = info.kappa_infinite ? 0.0 : kappa;
  auto bc = info.kappa_infinite ? radial::RadialBoundary::infinity() : radial::RadialBoundary::finite(info.kappa);
  auto policy = assembly::KappaPolicy::constant(bc);
  angular::Coupling cp(real_of(c.at("nu")));
  double omega = real_of(c.at("omega"));
  auto cfg = c.at("case").is_null()
                 ? assembly::ModelConfig(cp, angular::ConnectionMatrix(real_of(c.at("alpha")), real_of(c.at("beta"))), omega, policy)
                 : assembly::ModelConfig::for_case(angular::case_from_name(c.at("case").get<std::string>()), cp, omega, policy);

  assembly::EnergySpectrum s{cfg, real_of(c.at("emax")), {}, {}, {}, {}};
  s.permissibility.permissible = j.at("permissible").get<bool>();
  s.permissibility.criteria_fired = j.at("permissibility").at("criteria_fired").get<std::vector<std::string>>();
  s.permissibility.diagnostics = j.at("permissibility").at("diagnostics").get<std::vector<std::string>>();
  auto reps_of = [](const json& a) {
    std::vector<symmetry::Rep> r;
    for (const auto& x : a) r.push_back(symmetry::rep_from_label(x.get<std::string>()));
    return r;
  };
  auto negative = [](const json& e) {
    return angular::make_level(angular::MuValue::imaginary(real_of(e.at("mu_imag"))),
                               angular::series_from_name(e.at("series").get<std::string>()));
  };
  for (const auto& e : j.at("negative_levels")) s.permissibility.negative_levels.push_back(negative(e));
  for (const auto& e : j.at("levels")) {
    auto a = angular::make_level(angular::MuValue::real(real_of(e.at("mu"))),
                                 angular::series_from_name(e.at("series").get<std::string>()));
    double lambda = a.mu.lambda();
    s.levels.push_back({real_of(e.at("E")), e.at("m").get<int>(), a, reps_of(e.at("reps")), e.at("multiplicity").get<int>(),
                        lambda >= 1.0 ? radial::RadialBoundary::zero() : bc});
  }
  for (const auto& e : j.at("groups"))
    s.groups.push_back({real_of(e.at("E")), e.at("multiplicity").get<int>(), reps_of(e.at("reps")),
                        e.at("members").get<std::vector<std::size_t>>()});
  for (const auto& e : j.at("negative_window"))
    s.negative_window.push_back({negative(e), {real_of(e.at("E")), e.at("k").get<int>(), real_of(e.at("epsilon"))}});
  return {std::move(s), info};
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  out_ = "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw DomainError("csv row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ',';
    const auto& c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      out_ += c;
      continue;
    }
    out_ += '"';
    for (char ch : c) {
      if (ch == '"') out_ += '"';
      out_ += ch;
    }
    out_ += '"';
  }
  out_ += '\n';
}

std::string CsvWriter::str() const { return out_; }

}  // namespace calogero::io
