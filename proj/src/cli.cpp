#include "calogero/cli.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "calogero/assembly.hpp"
#include "calogero/errors.hpp"
#include "calogero/io.hpp"
#include "calogero/specfun.hpp"
#include "calogero/validation.hpp"

namespace calogero::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct BadInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw BadInput(key + ": not a number: '" + v + "'");
  }
  if (used != v.size()) throw BadInput(key + ": not a number: '" + v + "'");
  return x;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw BadInput("cannot open output file '" + path + "'");
  f << text;
  if (!f) throw BadInput("cannot write output file '" + path + "'");
}

std::string cell(double x) { return io::format_real(x); }

// samples lo + i*step, i = 0..n
template <class F>
void sample(double lo, double hi, double step, F&& f) {
  const long n = std::lround((hi - lo) / step);
  for (long i = 0; i <= n; ++i) f(lo + i * step);
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  std::string config_file, case_name, kappa = "0", format = "json", out = "-", negative_window;
  double nu = 0.0, alpha = 0.0, beta = 0.0, omega = 1.0, emax = 20.0;
  int levels = -1;
};

int cmd_spectrum(CLI::App& app, SpectrumArgs a, std::ostream& out) {
  if (!a.config_file.empty()) {
    std::ifstream f(a.config_file);
    if (!f) throw BadInput("cannot read config file '" + a.config_file + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    for (const auto& [k, v] : parse_config_file(ss.str())) {
      static const std::set<std::string> keys{"nu", "alpha", "beta", "omega", "emax", "kappa", "levels", "case", "format", "out"};
      if (!keys.count(k)) throw BadInput("unknown config key '" + k + "'");
      if (app.count("--" + k) > 0) continue;
      if (k == "nu") a.nu = parse_real(k, v);
      else if (k == "alpha") a.alpha = parse_real(k, v);
      else if (k == "beta") a.beta = parse_real(k, v);
      else if (k == "omega") a.omega = parse_real(k, v);
      else if (k == "emax") a.emax = parse_real(k, v);
      else if (k == "kappa") a.kappa = v;
      else if (k == "levels") a.levels = static_cast<int>(parse_real(k, v));
      else if (k == "case") a.case_name = v;
      else if (k == "format") a.format = v;
      else a.out = v;
    }
  }
  if (a.nu == 0.0) throw BadInput("nu is required: it must lie in (1/2, 3/2) with nu != 1");
  if (a.format != "json" && a.format != "csv") throw BadInput("format must be json or csv");
  if (!(a.emax > 0.0) || !std::isfinite(a.emax)) throw BadInput("emax must be positive");
  if (a.levels == 0 || a.levels < -1) throw BadInput("levels must be a positive count");

  io::RunInfo info;
  info.max_levels = a.levels;
  radial::RadialBoundary bc;
  if (a.kappa == "inf" || a.kappa == "infinity") {
    bc = radial::RadialBoundary::infinity();
    info.kappa_infinite = true;
  } else {
    info.kappa = parse_real("kappa", a.kappa);
    if (!std::isfinite(info.kappa)) throw BadInput("kappa must be finite or 'inf'");
    bc = radial::RadialBoundary::finite(info.kappa);
  }

  std::optional<assembly::ModelConfig> cfg;
  try {
    angular::Coupling cp(a.nu);
    auto policy = assembly::KappaPolicy::constant(bc);
    if (!a.case_name.empty()) {
      angular::ExplicitCase e = angular::case_from_name(a.case_name);
      cfg = assembly::ModelConfig::for_case(e, cp, a.omega, policy);
    } else {
      cfg = assembly::ModelConfig(cp, angular::ConnectionMatrix(a.alpha, a.beta), a.omega, policy);
    }
  } catch (const DomainError& e) {
    throw BadInput(e.what());
  }

  assembly::SpectrumOptions opts;
  if (!a.negative_window.empty()) {
    auto comma = a.negative_window.find(',');
    if (comma == std::string::npos) throw BadInput("negative-window must be 'lo,hi'");
    double lo = parse_real("negative-window", trim(a.negative_window.substr(0, comma)));
    double hi = parse_real("negative-window", trim(a.negative_window.substr(comma + 1)));
    if (!(lo < hi)) throw BadInput("negative-window needs lo < hi");
    opts.negative_window = std::pair{lo, hi};
  }

  auto spec = assembly::energy_spectrum(*cfg, a.emax, opts);
  if (a.levels > 0 && static_cast<int>(spec.levels.size()) > a.levels) {
    spec.levels.resize(a.levels);
    spec.groups = assembly::collate(spec.levels, 1e-9 * 2.0 * cfg->c());
  }
  write_output(a.out, a.format == "json" ? io::spectrum_json(spec, info) : io::spectrum_csv(spec, info), out);
  return kOk;
}

// ---------------------------------------------------------------- figure data

struct FigureArgs {
  int figure = 0;
  std::string out = ".";
  std::optional<double> nu, lambda;
};

void put(const std::filesystem::path& dir, const std::string& name, const io::CsvWriter& w, std::vector<std::string>& written) {
  auto p = dir / name;
  std::ofstream f(p, std::ios::binary);
  if (!f) throw BadInput("cannot open output file '" + p.string() + "'");
  f << w.str();
  written.push_back(p.string());
}

// value or an empty cell near a pole
template <class F>
std::string masked(F&& f) {
  try {
    double v = f();
    return std::isfinite(v) ? cell(v) : "";
  } catch (const PoleError&) {
    return "";
  }
}

int cmd_figure(const FigureArgs& a, std::ostream& out) {
  using namespace angular;
  std::filesystem::path dir(a.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir)) throw BadInput("output directory '" + a.out + "' is not usable");
  std::vector<std::string> written;

  switch (a.figure) {
    case 2: {
      const double nu = a.nu.value_or(2.0 / 3.0);
      Coupling c = [&] {
        try {
          return Coupling(nu);
        } catch (const DomainError& e) {
          throw BadInput(e.what());
        }
      }();
      auto near_pole = [&](Family f, double mu) {
        for (int m = 0; type1_pole(f, c, m) < 9.0; ++m)
          if (std::abs(mu - type1_pole(f, c, m)) < 2e-3) return true;
        return false;
      };
      io::CsvWriter w({"mu", "F_A", "F_B"});
      sample(0.0, 8.0, 1e-3, [&](double mu) {
        std::string fa = near_pole(Family::A, mu) ? "" : masked([&] { return f_type1(Family::A, c, MuValue::real(mu)); });
        std::string fb = near_pole(Family::B, mu) ? "" : masked([&] { return f_type1(Family::B, c, MuValue::real(mu)); });
        w.row({cell(mu), fa, fb});
      });
      put(dir, "fig2.csv", w, written);
      io::CsvWriter p({"family", "kind", "m", "mu"});
      for (Family f : {Family::A, Family::B}) {
        std::string fn = f == Family::A ? "A" : "B";
        for (int m = 0; type1_pole(f, c, m) <= 8.0; ++m) p.row({fn, "pole", std::to_string(m), cell(type1_pole(f, c, m))});
        for (int m = 0; type1_zero(f, c, m) <= 8.0; ++m) p.row({fn, "zero", std::to_string(m), cell(type1_zero(f, c, m))});
      }
      put(dir, "fig2_ladders.csv", p, written);
      break;
    }
    case 3: {
      Coupling c(21.0 / 20.0);
      ConnectionMatrix U(11 * kPi / 20, kPi / 10);
      io::CsvWriter w({"x", "F2", "F2_scaled"});
      sample(0.0, 3.0, 1e-3, [&](double x) {
        w.row({cell(x), masked([&] { return f2(c, U, MuValue::imaginary(x)); }), cell(f2_scaled_imaginary(c, U, x))});
      });
      put(dir, "fig3_imaginary.csv", w, written);
      io::CsvWriter r({"re_tau", "x"});
      for (double rt : {0.5, -0.5})
        for (double x : type2_imaginary_scan(c, U, rt).roots) r.row({cell(rt), cell(x)});
      put(dir, "fig3_roots.csv", r, written);
      Coupling c2(1001.0 / 1000.0);
      ConnectionMatrix V(3 * kPi / 10, 715 * kPi / 1000);
      io::CsvWriter q({"mu", "F2"});
      sample(0.0, 8.0, 1e-3, [&](double mu) { q.row({cell(mu), masked([&] { return f2(c2, V, MuValue::real(mu)); })}); });
      put(dir, "fig3_real.csv", q, written);
      break;
    }
    case 4: {
      const double lam = a.lambda.value_or(0.2);
      if (!(lam > 0.0 && lam < 1.0)) throw BadInput("lambda must lie in (0, 1)");
      io::CsvWriter w({"epsilon", "F_lambda"});
      sample(-2.0, 6.0, 1e-3, [&](double e) {
        bool near = false;
        for (int m = 0; radial::f_lambda_pole(lam, m) < 7.0; ++m) near = near || std::abs(e - radial::f_lambda_pole(lam, m)) < 2e-3;
        w.row({cell(e), near ? "" : masked([&] { return radial::f_lambda(lam, e); })});
      });
      put(dir, "fig4.csv", w, written);
      io::CsvWriter p({"kind", "m", "epsilon"});
      for (int m = 0; radial::f_lambda_pole(lam, m) <= 6.0; ++m) p.row({"pole", std::to_string(m), cell(radial::f_lambda_pole(lam, m))});
      for (int m = 0; radial::f_lambda_zero(lam, m) <= 6.0; ++m) p.row({"zero", std::to_string(m), cell(radial::f_lambda_zero(lam, m))});
      put(dir, "fig4_ladders.csv", p, written);
      break;
    }
    case 5: {
      const double nu = a.nu.value_or(0.8);
      Coupling c = [&] {
        try {
          return Coupling(nu);
        } catch (const DomainError& e) {
          throw BadInput(e.what());
        }
      }();
      io::CsvWriter w({"case", "series", "n", "mu", "multiplicity", "reps"});
      for (auto e : {ExplicitCase::DirichletMinusOne, ExplicitCase::NeumannPlusOne, ExplicitCase::FreeSigma1,
                     ExplicitCase::MinusSigma1}) {
        std::map<Series, int> count;
        for (const auto& l : explicit_spectrum(e, c, Truncation{INT_MAX, 8.0})) {
          std::string reps;
          for (auto r : l.reps) reps += (reps.empty() ? "" : ";") + std::string(symmetry::label(r));
          w.row({std::string(case_name(e)), std::string(series_name(l.series)), std::to_string(count[l.series]++), cell(l.mu.value),
                 std::to_string(l.multiplicity), reps});
        }
      }
      put(dir, "fig5.csv", w, written);
      break;
    }
    default:
      throw BadInput("unknown figure id " + std::to_string(a.figure) + " (expected 2, 3, 4 or 5)");
  }
  for (const auto& w : written) out << w << "\n";
  return kOk;
}

// ---------------------------------------------------------------- permissibility map

struct MapArgs {
  double nu = 0.0;
  double alpha_min = -kPi, alpha_max = kPi, beta_min = -kPi / 2, beta_max = kPi / 2;
  int alpha_n = 21, beta_n = 21;
  int threads = 0;
  std::string out = "-";
};

int cmd_map(const MapArgs& a, std::ostream& out) {
  std::optional<angular::Coupling> cp;
  try {
    cp.emplace(a.nu);
  } catch (const DomainError& e) {
    throw BadInput(e.what());
  }
  if (a.alpha_n < 1 || a.beta_n < 1) throw BadInput("grid sizes must be positive");
  if (static_cast<long long>(a.alpha_n) * a.beta_n > 1000000) throw BadInput("grid has more than 10^6 cells");
  auto axis = [](double lo, double hi, int n, int i) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); };

  const long cells = static_cast<long>(a.alpha_n) * a.beta_n;
  auto row_of = [&](long k) -> std::vector<std::string> {
    double alpha = axis(a.alpha_min, a.alpha_max, a.alpha_n, static_cast<int>(k / a.beta_n));
    double beta = axis(a.beta_min, a.beta_max, a.beta_n, static_cast<int>(k % a.beta_n));
    angular::ConnectionMatrix U(alpha, beta);
    auto r = angular::permissibility(*cp, U);
    double most = 0.0;
    for (const auto& l : r.negative_levels) most = std::min(most, l.mu.lambda());
    return {cell(alpha), cell(beta), U.is_separating() ? "1" : "0", r.permissible ? "1" : "0",
            std::to_string(r.negative_levels.size()), r.negative_levels.empty() ? "" : cell(most), U.is_separating() || angular::certified_cutoff(*cp, U).certified ? "1" : "0"};
  };
  int workers = a.threads > 0 ? a.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<long>(workers, cells));
  std::vector<std::future<std::vector<std::vector<std::string>>>> jobs;
  for (int w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      std::vector<std::vector<std::string>> rows;
      for (long k = w; k < cells; k += workers) rows.push_back(row_of(k));
      return rows;
    }));
  std::vector<std::vector<std::vector<std::string>>> parts;
  for (auto& j : jobs) parts.push_back(j.get());
  io::CsvWriter csv({"alpha", "beta", "separating", "permissible", "negative_count", "most_negative_lambda", "certified"});
  for (long k = 0; k < cells; ++k) csv.row(parts[k % workers][k / workers]);
  write_output(a.out, csv.str(), out);
  return kOk;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  std::string fault, report;
  std::vector<int> only;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  if (!a.fault.empty() && a.fault != "gamma") throw BadInput("unknown fault '" + a.fault + "' (only 'gamma' is available)");
  for (int id : a.only)
    if (id < 1 || id > 10) throw BadInput("criterion ids run from 1 to 10");
  if (a.fault == "gamma") specfun::testing::set_gamma_perturbation(1e-4);
  std::vector<validation::CriterionResult> results;
  try {
    results = validation::run_acceptance(a.only);
  } catch (...) {
    specfun::testing::set_gamma_perturbation(0.0);
    throw;
  }
  specfun::testing::set_gamma_perturbation(0.0);
  bool ok = true;
  int passed = 0;
  nlohmann::json rep;
  rep["schema_version"] = io::kSchemaVersion;
  rep["fault"] = a.fault.empty() ? nlohmann::json() : nlohmann::json(a.fault);
  rep["criteria"] = nlohmann::json::array();
  for (const auto& r : results) {
    out << validation::format_line(r) << "\n";
    ok = ok && r.pass;
    passed += r.pass;
    rep["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  rep["pass"] = ok;
  out << "summary: " << passed << "/" << results.size() << " criteria passed\n";
  if (!a.report.empty()) write_output(a.report, rep.dump(2) + "\n", out);
  return ok ? kOk : kValidationFailed;
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw BadInput("config line " + std::to_string(no) + ": expected key = value");
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    if (k.empty()) throw BadInput("config line " + std::to_string(no) + ": empty key");
    kv[k] = v;
  }
  return kv;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectra of the three-particle Calogero model with D6-symmetric boundary conditions", "calogero"};
  app.require_subcommand(1);

  SpectrumArgs sa;
  auto* sp = app.add_subcommand("spectrum", "assembled energy spectrum as JSON or CSV");
  sp->add_option("--config", sa.config_file, "flat key = value file; flags override it");
  sp->add_option("--case", sa.case_name, "dirichlet | neumann | free | minus_sigma1");
  sp->add_option("--nu", sa.nu, "coupling, 1/2 < nu < 3/2, nu != 1");
  sp->add_option("--alpha", sa.alpha, "U angle alpha");
  sp->add_option("--beta", sa.beta, "U angle beta");
  sp->add_option("--omega", sa.omega, "harmonic frequency");
  sp->add_option("--kappa", sa.kappa, "radial extension parameter for lambda < 1 (number or inf)");
  sp->add_option("--emax", sa.emax, "energy cutoff");
  sp->add_option("--levels", sa.levels, "keep at most this many levels");
  sp->add_option("--format", sa.format, "json | csv");
  sp->add_option("--out", sa.out, "output file, - for stdout");
  sp->add_option("--negative-window", sa.negative_window, "lo,hi epsilon window for lambda < 0 radial levels");

  FigureArgs fa;
  auto* fg = app.add_subcommand("figure-data", "CSV data behind figures 2-5");
  fg->add_option("--figure", fa.figure, "2, 3, 4 or 5")->required();
  fg->add_option("--out", fa.out, "output directory");
  fg->add_option("--nu", fa.nu, "override nu (figures 2 and 5)");
  fg->add_option("--lambda", fa.lambda, "override lambda (figure 4)");

  MapArgs ma;
  auto* mp = app.add_subcommand("permissible-map", "permissibility over an (alpha, beta) grid");
  mp->add_option("--nu", ma.nu, "coupling")->required();
  mp->add_option("--alpha-min", ma.alpha_min);
  mp->add_option("--alpha-max", ma.alpha_max);
  mp->add_option("--alpha-n", ma.alpha_n);
  mp->add_option("--beta-min", ma.beta_min);
  mp->add_option("--beta-max", ma.beta_max);
  mp->add_option("--beta-n", ma.beta_n);
  mp->add_option("--threads", ma.threads);
  mp->add_option("--out", ma.out, "output file, - for stdout");

  ValidateArgs va;
  auto* vd = app.add_subcommand("validate", "run the acceptance criteria");
  vd->add_option("--inject-fault", va.fault, "perturb a kernel constant (gamma)");
  vd->add_option("--only", va.only, "criterion ids");
  vd->add_option("--report", va.report, "JSON report file");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*sp) return cmd_spectrum(*sp, sa, out);
    if (*fg) return cmd_figure(fa, out);
    if (*mp) return cmd_map(ma, out);
    if (*vd) return cmd_validate(va, out);
  } catch (const BadInput& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kBadInput;
}

}  // namespace calogero::cli
