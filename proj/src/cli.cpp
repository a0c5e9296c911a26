#include "conedisp/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "conedisp/errors.hpp"
#include "conedisp/profile.hpp"
#include "conedisp/scattering.hpp"
#include "conedisp/spectral.hpp"

namespace conedisp {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ProfileArgs {
  std::string kind = "hyperboloid";
  double a = 1.0, radius = 4.0;
  std::vector<double> coeffs;
  std::string file;
  int d = 1, n = 1;
};

void add_profile_options(CLI::App* app, ProfileArgs& p) {
  app->add_option("--profile", p.kind, "hyperboloid, spliced_sphere, closed_form, sampled, cylinder or free")
      ->check(CLI::IsMember({"hyperboloid", "spliced_sphere", "closed_form", "sampled", "cylinder", "free"}))
      ->capture_default_str();
  app->add_option("--a", p.a, "hyperboloid scale or neck radius")->capture_default_str();
  app->add_option("--radius", p.radius, "sphere radius of the spliced profile")->capture_default_str();
  app->add_option("--coeffs", p.coeffs, "closed form: r^2 = x^2 + sum_k c_k <x>^-k");
  app->add_option("--file", p.file, "sampled profile CSV with columns x,r");
  app->add_option("--d", p.d, "cross-section dimension")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--n", p.n, "cross-section mode")->check(CLI::NonNegativeNumber)->capture_default_str();
}

ReducedOperator build_operator(const ProfileArgs& p) {
  if (p.kind == "free") return make_model_operator(0.5, [](double) { return 0.0; });
  ProfileSpec s;
  if (p.kind == "hyperboloid")
    s = ProfileSpec::hyperboloid(p.a, p.d, p.n);
  else if (p.kind == "spliced_sphere")
    s = ProfileSpec::spliced_sphere(p.a, p.radius, p.d, p.n);
  else if (p.kind == "closed_form")
    s = ProfileSpec::closed_form(p.coeffs, p.d, p.n);
  else if (p.kind == "cylinder")
    s = ProfileSpec::cylinder(p.d, p.n);
  else {
    if (p.file.empty()) throw Error(ErrorCode::InvalidInput, "--profile sampled needs --file");
    s = ProfileSpec::from_csv(p.file, p.d, p.n);
  }
  return reduce(s);
}

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  f << text;
}

std::vector<double> log_grid(double a, double b, int n) {
  if (n == 1) return {a};
  return log_times(a, b, n);
}

int exit_code(const Error& e) { return is_numerical(e.code()) ? 3 : 2; }

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Dispersive estimates on surfaces of revolution with conical ends"};
  app.set_config("--config", "", "key = value file; command-line flags override it");
  app.require_subcommand(1);
  std::string out_dir = ".";
  app.add_option("--out", out_dir, "output directory")->capture_default_str();

  // potential
  auto* pot = app.add_subcommand("potential", "tabulate the reduced potential and check its tail");
  ProfileArgs pp;
  add_profile_options(pot, pp);
  double pot_xmax = 50.0, pot_step = 0.05;
  pot->add_option("--xi-max", pot_xmax, "tabulate on [-xi_max, xi_max]")->check(CLI::PositiveNumber)->capture_default_str();
  pot->add_option("--step", pot_step, "tabulation step")->check(CLI::PositiveNumber)->capture_default_str();

  // wronskian
  auto* wr = app.add_subcommand("wronskian", "scattering data and the small-lambda Wronskian law");
  ProfileArgs wp;
  add_profile_options(wr, wp);
  double lmin = 1e-4, lmax = 1e-2;
  int lcount = 12;
  bool scan = false;
  double scan_nu = std::sqrt(2.0), c_lo = 0.0, c_hi = 5.0, scan_tol = 1e-6;
  int scan_samples = 26;
  std::string wr_plot;
  wr->add_option("--lambda-min", lmin, "smallest lambda")->check(CLI::PositiveNumber)->capture_default_str();
  wr->add_option("--lambda-max", lmax, "largest lambda")->check(CLI::PositiveNumber)->capture_default_str();
  wr->add_option("--lambda-count", lcount, "log-spaced lambda samples")->check(CLI::PositiveNumber)->capture_default_str();
  wr->add_flag("--resonance-scan", scan, "scan W11 over the sech^2 family and bisect its roots");
  wr->add_option("--scan-nu", scan_nu, "nu of the scanned family")->check(CLI::PositiveNumber)->capture_default_str();
  wr->add_option("--c-min", c_lo, "scan start")->capture_default_str();
  wr->add_option("--c-max", c_hi, "scan end")->capture_default_str();
  wr->add_option("--samples", scan_samples, "scan samples")->check(CLI::Range(2, 100000))->capture_default_str();
  wr->add_option("--scan-tol", scan_tol, "bisection tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  wr->add_option("--emit-plot-data", wr_plot, "directory for plot CSVs");

  // decay
  auto* dc = app.add_subcommand("decay", "weighted decay fits of the Schroedinger and wave kernels");
  ProfileArgs dp;
  add_profile_options(dc, dp);
  std::string evolution = "both";
  double t_lo = 10.0, t_hi = 1000.0;
  int t_count = 8;
  DecayRunOptions run;
  std::vector<double> sigmas = {0.0};
  bool sigma_max_flag = false;
  std::string dc_plot;
  dc->add_option("--evolution", evolution, "schrodinger, wave or both")
      ->check(CLI::IsMember({"schrodinger", "wave", "both"}))
      ->capture_default_str();
  dc->add_option("--t-min", t_lo, "first time")->check(CLI::PositiveNumber)->capture_default_str();
  dc->add_option("--t-max", t_hi, "last time")->check(CLI::PositiveNumber)->capture_default_str();
  dc->add_option("--t-count", t_count, "log-spaced times")->check(CLI::Range(8, 1000))->capture_default_str();
  dc->add_option("--sigma", sigmas, "weight exponents")->capture_default_str();
  dc->add_flag("--sigma-max", sigma_max_flag, "also run the largest admissible sigma");
  dc->add_flag("--allow-beyond-sigma", run.allow_beyond, "accept sigma past the admissible window");
  dc->add_option("--reach", run.reach, "Schroedinger region half-width")->check(CLI::PositiveNumber)->capture_default_str();
  dc->add_option("--ratio", run.ratio, "geometric spacing of the far region points")
      ->check(CLI::Range(1.01, 4.0))
      ->capture_default_str();
  dc->add_option("--lambda-max", run.cache.lambda_max, "top of the cached lambda range")
      ->check(CLI::Range(2.0, 200.0))
      ->capture_default_str();
  dc->add_option("--bump-half-width", run.bump_half_width, "test function half-width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  dc->add_option("--emit-plot-data", dc_plot, "directory for plot CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const fs::path out(out_dir);
  // every option with its effective value, defaults included
  json provenance = json::object();
  {
    std::istringstream cfg(app.config_to_str(true, false));
    for (std::string line; std::getline(cfg, line);) {
      auto eq = line.find('=');
      if (line.empty() || line[0] == '#' || line[0] == '[' || eq == std::string::npos) continue;
      std::string v = line.substr(eq + 1);
      if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) v = v.substr(1, v.size() - 2);
      provenance[line.substr(0, eq)] = v;
    }
  }

  try {
    if (*pot) {
      auto op = build_operator(pp);
      std::ostringstream csv;
      csv << "xi,V\n";
      const long m = std::lround(pot_xmax / pot_step);
      for (long k = -m; k <= m; ++k) {
        double x = k * pot_step;
        if (op.half_line() && x < op.lower_end()) continue;
        csv << num(x) << ',' << num(op.V(x)) << '\n';
      }
      write_file(out / "potential.csv", csv.str());
      auto tail = verify_tail(op);
      json rep = {{"profile", pp.kind}, {"d", op.d},        {"n", op.n},
                  {"mu", op.mu},        {"nu", op.nu()},    {"tail_constant", tail.tail_constant},
                  {"tail_slope", tail.slope}, {"tail_max_residual", tail.max_residual},
                  {"tail_ok", tail.ok},       {"config", provenance}};
      write_file(out / "potential_report.json", rep.dump(2) + "\n");
      std::cout << rep.dump(2) << "\n";
      if (!tail.ok) {
        std::cerr << "TailViolation: potential tail is not (nu^2-1/4) xi^-2 + O(xi^-3)\n";
        return 2;
      }
      return 0;
    }

    if (*wr) {
      json rep = {{"config", provenance}};
      if (scan) {
        const double k = scan_nu * scan_nu - 0.25;
        auto family = [&](double c) {
          ModelOptions mo;
          mo.symmetric = true;
          mo.label = "sech2";
          return make_model_operator(
              scan_nu, [k, c](double x) { return k / (1 + x * x) - c / std::pow(std::cosh(x), 2); }, mo);
        };
        auto rs = resonance_scan(family, c_lo, c_hi, scan_samples, scan_tol);
        std::ostringstream csv;
        csv << "c,W11\n";
        for (std::size_t q = 0; q < rs.c.size(); ++q) csv << num(rs.c[q]) << ',' << num(rs.w11[q]) << '\n';
        write_file(out / "resonance.csv", csv.str());
        std::cout << csv.str();
        json roots = json::array();
        for (double r : rs.roots) {
          roots.push_back({{"root", r}, {"bracket", {r - scan_tol, r + scan_tol}}});
          std::cout << "root c* = " << num(r) << " in [" << num(r - scan_tol) << ", " << num(r + scan_tol) << "]\n";
        }
        rep["resonance_roots"] = roots;
        write_file(out / "resonance.json", rep.dump(2) + "\n");
        return 0;
      }
      auto op = build_operator(wp);
      auto lams = log_grid(lmin, lmax, lcount);
      auto sd = compute_scattering(op, lams);
      write_file(out / "scattering.csv", sd.to_csv());
      for (const auto& r : sd.rows)
        std::cout << "lambda " << num(r.lambda) << "  W " << num(r.W.real()) << (r.W.imag() < 0 ? " - " : " + ")
                  << num(std::abs(r.W.imag())) << "i\n";
      rep["scattering"] = json::parse(sd.to_json());
      const bool fit = op.nu() > 0.5 && lams.size() >= 2;
      if (fit) {
        auto pl = powerlaw_fit(op, lams);
        rep["powerlaw"] = {{"exponent", pl.exponent},
                           {"expected", 1.0 - 2.0 * op.nu()},
                           {"residual", pl.residual},
                           {"constant", {pl.constant.real(), pl.constant.imag()}}};
        std::cout << "fitted exponent " << num(pl.exponent) << " (1 - 2 nu = " << num(1.0 - 2.0 * op.nu()) << ")\n";
        if (!wr_plot.empty()) {
          std::ostringstream csv;
          csv << "lambda,absW,fit\n";
          const double c0 = std::abs(sd.rows.front().W) / std::pow(lams.front(), pl.exponent);
          for (const auto& r : sd.rows)
            csv << num(r.lambda) << ',' << num(std::abs(r.W)) << ',' << num(c0 * std::pow(r.lambda, pl.exponent))
                << '\n';
          write_file(fs::path(wr_plot) / "wronskian_powerlaw.csv", csv.str());
        }
      }
      write_file(out / "wronskian.json", rep.dump(2) + "\n");
      return 0;
    }

    if (*dc) {
      auto op = build_operator(dp);
      run.times = log_times(t_lo, t_hi, t_count);
      if (sigma_max_flag) sigmas.push_back(sigma_max(op));
      run.sigmas = sigmas;
      json rep = {{"config", provenance}, {"nu", op.nu()}, {"d", op.d}, {"sigma_max", sigma_max(op)}};
      auto emit = [&](const std::string& tag, const std::vector<DecayFit>& fits, auto expected) {
        std::ostringstream csv;
        csv << "sigma,t,sup,fit\n";
        json arr = json::array();
        std::ostringstream sat;
        sat << "sigma,slope,expected\n";
        for (const auto& f : fits) {
          for (std::size_t q = 0; q < f.times.size(); ++q)
            csv << num(f.sigma) << ',' << num(f.times[q]) << ',' << num(f.sups[q]) << ','
                << num(std::exp(f.intercept + f.slope * std::log(f.times[q]))) << '\n';
          json j = json::parse(f.to_json());
          j["expected_slope"] = expected(f.sigma);
          arr.push_back(j);
          sat << num(f.sigma) << ',' << num(f.slope) << ',' << num(expected(f.sigma)) << '\n';
          std::cout << tag << " sigma " << num(f.sigma) << "  slope " << num(f.slope) << "  expected "
                    << num(expected(f.sigma)) << "  residual " << num(f.residual) << "\n";
          if (!dc_plot.empty()) {
            char name[64];
            std::snprintf(name, sizeof name, "decay_%s_sigma_%.4f.csv", tag.c_str(), f.sigma);
            write_file(fs::path(dc_plot) / name, f.to_csv());
          }
        }
        if (!dc_plot.empty()) write_file(fs::path(dc_plot) / ("saturation_" + tag + ".csv"), sat.str());
        write_file(out / ("decay_" + tag + ".csv"), csv.str());
        rep[tag] = arr;
      };
      const double nu = op.nu(), d = op.d;
      if (evolution != "wave") {
        auto fits = run_schrodinger_decay(op, run);
        emit("schrodinger", fits, [&](double s) { return -std::min(0.5 * (d + 1) + s, 1.0 + nu); });
      }
      if (evolution != "schrodinger") {
        auto fits = run_wave_decay(op, run);
        emit("wave", fits, [&](double s) { return -0.5 * d - s; });
      }
      write_file(out / "decay.json", rep.dump(2) + "\n");
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace conedisp
