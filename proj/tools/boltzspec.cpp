#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "boltzspec/analyses.hpp"
#include "boltzspec/validation.hpp"

using namespace boltzspec;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

std::string default_cache_dir() {
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::string(x) + "/boltzspec";
  if (const char* h = std::getenv("HOME"); h && *h) return std::string(h) + "/.cache/boltzspec";
  return ".boltzspec-cache";
}

struct Options {
  std::string config_path, cache_dir, out;
  bool no_cache = false;
  unsigned seed = 1;
  int threads = 1;
  int dim = 0, degree = 0, quad_order = 0, p = 0, poly_degree = 0, contour_nodes = 0;
  double k = 0, r0 = 0, a = 0, contour_radius = 0, cutoff_R = 0, cutoff_delta = 0;
  std::string direction, r_grid, t_grid;
  CLI::App* app = nullptr;

  bool given(const std::string& name) const { return app->get_option(name)->count() > 0; }

  RunConfig build() const {
    RunConfig c;
    if (!config_path.empty()) {
      Json j;
      try {
        j = Json::parse(read_file(config_path));
      } catch (const Json::exception& e) {
        throw ConfigError("config file " + config_path + ": " + e.what());
      }
      c = RunConfig::from_json(j);
    }
    if (given("--dim")) c.dim = dim;
    if (given("--degree")) c.degree = degree;
    if (given("--quad-order")) c.quad_order = quad_order;
    if (given("--k")) c.weight_k = k;
    if (given("--p")) c.weight_p = p;
    if (given("--poly-degree")) c.poly_degree = poly_degree;
    if (given("--r0")) c.r0 = r0;
    if (given("--a")) c.a = a;
    if (given("--contour-nodes")) c.contour_nodes = contour_nodes;
    if (given("--contour-radius")) c.contour_radius = contour_radius;
    if (given("--cutoff-R")) c.cutoff_R = cutoff_R;
    if (given("--cutoff-delta")) c.cutoff_delta = cutoff_delta;
    if (given("--direction")) c.direction = parse_list(direction);
    if (given("--r-grid")) c.r_grid = parse_grid(r_grid);
    if (given("--t-grid")) c.t_grid = parse_grid(t_grid);
    if (given("--seed")) c.seed = seed;
    if (given("--threads")) c.threads = threads;
    if (given("--cache-dir")) c.cache_dir = cache_dir;
    if (c.cache_dir.empty()) c.cache_dir = default_cache_dir();
    if (no_cache) c.cache_dir.clear();
    c.validate();
    return c;
  }

  void emit(const std::string& text) const {
    if (out.empty()) {
      std::cout << text;
      std::cout.flush();
    } else {
      write_file(out, text);
    }
  }
};

void cmd_nu(const Options& o, const std::string& speeds) {
  RunConfig c = o.build();
  std::vector<double> g = parse_grid(speeds);
  NuBounds b = estimate_nu_bounds(c.dim, g);
  std::cerr << "nu0 = " << format_double(b.nu0) << ", nu1 = " << format_double(b.nu1) << "\n";
  o.emit(nu_csv(c.dim, g));
}

void cmd_assemble(const Options& o) {
  if (o.out.empty()) throw ConfigError("assemble needs --out");
  Session s(o.build());
  const OperatorMatrix& L = s.L();
  std::cerr << "cache: " << s.cache_status() << "\n";
  const std::string blob = matrix_blob(L.values);
  std::filesystem::path side = o.out;
  side.replace_extension(".json");
  write_file(o.out, blob);
  write_file(side, dump_json(sidecar_json(s.L_cache_key(), L, blob)));
}

void cmd_spectrum(const Options& o, const std::string& xi, const std::string& xi_grid) {
  RunConfig c = o.build();
  if (xi.empty() == xi_grid.empty()) throw ConfigError("spectrum needs exactly one of --xi and --xi-grid");
  Session s(c);
  if (!xi.empty())
    o.emit(dump_json(spectrum_report(s, frequency_vector(parse_list(xi), c.dim))));
  else
    o.emit(branches_csv(s, parse_grid(xi_grid), false));
}

void cmd_branches(const Options& o) {
  Session s(o.build());
  o.emit(branches_csv(s, branch_r_grid(s.config()), true));
}

void cmd_coeffs(const Options& o) {
  Session s(o.build());
  o.emit(dump_json(coeffs_report(s)));
}

void cmd_projectors(const Options& o, double r, bool with_matrices) {
  Session s(o.build());
  o.emit(dump_json(projectors_report(s, r, with_matrices)));
}

void cmd_semigroup(const Options& o, const std::string& xi) {
  RunConfig c = o.build();
  if (xi.empty()) throw ConfigError("semigroup needs --xi");
  Session s(c);
  o.emit(dump_json(semigroup_report(s, frequency_vector(parse_list(xi), c.dim))));
}

void cmd_enlargement(const Options& o, const std::string& xi) {
  RunConfig c = o.build();
  if (xi.empty()) throw ConfigError("enlargement needs --xi");
  Session s(c);
  Json j = enlargement_report(s, frequency_vector(parse_list(xi), c.dim));
  o.emit(dump_json(j));
  if (j["count_gauss"] != j["count_poly"])
    throw NumericalError("enlargement: eigenvalue counts differ between the two spaces");
}

int cmd_validate(const Options& o, bool timing) {
  RunConfig c = o.build();
  Session s(c);
  ValidationReport rep = run_validation(s, [](const CheckResult& r) {
    std::fprintf(stderr, "%s %-22s %-30s %s value=%s threshold=%s%s%s\n", r.passed ? "PASS" : "FAIL", r.module.c_str(),
                 r.name.c_str(), r.property.c_str(), format_double(r.value).c_str(),
                 format_double(r.threshold).c_str(), r.detail.empty() ? "" : "  ", r.detail.c_str());
  });
  o.emit(dump_json(rep.to_json(timing)));
  std::fprintf(stderr, "%d checks, %d failed\n", static_cast<int>(rep.checks.size()), rep.failures());
  return rep.all_passed() ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of the linearized hard-sphere Boltzmann operator"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  o.app = &app;

  app.add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--cache-dir", o.cache_dir, "matrix cache directory (default $XDG_CACHE_HOME/boltzspec)");
  app.add_flag("--no-cache", o.no_cache, "do not read or write the matrix cache");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--threads", o.threads, "worker threads (accepted for compatibility; runs single threaded)");
  app.add_option("--out", o.out, "output file (default: stdout)");
  app.add_option("--dim", o.dim, "velocity dimension (2 or 3)");
  app.add_option("--degree", o.degree, "total polynomial degree N of the Gaussian basis");
  app.add_option("--quad-order", o.quad_order, "quadrature nodes per direction");
  app.add_option("--k", o.k, "polynomial weight exponent k");
  app.add_option("--p", o.p, "profile exponent p of the polynomial-weight basis");
  app.add_option("--poly-degree", o.poly_degree, "degree of the polynomial-weight basis");
  app.add_option("--r0", o.r0, "small-frequency radius r0");
  app.add_option("--a", o.a, "hydrodynamic threshold a");
  app.add_option("--contour-nodes", o.contour_nodes, "trapezoid nodes on projector contours");
  app.add_option("--contour-radius", o.contour_radius, "radius of the hydrodynamic contour");
  app.add_option("--cutoff-R", o.cutoff_R, "cutoff radius of the surrogate splitting");
  app.add_option("--cutoff-delta", o.cutoff_delta, "cutoff width of the surrogate splitting");
  app.add_option("--direction", o.direction, "frequency direction, comma separated");
  app.add_option("--r-grid", o.r_grid, "radial frequency grid min:max:count");
  app.add_option("--t-grid", o.t_grid, "time grid min:max:count");

  std::string speeds = "0:10:41", xi, xi_grid;
  double proj_r = 0.1;
  bool with_matrices = false, timing = false;
  auto* nu = app.add_subcommand("nu", "collision frequency on a speed grid (CSV)");
  nu->add_option("--speeds", speeds, "speed grid min:max:count");
  auto* assemble = app.add_subcommand("assemble", "assemble L and write a matrix blob plus JSON sidecar");
  auto* spec = app.add_subcommand("spectrum", "eigenvalues of L_xi (JSON) or hydrodynamic branches on a grid (CSV)");
  spec->add_option("--xi", xi, "frequency vector, comma separated");
  spec->add_option("--xi-grid", xi_grid, "radial grid min:max:count along --direction");
  auto* branches = app.add_subcommand("branches", "hydrodynamic branches on --r-grid (CSV)");
  auto* coeffs = app.add_subcommand("coeffs", "first and second order branch coefficients (JSON)");
  auto* proj = app.add_subcommand("projectors", "branch projectors and their expansion (JSON)");
  proj->add_option("--r", proj_r, "frequency magnitude along --direction");
  proj->add_flag("--with-matrices", with_matrices, "include projector matrices");
  auto* semi = app.add_subcommand("semigroup", "decay of the semigroup remainder (JSON)");
  semi->add_option("--xi", xi, "frequency vector, comma separated");
  auto* enl = app.add_subcommand("enlargement", "compare spectra in the Gaussian and polynomial spaces (JSON)");
  enl->add_option("--xi", xi, "frequency vector, comma separated");
  auto* val = app.add_subcommand("validate", "run every invariant check and report pass/fail (JSON)");
  val->add_flag("--timing", timing, "include wall times in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*nu) cmd_nu(o, speeds);
    else if (*assemble) cmd_assemble(o);
    else if (*spec) cmd_spectrum(o, xi, xi_grid);
    else if (*branches) cmd_branches(o);
    else if (*coeffs) cmd_coeffs(o);
    else if (*proj) cmd_projectors(o, proj_r, with_matrices);
    else if (*semi) cmd_semigroup(o, xi);
    else if (*enl) cmd_enlargement(o, xi);
    else if (*val) return cmd_validate(o, timing);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
