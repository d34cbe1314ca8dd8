#include "boltzspec/config.hpp"

#include <cmath>
#include <sstream>

#include "boltzspec/weighted_spaces.hpp"

namespace boltzspec {

namespace {

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(x)) throw ConfigError("not a finite number: '" + s + "'");
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& s : split(text, ',')) out.push_back(parse_real(s));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError("grid must be min:max:count, got '" + text + "'");
  const double a = parse_real(parts[0]), b = parse_real(parts[1]);
  const double nf = parse_real(parts[2]);
  if (nf < 1 || nf != std::floor(nf) || nf > 1e6) throw ConfigError("grid count must be a positive integer");
  const int n = static_cast<int>(nf);
  if (n > 1 && !(b > a)) throw ConfigError("grid needs max > min");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return g;
}

RunConfig RunConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const Json& v = it.value();
      if (k == "dim") c.dim = v.get<int>();
      else if (k == "degree") c.degree = v.get<int>();
      else if (k == "quad_order") c.quad_order = v.get<int>();
      else if (k == "k") c.weight_k = v.get<double>();
      else if (k == "p") c.weight_p = v.get<int>();
      else if (k == "poly_degree") c.poly_degree = v.get<int>();
      else if (k == "r0") c.r0 = v.get<double>();
      else if (k == "a") c.a = v.get<double>();
      else if (k == "contour_nodes") c.contour_nodes = v.get<int>();
      else if (k == "contour_radius") c.contour_radius = v.get<double>();
      else if (k == "cutoff_R") c.cutoff_R = v.get<double>();
      else if (k == "cutoff_delta") c.cutoff_delta = v.get<double>();
      else if (k == "direction") c.direction = v.get<std::vector<double>>();
      else if (k == "r_grid") c.r_grid = v.is_string() ? parse_grid(v.get<std::string>()) : v.get<std::vector<double>>();
      else if (k == "t_grid") c.t_grid = v.is_string() ? parse_grid(v.get<std::string>()) : v.get<std::vector<double>>();
      else if (k == "cache_dir") c.cache_dir = v.get<std::string>();
      else if (k == "seed") c.seed = v.get<unsigned>();
      else if (k == "threads") c.threads = v.get<int>();
      else if (k == "schema_version") {
        if (v.get<int>() != kSchemaVersion) throw ConfigError("unsupported schema_version");
      } else {
        throw ConfigError("unknown config key '" + k + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

Json RunConfig::to_json() const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["dim"] = dim;
  j["degree"] = degree;
  j["quad_order"] = effective_quad_order();
  j["k"] = weight_k;
  j["p"] = weight_p;
  j["poly_degree"] = effective_poly_degree();
  j["r0"] = r0;
  j["a"] = a;
  j["contour_nodes"] = contour_nodes;
  j["contour_radius"] = contour_radius;
  j["cutoff_R"] = cutoff_R;
  j["cutoff_delta"] = cutoff_delta;
  j["seed"] = seed;
  return j;
}

void RunConfig::validate() const {
  require_dim(dim);
  gaussian_spec().validate();
  if (quad_order != 0 && 2 * quad_order - 1 < 2 * degree + 3)
    throw ConfigError("quad_order " + std::to_string(quad_order) + " is below the exactness 2N+3 needed for N = " +
                      std::to_string(degree));
  if (!(weight_k > k_star()))
    throw ConfigError("weight exponent k must exceed k_* = " + std::to_string(k_star()));
  polynomial_spec().validate();
  if (!(r0 > 0.0)) throw ConfigError("r0 must be positive");
  if (a < 0.0) throw ConfigError("a must be positive (or 0 for the default)");
  if (contour_nodes < 16) throw ConfigError("contour needs at least 16 nodes");
  if (contour_radius < 0.0) throw ConfigError("contour radius must be positive (or 0 for the default)");
  if (cutoff_R < 0.0 || !(cutoff_delta > 0.0)) throw ConfigError("cutoff needs R >= 0 and delta > 0");
  if (!direction.empty() && static_cast<int>(direction.size()) != dim)
    throw ConfigError("direction has " + std::to_string(direction.size()) + " components, dimension is " +
                      std::to_string(dim));
  if (!direction.empty()) unit_direction();
  for (double r : r_grid)
    if (!(r > 0.0)) throw ConfigError("r grid values must be positive");
  for (double t : t_grid)
    if (t < 0.0) throw ConfigError("time grid values must be non-negative");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

BasisSpec RunConfig::gaussian_spec() const { return BasisSpec{dim, degree, Weight::gaussian()}; }

BasisSpec RunConfig::polynomial_spec() const {
  return BasisSpec{dim, effective_poly_degree(), Weight::polynomial(weight_k, weight_p)};
}

int RunConfig::effective_quad_order() const { return quad_order ? quad_order : default_quad_order(degree); }
int RunConfig::effective_poly_degree() const { return poly_degree ? poly_degree : degree + 2; }

RVector RunConfig::unit_direction() const {
  RVector e = RVector::Zero(dim);
  if (direction.empty()) {
    e(0) = 1.0;
    return e;
  }
  for (int i = 0; i < dim; ++i) e(i) = direction[i];
  const double n = e.norm();
  if (!(n > 0.0)) throw ConfigError("direction must be non-zero");
  return e / n;
}

Thresholds resolve_thresholds(const RunConfig& cfg, double a0, double a1) {
  Thresholds t;
  t.a0 = a0;
  t.a1 = a1;
  const double bound = std::min(a0, a1);
  if (!(bound > 0.0)) throw NumericalError("no positive threshold: a0 = " + std::to_string(a0) +
                                           ", a1 = " + std::to_string(a1));
  if (cfg.a == 0.0) {
    t.a = 0.5 * bound;
  } else {
    if (!(cfg.a < bound))
      throw ConfigError("a = " + std::to_string(cfg.a) + " must be below min(a0, a1) = " + std::to_string(bound));
    t.a = cfg.a;
  }
  t.contour_radius = cfg.contour_radius > 0.0 ? cfg.contour_radius : 0.5 * t.a;
  if (!(t.contour_radius < t.a)) throw ConfigError("contour radius must be below a");
  return t;
}

}  // namespace boltzspec
