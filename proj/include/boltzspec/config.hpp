#pragma once

#include <string>
#include <vector>

#include "boltzspec/io.hpp"

namespace boltzspec {

// Parsed "a:b:n" grid, n points from a to b inclusive (n = 1 gives {a}).
std::vector<double> parse_grid(const std::string& text);
// Comma separated reals.
std::vector<double> parse_list(const std::string& text);

struct RunConfig {
  int dim = 3;
  int degree = 6;
  int quad_order = 0;        // 0: default_quad_order(degree)
  double weight_k = 6.0;
  int weight_p = 0;          // 0: smallest admissible profile exponent
  int poly_degree = 0;       // E(k) degree for comparisons; 0: degree + 2
  double r0 = 0.3;
  double a = 0.0;            // 0: min(a0, a1_emp) / 2
  int contour_nodes = 64;
  double contour_radius = 0.0;  // 0: a / 2
  double cutoff_R = 6.0;
  double cutoff_delta = 0.5;
  std::vector<double> direction;   // empty: e_1
  std::vector<double> r_grid;      // branches
  std::vector<double> t_grid;      // semigroup
  std::string cache_dir;
  unsigned seed = 1;
  int threads = 1;

  // Unknown keys and wrongly typed values are configuration errors.
  static RunConfig from_json(const Json& j);
  Json to_json() const;
  void validate() const;

  BasisSpec gaussian_spec() const;
  BasisSpec polynomial_spec() const;
  int effective_quad_order() const;
  int effective_poly_degree() const;
  RVector unit_direction() const;
};

// Threshold a and contour radius resolved against the measured gap a0 and surrogate
// margin a1: a defaults to min(a0, a1)/2; an explicit a must lie in (0, min(a0, a1)).
struct Thresholds {
  double a0 = 0.0;
  double a1 = 0.0;
  double a = 0.0;
  double contour_radius = 0.0;
};
Thresholds resolve_thresholds(const RunConfig& cfg, double a0, double a1);

}  // namespace boltzspec
