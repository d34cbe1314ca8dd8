#pragma once

#include <functional>
#include <vector>

#include "boltzspec/common.hpp"

namespace boltzspec {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

// Gauss rule from the recurrence coefficients of the monic orthogonal
// polynomials (alpha_0..alpha_{n-1}, beta_1..beta_{n-1}) and the total mass mu0.
Rule1D golub_welsch(const std::vector<double>& alpha, const std::vector<double>& beta, double mu0);

Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Probabilists' Gauss-Hermite: weights sum to 1, weight exp(-x^2/2)/sqrt(2 pi).
Rule1D gauss_hermite_normal(int n);

// Gauss rule for an arbitrary positive weight on [a, b], built by the discretized
// Stieltjes procedure on a fine composite Gauss-Legendre grid.
Rule1D gauss_for_weight(const std::function<double(double)>& w, double a, double b, int n,
                        int panels = 64, int per_panel = 24);

// Composite Gauss-Legendre over consecutive breakpoints.
Rule1D composite_gauss_legendre(const std::vector<double>& breaks, int per_panel);

// Tensor-product of a Gauss-Legendre rule in cos(theta) with the trapezoid rule in
// the azimuth (d=3), or the trapezoid rule on the circle (d=2).
struct SphereRule {
  int dim = 3;
  std::vector<double> points;   // dim * count, row-major
  std::vector<double> weights;
  int exactness = 0;
  std::size_t size() const { return weights.size(); }
  const double* point(std::size_t i) const { return points.data() + i * dim; }
};
SphereRule sphere_rule(int dim, int order);

}  // namespace boltzspec
