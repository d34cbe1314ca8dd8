#pragma once

#include <vector>

#include "boltzspec/collision_operator.hpp"
#include "boltzspec/fourier_operator.hpp"

namespace boltzspec {

// b(q) = 4 / sqrt((q+1)(q-2)), q > 2.
double b_function(double q);

// The root k_* > 5/2 of b(k - 1/2) = 1.
double k_star();

// Smooth radial cutoff: the indicator of [-R, R] blended over width delta, so
// it equals 1 on [0, R - delta], vanishes beyond R + delta, and is 0 for R = 0.
double smooth_cutoff(double x, double R, double delta);

struct EkQuadrature {
  int radial_nodes = 160;     // outer radial rule on [0, inf)
  int theta_points = 10;      // Gauss points per angular panel
  int rho_points = 8;         // Gauss points per radial panel of the collision integrals
  double rho_halfwidth = 10.0;  // Gaussian window half-width of the inner radial integrals
  EkQuadrature refined() const { return {2 * radial_nodes, theta_points + 4, rho_points + 4, rho_halfwidth + 1.0}; }
};

struct Cutoff {
  double R = 6.0;
  double delta = 0.5;
  double operator()(double x) const { return smooth_cutoff(x, R, delta); }
  double support() const { return R + delta; }
};

// Pointwise collision integrals on the first axis, for checking the engines.
//   gain: G*chi(v) = int int |v - v*| M(v*) chi(v') dsigma dv*
//   loss: K1*chi(v) = |S| int |v - w| M(w) chi(w) dw
// chi is given by its values on points w (one function).
struct AxisIntegrals {
  double gain = 0.0;
  double loss = 0.0;
};
AxisIntegrals adjoint_axis_integrals(int dim, double s, double (*chi)(const double* w, void* ctx), void* ctx,
                                     const EkQuadrature& q = {});

// Forward counterparts on functions supported in the ball of radius `support`:
//   gain: G h(v) = int int |v - v*| M(v'_*) h(v') dsigma dv*,  loss: K1 h(v) = M(v) |S| int |v - w| h(w) dw.
AxisIntegrals forward_axis_integrals(int dim, double s, double support, double (*h)(const double* w, void* ctx),
                                     void* ctx, const EkQuadrature& q = {});

// J(rho, c) = int sqrt(rho^2 + t^2) exp(-(t + c)^2 / 2) dt.
double carleman_line_integral(double rho, double c);

struct EkDiscretization {
  OrthonormalBasis basis;
  OperatorMatrix L;   // <L b_j, b_i>_{E(k)}
  OperatorMatrix K;   // gain part 2G - K1
  OperatorMatrix nu;  // multiplication by nu
  std::vector<RMatrix> V;  // multiplication by v_i
  double gram_error = 0.0;
  EkQuadrature quadrature;
};

// Discretization of L on the polynomial-weight trial space with the <v>^{2k} pairing.
EkDiscretization assemble_in_Ek(const BasisSpec& spec, const EkQuadrature& q = {});

// Coefficients (in the E(k)-orthonormal basis) of the collision invariants
// M, v_j M, (|v|^2 - d) M, orthogonally projected onto the trial space; columns.
RMatrix project_invariants(const EkDiscretization& ek);

// max over the invariants of ||L c|| / ||c|| for their projections.
double invariant_residual(const EkDiscretization& ek);

struct MatchedPair {
  cplx gauss;
  cplx poly;
  double distance = 0.0;
};

struct WeightComparison {
  double k = 0.0;
  double r = 0.0;
  RVector direction;
  int count_gauss = 0;
  int count_poly = 0;
  std::vector<MatchedPair> pairs;
  double max_distance = 0.0;
  bool counts_match() const { return count_gauss == count_poly; }
};

// Optimal matching of the eigenvalues inside Re > -a; unequal counts are reported, not thrown.
WeightComparison compare_spectra(const CVector& gauss, const CVector& poly, double a);

struct SplittingSurrogate {
  Cutoff cutoff;
  CMatrix A;  // c K c
  CMatrix B;  // L - A
  double margin = 0.0;        // max Re <B g, g> / <g, g> (numerical abscissa)
  double random_margin = 0.0; // max over random g
  double a1_emp = 0.0;        // -margin
  double a1_reference = 0.0;  // nu_0 (1 - b(k - 1/2)) for comparison only
};

SplittingSurrogate surrogate_splitting(const EkDiscretization& ek, const Cutoff& cutoff, unsigned seed = 0,
                                       int samples = 200);

struct RegularizationReport {
  double C_A = 0.0;          // sup ||A g||_E / ||g||_{E(k)}
  double C_A_refined = 0.0;  // same with refined quadrature
  double random_max = 0.0;   // over random g
  double relative_change = 0.0;
  bool stable() const { return relative_change <= 0.1; }
};

RegularizationReport regularization_check(const EkDiscretization& ek, const Cutoff& cutoff, unsigned seed = 0,
                                          int samples = 200);

// sup ||B g||_{E, |v| < radius} / ||g||_{E(k)}, the unbounded contrast to C_A.
double truncated_B_ratio(const EkDiscretization& ek, const SplittingSurrogate& sur, double radius);

struct DissipativityScan {
  std::vector<double> r;
  std::vector<double> margin;  // numerical abscissa of B - i r V
  double max_relative_spread = 0.0;
};

DissipativityScan dissipativity_scan_B_xi(const CMatrix& B, const CMatrix& V, const std::vector<double>& r_list);

}  // namespace boltzspec
