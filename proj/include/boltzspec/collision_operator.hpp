#pragma once

#include <string>
#include <vector>

#include "boltzspec/common.hpp"
#include "boltzspec/velocity_basis.hpp"

namespace boltzspec {

enum class InnerProductTag { Gaussian, Polynomial };

struct AssemblyInfo {
  std::string method;
  int quad_order = 0;
  int sphere_order = 0;
  int radial_order = 0;
  double cutoff_radius = 0.0;
  double cutoff_width = 0.0;
  double wall_seconds = 0.0;
};

struct OperatorMatrix {
  CMatrix values;
  BasisSpec basis;
  InnerProductTag tag = InnerProductTag::Gaussian;
  AssemblyInfo info;

  int size() const { return static_cast<int>(values.rows()); }
};

struct NuBounds {
  double nu0 = 0.0;
  double nu1 = 0.0;
  std::vector<double> grid;
};

// nu(v) = int int |v - v_*| M(v_*) dsigma dv_*, by radial quadrature in v_*.
double compute_nu(int dim, const double* v);
double compute_nu_speed(int dim, double speed);
NuBounds estimate_nu_bounds(int dim, const std::vector<double>& speeds);

// Symmetric four-point weak form on the Gaussian basis.  quad.order (nodes per
// direction of the centre-of-mass and relative-speed rules) must give exactness
// >= 2N + 3; sphere.order must give exactness >= 2N.
OperatorMatrix assemble_L(const OrthonormalBasis& basis, const QuadratureGrid& quad, const QuadratureGrid& sphere);
OperatorMatrix assemble_L(const OrthonormalBasis& basis, int order);
OperatorMatrix assemble_nu_multiplier(const OrthonormalBasis& basis, const QuadratureGrid& quad);
OperatorMatrix assemble_nu_multiplier(const OrthonormalBasis& basis, int order);

// K = L + nu.
OperatorMatrix gain_part(const OperatorMatrix& L, const OperatorMatrix& nu);

struct KernelInfo {
  CMatrix vectors;        // n x (d+2), orthonormal
  RVector eigenvalues;    // all eigenvalues of L, descending
  double threshold = 0.0;
};

// Numerical kernel of a Hermitian L; throws NumericalError if its dimension is not d+2.
KernelInfo kernel_basis(const OperatorMatrix& L);

// -(largest eigenvalue outside the numerical kernel).
double spectral_gap(const OperatorMatrix& L);

// Largest principal angle (radians) between the column spans of a and b.
double principal_angle(const CMatrix& a, const CMatrix& b);

// || Pi_O L Pi_O^{-1} - L ||_max for an orthogonal O.
double rotation_equivariance_check(const OperatorMatrix& L, const OrthonormalBasis& basis, const RMatrix& O);

// Default quadrature order for a given degree.
inline int default_quad_order(int N) { return N + 4; }

}  // namespace boltzspec
