#pragma once

#include <array>
#include <string>
#include <vector>

#include "boltzspec/common.hpp"
#include "boltzspec/quadrature.hpp"

namespace boltzspec {

enum class WeightKind { Gaussian, Polynomial };

// Gaussian: <f,g>_E = int f g M^{-1}.  Polynomial: <f,g>_{E(k)} = int f g <v>^{2k},
// trial functions polynomial x (1 + |v|^2)^{-p}; p = 0 requests the smallest
// admissible exponent.
struct Weight {
  WeightKind kind = WeightKind::Gaussian;
  double k = 0.0;
  int p = 0;

  static Weight gaussian() { return {}; }
  static Weight polynomial(double k, int p = 0) { return {WeightKind::Polynomial, k, p}; }
};

struct BasisSpec {
  int dim = 3;
  int max_degree = 6;
  Weight weight;

  void validate() const;
  int size() const;
};

using MultiIndex = std::array<int, 3>;

// All multi-indices of total degree <= N in graded lexicographic order
// (degree first, then descending lexicographic: (1,0,0) before (0,1,0)).
std::vector<MultiIndex> graded_lex_indices(int dim, int N);

// Spherical labels (n, l, m): radial index, harmonic degree and order.
struct HarmonicLabel {
  int n = 0, l = 0, m = 0;
};

// Smallest admissible profile exponent so that degree-N trial functions and their
// products with nu(v) lie in E(k).
int minimal_profile_exponent(int dim, int N, double k);

// Normalized probabilists' Hermite values He_j(x)/sqrt(j!) for j = 0..n.
void hermite_normalized(int n, double x, double* out);

// Normalization constant of N L_n^{(l+d/2-1)}(|v|^2/2) |v|^l Y_lm(v) under the
// Gaussian measure.
double gaussian_radial_norm(int dim, int n, int l);

// Radial rule on [0, inf) for algebraically decaying integrands: Gauss-Legendre in
// t on panels of (0,1) mapped by s = scale * t / (1 - t^2); includes the Jacobian.
Rule1D mapped_radial_rule(int nodes, double scale = 2.0);

enum class ReferenceDensity { Maxwellian, Lebesgue };

// sum_q w_q F(v_q) approximates int F M dv (Maxwellian) or int F dv (Lebesgue).
struct QuadratureGrid {
  int dim = 3;
  int order = 0;
  int exactness = 0;
  ReferenceDensity density = ReferenceDensity::Maxwellian;
  std::vector<double> nodes;  // dim * size, row-major
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  const double* point(std::size_t i) const { return nodes.data() + i * dim; }
};

QuadratureGrid build_quadrature(const BasisSpec& spec, int order);
QuadratureGrid sphere_quadrature(int dim, int order);

class OrthonormalBasis {
 public:
  OrthonormalBasis() = default;

  const BasisSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  int degree() const { return spec_.max_degree; }
  int size() const { return size_; }
  bool gaussian() const { return spec_.weight.kind == WeightKind::Gaussian; }
  int profile_exponent() const { return p_; }
  double weight_k() const { return spec_.weight.k; }

  // Monomial exponents spanning the polynomial part; for the Gaussian basis this
  // is also the basis order (b_alpha = He_alpha/sqrt(alpha!) M).
  const std::vector<MultiIndex>& multi_indices() const { return indices_; }
  int index_of(const MultiIndex& a) const;

  // Basis order for the polynomial-weight basis (sorted by l, then m, then n).
  const std::vector<HarmonicLabel>& labels() const { return labels_; }
  // Basis indices of the (l, m) radial family ordered by n (polynomial weight).
  std::vector<int> block(int l, int m) const;
  int radial_count(int l) const { return (spec_.max_degree - l) / 2 + 1; }

  // Values of every basis function at v (including the M or profile factor).
  void evaluate(const double* v, double* out) const;
  // Polynomial parts only.
  void evaluate_polynomial(const double* v, double* out) const;

  // Polynomial weight: reduced radial factors rho_{nl}(s), n = 0..radial_count(l)-1,
  // such that b_{nlm}(v) = rho_{nl}(|v|) |v|^l Y_lm(v/|v|).
  void reduced_radial(int l, double s, double* out) const;
  double profile(double s) const;

  // Gaussian weight: coefficient vectors of phi_0 = M, phi_j = v_j M and
  // phi_{d+1} = (|v|^2 - d) M, as columns.
  RMatrix collision_invariants() const;

  friend OrthonormalBasis build_basis(const BasisSpec& spec);

 private:
  BasisSpec spec_;
  int size_ = 0;
  int p_ = 0;
  std::vector<MultiIndex> indices_;
  std::vector<HarmonicLabel> labels_;
  void raw_radial(int l, double s, double* out) const;

  // Polynomial weight: per l, coefficients of rho_{nl} in the raw radial functions
  // (column n).
  std::vector<RMatrix> radial_coeffs_;
};

OrthonormalBasis build_basis(const BasisSpec& spec);

// Coefficient inner product (the basis is orthonormal): sum f_i conj(g_i).
cplx inner_product(const CVector& f, const CVector& g);

// Grid inner product of function values under the given weight.
cplx inner_product(const QuadratureGrid& grid, const CVector& f, const CVector& g, const Weight& w);

// Gram matrix of the basis under its own inner product, evaluated on a grid.
RMatrix gram_matrix(const OrthonormalBasis& basis, const QuadratureGrid& grid);

// Values of all basis functions at every grid node (size x nodes).
RMatrix basis_on_grid(const OrthonormalBasis& basis, const QuadratureGrid& grid);

}  // namespace boltzspec

namespace boltzspec {

// Spherical Gaussian family N L_n^{(l+d/2-1)}(|v|^2/2) |v|^l Y_lm (polynomial parts),
// ordered by l, m, n. Returns C with C(alpha, j) = <He_alpha/sqrt(alpha!), psi_j>
// under the Gaussian measure; C is orthogonal.
RMatrix hermite_to_spherical(int dim, int N, std::vector<HarmonicLabel>* labels);

// Matrix of f -> f(O^T v) on the Gaussian basis; O must be orthogonal.
RMatrix rotation_on_basis(const OrthonormalBasis& basis, const RMatrix& O);

}  // namespace boltzspec
