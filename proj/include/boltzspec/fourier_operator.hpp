#pragma once

#include <optional>
#include <vector>

#include "boltzspec/collision_operator.hpp"

namespace boltzspec {

struct FrequencyPoint {
  RVector xi;
  double r = 0.0;
  RVector direction;  // unit; zero vector when r = 0

  static FrequencyPoint from_xi(const RVector& xi);
  static FrequencyPoint polar(double r, const RVector& direction);
};

// Galerkin matrix of multiplication by v_i (i = 0..d-1) on the basis.
std::vector<RMatrix> velocity_multipliers(const OrthonormalBasis& basis);

// Multiplication by v . direction.
OperatorMatrix assemble_v_projection(const OrthonormalBasis& basis, const RVector& direction);
OperatorMatrix combine_v(const std::vector<RMatrix>& vi, const BasisSpec& spec, InnerProductTag tag,
                         const RVector& direction);

// L_xi = L - i r V(direction); V must be the projection for xi's direction.
OperatorMatrix assemble_L_xi(const OperatorMatrix& L, const OperatorMatrix& V, const FrequencyPoint& xi);

struct SpectralSlice {
  FrequencyPoint xi;
  CVector eigenvalues;   // descending real part
  CMatrix right;         // columns
  CMatrix left;          // columns, left.adjoint() * right = I
  RVector condition;     // eigenvalue condition numbers ||l|| ||r||
};

SpectralSlice spectrum(const CMatrix& A, const FrequencyPoint& xi = {});

// Solves (lambda - A) X = I.
CMatrix resolvent(const CMatrix& A, cplx lambda, const CVector* eigenvalues = nullptr);

// Truncated Neumann expansion of the resolvent about (lambda0, xi0):
// R(lambda, xi) = R0 sum_n [((lambda0 - lambda) + i r0 V0 - i r V) R0]^n, where
// v.xi0 = r0 V0 and v.xi = r V are passed as already-scaled matrices.
CMatrix neumann_resolvent(const CMatrix& R0, cplx lambda0, cplx lambda, const CMatrix& vxi0, const CMatrix& vxi,
                          int terms);

struct ContourSpec {
  cplx center = 0.0;
  double radius = 1.0;
  int nodes = 64;
};

struct ContourProjector {
  CMatrix P;
  int nodes = 0;
  double idempotency_residual = 0.0;
  int enclosed = 0;
};

// (1/2 pi i) contour integral of the resolvent over a circle, trapezoid rule with
// node doubling until the idempotency residual settles below 1e-8.
ContourProjector contour_projector(const CMatrix& A, const ContourSpec& c, const CVector* eigenvalues = nullptr);

// Spectral projector sum_i r_i l_i^H over the selected eigenvalues.
CMatrix eigen_projector(const SpectralSlice& s, const std::vector<int>& which);

// Indices of eigenvalues with Re > -a.
std::vector<int> eigen_indices_right_of(const SpectralSlice& s, double a);

// Max Re <A g, g>/<g, g>: largest eigenvalue of the Hermitian part.
double numerical_abscissa(const CMatrix& A);

struct ConfinementScan {
  double M = 0.0;
  std::vector<double> r;
  std::vector<double> ratio;  // max |lambda|/r over eigenvalues with Re > -a
};
ConfinementScan eigenvalue_confinement_scan(const OperatorMatrix& L, const OperatorMatrix& V,
                                            const std::vector<double>& r_grid, double a);

}  // namespace boltzspec
