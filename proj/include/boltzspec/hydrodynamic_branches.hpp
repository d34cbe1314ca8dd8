#pragma once

#include <array>
#include <string>
#include <vector>

#include "boltzspec/fourier_operator.hpp"

namespace boltzspec {

// Branch slots j = -1, 0, 1, 2 are stored at index j + 1.
inline int branch_slot(int j) { return j + 1; }
inline int branch_label(int slot) { return slot - 1; }
constexpr int kBranchCount = 4;

// Orthogonal reflection H with H e_1 = direction; columns 2..d complete the frame.
RMatrix householder_frame(const RVector& direction);

// Orthonormal kernel coordinates on the Gaussian basis, columns ordered as
// (c_1.v M, ..., c_{d-1}.v M, M, xi.v M, (|v|^2 - d) M / sqrt(2d)).
RMatrix kernel_frame(const OrthonormalBasis& basis, const RVector& direction);
CMatrix kernel_projector(const OrthonormalBasis& basis);

// S f = 0 on ker L, L^{-1} f on its orthogonal complement.
class ReducedResolvent {
 public:
  ReducedResolvent(const OperatorMatrix& L, const OrthonormalBasis& basis);
  CVector apply(const CVector& f) const;
  CMatrix matrix() const;
  const CMatrix& kernel_projector() const { return pi_; }

 private:
  CMatrix pi_;
  Eigen::LLT<RMatrix> llt_;  // of Pi - L, positive definite
};

struct ProjectorExpansion {
  CMatrix P0;         // contour projector at r = 0
  CMatrix P1;         // i P0 V S + i S V P0
  std::vector<double> r;
  std::vector<double> residual;  // ||P(r) - P0 - r P1||_max
  double order = 0.0;            // least-squares slope of log residual vs log r
  double kernel_error = 0.0;     // ||P0 - Pi||_max
};

ProjectorExpansion total_projector_expansion(const OperatorMatrix& L, const OperatorMatrix& V,
                                             const OrthonormalBasis& basis, const std::vector<double>& r_grid,
                                             double contour_radius);

// U' (1 - R)^{-1/2} with R = (P - Q)^2 and U' = QP + (1-Q)(1-P); U P U^{-1} = Q.
CMatrix kato_transform(const CMatrix& P, const CMatrix& Q);

// (1/r) U^{-1} L_xi U restricted to the kernel, in the coordinates of `frame`.
CMatrix reduced_operator(const CMatrix& L_xi, const CMatrix& U, const RMatrix& frame, double r);

// Leading term -i P0 (v.xi) P0 and first correction P0 (v.xi) S (v.xi) P0 in frame coordinates.
CMatrix reduced_operator_limit(const OperatorMatrix& V, const RMatrix& frame);
CMatrix reduced_operator_slope(const OperatorMatrix& V, const ReducedResolvent& S, const RMatrix& frame);

// Matrix of -i P0 v_1 P0 on (phi_0, phi_1, phi_{d+1}).
CMatrix a0_matrix(int d);

struct FirstOrderModes {
  RVector direction;
  RMatrix frame;                      // Householder frame
  std::array<cplx, kBranchCount> lambda1;
  // Mode coefficient vectors: columns e_{-1}, e_0, e_1, e_{2,1}, ..., e_{2,d-1}.
  RMatrix modes;
  int column_of(int branch, int member = 0) const;
};

FirstOrderModes first_order_modes(const OrthonormalBasis& basis, const RVector& direction);

struct SecondOrderCoeffs {
  std::array<double, kBranchCount> lambda2;
};

// <S V psi, V psi> / <psi, psi> with psi the zeroth-order modes; V is v.direction.
SecondOrderCoeffs second_order_coeffs(const OperatorMatrix& V, const ReducedResolvent& S,
                                      const FirstOrderModes& modes);

// Eigenvalue indices of a slice grouped by branch slot.
struct BranchAssignment {
  std::array<std::vector<int>, kBranchCount> members;
  double min_overlap = 0.0;  // weakest eigenvector overlap with its zeroth-order family
};

BranchAssignment assign_branches(const SpectralSlice& slice, const FirstOrderModes& modes, double a);

struct BranchTable {
  RVector direction;
  std::vector<double> r;
  std::array<std::vector<cplx>, kBranchCount> lambda;  // shear: cluster mean
  std::vector<double> shear_spread;                    // max pairwise distance in the shear cluster
  std::array<int, kBranchCount> multiplicity{};
  std::array<cplx, kBranchCount> lambda1_fit{};
  std::array<cplx, kBranchCount> lambda2_fit{};
  std::array<double, kBranchCount> fit_residual{};
  std::vector<double> flagged;  // r values where lambda_0 and lambda_2 come within 1e-6
};

BranchTable trace_branches(const OperatorMatrix& L, const OperatorMatrix& V, const OrthonormalBasis& basis,
                           const RVector& direction, const std::vector<double>& r_grid, double a,
                           double fit_max = 0.1);

struct ProjectorSet {
  FrequencyPoint xi;
  CMatrix total;
  std::array<CMatrix, kBranchCount> P;
};

ProjectorSet branch_projectors(const SpectralSlice& slice, const BranchAssignment& assignment,
                               double min_separation = 1e-6);

// P(0) and P'(0) estimates by polynomial extrapolation through samples at h, 2h, 4h.
struct ProjectorCoeffs {
  std::array<CMatrix, kBranchCount> P0, P1;
};
ProjectorCoeffs branch_projector_coeffs(const OperatorMatrix& L, const OperatorMatrix& V,
                                        const OrthonormalBasis& basis, const RVector& direction, double a,
                                        double h = 2e-3);

struct EigenTriple {
  int branch = 0;
  int member = 0;        // 1..d-1 for the shear family, 0 otherwise
  CVector right;         // e_alpha
  CVector left;          // f_alpha under the E pairing: P_j g = sum <g, f> e
  CVector left_weighted; // the same functional under the polynomially weighted pairing
  CVector e0, e1, f0, f1;  // expansion terms, filled by eigentriple_expansion
  std::string label() const;
};

// Gram matrix of the Gaussian basis under <f, g> = int f g <v>^{2k}.
RMatrix weighted_gram(const OrthonormalBasis& basis, double k);

std::vector<EigenTriple> eigentriples(const ProjectorSet& projectors, const FirstOrderModes& modes,
                                      const RMatrix& gram);

// Biorthogonality matrix <e_alpha, f_beta>.
CMatrix biorthogonality(const std::vector<EigenTriple>& triples);

// Triples at r = 0 + expansion terms by extrapolation through h, 2h, 4h.
std::vector<EigenTriple> eigentriple_expansion(const OperatorMatrix& L, const OperatorMatrix& V,
                                               const OrthonormalBasis& basis, const RVector& direction, double a,
                                               const RMatrix& gram, double h = 2e-3);

// Weights of the degree-2 extrapolation to r = 0 (value and derivative) from samples at nodes.
void extrapolation_weights(const std::vector<double>& nodes, std::vector<double>& value, std::vector<double>& slope);

}  // namespace boltzspec
