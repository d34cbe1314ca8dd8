#pragma once

#include <string>
#include <vector>

#include "boltzspec/hydrodynamic_branches.hpp"

namespace boltzspec {

// exp(tA) by scaling and squaring with a Pade approximant.
CMatrix matrix_exponential(const CMatrix& A, double t);

struct FitWindow {
  double t_min = 2.0;
  double t_max = 10.0;
  // When set, t_min and t_max are multiples of the relaxation time 1/|spectral rate|.
  bool relative = false;
};

// Default window for the full semigroup at large frequency, where the slowest
// rates are small and an absolute window would stop inside the transient.
inline FitWindow relaxation_window() { return FitWindow{0.5, 2.5, true}; }

struct DecayReport {
  FrequencyPoint xi;
  std::string regime;  // "small-xi" or "large-xi"
  std::vector<double> t;
  std::vector<double> norm;      // spectral norms of the remainder (or of the semigroup)
  double gamma_fit = 0.0;        // least-squares slope of log norm over the fit window
  double C_fit = 0.0;            // smallest C with norm(t) <= C exp(gamma_fit t) on the whole grid
  double spectral_rate = 0.0;    // max Re of the relevant part of the spectrum
  double commutation_residual = 0.0;  // max_j max(|P_j V(t)|, |V(t) P_j|) over the grid
  double start_residual = 0.0;   // |V(0) - (I - P)| and idempotency of I - P
  double max_norm = 0.0;         // sup over the grid of |exp(t L_xi)|
};

// Remainder V(t) = exp(t L_xi) - sum_j exp(t lambda_j) P_j for a small frequency.
DecayReport splitting_check(const CMatrix& L_xi, const SpectralSlice& slice, const BranchAssignment& assignment,
                            const std::vector<double>& t_grid, const FitWindow& window = {});

// Full semigroup norm decay for a large frequency.
DecayReport large_xi_decay(const CMatrix& L_xi, const FrequencyPoint& xi, const std::vector<double>& t_grid,
                           const FitWindow& window = relaxation_window());

// Grid of n + 1 equispaced times covering the relaxation window of L_xi.
std::vector<double> relaxation_time_grid(const CMatrix& L_xi, int n, const FitWindow& window = relaxation_window());

struct ResolventScan {
  double beta = 0.0;
  std::vector<double> tau;
  std::vector<double> norm;
  double sup = 0.0;
  double line_distance = 0.0;   // distance of the line from the spectrum
  bool edges_decreasing = false;  // norm is smaller at both ends than its maximum
  double far_field_ratio = 0.0;   // max |tau| ||R|| / 2 over grid points with |tau| > 2 ||L_xi||
};

ResolventScan resolvent_line_scan(const CMatrix& L_xi, double beta, const std::vector<double>& tau_grid);

struct GapScanRow {
  double r = 0.0;
  int direction = 0;
  double abscissa = 0.0;
};

struct GapScan {
  std::vector<RVector> directions;
  std::vector<GapScanRow> rows;
  double b_emp = 0.0;  // minus the largest abscissa over the scan
};

// Spectral abscissa without the d+2 hydrodynamic eigenvalues for r <= r0, of the full spectrum beyond.
GapScan gap_uniformity_scan(const OperatorMatrix& L, const OrthonormalBasis& basis, const std::vector<double>& r_grid,
                            const std::vector<RVector>& directions, double r0);

// Largest singular value.
double operator_norm(const CMatrix& A);

}  // namespace boltzspec
