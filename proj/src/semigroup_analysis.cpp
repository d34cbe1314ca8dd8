#include "boltzspec/semigroup_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace boltzspec {

namespace {

constexpr double kExpGuard = 1e5;

void fit_rate(DecayReport& rep, FitWindow w) {
  if (w.relative) {
    if (!(rep.spectral_rate < 0.0)) throw NumericalError("relative fit window needs a negative spectral rate");
    w.t_min /= -rep.spectral_rate;
    w.t_max /= -rep.spectral_rate;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    if (rep.t[i] < w.t_min || rep.t[i] > w.t_max || !(rep.norm[i] > 0.0)) continue;
    const double y = std::log(rep.norm[i]);
    sx += rep.t[i], sy += y, sxx += rep.t[i] * rep.t[i], sxy += rep.t[i] * y;
    ++n;
  }
  if (n < 2) throw ConfigError("decay fit needs at least two time points inside the fit window");
  rep.gamma_fit = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.C_fit = 0.0;
  for (std::size_t i = 0; i < rep.t.size(); ++i)
    rep.C_fit = std::max(rep.C_fit, rep.norm[i] * std::exp(-rep.gamma_fit * rep.t[i]));
}

void check_time_grid(const std::vector<double>& t) {
  if (t.empty()) throw ConfigError("empty time grid");
  for (double x : t)
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("time grid values must be finite and non-negative");
}

}  // namespace

double operator_norm(const CMatrix& A) { return spectral_norm(A); }

CMatrix matrix_exponential(const CMatrix& A, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("matrix_exponential: t must be finite and non-negative");
  if (!A.allFinite()) throw ConfigError("matrix_exponential: non-finite matrix entries");
  const double scale = t * A.cwiseAbs().colwise().sum().maxCoeff();
  if (scale > kExpGuard)
    throw ConfigError("matrix_exponential: t ||A||_1 = " + std::to_string(scale) +
                      " exceeds the guard; split the time interval");
  if (t == 0.0) return CMatrix::Identity(A.rows(), A.cols());
  CMatrix out = (t * A).exp();
  if (!out.allFinite()) throw NumericalError("matrix_exponential: overflow");
  return out;
}

DecayReport splitting_check(const CMatrix& L_xi, const SpectralSlice& slice, const BranchAssignment& assignment,
                            const std::vector<double>& t_grid, const FitWindow& window) {
  check_time_grid(t_grid);
  ProjectorSet ps = branch_projectors(slice, assignment);
  const int n = static_cast<int>(L_xi.rows());
  const CMatrix I = CMatrix::Identity(n, n);
  const CMatrix Q = I - ps.total;

  DecayReport rep;
  rep.xi = slice.xi;
  rep.regime = "small-xi";
  std::array<cplx, kBranchCount> lam;
  for (int k = 0; k < kBranchCount; ++k) {
    cplx m = 0.0;
    for (int i : assignment.members[k]) m += slice.eigenvalues(i);
    lam[k] = m / double(assignment.members[k].size());
  }
  rep.spectral_rate = -INFINITY;
  double min_re = INFINITY;
  for (int i = 0; i < slice.eigenvalues.size(); ++i) {
    bool hydro = false;
    for (const auto& mem : assignment.members) hydro = hydro || std::count(mem.begin(), mem.end(), i) > 0;
    if (!hydro) rep.spectral_rate = std::max(rep.spectral_rate, slice.eigenvalues(i).real());
    min_re = std::min(min_re, slice.eigenvalues(i).real());
  }
  rep.start_residual = std::max(max_abs(CMatrix(Q * Q - Q)), 0.0);

  // The hydrodynamic part is pushed below the rest of the spectrum so that
  // exp(t At) Q keeps relative accuracy at large t (no cancellation).
  const double c = 2.0 * min_re - 1.0;
  const CMatrix At = L_xi * Q + c * ps.total;
  for (double t : t_grid) {
    const CMatrix E = matrix_exponential(L_xi, t);
    CMatrix direct = E;
    for (int k = 0; k < kBranchCount; ++k) direct -= std::exp(t * lam[k]) * ps.P[k];
    if (t == 0.0) rep.start_residual = std::max(rep.start_residual, max_abs(CMatrix(direct - Q)));
    for (int k = 0; k < kBranchCount; ++k) {
      rep.commutation_residual = std::max(rep.commutation_residual, max_abs(CMatrix(ps.P[k] * direct)));
      rep.commutation_residual = std::max(rep.commutation_residual, max_abs(CMatrix(direct * ps.P[k])));
    }
    rep.max_norm = std::max(rep.max_norm, operator_norm(E));
    const CMatrix Vt = matrix_exponential(At, t) * Q;
    rep.t.push_back(t);
    rep.norm.push_back(operator_norm(Vt));
  }
  fit_rate(rep, window);
  if (!(rep.gamma_fit < 0.0))
    throw NumericalError("splitting check: remainder does not decay (fitted rate " + std::to_string(rep.gamma_fit) +
                         "); projectors and branches do not match");
  return rep;
}

DecayReport large_xi_decay(const CMatrix& L_xi, const FrequencyPoint& xi, const std::vector<double>& t_grid,
                           const FitWindow& window) {
  check_time_grid(t_grid);
  DecayReport rep;
  rep.xi = xi;
  rep.regime = "large-xi";
  Eigen::ComplexEigenSolver<CMatrix> es(L_xi, false);
  rep.spectral_rate = -INFINITY;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    rep.spectral_rate = std::max(rep.spectral_rate, es.eigenvalues()(i).real());
  for (double t : t_grid) {
    rep.t.push_back(t);
    rep.norm.push_back(operator_norm(matrix_exponential(L_xi, t)));
    rep.max_norm = std::max(rep.max_norm, rep.norm.back());
  }
  fit_rate(rep, window);
  return rep;
}

std::vector<double> relaxation_time_grid(const CMatrix& L_xi, int n, const FitWindow& window) {
  if (n < 2) throw ConfigError("time grid needs at least two intervals");
  Eigen::ComplexEigenSolver<CMatrix> es(L_xi, false);
  double rate = -INFINITY;
  for (int i = 0; i < es.eigenvalues().size(); ++i) rate = std::max(rate, es.eigenvalues()(i).real());
  if (!(rate < 0.0)) throw NumericalError("relaxation grid: spectral abscissa is not negative");
  const double t_end = window.relative ? window.t_max / -rate : window.t_max;
  std::vector<double> t;
  for (int i = 0; i <= n; ++i) t.push_back(t_end * i / n);
  return t;
}

ResolventScan resolvent_line_scan(const CMatrix& L_xi, double beta, const std::vector<double>& tau_grid) {
  if (tau_grid.empty()) throw ConfigError("resolvent scan: empty tau grid");
  Eigen::ComplexEigenSolver<CMatrix> es(L_xi, false);
  const CVector ev = es.eigenvalues();
  ResolventScan out;
  out.beta = beta;
  out.line_distance = INFINITY;
  for (int i = 0; i < ev.size(); ++i) out.line_distance = std::min(out.line_distance, std::abs(ev(i).real() - beta));
  if (!(out.line_distance > 1e-8))
    throw NumericalError("resolvent scan: the line Re z = " + std::to_string(beta) + " hits the spectrum");
  const double lnorm = operator_norm(L_xi);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    const double nr = operator_norm(resolvent(L_xi, cplx(beta, tau_grid[i]), &ev));
    out.tau.push_back(tau_grid[i]);
    out.norm.push_back(nr);
    if (nr > out.sup) out.sup = nr, arg = i;
    if (std::abs(tau_grid[i]) > 2.0 * lnorm)
      out.far_field_ratio = std::max(out.far_field_ratio, nr * std::abs(tau_grid[i]) / 2.0);
  }
  const std::size_t last = out.norm.size() - 1;
  out.edges_decreasing = out.norm.size() >= 3 && arg != 0 && arg != last;
  return out;
}

GapScan gap_uniformity_scan(const OperatorMatrix& L, const OrthonormalBasis& basis, const std::vector<double>& r_grid,
                            const std::vector<RVector>& directions, double r0) {
  if (directions.empty()) throw ConfigError("gap scan: no directions");
  const int d = basis.dim();
  auto vi = velocity_multipliers(basis);
  GapScan out;
  double worst = -INFINITY;
  for (std::size_t k = 0; k < directions.size(); ++k) {
    OperatorMatrix V = combine_v(vi, basis.spec(), L.tag, directions[k]);
    out.directions.push_back(directions[k] / directions[k].norm());
    for (double r : r_grid) {
      if (!(r >= 0.0)) throw ConfigError("gap scan: r must be non-negative");
      Eigen::ComplexEigenSolver<CMatrix> es(
          assemble_L_xi(L, V, FrequencyPoint::polar(r, directions[k])).values, false);
      std::vector<double> re;
      for (int i = 0; i < es.eigenvalues().size(); ++i) re.push_back(es.eigenvalues()(i).real());
      std::sort(re.begin(), re.end(), std::greater<double>());
      const std::size_t skip = r <= r0 ? static_cast<std::size_t>(d + 2) : 0;
      GapScanRow row{r, static_cast<int>(k), re[skip]};
      out.rows.push_back(row);
      worst = std::max(worst, row.abscissa);
    }
  }
  out.b_emp = -worst;
  return out;
}

}  // namespace boltzspec
