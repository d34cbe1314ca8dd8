#include "boltzspec/hydrodynamic_branches.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "boltzspec/quadrature.hpp"

namespace boltzspec {

namespace {

void require_gaussian(const OrthonormalBasis& basis, const char* what) {
  if (!basis.gaussian())
    throw ConfigError(std::string(what) + " works on the Gaussian basis; polynomial weights go through weighted_spaces");
}

RVector unit(const RVector& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw ConfigError("direction must be non-zero");
  return v / n;
}

// Coefficients of (c.v) M and of (|v|^2 - d) M on the Gaussian basis.
RVector momentum_coeffs(const OrthonormalBasis& b, const RVector& c) {
  RVector out = RVector::Zero(b.size());
  for (int j = 0; j < b.dim(); ++j) {
    MultiIndex a{0, 0, 0};
    a[j] = 1;
    out(b.index_of(a)) = c(j);
  }
  return out;
}

RVector energy_coeffs(const OrthonormalBasis& b) {
  RVector out = RVector::Zero(b.size());
  for (int j = 0; j < b.dim(); ++j) {
    MultiIndex a{0, 0, 0};
    a[j] = 2;
    out(b.index_of(a)) = std::sqrt(2.0);
  }
  return out;
}

RVector mass_coeffs(const OrthonormalBasis& b) {
  RVector out = RVector::Zero(b.size());
  out(b.index_of(MultiIndex{0, 0, 0})) = 1.0;
  return out;
}

CVector solve_real_spd(const Eigen::LLT<RMatrix>& llt, const CVector& g) {
  RVector re = llt.solve(RVector(g.real())), im = llt.solve(RVector(g.imag()));
  CVector out(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) out(i) = cplx(re(i), im(i));
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

RMatrix householder_frame(const RVector& direction) {
  const RVector xi = unit(direction);
  const int d = static_cast<int>(xi.size());
  RVector u = -xi;
  u(0) += 1.0;
  const double uu = u.squaredNorm();
  if (uu < 1e-28) return RMatrix::Identity(d, d);
  return RMatrix::Identity(d, d) - (2.0 / uu) * u * u.transpose();
}

RMatrix kernel_frame(const OrthonormalBasis& basis, const RVector& direction) {
  require_gaussian(basis, "kernel_frame");
  const int d = basis.dim();
  if (direction.size() != d) throw ConfigError("kernel_frame: direction has the wrong dimension");
  RMatrix H = householder_frame(direction);
  RMatrix Q(basis.size(), d + 2);
  for (int l = 1; l < d; ++l) Q.col(l - 1) = momentum_coeffs(basis, H.col(l));
  Q.col(d - 1) = mass_coeffs(basis);
  Q.col(d) = momentum_coeffs(basis, H.col(0));
  Q.col(d + 1) = energy_coeffs(basis) / std::sqrt(2.0 * d);
  return Q;
}

CMatrix kernel_projector(const OrthonormalBasis& basis) {
  RVector e1 = RVector::Zero(basis.dim());
  e1(0) = 1.0;
  RMatrix Q = kernel_frame(basis, e1);
  return (Q * Q.transpose()).cast<cplx>();
}

ReducedResolvent::ReducedResolvent(const OperatorMatrix& L, const OrthonormalBasis& basis) {
  if (L.size() != basis.size()) throw ConfigError("reduced resolvent: operator and basis sizes differ");
  if (L.values.imag().cwiseAbs().maxCoeff() > 0.0) throw ConfigError("reduced resolvent: L must be real");
  pi_ = boltzspec::kernel_projector(basis);
  RMatrix m = pi_.real() - L.values.real();
  llt_.compute(0.5 * (m + m.transpose()));
  if (llt_.info() != Eigen::Success)
    throw NumericalError("reduced resolvent: L is not negative definite off its kernel");
}

CVector ReducedResolvent::apply(const CVector& f) const {
  CVector g = f - pi_ * f;
  return -solve_real_spd(llt_, g);
}

CMatrix ReducedResolvent::matrix() const {
  const int n = static_cast<int>(pi_.rows());
  CMatrix s(n, n);
  for (int j = 0; j < n; ++j) s.col(j) = apply(CVector::Unit(n, j));
  return s;
}

ProjectorExpansion total_projector_expansion(const OperatorMatrix& L, const OperatorMatrix& V,
                                             const OrthonormalBasis& basis, const std::vector<double>& r_grid,
                                             double contour_radius) {
  ProjectorExpansion out;
  ContourSpec c{0.0, contour_radius, 64};
  out.P0 = contour_projector(L.values, c).P;
  ReducedResolvent S(L, basis);
  out.kernel_error = max_abs(CMatrix(out.P0 - S.kernel_projector()));
  const CMatrix s = S.matrix();
  const cplx I(0.0, 1.0);
  out.P1 = I * out.P0 * V.values * s + I * s * V.values * out.P0;
  RVector dir = RVector::Zero(L.basis.dim);
  dir(0) = 1.0;
  for (double r : r_grid) {
    if (!(r > 0.0)) throw ConfigError("projector expansion: r must be positive");
    CMatrix a = assemble_L_xi(L, V, FrequencyPoint::polar(r, dir)).values;
    CMatrix p = contour_projector(a, c).P;
    out.r.push_back(r);
    out.residual.push_back(max_abs(CMatrix(p - out.P0 - r * out.P1)));
  }
  out.order = loglog_slope(out.r, out.residual);
  return out;
}

CMatrix kato_transform(const CMatrix& P, const CMatrix& Q) {
  const int n = static_cast<int>(P.rows());
  if (Q.rows() != n) throw ConfigError("kato_transform: projector sizes differ");
  if (max_abs(CMatrix(P * P - P)) > 1e-7 || max_abs(CMatrix(Q * Q - Q)) > 1e-7)
    throw ConfigError("kato_transform: arguments must be idempotent");
  const double gap = spectral_norm(CMatrix(P - Q));
  if (gap >= 1.0)
    throw ConfigError("kato_transform: ||P - Q|| = " + std::to_string(gap) + " is not below 1");
  const CMatrix I = CMatrix::Identity(n, n);
  const CMatrix R = (P - Q) * (P - Q);
  const CMatrix Up = Q * P + (I - Q) * (I - P);
  CMatrix series = I, term = I;
  double c = 1.0;
  for (int k = 1;; ++k) {
    if (k > 100000) throw NumericalError("kato_transform: binomial series did not converge");
    const double next = c * (2.0 * k - 1.0) / (2.0 * k);
    term = (next / c) * (term * R);
    c = next;
    series += term;
    if (max_abs(term) < 1e-14) break;
  }
  return Up * series;
}

CMatrix reduced_operator(const CMatrix& L_xi, const CMatrix& U, const RMatrix& frame, double r) {
  if (!(r > 0.0)) throw ConfigError("reduced operator needs r > 0");
  Eigen::PartialPivLU<CMatrix> lu(U);
  if (std::abs(lu.determinant()) < 1e-300) throw NumericalError("reduced operator: U is singular");
  const CMatrix Q = frame.cast<cplx>();
  return (1.0 / r) * Q.adjoint() * lu.solve(CMatrix(L_xi * U * Q));
}

CMatrix reduced_operator_limit(const OperatorMatrix& V, const RMatrix& frame) {
  const CMatrix Q = frame.cast<cplx>();
  return cplx(0.0, -1.0) * Q.adjoint() * V.values * Q;
}

CMatrix reduced_operator_slope(const OperatorMatrix& V, const ReducedResolvent& S, const RMatrix& frame) {
  const CMatrix Q = frame.cast<cplx>();
  CMatrix vq = V.values * Q, svq(vq.rows(), vq.cols());
  for (Eigen::Index j = 0; j < vq.cols(); ++j) svq.col(j) = S.apply(vq.col(j));
  return vq.adjoint() * svq;
}

CMatrix a0_matrix(int d) {
  require_dim(d);
  const double s = std::sqrt(2.0 / d);
  CMatrix t = CMatrix::Zero(3, 3);
  t(0, 1) = t(1, 0) = 1.0;
  t(1, 2) = t(2, 1) = s;
  return cplx(0.0, -1.0) * t;
}

int FirstOrderModes::column_of(int branch, int member) const {
  if (branch == 2) {
    const int d = static_cast<int>(direction.size());
    if (member < 1 || member > d - 1) throw ConfigError("shear member out of range");
    return 2 + member;
  }
  if (branch < -1 || branch > 1) throw ConfigError("unknown branch label");
  return branch + 1;
}

FirstOrderModes first_order_modes(const OrthonormalBasis& basis, const RVector& direction) {
  require_gaussian(basis, "first_order_modes");
  const int d = basis.dim();
  if (direction.size() != d) throw ConfigError("first_order_modes: direction has the wrong dimension");
  FirstOrderModes m;
  m.frame = householder_frame(direction);
  m.direction = m.frame.col(0);
  const double c = std::sqrt(1.0 + 2.0 / d);
  m.lambda1 = {cplx(0.0, -c), 0.0, cplx(0.0, c), 0.0};
  const RVector one = mass_coeffs(basis), en = energy_coeffs(basis), mom = momentum_coeffs(basis, m.direction);
  m.modes.resize(basis.size(), d + 2);
  m.modes.col(0) = one + c * mom + en / d;
  m.modes.col(1) = one - 0.5 * en;
  m.modes.col(2) = one - c * mom + en / d;
  for (int l = 1; l < d; ++l) m.modes.col(2 + l) = momentum_coeffs(basis, m.frame.col(l));
  return m;
}

SecondOrderCoeffs second_order_coeffs(const OperatorMatrix& V, const ReducedResolvent& S,
                                      const FirstOrderModes& modes) {
  SecondOrderCoeffs out;
  for (int j = -1; j <= 2; ++j) {
    const CVector psi = modes.modes.col(modes.column_of(j, j == 2 ? 1 : 0)).cast<cplx>();
    const CVector x = V.values * psi;
    out.lambda2[branch_slot(j)] = x.dot(S.apply(x)).real() / psi.squaredNorm();
  }
  return out;
}

BranchAssignment assign_branches(const SpectralSlice& slice, const FirstOrderModes& modes, double a) {
  const int d = static_cast<int>(modes.direction.size());
  std::vector<int> hydro = eigen_indices_right_of(slice, a);
  if (static_cast<int>(hydro.size()) != d + 2)
    throw NumericalError("branch count: " + std::to_string(hydro.size()) + " eigenvalues with Re > -" +
                         std::to_string(a) + ", expected " + std::to_string(d + 2) +
                         " (r too large or threshold misconfigured)");
  // Orthonormal zeroth-order families per slot.
  std::array<CMatrix, kBranchCount> fam;
  for (int j = -1; j <= 1; ++j) {
    RVector e = modes.modes.col(modes.column_of(j));
    fam[branch_slot(j)] = (e / e.norm()).cast<cplx>();
  }
  fam[branch_slot(2)] = modes.modes.rightCols(d - 1).cast<cplx>();
  const int m = d + 2;
  RMatrix ov(m, kBranchCount);
  for (int i = 0; i < m; ++i) {
    CVector x = slice.right.col(hydro[i]);
    x /= x.norm();
    for (int s = 0; s < kBranchCount; ++s) ov(i, s) = (fam[s].adjoint() * x).squaredNorm();
  }
  std::vector<int> slots = {0, 1, 2};
  for (int l = 1; l < d; ++l) slots.push_back(3);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1.0;
  std::vector<int> best_perm;
  do {
    double sc = 0.0;
    for (int i = 0; i < m; ++i) sc += ov(perm[i], slots[i]);
    if (sc > best + 1e-14) best = sc, best_perm = perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  BranchAssignment out;
  out.min_overlap = 1.0;
  for (int i = 0; i < m; ++i) {
    out.members[slots[i]].push_back(hydro[best_perm[i]]);
    out.min_overlap = std::min(out.min_overlap, ov(best_perm[i], slots[i]));
  }
  return out;
}

BranchTable trace_branches(const OperatorMatrix& L, const OperatorMatrix& V, const OrthonormalBasis& basis,
                           const RVector& direction, const std::vector<double>& r_grid, double a, double fit_max) {
  if (r_grid.empty()) throw ConfigError("trace_branches: empty r grid");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0.0)) throw ConfigError("trace_branches: r must be positive");
    if (i > 0 && !(r_grid[i] > r_grid[i - 1])) throw ConfigError("trace_branches: r grid must increase");
  }
  FirstOrderModes modes = first_order_modes(basis, direction);
  BranchTable t;
  t.direction = modes.direction;
  for (double r : r_grid) {
    SpectralSlice s = spectrum(assemble_L_xi(L, V, FrequencyPoint::polar(r, t.direction)).values);
    BranchAssignment as = assign_branches(s, modes, a);
    t.r.push_back(r);
    for (int k = 0; k < kBranchCount; ++k) {
      cplx mean = 0.0;
      for (int i : as.members[k]) mean += s.eigenvalues(i);
      t.lambda[k].push_back(mean / double(as.members[k].size()));
      t.multiplicity[k] = static_cast<int>(as.members[k].size());
    }
    double spread = 0.0;
    const auto& sh = as.members[branch_slot(2)];
    for (int i : sh)
      for (int j : sh) spread = std::max(spread, std::abs(s.eigenvalues(i) - s.eigenvalues(j)));
    t.shear_spread.push_back(spread);
    if (std::abs(t.lambda[branch_slot(0)].back() - t.lambda[branch_slot(2)].back()) < 1e-6) t.flagged.push_back(r);
  }
  // lambda(r) ~ sum_{m=1..4} c_m r^m by least squares.
  std::vector<int> use;
  for (std::size_t i = 0; i < t.r.size(); ++i)
    if (t.r[i] <= fit_max) use.push_back(static_cast<int>(i));
  if (use.size() < 5) {
    use.resize(t.r.size());
    std::iota(use.begin(), use.end(), 0);
  }
  const int powers = std::min<int>(4, static_cast<int>(use.size()) - 1);
  if (powers < 2) return t;
  CMatrix A(use.size(), powers);
  for (std::size_t i = 0; i < use.size(); ++i)
    for (int p = 0; p < powers; ++p) A(i, p) = std::pow(t.r[use[i]], p + 1);
  for (int k = 0; k < kBranchCount; ++k) {
    CVector y(use.size());
    for (std::size_t i = 0; i < use.size(); ++i) y(i) = t.lambda[k][use[i]];
    CVector c = A.colPivHouseholderQr().solve(y);
    t.lambda1_fit[k] = c(0);
    t.lambda2_fit[k] = c(1);
    t.fit_residual[k] = (A * c - y).cwiseAbs().maxCoeff();
  }
  return t;
}

ProjectorSet branch_projectors(const SpectralSlice& slice, const BranchAssignment& assignment,
                               double min_separation) {
  ProjectorSet ps;
  ps.xi = slice.xi;
  const int n = static_cast<int>(slice.right.rows());
  ps.total = CMatrix::Zero(n, n);
  double sep = INFINITY;
  for (int k = 0; k < kBranchCount; ++k)
    for (int l = k + 1; l < kBranchCount; ++l)
      for (int i : assignment.members[k])
        for (int j : assignment.members[l])
          sep = std::min(sep, std::abs(slice.eigenvalues(i) - slice.eigenvalues(j)));
  if (!(sep > min_separation))
    throw NumericalError("branch collision: eigenvalues of different branches within " + std::to_string(sep));
  for (int k = 0; k < kBranchCount; ++k) {
    ps.P[k] = eigen_projector(slice, assignment.members[k]);
    ps.total += ps.P[k];
  }
  return ps;
}

void extrapolation_weights(const std::vector<double>& nodes, std::vector<double>& value, std::vector<double>& slope) {
  const std::size_t n = nodes.size();
  value.assign(n, 0.0);
  slope.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double li = 1.0, s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      li *= (0.0 - nodes[j]) / (nodes[i] - nodes[j]);
      s += 1.0 / (0.0 - nodes[j]);
    }
    value[i] = li;
    slope[i] = li * s;
  }
}

ProjectorCoeffs branch_projector_coeffs(const OperatorMatrix& L, const OperatorMatrix& V,
                                        const OrthonormalBasis& basis, const RVector& direction, double a,
                                        double h) {
  FirstOrderModes modes = first_order_modes(basis, direction);
  const std::vector<double> nodes = {h, 2.0 * h, 4.0 * h};
  std::vector<double> w0, w1;
  extrapolation_weights(nodes, w0, w1);
  ProjectorCoeffs out;
  const int n = basis.size();
  for (int k = 0; k < kBranchCount; ++k) out.P0[k] = out.P1[k] = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    SpectralSlice s = spectrum(assemble_L_xi(L, V, FrequencyPoint::polar(nodes[i], modes.direction)).values);
    ProjectorSet ps = branch_projectors(s, assign_branches(s, modes, a), 0.0);
    for (int k = 0; k < kBranchCount; ++k) {
      out.P0[k] += w0[i] * ps.P[k];
      out.P1[k] += w1[i] * ps.P[k];
    }
  }
  return out;
}

std::string EigenTriple::label() const {
  if (branch == 2) return "2," + std::to_string(member);
  return std::to_string(branch);
}

RMatrix weighted_gram(const OrthonormalBasis& basis, double k) {
  require_gaussian(basis, "weighted_gram");
  const int d = basis.dim(), n = basis.size();
  const int m = basis.degree() + static_cast<int>(std::ceil(std::max(k, 0.0))) + 8;
  Rule1D g = gauss_hermite_normal(m);
  RMatrix G = RMatrix::Zero(n, n);
  std::vector<double> vals(n);
  std::array<int, 3> id{0, 0, 0};
  const int total = d == 2 ? m * m : m * m * m;
  const double pref = std::pow(4.0 * kPi, -0.5 * d);
  for (int t = 0; t < total; ++t) {
    int rem = t;
    double v[3] = {0, 0, 0}, w = pref, r2 = 0.0;
    for (int c = 0; c < d; ++c) {
      id[c] = rem % m;
      rem /= m;
      v[c] = g.nodes[id[c]] / std::sqrt(2.0);
      w *= g.weights[id[c]];
      r2 += v[c] * v[c];
    }
    basis.evaluate_polynomial(v, vals.data());
    w *= std::pow(1.0 + r2, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) G(i, j) += w * vals[i] * vals[j];
  }
  return G.selfadjointView<Eigen::Lower>();
}

std::vector<EigenTriple> eigentriples(const ProjectorSet& projectors, const FirstOrderModes& modes,
                                      const RMatrix& gram) {
  const int d = static_cast<int>(modes.direction.size());
  Eigen::LLT<RMatrix> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericalError("eigentriples: weighted Gram matrix is not positive definite");
  std::vector<EigenTriple> out;
  for (int j = -1; j <= 1; ++j) {
    const CMatrix& P = projectors.P[branch_slot(j)];
    EigenTriple t;
    t.branch = j;
    t.right = P * modes.modes.col(modes.column_of(j)).cast<cplx>();
    t.left = P.adjoint() * t.right / t.right.squaredNorm();
    t.left_weighted = solve_real_spd(llt, t.left);
    out.push_back(t);
  }
  const CMatrix& P2 = projectors.P[branch_slot(2)];
  const CMatrix G = gram.cast<cplx>();
  CMatrix E(P2.rows(), d - 1);
  for (int l = 1; l < d; ++l) {
    CVector x = P2 * modes.modes.col(modes.column_of(2, l)).cast<cplx>();
    const double before = x.norm();
    for (int m = 1; m < l; ++m) {
      const CVector& e = E.col(m - 1);
      x -= (e.dot(G * x) / e.dot(G * e)) * e;
    }
    if (!(x.norm() > 1e-10 * before)) throw NumericalError("eigentriples: degenerate shear family");
    E.col(l - 1) = x;
  }
  const CMatrix F = P2.adjoint() * E * (E.adjoint() * E).inverse();
  for (int l = 1; l < d; ++l) {
    EigenTriple t;
    t.branch = 2;
    t.member = l;
    t.right = E.col(l - 1);
    t.left = F.col(l - 1);
    t.left_weighted = solve_real_spd(llt, t.left);
    out.push_back(t);
  }
  return out;
}

CMatrix biorthogonality(const std::vector<EigenTriple>& triples) {
  const int m = static_cast<int>(triples.size());
  CMatrix b(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) b(i, j) = triples[j].left.dot(triples[i].right);
  return b;
}

std::vector<EigenTriple> eigentriple_expansion(const OperatorMatrix& L, const OperatorMatrix& V,
                                               const OrthonormalBasis& basis, const RVector& direction, double a,
                                               const RMatrix& gram, double h) {
  FirstOrderModes modes = first_order_modes(basis, direction);
  const std::vector<double> nodes = {h, 2.0 * h, 4.0 * h};
  std::vector<double> w0, w1;
  extrapolation_weights(nodes, w0, w1);
  std::vector<std::vector<EigenTriple>> samples;
  for (double r : nodes) {
    SpectralSlice s = spectrum(assemble_L_xi(L, V, FrequencyPoint::polar(r, modes.direction)).values);
    samples.push_back(eigentriples(branch_projectors(s, assign_branches(s, modes, a), 0.0), modes, gram));
  }
  std::vector<EigenTriple> out = samples[0];
  Eigen::LLT<RMatrix> llt(gram);
  for (std::size_t k = 0; k < out.size(); ++k) {
    EigenTriple& t = out[k];
    t.e0 = t.e1 = t.f0 = t.f1 = CVector::Zero(t.right.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      t.e0 += w0[i] * samples[i][k].right;
      t.e1 += w1[i] * samples[i][k].right;
      t.f0 += w0[i] * samples[i][k].left;
      t.f1 += w1[i] * samples[i][k].left;
    }
    t.right = t.e0;
    t.left = t.f0;
    t.left_weighted = solve_real_spd(llt, t.f0);
  }
  return out;
}

}  // namespace boltzspec
