#include "boltzspec/fourier_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace boltzspec {

FrequencyPoint FrequencyPoint::from_xi(const RVector& xi) {
  FrequencyPoint f;
  f.xi = xi;
  f.r = xi.norm();
  f.direction = f.r > 0.0 ? RVector(xi / f.r) : RVector(RVector::Zero(xi.size()));
  return f;
}

FrequencyPoint FrequencyPoint::polar(double r, const RVector& direction) {
  const double n = direction.norm();
  if (!(n > 0.0)) throw ConfigError("frequency direction must be non-zero");
  FrequencyPoint f;
  f.direction = direction / n;
  f.r = r;
  f.xi = r * f.direction;
  return f;
}

std::vector<RMatrix> velocity_multipliers(const OrthonormalBasis& basis) {
  const int d = basis.dim(), n = basis.size();
  std::vector<RMatrix> out(d, RMatrix::Zero(n, n));
  std::vector<double> vals(n);
  if (basis.gaussian()) {
    // Exact for the degree 2N+1 integrand.
    QuadratureGrid g = build_quadrature(basis.spec(), basis.degree() + 3);
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double* v = g.point(q);
      basis.evaluate_polynomial(v, vals.data());
      for (int c = 0; c < d; ++c) {
        const double w = g.weights[q] * v[c];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j <= i; ++j) out[c](i, j) += w * vals[i] * vals[j];
      }
    }
  } else {
    QuadratureGrid g = build_quadrature(basis.spec(), basis.degree() + 4);
    const double k = basis.weight_k();
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double* v = g.point(q);
      double r2 = 0.0;
      for (int c = 0; c < d; ++c) r2 += v[c] * v[c];
      basis.evaluate(v, vals.data());
      const double wk = g.weights[q] * std::pow(1.0 + r2, k);
      for (int c = 0; c < d; ++c) {
        const double w = wk * v[c];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j <= i; ++j) out[c](i, j) += w * vals[i] * vals[j];
      }
    }
  }
  for (auto& m : out) m = m.selfadjointView<Eigen::Lower>();
  return out;
}

OperatorMatrix combine_v(const std::vector<RMatrix>& vi, const BasisSpec& spec, InnerProductTag tag,
                         const RVector& direction) {
  const double nrm = direction.norm();
  if (!(nrm > 0.0)) throw ConfigError("velocity projection: zero direction vector");
  if (direction.size() != static_cast<Eigen::Index>(vi.size()))
    throw ConfigError("velocity projection: direction has the wrong dimension");
  OperatorMatrix m;
  RMatrix acc = RMatrix::Zero(vi[0].rows(), vi[0].cols());
  for (std::size_t c = 0; c < vi.size(); ++c) acc += (direction(c) / nrm) * vi[c];
  m.values = acc.cast<cplx>();
  m.basis = spec;
  m.tag = tag;
  m.info.method = "multiplication by v.direction, top degree truncated";
  return m;
}

OperatorMatrix assemble_v_projection(const OrthonormalBasis& basis, const RVector& direction) {
  return combine_v(velocity_multipliers(basis), basis.spec(),
                   basis.gaussian() ? InnerProductTag::Gaussian : InnerProductTag::Polynomial, direction);
}

OperatorMatrix assemble_L_xi(const OperatorMatrix& L, const OperatorMatrix& V, const FrequencyPoint& xi) {
  if (L.size() != V.size() || L.tag != V.tag) throw ConfigError("assemble_L_xi: operators live on different bases");
  if (xi.xi.size() != L.basis.dim)
    throw ConfigError("frequency has dimension " + std::to_string(xi.xi.size()) + " but the operator has d = " +
                      std::to_string(L.basis.dim));
  OperatorMatrix m = L;
  if (xi.r != 0.0) m.values = L.values - cplx(0.0, xi.r) * V.values;
  return m;
}

SpectralSlice spectrum(const CMatrix& A, const FrequencyPoint& xi) {
  Eigen::ComplexEigenSolver<CMatrix> es(A, true);
  if (es.info() != Eigen::Success) throw NumericalError("spectrum: eigensolver did not converge");
  const int n = static_cast<int>(A.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const CVector& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() > ev(b).real();
    return ev(a).imag() > ev(b).imag();
  });
  SpectralSlice s;
  s.xi = xi;
  s.eigenvalues.resize(n);
  s.right.resize(n, n);
  for (int i = 0; i < n; ++i) {
    s.eigenvalues(i) = ev(order[i]);
    s.right.col(i) = es.eigenvectors().col(order[i]);
  }
  Eigen::PartialPivLU<CMatrix> lu(s.right);
  s.left = lu.inverse().adjoint();
  s.condition.resize(n);
  for (int i = 0; i < n; ++i) s.condition(i) = s.left.col(i).norm() * s.right.col(i).norm();
  return s;
}

CMatrix resolvent(const CMatrix& A, cplx lambda, const CVector* eigenvalues) {
  const int n = static_cast<int>(A.rows());
  CVector ev = eigenvalues ? *eigenvalues : CVector(Eigen::ComplexEigenSolver<CMatrix>(A, false).eigenvalues());
  double dist = INFINITY;
  int nearest = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (std::abs(lambda - ev(i)) < dist) dist = std::abs(lambda - ev(i)), nearest = i;
  const double scale = std::max(1.0, max_abs(A));
  if (dist <= 1e-10 * scale)
    throw NumericalError("resolvent: lambda is within " + std::to_string(dist) + " of the eigenvalue (" +
                         std::to_string(ev(nearest).real()) + ", " + std::to_string(ev(nearest).imag()) + ")");
  CMatrix m = lambda * CMatrix::Identity(n, n) - A;
  return Eigen::PartialPivLU<CMatrix>(m).solve(CMatrix::Identity(n, n));
}

CMatrix neumann_resolvent(const CMatrix& R0, cplx lambda0, cplx lambda, const CMatrix& vxi0, const CMatrix& vxi,
                          int terms) {
  const int n = static_cast<int>(R0.rows());
  CMatrix x = ((lambda0 - lambda) * CMatrix::Identity(n, n) + cplx(0.0, 1.0) * (vxi0 - vxi)) * R0;
  CMatrix sum = CMatrix::Identity(n, n), pw = CMatrix::Identity(n, n);
  for (int k = 1; k < terms; ++k) {
    pw = pw * x;
    sum += pw;
  }
  return R0 * sum;
}

ContourProjector contour_projector(const CMatrix& A, const ContourSpec& c, const CVector* eigenvalues) {
  if (!(c.radius > 0.0)) throw ConfigError("contour radius must be positive");
  if (c.nodes < 16) throw ConfigError("contour needs at least 16 nodes");
  const int n = static_cast<int>(A.rows());
  CVector ev = eigenvalues ? *eigenvalues : CVector(Eigen::ComplexEigenSolver<CMatrix>(A, false).eigenvalues());
  ContourProjector out;
  for (int i = 0; i < ev.size(); ++i) {
    const double d = std::abs(ev(i) - c.center);
    if (std::abs(d - c.radius) <= c.radius / 100.0)
      throw NumericalError("contour passes within radius/100 of the eigenvalue (" + std::to_string(ev(i).real()) +
                           ", " + std::to_string(ev(i).imag()) + ")");
    if (d < c.radius) ++out.enclosed;
  }
  auto integrate = [&](int m) {
    CMatrix p = CMatrix::Zero(n, n);
    for (int k = 0; k < m; ++k) {
      const cplx e = std::polar(1.0, 2.0 * kPi * (k + 0.5) / m);
      const cplx z = c.center + c.radius * e;
      CMatrix zm = z * CMatrix::Identity(n, n) - A;
      p += (c.radius * e / double(m)) * Eigen::PartialPivLU<CMatrix>(zm).solve(CMatrix::Identity(n, n));
    }
    return p;
  };
  int m = c.nodes;
  CMatrix p = integrate(m);
  double res = max_abs(CMatrix(p * p - p));
  for (int it = 0; it < 6 && res >= 1e-8; ++it) {
    m *= 2;
    CMatrix p2 = integrate(m);
    const double res2 = max_abs(CMatrix(p2 * p2 - p2));
    const double change = max_abs(CMatrix(p2 - p));
    p = p2;
    res = res2;
    if (res < 1e-8 && change < 1e-8) break;
  }
  out.P = p;
  out.nodes = m;
  out.idempotency_residual = res;
  return out;
}

CMatrix eigen_projector(const SpectralSlice& s, const std::vector<int>& which) {
  const int n = static_cast<int>(s.right.rows());
  CMatrix p = CMatrix::Zero(n, n);
  for (int i : which) p += s.right.col(i) * s.left.col(i).adjoint();
  return p;
}

std::vector<int> eigen_indices_right_of(const SpectralSlice& s, double a) {
  std::vector<int> idx;
  for (int i = 0; i < s.eigenvalues.size(); ++i)
    if (s.eigenvalues(i).real() > -a) idx.push_back(i);
  return idx;
}

double numerical_abscissa(const CMatrix& A) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (A + A.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

ConfinementScan eigenvalue_confinement_scan(const OperatorMatrix& L, const OperatorMatrix& V,
                                            const std::vector<double>& r_grid, double a) {
  ConfinementScan out;
  RVector dir = RVector::Zero(L.basis.dim);
  dir(0) = 1.0;
  for (double r : r_grid) {
    if (!(r > 0.0)) throw ConfigError("confinement scan: r must be positive");
    OperatorMatrix lx = assemble_L_xi(L, V, FrequencyPoint::polar(r, dir));
    SpectralSlice s = spectrum(lx.values);
    double m = 0.0;
    for (int i : eigen_indices_right_of(s, a)) m = std::max(m, std::abs(s.eigenvalues(i)) / r);
    out.r.push_back(r);
    out.ratio.push_back(m);
    out.M = std::max(out.M, m);
  }
  return out;
}

}  // namespace boltzspec
