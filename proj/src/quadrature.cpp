#include "boltzspec/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace boltzspec {

Rule1D golub_welsch(const std::vector<double>& alpha, const std::vector<double>& beta, double mu0) {
  const int n = static_cast<int>(alpha.size());
  if (n < 1 || static_cast<int>(beta.size()) < n - 1) throw ConfigError("golub_welsch: bad recurrence length");
  RMatrix jac = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) jac(i, i) = alpha[i];
  for (int i = 0; i + 1 < n; ++i) {
    if (!(beta[i] > 0.0)) throw NumericalError("golub_welsch: non-positive recurrence coefficient");
    jac(i, i + 1) = jac(i + 1, i) = std::sqrt(beta[i]);
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(jac);
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v0 * v0;
  }
  return r;
}

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw ConfigError("gauss_legendre: n must be positive");
  // Newton on the three-term recurrence is more accurate than the eigenvalue
  // route for the weights of large rules.
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  if (n == 1) {
    r.nodes[0] = mid;
    r.weights[0] = 2.0 * half;
    return r;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = mid - half * x;
    r.nodes[n - 1 - i] = mid + half * x;
    r.weights[i] = r.weights[n - 1 - i] = w * half;
  }
  return r;
}

Rule1D gauss_hermite_normal(int n) {
  if (n < 1) throw ConfigError("gauss_hermite: n must be positive");
  std::vector<double> alpha(n, 0.0), beta(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) beta[k - 1] = k;
  Rule1D r = golub_welsch(alpha, beta, 1.0);
  // Symmetrize to remove eigen-solver noise.
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (r.nodes[n - 1 - i] - r.nodes[i]);
    const double w = 0.5 * (r.weights[i] + r.weights[n - 1 - i]);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

Rule1D composite_gauss_legendre(const std::vector<double>& breaks, int per_panel) {
  Rule1D base = gauss_legendre(per_panel);
  Rule1D r;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < per_panel; ++i) {
      r.nodes.push_back(mid + half * base.nodes[i]);
      r.weights.push_back(half * base.weights[i]);
    }
  }
  return r;
}

Rule1D gauss_for_weight(const std::function<double(double)>& w, double a, double b, int n, int panels,
                        int per_panel) {
  std::vector<double> breaks(panels + 1);
  for (int i = 0; i <= panels; ++i) breaks[i] = a + (b - a) * i / panels;
  Rule1D fine = composite_gauss_legendre(breaks, per_panel);
  const std::size_t m = fine.size();
  std::vector<double> x(m), W(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = fine.nodes[i];
    W[i] = fine.weights[i] * w(fine.nodes[i]);
  }
  // Lanczos-type Stieltjes with normalized polynomials to avoid overflow.
  std::vector<double> alpha(n), beta(n > 1 ? n - 1 : 0);
  std::vector<double> pprev(m, 0.0), p(m), pnext(m);
  double mu0 = 0.0;
  for (std::size_t i = 0; i < m; ++i) mu0 += W[i];
  for (std::size_t i = 0; i < m; ++i) p[i] = 1.0 / std::sqrt(mu0);
  double sqb = 0.0;
  for (int k = 0; k < n; ++k) {
    double al = 0.0;
    for (std::size_t i = 0; i < m; ++i) al += W[i] * x[i] * p[i] * p[i];
    alpha[k] = al;
    if (k == n - 1) break;
    double nrm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      pnext[i] = (x[i] - al) * p[i] - sqb * pprev[i];
      nrm += W[i] * pnext[i] * pnext[i];
    }
    sqb = std::sqrt(nrm);
    beta[k] = nrm;
    for (std::size_t i = 0; i < m; ++i) {
      pprev[i] = p[i];
      p[i] = pnext[i] / sqb;
    }
  }
  return golub_welsch(alpha, beta, mu0);
}

SphereRule sphere_rule(int dim, int order) {
  require_dim(dim);
  if (order < 2) throw ConfigError("sphere_rule: order must be >= 2");
  SphereRule s;
  s.dim = dim;
  if (dim == 2) {
    const int m = 2 * order;
    for (int j = 0; j < m; ++j) {
      const double th = 2.0 * kPi * (j + 0.5) / m;
      s.points.push_back(std::cos(th));
      s.points.push_back(std::sin(th));
      s.weights.push_back(2.0 * kPi / m);
    }
    s.exactness = m - 1;
    return s;
  }
  Rule1D gl = gauss_legendre(order);
  const int m = 2 * order;
  for (int i = 0; i < order; ++i) {
    const double c = gl.nodes[i], sn = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < m; ++j) {
      const double ph = 2.0 * kPi * (j + 0.5) / m;
      s.points.push_back(c);
      s.points.push_back(sn * std::cos(ph));
      s.points.push_back(sn * std::sin(ph));
      s.weights.push_back(gl.weights[i] * 2.0 * kPi / m);
    }
  }
  s.exactness = 2 * order - 1;
  return s;
}

}  // namespace boltzspec
