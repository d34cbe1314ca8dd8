#include "boltzspec/harmonics.hpp"

#include <cmath>

namespace boltzspec {

int harmonic_count(int dim, int l) {
  if (dim == 3) return 2 * l + 1;
  return l == 0 ? 1 : 2;
}

std::vector<int> harmonic_orders(int dim, int l) {
  std::vector<int> ms;
  if (dim == 3) {
    for (int m = -l; m <= l; ++m) ms.push_back(m);
  } else if (l == 0) {
    ms.push_back(0);
  } else {
    ms.push_back(l);
    ms.push_back(-l);
  }
  return ms;
}

namespace {

double factorial_ratio(int l, int m) {
  // (l-m)!/(l+m)!
  double r = 1.0;
  for (int k = l - m + 1; k <= l + m; ++k) r /= k;
  return r;
}

}  // namespace

void solid_harmonics(int dim, int lmax, const double* x, double* out) {
  if (dim == 2) {
    // Re/Im of (x + i y)^l.
    double re = 1.0, im = 0.0;
    out[0] = 1.0 / std::sqrt(2.0 * kPi);
    const double c = 1.0 / std::sqrt(kPi);
    for (int l = 1; l <= lmax; ++l) {
      const double nre = re * x[0] - im * x[1];
      const double nim = re * x[1] + im * x[0];
      re = nre;
      im = nim;
      out[2 * l - 1] = c * re;
      out[2 * l] = c * im;
    }
    return;
  }
  const double z = x[2], r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  // Q[l][m]: polynomial part so that |x|^l P_l^m(cos) cos(m phi) = Q * Re(x+iy)^m.
  std::vector<double> q((lmax + 1) * (lmax + 1), 0.0);
  auto Q = [&](int l, int m) -> double& { return q[l * (lmax + 1) + m]; };
  double dfact = 1.0;  // (2m-1)!!
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) dfact *= (2.0 * m - 1.0);
    Q(m, m) = dfact;
    if (m + 1 <= lmax) Q(m + 1, m) = (2.0 * m + 1.0) * z * dfact;
    for (int l = m + 2; l <= lmax; ++l)
      Q(l, m) = ((2.0 * l - 1.0) * z * Q(l - 1, m) - (l + m - 1.0) * r2 * Q(l - 2, m)) / (l - m);
  }
  std::vector<double> cre(lmax + 1), cim(lmax + 1);
  cre[0] = 1.0;
  cim[0] = 0.0;
  for (int m = 1; m <= lmax; ++m) {
    cre[m] = cre[m - 1] * x[0] - cim[m - 1] * x[1];
    cim[m] = cre[m - 1] * x[1] + cim[m - 1] * x[0];
  }
  int idx = 0;
  for (int l = 0; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int am = std::abs(m);
      const double k = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * factorial_ratio(l, am));
      if (m == 0)
        out[idx++] = k * Q(l, 0);
      else if (m > 0)
        out[idx++] = std::sqrt(2.0) * k * Q(l, am) * cre[am];
      else
        out[idx++] = std::sqrt(2.0) * k * Q(l, am) * cim[am];
    }
  }
}

void zonal_harmonics(int dim, int lmax, double c, double* out) {
  if (dim == 2) {
    // Chebyshev T_l(c) = cos(l theta).
    double t0 = 1.0, t1 = c;
    out[0] = 1.0 / std::sqrt(2.0 * kPi);
    if (lmax >= 1) out[1] = c / std::sqrt(kPi);
    for (int l = 2; l <= lmax; ++l) {
      const double t2 = 2.0 * c * t1 - t0;
      t0 = t1;
      t1 = t2;
      out[l] = t2 / std::sqrt(kPi);
    }
    return;
  }
  double p0 = 1.0, p1 = c;
  out[0] = std::sqrt(1.0 / (4.0 * kPi));
  if (lmax >= 1) out[1] = std::sqrt(3.0 / (4.0 * kPi)) * c;
  for (int l = 2; l <= lmax; ++l) {
    const double p2 = ((2.0 * l - 1.0) * c * p1 - (l - 1.0) * p0) / l;
    p0 = p1;
    p1 = p2;
    out[l] = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi)) * p2;
  }
}

void solid_zonal_harmonics(int dim, int lmax, const double* x, double* out) {
  double r2 = 0.0;
  for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
  const double z = x[0];
  double p0 = 1.0, p1 = z;
  if (dim == 2) {
    out[0] = 1.0 / std::sqrt(2.0 * kPi);
    if (lmax >= 1) out[1] = z / std::sqrt(kPi);
    for (int l = 2; l <= lmax; ++l) {
      const double p2 = 2.0 * z * p1 - r2 * p0;
      p0 = p1;
      p1 = p2;
      out[l] = p2 / std::sqrt(kPi);
    }
    return;
  }
  out[0] = std::sqrt(1.0 / (4.0 * kPi));
  if (lmax >= 1) out[1] = std::sqrt(3.0 / (4.0 * kPi)) * z;
  for (int l = 2; l <= lmax; ++l) {
    const double p2 = ((2.0 * l - 1.0) * z * p1 - (l - 1.0) * r2 * p0) / l;
    p0 = p1;
    p1 = p2;
    out[l] = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi)) * p2;
  }
}

void laguerre(int nmax, double alpha, double x, double* out) {
  out[0] = 1.0;
  if (nmax >= 1) out[1] = 1.0 + alpha - x;
  for (int k = 1; k < nmax; ++k)
    out[k + 1] = ((2.0 * k + 1.0 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1.0);
}

}  // namespace boltzspec
