#include <cmath>
#include <doctest.h>

#include "boltzspec/harmonics.hpp"
#include "boltzspec/quadrature.hpp"

using namespace boltzspec;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  Rule1D r = gauss_legendre(7, 0.0, 2.0);
  for (int p = 0; p <= 13; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
    CHECK(s == doctest::Approx(std::pow(2.0, p + 1) / (p + 1)).epsilon(1e-14));
  }
  Rule1D one = gauss_legendre(1, -1.0, 3.0);
  CHECK(one.nodes[0] == doctest::Approx(1.0));
  CHECK(one.weights[0] == doctest::Approx(4.0));
}

TEST_CASE("gauss-hermite reproduces standard normal moments") {
  Rule1D r = gauss_hermite_normal(10);
  double m[9] = {0};
  for (std::size_t i = 0; i < r.size(); ++i)
    for (int p = 0; p <= 8; ++p) m[p] += r.weights[i] * std::pow(r.nodes[i], p);
  CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(m[1]) < 1e-14);
  CHECK(m[2] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m[4] == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(m[6] == doctest::Approx(15.0).epsilon(1e-13));
  CHECK(m[8] == doctest::Approx(105.0).epsilon(1e-13));
}

TEST_CASE("stieltjes rule for x exp(-x^2) matches half-line moments") {
  Rule1D r = gauss_for_weight([](double x) { return x * std::exp(-x * x); }, 0.0, 9.0, 8);
  for (int j = 0; j <= 7; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 2 * j);
    CHECK(s == doctest::Approx(0.5 * std::tgamma(j + 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("sphere rules: measure, odd symmetry and second moments") {
  for (int d : {2, 3}) {
    SphereRule s = sphere_rule(d, 6);
    double w = 0.0, odd = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      w += s.weights[i];
      odd += s.weights[i] * s.point(i)[0];
      sq += s.weights[i] * s.point(i)[0] * s.point(i)[0];
    }
    CHECK(w == doctest::Approx(sphere_measure(d)).epsilon(1e-14));
    CHECK(std::abs(odd) < 1e-13);
    CHECK(sq == doctest::Approx(sphere_measure(d) / d).epsilon(1e-13));
  }
  CHECK_THROWS_AS(sphere_rule(4, 6), ConfigError);
  CHECK_THROWS_AS(sphere_rule(3, 1), ConfigError);
}

TEST_CASE("real harmonics are orthonormal and satisfy the addition theorem") {
  for (int d : {2, 3}) {
    const int L = 6;
    SphereRule s = sphere_rule(d, L + 2);
    const int nh = d == 3 ? (L + 1) * (L + 1) : 2 * L + 1;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nh, nh);
    std::vector<double> y(nh);
    for (std::size_t i = 0; i < s.size(); ++i) {
      solid_harmonics(d, L, s.point(i), y.data());
      for (int a = 0; a < nh; ++a)
        for (int b = 0; b < nh; ++b) g(a, b) += s.weights[i] * y[a] * y[b];
    }
    CHECK((g - Eigen::MatrixXd::Identity(nh, nh)).cwiseAbs().maxCoeff() < 1e-13);

    // sum_m Y_lm(x) Y_lm(e_1) = Z_l(x . e_1) Z_l(1) for the zonal family about e_1.
    const double x[3] = {0.3, -0.5, d == 3 ? std::sqrt(1 - 0.34) : 0.0};
    double xn[3] = {x[0], x[1], x[2]};
    if (d == 2) {
      const double n = std::hypot(x[0], x[1]);
      xn[0] /= n;
      xn[1] /= n;
    }
    const double e1[3] = {1.0, 0.0, 0.0};
    std::vector<double> yx(nh), ye(nh), z(L + 1), z1(L + 1), sz(L + 1);
    solid_harmonics(d, L, xn, yx.data());
    solid_harmonics(d, L, e1, ye.data());
    zonal_harmonics(d, L, xn[0], z.data());
    zonal_harmonics(d, L, 1.0, z1.data());
    solid_zonal_harmonics(d, L, xn, sz.data());
    int off = 0;
    for (int l = 0; l <= L; ++l) {
      const int c = harmonic_count(d, l);
      double sum = 0.0;
      for (int m = 0; m < c; ++m) sum += yx[off + m] * ye[off + m];
      off += c;
      CHECK(sum == doctest::Approx(z[l] * z1[l]).epsilon(1e-12));
      CHECK(sz[l] == doctest::Approx(z[l]).epsilon(1e-12));
    }
  }
}

TEST_CASE("laguerre recurrence matches closed forms") {
  double v[4];
  laguerre(3, 0.5, 1.7, v);
  const double x = 1.7, a = 0.5;
  CHECK(v[1] == doctest::Approx(1 + a - x));
  CHECK(v[2] == doctest::Approx(0.5 * (x * x - 2 * (a + 2) * x + (a + 1) * (a + 2))));
}
