#include <cmath>
#include <doctest.h>

#include "boltzspec/velocity_basis.hpp"
#include "boltzspec/weighted_spaces.hpp"

using namespace boltzspec;

namespace {

BasisSpec gauss(int d, int n) { return BasisSpec{d, n, Weight::gaussian()}; }

double moment_r(const QuadratureGrid& g, int power) {
  double s = 0.0;
  for (std::size_t q = 0; q < g.size(); ++q) {
    double r2 = 0.0;
    for (int c = 0; c < g.dim; ++c) r2 += g.point(q)[c] * g.point(q)[c];
    s += g.weights[q] * std::pow(r2, power / 2);
  }
  return s;
}

}  // namespace

TEST_CASE("basis spec validation and sizes") {
  CHECK_THROWS_AS(build_basis(gauss(3, 0)), ConfigError);
  CHECK_THROWS_AS(build_basis(gauss(4, 3)), ConfigError);
  CHECK(build_basis(gauss(3, 2)).size() == 10);
  CHECK(build_basis(gauss(2, 4)).size() == 15);
  CHECK_THROWS_AS(build_basis(BasisSpec{3, 4, Weight::polynomial(5.0)}), ConfigError);
  CHECK_THROWS_AS(build_basis(BasisSpec{3, 4, Weight::polynomial(6.0, 4)}), ConfigError);
}

TEST_CASE("graded lexicographic ordering") {
  auto idx = graded_lex_indices(3, 2);
  CHECK(idx[0] == MultiIndex{0, 0, 0});
  CHECK(idx[1] == MultiIndex{1, 0, 0});
  CHECK(idx[2] == MultiIndex{0, 1, 0});
  CHECK(idx[3] == MultiIndex{0, 0, 1});
  CHECK(idx[4] == MultiIndex{2, 0, 0});
  CHECK(idx[9] == MultiIndex{0, 0, 2});
}

TEST_CASE("gaussian quadrature moments") {
  QuadratureGrid g2 = build_quadrature(gauss(2, 4), 10);
  CHECK(moment_r(g2, 2) == doctest::Approx(2.0).epsilon(1e-12));
  QuadratureGrid g3 = build_quadrature(gauss(3, 6), 12);
  CHECK(moment_r(g3, 4) == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(g3.exactness == 23);
  CHECK_THROWS_AS(build_quadrature(gauss(3, 6), 0), ConfigError);
  CHECK_THROWS_AS(build_quadrature(gauss(3, 6), 8), ConfigError);
}

TEST_CASE("gaussian basis is orthonormal, grid-consistent and contains the invariants") {
  for (int d : {2, 3}) {
    OrthonormalBasis b = build_basis(gauss(d, 4));
    RMatrix g1 = gram_matrix(b, build_quadrature(b.spec(), 7));
    RMatrix g2 = gram_matrix(b, build_quadrature(b.spec(), 11));
    CHECK((g1 - RMatrix::Identity(b.size(), b.size())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g1 - g2).cwiseAbs().maxCoeff() < 1e-12);

    // Invariants evaluated on a grid and projected back reproduce themselves.
    QuadratureGrid grid = build_quadrature(b.spec(), 8);
    RMatrix phi = b.collision_invariants();
    RMatrix vals = basis_on_grid(b, grid);
    for (int j = 0; j < d + 2; ++j) {
      CVector fv(grid.size());
      for (std::size_t q = 0; q < grid.size(); ++q) {
        const double* v = grid.point(q);
        double r2 = 0.0;
        for (int c = 0; c < d; ++c) r2 += v[c] * v[c];
        const double m = maxwellian_r2(d, r2);
        fv(q) = j == 0 ? m : (j <= d ? v[j - 1] * m : (r2 - d) * m);
      }
      double err = 0.0;
      for (int i = 0; i < b.size(); ++i) {
        CVector bi = vals.row(i).transpose().cast<cplx>();
        err = std::max(err, std::abs(inner_product(grid, fv, bi, Weight::gaussian()) - phi(i, j)));
      }
      CHECK(err < 1e-12);
    }
    CHECK(phi.col(d + 1).squaredNorm() == doctest::Approx(2.0 * d));
    CHECK(phi.col(0).dot(phi.col(1)) == 0.0);
  }
}

TEST_CASE("coefficient inner product is conjugate-symmetric") {
  CVector f(2), g(2);
  f << cplx(1, 2), cplx(0, 1);
  g << cplx(3, 0), cplx(1, -1);
  CHECK(std::abs(inner_product(f, g) - std::conj(inner_product(g, f))) < 1e-15);
  CHECK(inner_product(f, f).real() > 0.0);
  CHECK_THROWS_AS(inner_product(f, CVector(3)), ConfigError);
}

TEST_CASE("polynomial-weight basis is orthonormal in E(k)") {
  for (int d : {2, 3}) {
    BasisSpec spec{d, 6, Weight::polynomial(6.0)};
    OrthonormalBasis b = build_basis(spec);
    CHECK(b.profile_exponent() == minimal_profile_exponent(d, 6, 6.0));
    CHECK(4 * b.profile_exponent() > 2 * 6 + 12 + d + 2);
    RMatrix g1 = gram_matrix(b, build_quadrature(spec, 9));
    RMatrix g2 = gram_matrix(b, build_quadrature(spec, 13));
    CHECK((g1 - RMatrix::Identity(b.size(), b.size())).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((g1 - g2).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("weight conversion identity between E and E(k)") {
  BasisSpec spec{3, 4, Weight::polynomial(6.0)};
  QuadratureGrid grid = build_quadrature(spec, 8);
  const double k = 6.0;
  CVector f(grid.size()), g(grid.size()), gc(grid.size());
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const double* v = grid.point(q);
    const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double m = maxwellian_r2(3, r2);
    f(q) = (1.0 + v[0]) * m;
    g(q) = cplx(v[1] * v[1], v[2]) * m;
    gc(q) = m > 0.0 ? g(q) * std::pow(1.0 + r2, -k) / m : cplx(0.0);
  }
  const cplx e = inner_product(grid, f, g, Weight::gaussian());
  const cplx ek = inner_product(grid, f, gc, Weight::polynomial(k));
  CHECK(std::abs(e - ek) < 1e-12 * std::abs(e));
  CHECK(e.real() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("k_star root") {
  CHECK(b_function(k_star() - 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b_function(3.0) > b_function(5.0));
  CHECK(b_function(5.0) > b_function(10.0));
}
