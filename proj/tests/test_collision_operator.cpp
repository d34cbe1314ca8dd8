#include <map>
#include <cmath>
#include <doctest.h>
#include <random>

#include "boltzspec/collision_operator.hpp"
#include "boltzspec/quadrature.hpp"

using namespace boltzspec;

namespace {

// E|v - Z| for a standard Gaussian Z, closed forms in d = 3 and d = 2.
double mean_distance(int d, double a) {
  if (d == 3) {
    if (a == 0.0) return 2.0 * std::sqrt(2.0 / kPi);
    return std::sqrt(2.0 / kPi) * std::exp(-0.5 * a * a) + (a + 1.0 / a) * std::erf(a / std::sqrt(2.0));
  }
  const double x = 0.25 * a * a;
  return std::sqrt(kPi / 2.0) * std::exp(-x) *
         ((1.0 + 0.5 * a * a) * std::cyl_bessel_i(0.0, x) + 0.5 * a * a * std::cyl_bessel_i(1.0, x));
}

const OrthonormalBasis& basis(int d, int n) {
  static std::map<std::pair<int, int>, OrthonormalBasis> cache;
  auto key = std::make_pair(d, n);
  if (!cache.count(key)) cache[key] = build_basis(BasisSpec{d, n, Weight::gaussian()});
  return cache[key];
}

const OperatorMatrix& L_of(int d, int n) {
  static std::map<std::pair<int, int>, OperatorMatrix> cache;
  auto key = std::make_pair(d, n);
  if (!cache.count(key)) cache[key] = assemble_L(basis(d, n), default_quad_order(n));
  return cache[key];
}

}  // namespace

TEST_CASE("collision frequency against closed forms") {
  for (int d : {2, 3}) {
    for (double a : {0.0, 0.3, 1.0, 2.5, 7.0}) {
      const double ref = sphere_measure(d) * mean_distance(d, a);
      CHECK(compute_nu_speed(d, a) == doctest::Approx(ref).epsilon(d == 3 ? 1e-12 : 1e-9));
    }
    const double big = compute_nu_speed(d, 50.0) / 50.0;
    CHECK(std::abs(big / sphere_measure(d) - 1.0) < 0.01);
  }
  CHECK(compute_nu_speed(3, 0.0) == doctest::Approx(4.0 * kPi * 2.0 * std::sqrt(2.0 / kPi)).epsilon(1e-13));
  const double v[3] = {0.4, -1.2, 0.7}, w[3] = {-1.2, 0.7, 0.4};
  CHECK(std::abs(compute_nu(3, v) - compute_nu(3, w)) < 1e-13);
}

TEST_CASE("collision frequency bounds") {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.1 * i);
  NuBounds b = estimate_nu_bounds(3, grid);
  CHECK(b.nu0 > 0.0);
  CHECK(b.nu1 > b.nu0);
  CHECK(std::isfinite(b.nu1));
  NuBounds s = estimate_nu_bounds(3, {0.0});
  CHECK(s.nu0 == s.nu1);
  CHECK(s.nu0 == doctest::Approx(compute_nu_speed(3, 0.0)));
  CHECK_THROWS_AS(estimate_nu_bounds(3, {}), ConfigError);
}

TEST_CASE("L is Hermitian, dissipative and annihilates the collision invariants") {
  for (int d : {2, 3}) {
    const OperatorMatrix& L = L_of(d, 6);
    CHECK(max_abs(CMatrix(L.values - L.values.adjoint())) / max_abs(L.values) < 1e-8);
    RMatrix phi = basis(d, 6).collision_invariants();
    CHECK(max_abs(CMatrix(L.values * phi.cast<cplx>())) < 1e-8);
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 100; ++t) {
      CVector g(L.size());
      for (int i = 0; i < g.size(); ++i) g(i) = cplx(nd(rng), nd(rng));
      CHECK(g.dot(L.values * g).real() <= 1e-10 * g.squaredNorm());
      // Conservation: <L g, phi_j>_E = 0.
      for (int j = 0; j < d + 2; ++j)
        CHECK(std::abs(phi.col(j).cast<cplx>().dot(L.values * g)) < 1e-8 * g.norm());
    }
  }
}

TEST_CASE("kernel, gap and Galerkin monotonicity") {
  const double bound = kPi / (48.0 * std::sqrt(2.0 * std::exp(1.0)));
  for (int d : {2, 3}) {
    KernelInfo k = kernel_basis(L_of(d, 6));
    CHECK(k.vectors.cols() == d + 2);
    CHECK(principal_angle(k.vectors, basis(d, 6).collision_invariants().cast<cplx>()) < 1e-6);
    const double g4 = spectral_gap(L_of(d, 4)), g6 = spectral_gap(L_of(d, 6)), g8 = spectral_gap(L_of(d, 8));
    CHECK(g6 >= bound);
    CHECK(g8 >= bound);
    CHECK(g6 <= g4 + 1e-10);
    CHECK(g8 <= g6 + 1e-10);
  }
  OperatorMatrix broken = L_of(3, 4);
  broken.values(0, 0) += 1.0;
  CHECK_THROWS_AS(kernel_basis(broken), NumericalError);
}

TEST_CASE("collision-frequency multiplier and gain part") {
  for (int d : {2, 3}) {
    const OrthonormalBasis& b = basis(d, 6);
    OperatorMatrix nu = assemble_nu_multiplier(b, default_quad_order(6));
    const OperatorMatrix& L = L_of(d, 6);
    CHECK(max_abs(CMatrix(nu.values - nu.values.adjoint())) < 1e-12 * max_abs(nu.values));
    // <nu phi_0, phi_0>_E = int nu M, by radial quadrature of compute_nu.
    Rule1D r = gauss_legendre(80, 0.0, 12.0);
    double ref = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double s = r.nodes[i];
      ref += r.weights[i] * sphere_measure(d) * std::pow(s, d - 1) * maxwellian_r2(d, s * s) *
             compute_nu_speed(d, s);
    }
    CHECK(nu.values(0, 0).real() == doctest::Approx(ref).epsilon(1e-10));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(nu.values);
    NuBounds nb = estimate_nu_bounds(d, {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 12.0});
    CHECK(es.eigenvalues()(0) >= nb.nu0);
    CHECK(es.eigenvalues()(0) >= compute_nu_speed(d, 0.0));
    // nu-only spectrum lies farther left than the gap of L.
    CHECK(es.eigenvalues()(0) > spectral_gap(L));

    OperatorMatrix K = gain_part(L, nu);
    CHECK(max_abs(CMatrix(K.values - (L.values + nu.values))) == 0.0);
    CHECK(max_abs(CMatrix(K.values - K.values.adjoint())) < 1e-8 * max_abs(K.values));
    CMatrix phi = b.collision_invariants().cast<cplx>();
    CHECK(max_abs(CMatrix(K.values * phi - nu.values * phi)) < 1e-8);
  }
}

TEST_CASE("rotation equivariance under signed permutations") {
  const OrthonormalBasis& b = basis(3, 6);
  const OperatorMatrix& L = L_of(3, 6);
  CHECK(rotation_equivariance_check(L, b, RMatrix::Identity(3, 3)) < 1e-12);
  RMatrix swap = RMatrix::Zero(3, 3);
  swap(0, 1) = swap(1, 0) = swap(2, 2) = 1.0;
  CHECK(rotation_equivariance_check(L, b, swap) < 1e-8);
  RMatrix flip = RMatrix::Identity(3, 3);
  flip(0, 0) = -1.0;
  CHECK(rotation_equivariance_check(L, b, flip) < 1e-8);
  RMatrix bad = RMatrix::Identity(3, 3);
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(rotation_equivariance_check(L, b, bad), ConfigError);
}

TEST_CASE("weak form agrees with a direct (v, v_*, sigma) tensor quadrature") {
  // Independent route: tensor Gauss-Hermite in v and v_* with the kink of
  // |v - v_*| left untreated, so only a few digits are expected.
  const int d = 2, N = 3;
  const OrthonormalBasis& b = basis(d, N);
  OperatorMatrix L = assemble_L(b, default_quad_order(N));
  Rule1D gh = gauss_hermite_normal(24);
  SphereRule sph = sphere_rule(d, 8);
  const int n = b.size();
  RMatrix direct = RMatrix::Zero(n, n);
  std::vector<double> pv(n), pw(n), pp(n), pq(n), delta(n);
  for (std::size_t i1 = 0; i1 < gh.size(); ++i1)
    for (std::size_t i2 = 0; i2 < gh.size(); ++i2)
      for (std::size_t j1 = 0; j1 < gh.size(); ++j1)
        for (std::size_t j2 = 0; j2 < gh.size(); ++j2) {
          const double v[2] = {gh.nodes[i1], gh.nodes[i2]}, w[2] = {gh.nodes[j1], gh.nodes[j2]};
          const double wt = gh.weights[i1] * gh.weights[i2] * gh.weights[j1] * gh.weights[j2];
          const double g = std::hypot(v[0] - w[0], v[1] - w[1]);
          b.evaluate_polynomial(v, pv.data());
          b.evaluate_polynomial(w, pw.data());
          for (std::size_t e = 0; e < sph.size(); ++e) {
            const double* s = sph.point(e);
            const double vp[2] = {0.5 * (v[0] + w[0]) + 0.5 * g * s[0], 0.5 * (v[1] + w[1]) + 0.5 * g * s[1]};
            const double vq[2] = {0.5 * (v[0] + w[0]) - 0.5 * g * s[0], 0.5 * (v[1] + w[1]) - 0.5 * g * s[1]};
            b.evaluate_polynomial(vp, pp.data());
            b.evaluate_polynomial(vq, pq.data());
            for (int a = 0; a < n; ++a) delta[a] = pp[a] + pq[a] - pv[a] - pw[a];
            const double f = -0.25 * wt * g * sph.weights[e];
            for (int a = 0; a < n; ++a)
              for (int c = 0; c < n; ++c) direct(a, c) += f * delta[a] * delta[c];
          }
        }
  CHECK((direct - L.values.real()).cwiseAbs().maxCoeff() < 2e-3 * L.values.cwiseAbs().maxCoeff());
}
