#include <cmath>
#include <doctest.h>
#include <map>
#include <random>

#include "boltzspec/semigroup_analysis.hpp"

using namespace boltzspec;

namespace {

struct Setup {
  OrthonormalBasis basis;
  OperatorMatrix L, V;
  double a0 = 0.0;
};

const Setup& setup(int d, int n) {
  static std::map<std::pair<int, int>, Setup> cache;
  auto key = std::make_pair(d, n);
  if (!cache.count(key)) {
    Setup s;
    s.basis = build_basis(BasisSpec{d, n, Weight::gaussian()});
    s.L = assemble_L(s.basis, default_quad_order(n));
    RVector e = RVector::Zero(d);
    e(0) = 1.0;
    s.V = assemble_v_projection(s.basis, e);
    s.a0 = spectral_gap(s.L);
    cache[key] = s;
  }
  return cache[key];
}

RVector e1(int d) {
  RVector v = RVector::Zero(d);
  v(0) = 1.0;
  return v;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(a + (b - a) * i / n);
  return out;
}

}  // namespace

TEST_CASE("matrix exponential") {
  CMatrix A = CMatrix::Zero(2, 2);
  A(0, 0) = -1.0;
  A(1, 1) = -2.0;
  CHECK(max_abs(CMatrix(matrix_exponential(A, 0.0) - CMatrix::Identity(2, 2))) == 0.0);
  CMatrix E = matrix_exponential(A, 1.0);
  CHECK(std::abs(E(0, 0) - std::exp(-1.0)) < 1e-15);
  CHECK(std::abs(E(1, 1) - std::exp(-2.0)) < 1e-15);
  CHECK(std::abs(E(0, 1)) == 0.0);

  std::mt19937 g(23);
  std::normal_distribution<double> n;
  CMatrix H(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) H(i, j) = cplx(n(g), n(g));
  H = 0.5 * (H + H.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  for (double t : {0.3, 1.0, 2.5}) {
    CVector ex = (t * es.eigenvalues()).array().exp().cast<cplx>();
    CMatrix ref = es.eigenvectors() * ex.asDiagonal() * es.eigenvectors().adjoint();
    CHECK(max_abs(CMatrix(matrix_exponential(H, t) - ref)) < 1e-10 * std::max(1.0, max_abs(ref)));
  }
  CHECK_THROWS_AS(matrix_exponential(A, -1.0), ConfigError);
  CHECK_THROWS_AS(matrix_exponential(A, 1e9), ConfigError);
}

TEST_CASE("semigroup property and contractivity") {
  const Setup& s = setup(3, 4);
  std::mt19937 g(29);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (double r : {0.0, 0.1, 1.0}) {
    CMatrix A = assemble_L_xi(s.L, s.V, FrequencyPoint::polar(r, e1(3))).values;
    for (int k = 0; k < 3; ++k) {
      const double t = u(g), q = u(g);
      CMatrix lhs = matrix_exponential(A, t + q);
      CMatrix rhs = matrix_exponential(A, t) * matrix_exponential(A, q);
      CHECK(max_abs(CMatrix(lhs - rhs)) < 1e-8);
      CHECK(operator_norm(matrix_exponential(A, t)) <= 1.0 + 1e-8);
    }
  }
}

TEST_CASE("splitting check at small frequency") {
  for (int d : {2, 3}) {
    const Setup& s = setup(d, 6);
    const double a = 0.5 * s.a0;
    FrequencyPoint xi = FrequencyPoint::polar(0.1, e1(d));
    CMatrix A = assemble_L_xi(s.L, s.V, xi).values;
    SpectralSlice sl = spectrum(A, xi);
    BranchAssignment as = assign_branches(sl, first_order_modes(s.basis, e1(d)), a);
    std::vector<double> grid = linspace(0.0, 10.0, 40);
    grid.push_back(0.5);
    grid.push_back(1.0);
    std::sort(grid.begin(), grid.end());
    DecayReport rep = splitting_check(A, sl, as, grid);
    CHECK(rep.start_residual < 1e-7);
    CHECK(rep.commutation_residual < 1e-6);
    CHECK(rep.gamma_fit < 0.0);
    CHECK(std::abs(rep.gamma_fit - rep.spectral_rate) < 0.05 * std::abs(rep.spectral_rate));
    for (std::size_t i = 0; i < rep.t.size(); ++i)
      CHECK(rep.norm[i] <= rep.C_fit * std::exp(rep.gamma_fit * rep.t[i]) * (1.0 + 1e-12));
    CHECK(rep.max_norm <= 1.0 + 1e-8);
    // exp(t L) P_j = exp(t lambda_j) P_j.
    ProjectorSet ps = branch_projectors(sl, as);
    CMatrix E = matrix_exponential(A, 1.0);
    for (int k = 0; k < kBranchCount; ++k) {
      cplx lam = sl.eigenvalues(as.members[k][0]);
      CHECK(max_abs(CMatrix(E * ps.P[k] - std::exp(lam) * ps.P[k])) < 1e-7);
    }
  }
}

TEST_CASE("large-frequency decay") {
  const Setup& s = setup(3, 6);
  FrequencyPoint xi = FrequencyPoint::polar(1.0, e1(3));
  CMatrix A = assemble_L_xi(s.L, s.V, xi).values;
  std::vector<double> grid = relaxation_time_grid(A, 50);
  DecayReport rep = large_xi_decay(A, xi, grid);
  CHECK(rep.spectral_rate < 0.0);
  CHECK(std::abs(rep.gamma_fit - rep.spectral_rate) < 0.1 * std::abs(rep.spectral_rate));
  CHECK(rep.max_norm <= 1.0 + 1e-8);
  CHECK_THROWS_AS(large_xi_decay(A, xi, {}), ConfigError);
}

TEST_CASE("resolvent line scans") {
  const Setup& s = setup(3, 4);
  std::vector<double> tau = linspace(-400.0, 400.0, 200);
  ResolventScan sc = resolvent_line_scan(s.L.values, 1.0, tau);
  CHECK(std::abs(sc.sup - 1.0) < 0.1);
  CHECK(sc.edges_decreasing);
  CHECK(sc.far_field_ratio <= 1.0);

  const double a = 0.5 * s.a0;
  CMatrix A = assemble_L_xi(s.L, s.V, FrequencyPoint::polar(0.1, e1(3))).values;
  ResolventScan mid = resolvent_line_scan(A, -a, tau);
  CHECK(std::isfinite(mid.sup));
  CHECK(mid.sup > 0.0);
  CHECK_THROWS_AS(resolvent_line_scan(s.L.values, 0.0, tau), NumericalError);
}

TEST_CASE("uniform gap scan") {
  const Setup& s = setup(3, 4);
  std::vector<RVector> dirs = {e1(3), RVector::Ones(3), RVector::Unit(3, 2)};
  std::vector<double> rs = {0.0, 0.01, 0.1, 0.3, 0.5, 1.0, 2.0, 5.0};
  GapScan g = gap_uniformity_scan(s.L, s.basis, rs, dirs, 0.3);
  CHECK(g.b_emp > 0.0);
  CHECK(g.rows.size() == rs.size() * dirs.size());
  CHECK(std::abs(g.rows[0].abscissa + s.a0) < 1e-8);
  // Even in r along a fixed direction.
  std::vector<RVector> pm = {e1(3), -e1(3)};
  GapScan h = gap_uniformity_scan(s.L, s.basis, {0.2, 1.0}, pm, 0.3);
  CHECK(std::abs(h.rows[0].abscissa - h.rows[2].abscissa) < 1e-8);
  CHECK(std::abs(h.rows[1].abscissa - h.rows[3].abscissa) < 1e-8);
}
