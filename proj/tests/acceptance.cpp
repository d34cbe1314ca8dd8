// Acceptance criteria: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>

#include "boltzspec/semigroup_analysis.hpp"
#include "boltzspec/session.hpp"
#include "boltzspec/validation.hpp"

using namespace boltzspec;

namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("error: ") + e.what()};
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s %2d %s: %s [%.1f s]\n", v.passed ? "PASS" : "FAIL", id, title.c_str(), v.detail.c_str(), sec);
  std::fflush(stdout);
  if (!v.passed) ++failures;
}

std::string num(double x, const char* f = "%.4g") {
  char b[64];
  std::snprintf(b, sizeof b, f, x);
  return b;
}

RunConfig config(int d, int n) {
  RunConfig c;
  c.dim = d;
  c.degree = n;
  return c;
}

RVector e1(int d) { return RVector::Unit(d, 0); }

Session& session(int d, int n) {
  static std::map<std::pair<int, int>, std::unique_ptr<Session>> pool;
  auto& s = pool[{d, n}];
  if (!s) s = std::make_unique<Session>(config(d, n));
  return *s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  criterion(1, "kernel structure (d=3, N=6)", [] {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig c = config(3, 6);
    OrthonormalBasis b = build_basis(c.gaussian_spec());
    OperatorMatrix L = assemble_L(b, c.effective_quad_order());
    KernelInfo k = kernel_basis(L);
    const double ang = principal_angle(k.vectors, b.collision_invariants().cast<cplx>());
    const double sec = seconds_since(t0);
    const int dim = static_cast<int>(k.vectors.cols());
    return Verdict{dim == 5 && ang < 1e-6 && sec < 120.0,
                   "dimension " + std::to_string(dim) + ", largest principal angle " + num(ang) + ", " + num(sec, "%.1f") +
                       " s"};
  });

  criterion(2, "spectral gap bound", [] {
    const double bound = kPi / (48.0 * std::sqrt(2.0 * std::exp(1.0)));
    bool ok = true;
    std::string d;
    for (int dim : {2, 3})
      for (int n : {6, 8}) {
        const double a0 = session(dim, n).a0();
        ok = ok && a0 >= bound;
        d += "a0(d=" + std::to_string(dim) + ",N=" + std::to_string(n) + ") = " + num(a0, "%.6g") + "; ";
      }
    return Verdict{ok, d + "bound " + num(bound, "%.5f")};
  });

  criterion(3, "acoustic speed (N=8)", [] {
    bool ok = true;
    std::string d;
    for (int dim : {2, 3}) {
      Session& s = session(dim, 8);
      const double h = 1e-4;
      CMatrix A = assemble_L_xi(s.L(), s.V(e1(dim)), FrequencyPoint::polar(h, e1(dim))).values;
      SpectralSlice sl = spectrum(A);
      double top = 0.0;
      for (int i : eigen_indices_right_of(sl, s.thresholds().a)) top = std::max(top, sl.eigenvalues(i).imag());
      const double c = std::sqrt(1.0 + 2.0 / dim);
      const double slope = top / h;
      ok = ok && std::abs(slope - c) < 1e-3;
      d += "d=" + std::to_string(dim) + ": slope " + num(slope, "%.7f") + " vs " + num(c, "%.7f") + "; ";
    }
    return Verdict{ok, d};
  });

  criterion(4, "degeneracy and first-order zeros", [] {
    bool ok = true;
    std::string d;
    for (int dim : {2, 3}) {
      Session& s = session(dim, 8);
      BranchTable t = trace_branches(s.L(), s.V(e1(dim)), s.basis(), e1(dim), {1e-3}, s.thresholds().a);
      const double z0 = std::abs(t.lambda[branch_slot(0)][0]) / 1e-3;
      const double z2 = std::abs(t.lambda[branch_slot(2)][0]) / 1e-3;
      const int m = t.multiplicity[branch_slot(2)];
      ok = ok && m == dim - 1 && z0 < 1e-3 && z2 < 1e-3;
      d += "d=" + std::to_string(dim) + ": shear multiplicity " + std::to_string(m) + ", |lambda_0|/r " + num(z0) +
           ", |lambda_2|/r " + num(z2) + "; ";
    }
    return Verdict{ok, d + "at r = 1e-3"};
  });

  criterion(5, "second-order negativity and cross-validation (d=3, N=8)", [] {
    Session& s = session(3, 8);
    std::vector<double> grid;
    for (int i = 1; i <= 30; ++i) grid.push_back(0.01 * i);
    BranchTable t = trace_branches(s.L(), s.V(e1(3)), s.basis(), e1(3), grid, s.thresholds().a);
    SecondOrderCoeffs so = second_order_coeffs(s.V(e1(3)), s.reduced_resolvent(), first_order_modes(s.basis(), e1(3)));
    bool ok = true;
    double worst = 0.0;
    std::string d = "lambda2 =";
    for (int k = 0; k < kBranchCount; ++k) {
      ok = ok && so.lambda2[k] < 0.0;
      worst = std::max(worst, std::abs(t.lambda2_fit[k].real() - so.lambda2[k]) / std::abs(so.lambda2[k]));
      d += " " + num(so.lambda2[k], "%.6f");
    }
    return Verdict{ok && worst < 0.01, d + "; largest relative deviation from fits " + num(worst)};
  });

  criterion(6, "projector algebra and expansion (d=3, N=6)", [] {
    Session& s = session(3, 6);
    const double a = s.thresholds().a;
    CMatrix A = assemble_L_xi(s.L(), s.V(e1(3)), FrequencyPoint::polar(0.1, e1(3))).values;
    SpectralSlice sl = spectrum(A);
    FirstOrderModes modes = first_order_modes(s.basis(), e1(3));
    ProjectorSet ps = branch_projectors(sl, assign_branches(sl, modes, a));
    double alg = 0.0;
    for (int j = 0; j < kBranchCount; ++j)
      for (int k = 0; k < kBranchCount; ++k) {
        CMatrix prod = ps.P[j] * ps.P[k];
        alg = std::max(alg, max_abs(j == k ? CMatrix(prod - ps.P[j]) : prod));
      }
    ProjectorCoeffs pc = branch_projector_coeffs(s.L(), s.V(e1(3)), s.basis(), e1(3), a);
    CMatrix sum = CMatrix::Zero(pc.P0[0].rows(), pc.P0[0].cols());
    for (const auto& p : pc.P0) sum += p;
    const double ksum = max_abs(CMatrix(sum - s.reduced_resolvent().kernel_projector()));
    std::vector<double> g;
    for (int i = 1; i <= 10; ++i) g.push_back(0.01 * i);
    ProjectorExpansion pe = total_projector_expansion(s.L(), s.V(e1(3)), s.basis(), g, s.thresholds().contour_radius);
    return Verdict{alg < 1e-7 && ksum < 1e-7 && pe.order >= 1.9,
                   "P_j P_l residual " + num(alg) + ", sum P_j(0) - Pi " + num(ksum) + ", remainder order " +
                       num(pe.order, "%.4f")};
  });

  criterion(7, "reduced-operator equivalence (d=3, N=6)", [] {
    Session& s = session(3, 6);
    const Thresholds& th = s.thresholds();
    const CMatrix P0 = s.reduced_resolvent().kernel_projector();
    std::mt19937 g(7);
    std::uniform_real_distribution<double> u(0.01, s.config().r0);
    std::normal_distribution<double> n;
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const double r = u(g);
      RVector dir(3);
      for (int i = 0; i < 3; ++i) dir(i) = n(g);
      dir.normalize();
      CMatrix A = assemble_L_xi(s.L(), s.V(dir), FrequencyPoint::polar(r, dir)).values;
      CMatrix Px = contour_projector(A, ContourSpec{0.0, th.contour_radius, 64}).P;
      CMatrix Lt = reduced_operator(A, kato_transform(P0, Px), kernel_frame(s.basis(), dir), r);
      SpectralSlice sl = spectrum(A);
      std::vector<int> hydro = eigen_indices_right_of(sl, th.a);
      Eigen::ComplexEigenSolver<CMatrix> es(CMatrix(r * Lt), false);
      std::vector<bool> used(hydro.size(), false);
      for (int i = 0; i < es.eigenvalues().size(); ++i) {
        int best = -1;
        for (std::size_t j = 0; j < hydro.size(); ++j)
          if (!used[j] && (best < 0 || std::abs(es.eigenvalues()(i) - sl.eigenvalues(hydro[j])) <
                                           std::abs(es.eigenvalues()(i) - sl.eigenvalues(hydro[best]))))
            best = static_cast<int>(j);
        used[best] = true;
        worst = std::max(worst, std::abs(es.eigenvalues()(i) - sl.eigenvalues(hydro[best])));
      }
    }
    const double r = 0.1;
    CMatrix A = assemble_L_xi(s.L(), s.V(e1(3)), FrequencyPoint::polar(r, e1(3))).values;
    CMatrix Px = contour_projector(A, ContourSpec{0.0, th.contour_radius, 64}).P;
    CMatrix Lt = reduced_operator(A, kato_transform(P0, Px), kernel_frame(s.basis(), e1(3)), r);
    const double block = std::max({Lt.block(0, 2, 2, 3).cwiseAbs().maxCoeff(), Lt.block(2, 0, 3, 2).cwiseAbs().maxCoeff(),
                                   std::abs(Lt(0, 1)), std::abs(Lt(1, 0))});
    return Verdict{worst < 1e-7 && block < 1e-7,
                   "max eigenvalue mismatch " + num(worst) + " over 10 random frequencies, block residual " + num(block)};
  });

  criterion(8, "semigroup splitting (d=3, N=6, |xi| = 0.1)", [] {
    Session& s = session(3, 6);
    FrequencyPoint xi = FrequencyPoint::polar(0.1, e1(3));
    CMatrix A = assemble_L_xi(s.L(), s.V(e1(3)), xi).values;
    SpectralSlice sl = spectrum(A, xi);
    BranchAssignment as = assign_branches(sl, first_order_modes(s.basis(), e1(3)), s.thresholds().a);
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(0.25 * i);
    DecayReport r = splitting_check(A, sl, as, grid);
    const double rel = std::abs(r.gamma_fit - r.spectral_rate) / std::abs(r.spectral_rate);
    return Verdict{rel <= 0.05 && r.commutation_residual < 1e-6,
                   "fitted rate " + num(r.gamma_fit, "%.5f") + " vs abscissa " + num(r.spectral_rate, "%.5f") + " (" +
                       num(100 * rel, "%.2f") + "%), commutation " + num(r.commutation_residual)};
  });

  criterion(9, "uniform gap scan (d=3, N=6)", [] {
    const auto t0 = std::chrono::steady_clock::now();
    Session& s = session(3, 6);
    std::vector<double> rg;
    for (int i = 0; i < 25; ++i) rg.push_back(0.01 * std::pow(500.0, i / 24.0));
    std::vector<RVector> dirs = {e1(3), RVector::Ones(3).normalized(), RVector(RVector::Unit(3, 1) + 0.5 * RVector::Unit(3, 2)).normalized()};
    GapScan gs = gap_uniformity_scan(s.L(), s.basis(), rg, dirs, s.config().r0);
    const double sec = seconds_since(t0);
    return Verdict{gs.b_emp > 0.0 && sec < 900.0,
                   "b_emp = " + num(gs.b_emp) + " over r in [0.01, 5] x 3 directions (" + std::to_string(gs.rows.size()) +
                       " slices)"};
  });

  criterion(10, "enlargement (k = 6, |xi| = 0.1)", [] {
    const double ks = k_star();
    const double closed = 0.5 + 0.5 * (1.0 + std::sqrt(73.0));
    std::string d = "k_* = " + num(ks, "%.15g") + " (closed form error " + num(std::abs(ks - closed)) + ")";
    bool ok = std::abs(ks - closed) < 1e-12;
    for (int dim : {2, 3}) {
      Session& s = session(dim, 8);
      FrequencyPoint xi = FrequencyPoint::polar(0.1, e1(dim));
      SpectralSlice sg = spectrum(assemble_L_xi(s.L(), s.V(e1(dim)), xi).values, xi);
      const EkDiscretization& e = s.ek();
      OperatorMatrix Vp = combine_v(e.V, e.basis.spec(), InnerProductTag::Polynomial, e1(dim));
      SpectralSlice sp = spectrum(assemble_L_xi(e.L, Vp, xi).values, xi);
      WeightComparison c = compare_spectra(sg.eigenvalues, sp.eigenvalues, s.thresholds().a);
      ok = ok && c.counts_match() && c.count_gauss == dim + 2 && c.max_distance < 1e-2;
      d += "; d=" + std::to_string(dim) + ": " + std::to_string(c.count_gauss) + " vs " + std::to_string(c.count_poly) +
           " eigenvalues, max distance " + num(c.max_distance);
    }
    return Verdict{ok, d};
  });

  criterion(11, "surrogate splitting (d=3, N=6)", [] {
    Session& s = session(3, 6);
    const SplittingSurrogate& sur = s.surrogate();
    const double alg = max_abs(CMatrix(sur.A + sur.B - s.ek().L.values)) / max_abs(s.ek().L.values);
    const Cutoff cut{s.config().cutoff_R, s.config().cutoff_delta};
    RegularizationReport r = regularization_check(s.ek(), cut, 1);
    RunConfig c = config(3, 6);
    c.poly_degree = 6;
    RegularizationReport coarse = regularization_check(assemble_in_Ek(c.polynomial_spec(), EkQuadrature{}), cut, 1);
    const double grid_change = std::abs(coarse.C_A - r.C_A) / r.C_A;
    const bool ok = alg <= 1e-14 && sur.a1_emp > 0.0 && std::isfinite(r.C_A) && r.stable() && grid_change <= 0.1;
    return Verdict{ok, "|A + B - L| / |L| = " + num(alg) + ", a1_emp = " + num(sur.a1_emp) + " (reference " +
                           num(sur.a1_reference) + "), C_A = " + num(r.C_A, "%.6g") + " (refined quadrature " +
                           num(r.relative_change) + ", N_poly 6 vs 8 " + num(grid_change) + ")"};
  });

  criterion(12, "validate suites at d=2 N=6 and d=3 N=6", [] {
    const auto t0 = std::chrono::steady_clock::now();
    std::string d;
    bool ok = true;
    for (int dim : {2, 3}) {
      Session s(config(dim, 6));
      ValidationReport rep = run_validation(s);
      ok = ok && rep.all_passed();
      d += "d=" + std::to_string(dim) + ": " + std::to_string(rep.checks.size() - rep.failures()) + "/" +
           std::to_string(rep.checks.size()) + " checks; ";
      for (const CheckResult& c : rep.checks)
        if (!c.passed) d += "failed " + c.module + "/" + c.name + "; ";
    }
    const double sec = seconds_since(t0);
    return Verdict{ok && sec < 600.0, d + num(sec, "%.1f") + " s total"};
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
