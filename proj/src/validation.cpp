#include "boltzspec/validation.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "boltzspec/semigroup_analysis.hpp"

namespace boltzspec {

bool ValidationReport::all_passed() const { return failures() == 0; }

int ValidationReport::failures() const {
  int n = 0;
  for (const auto& c : checks) n += c.passed ? 0 : 1;
  return n;
}

Json ValidationReport::to_json(bool with_timing) const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["dim"] = dim;
  j["degree"] = degree;
  j["passed"] = all_passed();
  j["failures"] = failures();
  Json arr = Json::array();
  for (const auto& c : checks) {
    Json e{{"module", c.module},         {"name", c.name},   {"property", c.property}, {"passed", c.passed},
           {"value", c.value},           {"threshold", c.threshold}, {"detail", c.detail}};
    if (with_timing) e["seconds"] = c.seconds;
    arr.push_back(e);
  }
  j["checks"] = arr;
  if (with_timing) j["seconds"] = seconds;
  return j;
}

namespace {

RVector unit(int d, int i) {
  RVector e = RVector::Zero(d);
  e(i) = 1.0;
  return e;
}

RVector random_direction(int d, std::mt19937& g) {
  std::normal_distribution<double> n;
  RVector v(d);
  for (int i = 0; i < d; ++i) v(i) = n(g);
  return v / v.norm();
}

RMatrix random_orthogonal(int d, std::mt19937& g) {
  std::normal_distribution<double> n;
  RMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = n(g);
  Eigen::HouseholderQR<RMatrix> qr(a);
  return qr.householderQ();
}

// Largest distance in a greedy nearest-neighbour pairing of two equally long lists.
double match_distance(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) return INFINITY;
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    int arg = -1;
    for (int j = 0; j < b.size(); ++j)
      if (!used[j] && (arg < 0 || std::abs(a(i) - b(j)) < std::abs(a(i) - b(arg)))) arg = j;
    used[arg] = true;
    worst = std::max(worst, std::abs(a(i) - b(arg)));
  }
  return worst;
}

CVector eigenvalues_of(const CMatrix& A) {
  Eigen::ComplexEigenSolver<CMatrix> es(A, false);
  return es.eigenvalues();
}

// Gaussian-basis polynomial parts of the collision invariants at v.
void invariant_polys(int d, const double* v, double* out) {
  double r2 = 0.0;
  for (int i = 0; i < d; ++i) r2 += v[i] * v[i];
  out[0] = 1.0;
  for (int i = 0; i < d; ++i) out[1 + i] = v[i];
  out[d + 1] = r2 - d;
}

class Runner {
 public:
  Runner(ValidationReport& rep, const std::function<void(const CheckResult&)>& progress)
      : rep_(rep), progress_(progress) {}

  // fn returns {value, passed, detail}.
  struct Outcome {
    double value;
    bool passed;
    std::string detail;
  };

  template <class F>
  void run(const std::string& module, const std::string& name, const std::string& property, double threshold,
           F&& fn) {
    CheckResult c;
    c.module = module;
    c.name = name;
    c.property = property;
    c.threshold = threshold;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      Outcome o = fn();
      c.value = std::isfinite(o.value) ? o.value : 0.0;
      c.passed = o.passed && std::isfinite(o.value);
      c.detail = o.detail;
      if (!std::isfinite(o.value)) c.detail += (c.detail.empty() ? "" : "; ") + std::string("non-finite value");
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("error: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep_.checks.push_back(c);
    if (progress_) progress_(c);
  }

 private:
  ValidationReport& rep_;
  const std::function<void(const CheckResult&)>& progress_;
};

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", x);
  return b;
}

}  // namespace

ValidationReport run_validation(Session& s, const std::function<void(const CheckResult&)>& progress) {
  const auto t_start = std::chrono::steady_clock::now();
  const RunConfig& cfg = s.config();
  const int d = cfg.dim, N = cfg.degree;
  ValidationReport rep;
  rep.dim = d;
  rep.degree = N;
  Runner run(rep, progress);
  std::mt19937 gen(cfg.seed);
  using O = Runner::Outcome;

  const OrthonormalBasis& basis = s.basis();
  const int n = basis.size();
  const RVector e1 = unit(d, 0);

  // ---- velocity_basis
  run.run("velocity_basis", "gram_orthonormality", "Gaussian basis is orthonormal in E", 1e-10, [&] {
    RMatrix G = gram_matrix(basis, build_quadrature(basis.spec(), cfg.effective_quad_order()));
    const double err = (G - RMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    return O{err, err < 1e-10, ""};
  });
  run.run("velocity_basis", "gram_orthonormality_weighted", "polynomial-weight basis is orthonormal in E(k)", 1e-10,
          [&] {
            const double err = s.ek().gram_error;
            return O{err, err < 1e-10, "N = " + std::to_string(s.ek().basis.degree())};
          });
  run.run("velocity_basis", "invariant_representability",
          "collision invariants are represented exactly by the Gaussian basis", 1e-12, [&] {
            QuadratureGrid g = build_quadrature(basis.spec(), cfg.effective_quad_order());
            RMatrix c = RMatrix::Zero(n, d + 2);
            std::vector<double> p(n), phi(d + 2);
            for (std::size_t q = 0; q < g.size(); ++q) {
              basis.evaluate_polynomial(g.point(q), p.data());
              invariant_polys(d, g.point(q), phi.data());
              for (int j = 0; j < d + 2; ++j)
                for (int i = 0; i < n; ++i) c(i, j) += g.weights[q] * phi[j] * p[i];
            }
            double coeff_err = (c - basis.collision_invariants()).cwiseAbs().maxCoeff();
            double resid = 0.0;
            for (std::size_t q = 0; q < g.size(); ++q) {
              basis.evaluate_polynomial(g.point(q), p.data());
              invariant_polys(d, g.point(q), phi.data());
              for (int j = 0; j < d + 2; ++j) {
                double acc = phi[j];
                for (int i = 0; i < n; ++i) acc -= c(i, j) * p[i];
                resid += g.weights[q] * acc * acc;
              }
            }
            const double err = std::max(coeff_err, std::sqrt(std::max(0.0, resid)));
            return O{err, err < 1e-12, ""};
          });
  run.run("velocity_basis", "quadrature_consistency", "inner products agree between quadrature orders q and q+4",
          1e-10, [&] {
            const int q = cfg.effective_quad_order();
            RMatrix a = gram_matrix(basis, build_quadrature(basis.spec(), q));
            RMatrix b = gram_matrix(basis, build_quadrature(basis.spec(), q + 4));
            const double err = (a - b).cwiseAbs().maxCoeff();
            return O{err, err < 1e-10, ""};
          });

  // ---- collision_operator
  const OperatorMatrix& L = s.L();
  const CMatrix inv = basis.collision_invariants().cast<cplx>();
  run.run("collision_operator", "conservation", "L conserves mass, momentum and energy", 1e-8, [&] {
    double worst = 0.0;
    for (int j = 0; j < d + 2; ++j) worst = std::max(worst, (L.values.adjoint() * inv.col(j)).norm() / inv.col(j).norm());
    return O{worst, worst < 1e-8, "max_j |L^H phi_j| / |phi_j|"};
  });
  run.run("collision_operator", "negative_semidefinite", "Hermitian part of L is negative semidefinite", 1e-8, [&] {
    const double m = numerical_abscissa(L.values);
    return O{m, m <= 1e-8, ""};
  });
  const double gap_bound = kPi / (48.0 * std::sqrt(2.0 * std::exp(1.0)));
  run.run("collision_operator", "coercivity", "spectral gap on the orthogonal complement of the kernel", gap_bound,
          [&] {
            const double a0 = s.a0();
            return O{a0, a0 >= gap_bound, "a0 = " + fmt(a0)};
          });
  run.run("collision_operator", "splitting_consistency", "K - nu = L, and K agrees with nu on the kernel", 1e-8,
          [&] {
            OperatorMatrix nu = assemble_nu_multiplier(basis, cfg.effective_quad_order());
            OperatorMatrix K = gain_part(L, nu);
            const double alg = max_abs(CMatrix(K.values - nu.values - L.values));
            const double ker = max_abs(CMatrix((K.values - nu.values) * inv)) / max_abs(nu.values);
            const double err = std::max(alg, ker);
            return O{err, err < 1e-8, "algebra " + fmt(alg) + ", kernel " + fmt(ker)};
          });
  run.run("collision_operator", "kernel_structure", "kernel of L is spanned by the collision invariants", 1e-6,
          [&] {
            KernelInfo k = kernel_basis(L);
            const double ang = principal_angle(k.vectors, inv);
            return O{ang, k.vectors.cols() == d + 2 && ang < 1e-6,
                     "dimension " + std::to_string(k.vectors.cols())};
          });
  run.run("collision_operator", "collision_frequency_bounds", "nu0 <v> <= nu(v) <= nu1 <v>", 0.0, [&] {
    std::vector<double> speeds;
    for (int i = 0; i <= 80; ++i) speeds.push_back(0.25 * i);
    NuBounds b = estimate_nu_bounds(d, speeds);
    double worst = 0.0;
    for (double v : speeds) {
      const double q = compute_nu_speed(d, v) / std::sqrt(1.0 + v * v);
      worst = std::max({worst, b.nu0 - q, q - b.nu1});
    }
    return O{worst, b.nu0 > 0.0 && b.nu0 <= b.nu1 && worst <= 1e-12,
             "nu0 = " + fmt(b.nu0) + ", nu1 = " + fmt(b.nu1)};
  });
  run.run("collision_operator", "rotation_equivariance", "L commutes with rotations of velocity space", 1e-9, [&] {
    double worst = 0.0;
    for (int t = 0; t < 2; ++t) worst = std::max(worst, rotation_equivariance_check(L, basis, random_orthogonal(d, gen)));
    return O{worst, worst < 1e-9, ""};
  });

  // ---- fourier_operator
  const Thresholds th = s.thresholds();
  const double a = th.a;
  const std::vector<double> r_probe = {0.01, 0.1, cfg.r0, 1.0, 3.0};
  std::vector<RVector> dirs = {e1, random_direction(d, gen)};
  auto Lxi = [&](double r, const RVector& dir) {
    return assemble_L_xi(L, s.V(dir), FrequencyPoint::polar(r, dir)).values;
  };
  run.run("fourier_operator", "dissipativity", "every eigenvalue of L_xi has Re <= 0", 1e-8, [&] {
    double worst = -INFINITY;
    for (const RVector& dir : dirs)
      for (double r : r_probe) worst = std::max(worst, eigenvalues_of(Lxi(r, dir)).real().maxCoeff());
    return O{worst, worst <= 1e-8, ""};
  });
  run.run("fourier_operator", "conjugation_symmetry", "spectrum of L_{-xi} is the conjugate of that of L_xi", 1e-8,
          [&] {
            double worst = 0.0;
            for (double r : {0.1, 1.0}) {
              CVector p = eigenvalues_of(Lxi(r, dirs[1])), m = eigenvalues_of(Lxi(r, RVector(-dirs[1])));
              worst = std::max(worst, match_distance(p.conjugate(), m));
            }
            return O{worst, worst < 1e-8, ""};
          });
  run.run("fourier_operator", "rotation_covariance", "spectra of L_xi and L_{O xi} coincide for signed permutations",
          1e-8, [&] {
            RMatrix perm = RMatrix::Zero(d, d);
            for (int i = 0; i < d; ++i) perm((i + 1) % d, i) = (i % 2 == 0) ? -1.0 : 1.0;
            double worst = 0.0;
            for (double r : {0.1, 1.0}) {
              RVector dir = dirs[1];
              worst = std::max(worst, match_distance(eigenvalues_of(Lxi(r, dir)), eigenvalues_of(Lxi(r, RVector(perm * dir)))));
            }
            return O{worst, worst < 1e-8, ""};
          });
  run.run("fourier_operator", "projector_orthogonality", "projectors over disjoint contours annihilate each other",
          1e-7, [&] {
            CMatrix A = Lxi(0.1, e1);
            SpectralSlice sl = spectrum(A);
            ContourProjector p1 = contour_projector(A, ContourSpec{0.0, th.contour_radius, cfg.contour_nodes},
                                                    &sl.eigenvalues);
            const cplx target = sl.eigenvalues(d + 2);
            double sep = INFINITY;
            for (int i = 0; i < sl.eigenvalues.size(); ++i)
              if (std::abs(sl.eigenvalues(i) - target) > 1e-6) sep = std::min(sep, std::abs(sl.eigenvalues(i) - target));
            ContourProjector p2 =
                contour_projector(A, ContourSpec{target, 0.5 * sep, cfg.contour_nodes}, &sl.eigenvalues);
            const double err = std::max(max_abs(CMatrix(p1.P * p2.P)), max_abs(CMatrix(p2.P * p1.P)));
            return O{err, err < 1e-7 && p1.enclosed == d + 2 && p2.enclosed >= 1,
                     "enclosed " + std::to_string(p1.enclosed) + " and " + std::to_string(p2.enclosed)};
          });
  run.run("fourier_operator", "no_imaginary_eigenvalues",
          "for 0 < |xi| <= r0 only the d+2 hydrodynamic eigenvalues have Re > -1e-6", -1e-6, [&] {
            double worst = -INFINITY;
            bool counts = true;
            for (const RVector& dir : dirs)
              for (double r : {0.01, 0.1, cfg.r0}) {
                SpectralSlice sl = spectrum(Lxi(r, dir));
                counts = counts && static_cast<int>(eigen_indices_right_of(sl, a).size()) == d + 2;
                worst = std::max(worst, sl.eigenvalues(d + 2).real());
              }
            return O{worst, counts && worst < -1e-6, "largest non-hydrodynamic real part"};
          });
  run.run("fourier_operator", "small_frequency_confinement",
          "the hydrodynamic group stays inside the contour for |xi| <= r0", th.contour_radius, [&] {
            std::vector<double> g;
            for (int i = 1; i <= 6; ++i) g.push_back(cfg.r0 * i / 6.0);
            ConfinementScan c = eigenvalue_confinement_scan(L, s.V(e1), g, a);
            const double reach = c.M * cfg.r0;
            return O{reach, reach < th.contour_radius, "M = " + fmt(c.M) + ", a = " + fmt(a)};
          });

  // ---- hydrodynamic_branches
  const ReducedResolvent& S = s.reduced_resolvent();
  const CMatrix P0 = S.kernel_projector();
  run.run("hydrodynamic_branches", "reduced_operator_spectrum",
          "eig(r L~(r)) equals the hydrodynamic eigenvalues of L_xi (10 random frequencies)", 1e-7, [&] {
            std::uniform_real_distribution<double> u(0.01, cfg.r0);
            double worst = 0.0;
            for (int t = 0; t < 10; ++t) {
              const double r = u(gen);
              RVector dir = random_direction(d, gen);
              CMatrix A = Lxi(r, dir);
              CMatrix Px = contour_projector(A, ContourSpec{0.0, th.contour_radius, cfg.contour_nodes}).P;
              CMatrix Lt = reduced_operator(A, kato_transform(P0, Px), kernel_frame(basis, dir), r);
              SpectralSlice sl = spectrum(A);
              std::vector<int> hydro = eigen_indices_right_of(sl, a);
              CVector h(hydro.size());
              for (std::size_t i = 0; i < hydro.size(); ++i) h(i) = sl.eigenvalues(hydro[i]);
              worst = std::max(worst, match_distance(eigenvalues_of(CMatrix(r * Lt)), h));
            }
            return O{worst, worst < 1e-7, ""};
          });
  run.run("hydrodynamic_branches", "block_structure", "shear block of L~ decouples at xi along e_1", 1e-7, [&] {
    const double r = 0.1;
    CMatrix A = Lxi(r, e1);
    CMatrix Px = contour_projector(A, ContourSpec{0.0, th.contour_radius, cfg.contour_nodes}).P;
    CMatrix Lt = reduced_operator(A, kato_transform(P0, Px), kernel_frame(basis, e1), r);
    double err = std::max(Lt.block(0, d - 1, d - 1, 3).cwiseAbs().maxCoeff(),
                          Lt.block(d - 1, 0, 3, d - 1).cwiseAbs().maxCoeff());
    if (d == 3) err = std::max(err, std::max(std::abs(Lt(0, 1)), std::abs(Lt(1, 0))));
    return O{err, err < 1e-7, ""};
  });
  run.run("hydrodynamic_branches", "kato_consistency", "U maps ker L onto the range of P(xi)", 1e-7, [&] {
    double worst = 0.0;
    for (double r : {0.05, cfg.r0}) {
      CMatrix A = Lxi(r, dirs[1]);
      CMatrix Px = contour_projector(A, ContourSpec{0.0, th.contour_radius, cfg.contour_nodes}).P;
      CMatrix U = kato_transform(P0, Px);
      KernelInfo k = kernel_basis(L);
      CMatrix image = U * k.vectors;
      CMatrix range = Px * k.vectors;
      worst = std::max(worst, principal_angle(image, range));
    }
    return O{worst, worst < 1e-7, ""};
  });
  std::vector<double> grid;
  for (int i = 1; i <= 30; ++i) grid.push_back(cfg.r0 * i / 30.0);
  std::optional<BranchTable> table;
  run.run("hydrodynamic_branches", "branch_negativity", "Re lambda_j(r) < 0 for 0 < r <= r0", 0.0, [&] {
    table = trace_branches(L, s.V(e1), basis, e1, grid, a);
    double worst = -INFINITY;
    for (int k = 0; k < kBranchCount; ++k)
      for (const cplx& l : table->lambda[k]) worst = std::max(worst, l.real());
    return O{worst, worst < 0.0, ""};
  });
  run.run("hydrodynamic_branches", "direction_covariance", "branch eigenvalues depend only on |xi|", 1e-7, [&] {
    std::vector<double> few = {0.05, 0.1, 0.2};
    BranchTable t1 = trace_branches(L, s.V(e1), basis, e1, few, a);
    BranchTable t2 = trace_branches(L, s.V(dirs[1]), basis, dirs[1], few, a);
    double worst = 0.0;
    for (int k = 0; k < kBranchCount; ++k)
      for (std::size_t i = 0; i < few.size(); ++i) worst = std::max(worst, std::abs(t1.lambda[k][i] - t2.lambda[k][i]));
    return O{worst, worst < 1e-7, ""};
  });
  const FirstOrderModes modes = first_order_modes(basis, e1);
  const SecondOrderCoeffs so = second_order_coeffs(s.V(e1), S, modes);
  run.run("hydrodynamic_branches", "acoustic_speed", "Im lambda_{+-1} has slope +-sqrt(1 + 2/d)", 1e-3, [&] {
    if (!table) throw NumericalError("branch table unavailable");
    const double c = std::sqrt(1.0 + 2.0 / d);
    const double err = std::max(std::abs(table->lambda1_fit[branch_slot(1)].imag() - c),
                                std::abs(table->lambda1_fit[branch_slot(-1)].imag() + c));
    return O{err, err < 1e-3, "fitted " + fmt(table->lambda1_fit[branch_slot(1)].imag())};
  });
  run.run("hydrodynamic_branches", "first_order_zeros", "lambda_0 and the (d-1)-fold shear branch are tangent to 0",
          1e-3, [&] {
            if (!table) throw NumericalError("branch table unavailable");
            const double err = std::max(std::abs(table->lambda1_fit[branch_slot(0)]),
                                        std::abs(table->lambda1_fit[branch_slot(2)]));
            const bool mult = table->multiplicity[branch_slot(2)] == d - 1;
            return O{err, err < 1e-3 && mult, "shear multiplicity " + std::to_string(table->multiplicity[branch_slot(2)])};
          });
  run.run("hydrodynamic_branches", "second_order", "second-order coefficients are negative and match the fits",
          0.01, [&] {
            if (!table) throw NumericalError("branch table unavailable");
            double worst = 0.0;
            bool negative = true;
            for (int k = 0; k < kBranchCount; ++k) {
              negative = negative && so.lambda2[k] < 0.0;
              worst = std::max(worst, std::abs(table->lambda2_fit[k].real() - so.lambda2[k]) / std::abs(so.lambda2[k]));
            }
            return O{worst, negative && worst < 0.01, "relative deviation"};
          });
  run.run("hydrodynamic_branches", "eigenvalue_remainder_order",
          "eigenvalues minus first and second order terms are o(r^2)", 2.5, [&] {
            std::vector<double> dec = {0.01, 0.02, 0.04, 0.07, 0.1};
            BranchTable t = trace_branches(L, s.V(e1), basis, e1, dec, a);
            double worst = INFINITY;
            for (int k = 0; k < kBranchCount; ++k) {
              std::vector<double> x, y;
              for (std::size_t i = 0; i < dec.size(); ++i) {
                const double r = dec[i];
                const cplx rem = t.lambda[k][i] - r * modes.lambda1[k] - r * r * so.lambda2[k];
                x.push_back(std::log(r));
                y.push_back(std::log(std::abs(rem)));
              }
              const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
              const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
              double sxy = 0.0, sxx = 0.0;
              for (std::size_t i = 0; i < x.size(); ++i) {
                sxy += (x[i] - mx) * (y[i] - my);
                sxx += (x[i] - mx) * (x[i] - mx);
              }
              worst = std::min(worst, sxy / sxx);
            }
            return O{worst, worst > 2.5, "smallest fitted order over the branches"};
          });
  run.run("hydrodynamic_branches", "projector_expansion_order",
          "P(xi) - P(0) - r P^(1) is O(r^2) (fitted order >= 1.9)", 1.9, [&] {
            std::vector<double> g;
            for (int i = 1; i <= 10; ++i) g.push_back(0.01 * i);
            ProjectorExpansion pe = total_projector_expansion(L, s.V(e1), basis, g, th.contour_radius);
            return O{pe.order, pe.order >= 1.9 && pe.kernel_error < 1e-7, "kernel error " + fmt(pe.kernel_error)};
          });
  run.run("hydrodynamic_branches", "projector_algebra", "P_j P_l = delta_jl P_j and sum_j P_j(0) = P(0)", 1e-7, [&] {
    CMatrix A = Lxi(0.1, e1);
    SpectralSlice sl = spectrum(A);
    ProjectorSet ps = branch_projectors(sl, assign_branches(sl, modes, a));
    double worst = 0.0;
    for (int j = 0; j < kBranchCount; ++j)
      for (int k = 0; k < kBranchCount; ++k) {
        CMatrix prod = ps.P[j] * ps.P[k];
        worst = std::max(worst, max_abs(j == k ? CMatrix(prod - ps.P[j]) : prod));
      }
    ProjectorCoeffs pc = branch_projector_coeffs(L, s.V(e1), basis, e1, a);
    CMatrix sum = CMatrix::Zero(n, n);
    for (const auto& p : pc.P0) sum += p;
    const double ksum = max_abs(CMatrix(sum - P0));
    return O{std::max(worst, ksum), std::max(worst, ksum) < 1e-7,
             "products " + fmt(worst) + ", zeroth-order sum " + fmt(ksum)};
  });
  run.run("hydrodynamic_branches", "biorthogonality", "<e_alpha, f_beta> = delta_alpha_beta", 1e-7, [&] {
    CMatrix A = Lxi(0.1, e1);
    SpectralSlice sl = spectrum(A);
    ProjectorSet ps = branch_projectors(sl, assign_branches(sl, modes, a));
    auto tr = eigentriples(ps, modes, weighted_gram(basis, cfg.weight_k));
    CMatrix B = biorthogonality(tr);
    const double err = max_abs(CMatrix(B - CMatrix::Identity(B.rows(), B.cols())));
    return O{err, err < 1e-7 && static_cast<int>(tr.size()) == d + 2, ""};
  });

  // ---- semigroup_analysis
  run.run("semigroup_analysis", "semigroup_property", "exp((t+s)L_xi) = exp(t L_xi) exp(s L_xi)", 1e-8, [&] {
    std::uniform_real_distribution<double> u(0.0, 2.0);
    double worst = 0.0;
    for (double r : {0.1, 1.0}) {
      CMatrix A = Lxi(r, dirs[1]);
      for (int k = 0; k < 3; ++k) {
        const double t = u(gen), tau = u(gen);
        CMatrix lhs = matrix_exponential(A, t + tau);
        worst = std::max(worst, max_abs(CMatrix(lhs - matrix_exponential(A, t) * matrix_exponential(A, tau))));
      }
    }
    return O{worst, worst < 1e-8, ""};
  });
  run.run("semigroup_analysis", "contractivity", "|exp(t L_xi)| <= 1", 1e-8, [&] {
    double worst = 0.0;
    for (double r : {0.1, 1.0, 3.0})
      for (double t : {0.1, 0.5, 2.0, 5.0}) worst = std::max(worst, operator_norm(matrix_exponential(Lxi(r, e1), t)));
    return O{worst - 1.0, worst <= 1.0 + 1e-8, "largest norm " + fmt(worst)};
  });
  run.run("semigroup_analysis", "spectral_splitting", "exp(t L_xi) P_j = exp(t lambda_j) P_j", 1e-7, [&] {
    CMatrix A = Lxi(0.1, e1);
    SpectralSlice sl = spectrum(A);
    BranchAssignment as = assign_branches(sl, modes, a);
    ProjectorSet ps = branch_projectors(sl, as);
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
      CMatrix E = matrix_exponential(A, t);
      for (int j = 0; j < kBranchCount; ++j) {
        const cplx lam = sl.eigenvalues(as.members[j][0]);
        worst = std::max(worst, max_abs(CMatrix(E * ps.P[j] - std::exp(t * lam) * ps.P[j])));
      }
    }
    return O{worst, worst < 1e-7, ""};
  });
  run.run("semigroup_analysis", "remainder_decay_rate",
          "remainder decays at the complementary spectral abscissa (5%), commuting with P_j", 0.05, [&] {
            CMatrix A = Lxi(0.1, e1);
            SpectralSlice sl = spectrum(A);
            BranchAssignment as = assign_branches(sl, modes, a);
            std::vector<double> tg;
            for (int i = 0; i <= 40; ++i) tg.push_back(0.25 * i);
            DecayReport dr = splitting_check(A, sl, as, tg);
            const double rel = std::abs(dr.gamma_fit - dr.spectral_rate) / std::abs(dr.spectral_rate);
            const bool ok = rel <= 0.05 && dr.gamma_fit <= dr.spectral_rate + 0.05 * std::abs(dr.spectral_rate) &&
                            dr.commutation_residual < 1e-6;
            return O{rel, ok,
                     "gamma " + fmt(dr.gamma_fit) + " vs " + fmt(dr.spectral_rate) + ", commutation " +
                         fmt(dr.commutation_residual)};
          });
  run.run("semigroup_analysis", "large_frequency_decay", "semigroup decays at the spectral abscissa for |xi| > r0",
          0.05, [&] {
            CMatrix A = Lxi(1.0, e1);
            DecayReport dr = large_xi_decay(A, FrequencyPoint::polar(1.0, e1), relaxation_time_grid(A, 40));
            const double rel = std::abs(dr.gamma_fit - dr.spectral_rate) / std::abs(dr.spectral_rate);
            return O{rel, rel <= 0.05, "gamma " + fmt(dr.gamma_fit) + " vs " + fmt(dr.spectral_rate)};
          });
  run.run("semigroup_analysis", "uniform_gap", "spectral gap stays positive uniformly in xi", 0.0, [&] {
    std::vector<double> rg;
    for (int i = 0; i < 12; ++i) rg.push_back(0.01 * std::pow(500.0, i / 11.0));
    std::vector<RVector> sd = {e1, random_direction(d, gen), random_direction(d, gen)};
    GapScan gs = gap_uniformity_scan(L, basis, rg, sd, cfg.r0);
    return O{gs.b_emp, gs.b_emp > 0.0, "b_emp = " + fmt(gs.b_emp)};
  });

  // ---- weighted_spaces
  run.run("weighted_spaces", "k_star", "b(k_* - 1/2) = 1", 1e-12, [&] {
    const double err = std::abs(b_function(k_star() - 0.5) - 1.0);
    return O{err, err < 1e-12, ""};
  });
  run.run("weighted_spaces", "weighted_kernel", "E(k) discretization has d+2 eigenvalues near 0 at xi = 0", 1e-3,
          [&] {
            SpectralSlice sl = spectrum(s.ek().L.values);
            double worst = 0.0;
            for (int i = 0; i < d + 2; ++i) worst = std::max(worst, std::abs(sl.eigenvalues(i)));
            const bool gap = sl.eigenvalues(d + 2).real() < -1e-3;
            return O{worst, worst < 1e-3 && gap, ""};
          });
  run.run("weighted_spaces", "enlargement", "spectra near 0 agree between E and E(k) at |xi| = 0.1", 1e-2, [&] {
    const EkDiscretization& e = s.ek();
    FrequencyPoint xi = FrequencyPoint::polar(0.1, e1);
    SpectralSlice sg = spectrum(Lxi(0.1, e1), xi);
    OperatorMatrix Vp = combine_v(e.V, e.basis.spec(), InnerProductTag::Polynomial, e1);
    SpectralSlice sp = spectrum(assemble_L_xi(e.L, Vp, xi).values, xi);
    WeightComparison c = compare_spectra(sg.eigenvalues, sp.eigenvalues, a);
    return O{c.max_distance, c.counts_match() && c.count_gauss == d + 2 && c.max_distance < 1e-2,
             std::to_string(c.count_gauss) + " vs " + std::to_string(c.count_poly) + " eigenvalues"};
  });
  run.run("weighted_spaces", "splitting_algebra", "A + B = L and B is dissipative with margin a1_emp > 0", 0.0, [&] {
    const SplittingSurrogate& sur = s.surrogate();
    const double alg = max_abs(CMatrix(sur.A + sur.B - s.ek().L.values)) / max_abs(s.ek().L.values);
    const bool ok = alg <= 1e-14 && sur.a1_emp > 0.0 && sur.random_margin <= sur.margin + 1e-9;
    return O{sur.a1_emp, ok, "A + B - L: " + fmt(alg) + ", reference a1 " + fmt(sur.a1_reference)};
  });
  run.run("weighted_spaces", "regularization", "A is bounded from E(k) to E, stable under refinement", 0.1, [&] {
    RegularizationReport r = regularization_check(s.ek(), Cutoff{cfg.cutoff_R, cfg.cutoff_delta}, cfg.seed, 200);
    return O{r.relative_change, std::isfinite(r.C_A) && r.stable(), "C_A = " + fmt(r.C_A)};
  });
  run.run("weighted_spaces", "dissipativity_uniform", "margin of B - i v.xi is uniform in xi (10%)", 0.1, [&] {
    const EkDiscretization& e = s.ek();
    OperatorMatrix Vp = combine_v(e.V, e.basis.spec(), InnerProductTag::Polynomial, dirs[1]);
    DissipativityScan sc = dissipativity_scan_B_xi(s.surrogate().B, Vp.values, {0.0, 0.5, 1.0, 2.0});
    return O{sc.max_relative_spread, sc.max_relative_spread < 0.1, ""};
  });
  run.run("weighted_spaces", "weight_conversion", "<f, g>_E = <f, g <v>^{-2k} M^{-1}>_{E(k)}", 1e-9, [&] {
    BasisSpec ps = cfg.polynomial_spec();
    QuadratureGrid g = build_quadrature(ps, cfg.effective_quad_order());
    RMatrix acc = RMatrix::Zero(n, n);
    std::vector<double> b(n);
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double* v = g.point(q);
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) r2 += v[i] * v[i];
      const double m = maxwellian_r2(d, r2);
      if (m == 0.0) continue;
      basis.evaluate(v, b.data());
      const double bracket = std::pow(1.0 + r2, cfg.weight_k);
      const double w = g.weights[q] * bracket / (bracket * m);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc(i, j) += w * b[i] * b[j];
    }
    const double err = (acc - RMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    return O{err, err < 1e-9, ""};
  });

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

}  // namespace boltzspec
