#include "boltzspec/collision_operator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "boltzspec/harmonics.hpp"
#include "boltzspec/quadrature.hpp"

namespace boltzspec {

// ---------------------------------------------------------------------------
// Collision frequency

namespace {

// int_{S^{d-1}} |a e_1 - rho w| dw
double angular_distance_average(int dim, double a, double rho) {
  const double hi = std::max(a, rho), lo = std::min(a, rho);
  if (dim == 3) {
    if (hi == 0.0) return 0.0;
    return 2.0 * kPi * (2.0 * hi + 2.0 * lo * lo / (3.0 * hi));
  }
  if (hi == 0.0) return 0.0;
  const double k = 2.0 * std::sqrt(a * rho) / (a + rho);
  return 4.0 * (a + rho) * std::comp_ellint_2(std::min(k, 1.0));
}

}  // namespace

double compute_nu_speed(int dim, double a) {
  require_dim(dim);
  a = std::abs(a);
  const double rmax = 14.0;
  std::vector<double> breaks;
  for (int i = 0; i <= 14; ++i) breaks.push_back(i * rmax / 14.0);
  if (a > 0.0 && a < rmax) {
    // Grade toward rho = a where the angular average has a kink in d = 2.
    for (int j = 1; j <= 6; ++j) {
      const double h = a * std::ldexp(1.0, -j);
      breaks.push_back(a - h);
      if (a + h < rmax) breaks.push_back(a + h);
    }
    breaks.push_back(a);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  Rule1D r = composite_gauss_legendre(breaks, 24);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double rho = r.nodes[i];
    acc += r.weights[i] * std::pow(rho, dim - 1) * maxwellian_r2(dim, rho * rho) *
           angular_distance_average(dim, a, rho);
  }
  return sphere_measure(dim) * acc;
}

double compute_nu(int dim, const double* v) {
  require_dim(dim);
  double r2 = 0.0;
  for (int i = 0; i < dim; ++i) r2 += v[i] * v[i];
  return compute_nu_speed(dim, std::sqrt(r2));
}

NuBounds estimate_nu_bounds(int dim, const std::vector<double>& speeds) {
  if (speeds.empty()) throw ConfigError("estimate_nu_bounds: empty grid");
  NuBounds b;
  b.grid = speeds;
  b.nu0 = INFINITY;
  b.nu1 = 0.0;
  for (double s : speeds) {
    const double ratio = compute_nu_speed(dim, s) / std::sqrt(1.0 + s * s);
    b.nu0 = std::min(b.nu0, ratio);
    b.nu1 = std::max(b.nu1, ratio);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Assembly in centre-of-mass / relative coordinates

namespace {

struct SphericalBlocks {
  std::vector<RMatrix> L, nu;
};

// Zonal Gaussian family f_{nl}(x) = N_{nl} L_n^{(l+d/2-1)}(|x|^2/2) |x|^l Z_l, flattened
// by l then n.
struct ZonalFamily {
  int dim, N;
  std::vector<int> offset, count;
  std::vector<double> norm;
  int total = 0;

  ZonalFamily(int d, int n) : dim(d), N(n) {
    for (int l = 0; l <= N; ++l) {
      offset.push_back(total);
      count.push_back((N - l) / 2 + 1);
      for (int k = 0; k < count.back(); ++k) norm.push_back(gaussian_radial_norm(d, k, l));
      total += count.back();
    }
  }

  void eval(const double* x, double* out, double* zbuf, double* lbuf) const {
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
    solid_zonal_harmonics(dim, N, x, zbuf);
    for (int l = 0; l <= N; ++l) {
      laguerre(count[l] - 1, l + 0.5 * dim - 1.0, 0.5 * r2, lbuf);
      for (int k = 0; k < count[l]; ++k) out[offset[l] + k] = norm[offset[l] + k] * lbuf[k] * zbuf[l];
    }
  }
};

SphericalBlocks assemble_blocks(int dim, int N, int order, int sphere_order) {
  ZonalFamily fam(dim, N);
  const int nf = fam.total;

  // Centre-of-mass rule for exp(-|V|^2) dV.
  std::vector<std::array<double, 3>> vnodes;
  std::vector<double> vweights;
  {
    Rule1D gh = gauss_hermite_normal(order);
    std::vector<double> x(order), wx(order);
    for (int i = 0; i < order; ++i) {
      x[i] = gh.nodes[i] / std::sqrt(2.0);
      wx[i] = gh.weights[i] * std::sqrt(kPi);
    }
    if (dim == 2) {
      for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
          vnodes.push_back({x[i], x[j], 0.0});
          vweights.push_back(wx[i] * wx[j]);
        }
    } else {
      // Integrand is invariant under rotations about the axis: reduce to the
      // half-plane (V_1, V_perp) with measure 2 pi V_perp.
      Rule1D perp = gauss_for_weight([](double t) { return t * std::exp(-t * t); }, 0.0, 10.0, order);
      for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
          vnodes.push_back({x[i], perp.nodes[j], 0.0});
          vweights.push_back(2.0 * kPi * wx[i] * perp.weights[j]);
        }
    }
  }
  Rule1D rho = gauss_for_weight([dim](double t) { return std::pow(t, dim) * std::exp(-0.25 * t * t); }, 0.0,
                                26.0, order);
  SphereRule sph = sphere_rule(dim, sphere_order);
  const double smeas = sphere_measure(dim);

  SphericalBlocks out;
  std::vector<RMatrix> bl(N + 1), bn(N + 1), s2(N + 1), sn(N + 1);
  for (int l = 0; l <= N; ++l) {
    bl[l] = bn[l] = RMatrix::Zero(fam.count[l], fam.count[l]);
  }
  std::vector<double> fp(nf), fm(nf), F(nf), S1(nf), zbuf(N + 1), lbuf(N + 2);
  double xp[3], xm[3];
  for (std::size_t iv = 0; iv < vnodes.size(); ++iv) {
    const auto& V = vnodes[iv];
    for (std::size_t ir = 0; ir < rho.size(); ++ir) {
      const double r = rho.nodes[ir];
      std::fill(S1.begin(), S1.end(), 0.0);
      for (int l = 0; l <= N; ++l) {
        s2[l] = RMatrix::Zero(fam.count[l], fam.count[l]);
        sn[l] = RMatrix::Zero(fam.count[l], fam.count[l]);
      }
      for (std::size_t ie = 0; ie < sph.size(); ++ie) {
        const double* e = sph.point(ie);
        for (int c = 0; c < dim; ++c) {
          xp[c] = V[c] + 0.5 * r * e[c];
          xm[c] = V[c] - 0.5 * r * e[c];
        }
        fam.eval(xp, fp.data(), zbuf.data(), lbuf.data());
        fam.eval(xm, fm.data(), zbuf.data(), lbuf.data());
        const double we = sph.weights[ie];
        for (int i = 0; i < nf; ++i) {
          F[i] = fp[i] + fm[i];
          S1[i] += we * F[i];
        }
        for (int l = 0; l <= N; ++l) {
          const int o = fam.offset[l], c = fam.count[l];
          for (int i = 0; i < c; ++i)
            for (int j = 0; j <= i; ++j) {
              s2[l](i, j) += we * F[o + i] * F[o + j];
              sn[l](i, j) += 0.5 * we * (fp[o + i] * fp[o + j] + fm[o + i] * fm[o + j]);
            }
        }
      }
      const double w = vweights[iv] * rho.weights[ir];
      for (int l = 0; l <= N; ++l) {
        const int o = fam.offset[l], c = fam.count[l];
        for (int i = 0; i < c; ++i)
          for (int j = 0; j <= i; ++j) {
            bl[l](i, j) += w * (2.0 * smeas * s2[l](i, j) - 2.0 * S1[o + i] * S1[o + j]);
            bn[l](i, j) += w * sn[l](i, j);
          }
      }
    }
  }
  const double pref = std::pow(2.0 * kPi, -dim);
  for (int l = 0; l <= N; ++l) {
    RMatrix a = bl[l].selfadjointView<Eigen::Lower>();
    RMatrix b = bn[l].selfadjointView<Eigen::Lower>();
    out.L.push_back(-0.25 * pref * a);
    out.nu.push_back(smeas * pref * b);
  }
  return out;
}

// Expand per-l blocks onto the graded-lex Hermite basis.
CMatrix blocks_to_hermite(int dim, int N, const std::vector<RMatrix>& blocks) {
  std::vector<HarmonicLabel> labels;
  RMatrix c = hermite_to_spherical(dim, N, &labels);
  const int n = static_cast<int>(labels.size());
  RMatrix s = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (labels[i].l == labels[j].l && labels[i].m == labels[j].m)
        s(i, j) = blocks[labels[i].l](labels[i].n, labels[j].n);
  RMatrix h = c * s * c.transpose();
  h = 0.5 * (h + h.transpose()).eval();
  return h.cast<cplx>();
}

void check_gaussian(const OrthonormalBasis& basis) {
  if (!basis.gaussian())
    throw ConfigError("polynomial-weight basis: assemble with the weighted-space (E(k)) assembler instead");
}

}  // namespace

OperatorMatrix assemble_L(const OrthonormalBasis& basis, const QuadratureGrid& quad, const QuadratureGrid& sphere) {
  check_gaussian(basis);
  const int N = basis.degree();
  if (quad.exactness < 2 * N + 3)
    throw ConfigError("assemble_L: quadrature exactness " + std::to_string(quad.exactness) + " below 2N+3");
  if (sphere.exactness < 2 * N) throw ConfigError("assemble_L: sphere rule exactness below 2N");
  const auto t0 = std::chrono::steady_clock::now();
  SphericalBlocks b = assemble_blocks(basis.dim(), N, quad.order, sphere.order);
  OperatorMatrix m;
  m.values = blocks_to_hermite(basis.dim(), N, b.L);
  m.basis = basis.spec();
  m.tag = InnerProductTag::Gaussian;
  m.info.method = "dirichlet-form, centre-of-mass/relative Gauss rules";
  m.info.quad_order = quad.order;
  m.info.sphere_order = sphere.order;
  m.info.radial_order = quad.order;
  m.info.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return m;
}

OperatorMatrix assemble_L(const OrthonormalBasis& basis, int order) {
  return assemble_L(basis, build_quadrature(basis.spec(), order), sphere_quadrature(basis.dim(), order));
}

OperatorMatrix assemble_nu_multiplier(const OrthonormalBasis& basis, const QuadratureGrid& quad) {
  check_gaussian(basis);
  const int N = basis.degree();
  if (quad.exactness < 2 * N + 3)
    throw ConfigError("assemble_nu_multiplier: quadrature exactness below 2N+3");
  const auto t0 = std::chrono::steady_clock::now();
  SphericalBlocks b = assemble_blocks(basis.dim(), N, quad.order, quad.order);
  OperatorMatrix m;
  m.values = blocks_to_hermite(basis.dim(), N, b.nu);
  m.basis = basis.spec();
  m.tag = InnerProductTag::Gaussian;
  m.info.method = "collision-frequency multiplier, centre-of-mass/relative Gauss rules";
  m.info.quad_order = quad.order;
  m.info.sphere_order = quad.order;
  m.info.radial_order = quad.order;
  m.info.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return m;
}

OperatorMatrix assemble_nu_multiplier(const OrthonormalBasis& basis, int order) {
  return assemble_nu_multiplier(basis, build_quadrature(basis.spec(), order));
}

OperatorMatrix gain_part(const OperatorMatrix& L, const OperatorMatrix& nu) {
  if (L.size() != nu.size() || L.basis.dim != nu.basis.dim || L.basis.max_degree != nu.basis.max_degree)
    throw ConfigError("gain_part: operators live on different bases");
  OperatorMatrix k = L;
  k.values = L.values + nu.values;
  k.info.method = "gain part K = L + nu";
  return k;
}

// ---------------------------------------------------------------------------
// Kernel, gap, symmetry

KernelInfo kernel_basis(const OperatorMatrix& L) {
  const int d = L.basis.dim;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (L.values + L.values.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("kernel_basis: eigensolver failed");
  const int n = L.size();
  // Reorder by ascending magnitude for the kernel threshold.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(es.eigenvalues()(a)) < std::abs(es.eigenvalues()(b)); });
  if (n < d + 3) throw NumericalError("kernel_basis: basis too small");
  const double candidate = std::abs(es.eigenvalues()(order[d + 2]));
  KernelInfo k;
  k.threshold = candidate / 100.0;
  std::vector<int> ker;
  for (int i = 0; i < n; ++i)
    if (std::abs(es.eigenvalues()(i)) < k.threshold) ker.push_back(i);
  if (static_cast<int>(ker.size()) != d + 2)
    throw NumericalError("kernel_basis: numerical kernel has dimension " + std::to_string(ker.size()) +
                         ", expected d+2 = " + std::to_string(d + 2) + " (collision invariants)");
  k.vectors.resize(n, d + 2);
  for (int j = 0; j < d + 2; ++j) k.vectors.col(j) = es.eigenvectors().col(ker[j]);
  k.eigenvalues = es.eigenvalues().reverse();
  return k;
}

double spectral_gap(const OperatorMatrix& L) {
  KernelInfo k = kernel_basis(L);
  // Eigenvalues descending; the kernel occupies the first d+2 (all others negative).
  double best = -INFINITY;
  for (int i = 0; i < k.eigenvalues.size(); ++i)
    if (std::abs(k.eigenvalues(i)) >= k.threshold) best = std::max(best, k.eigenvalues(i));
  return -best;
}

double principal_angle(const CMatrix& a, const CMatrix& b) {
  Eigen::HouseholderQR<CMatrix> qa(a), qb(b);
  CMatrix Qa = qa.householderQ() * CMatrix::Identity(a.rows(), a.cols());
  CMatrix Qb = qb.householderQ() * CMatrix::Identity(b.rows(), b.cols());
  // sin of the largest angle = || (I - Qb Qb^H) Qa ||_2 (equal dimensions).
  CMatrix r = Qa - Qb * (Qb.adjoint() * Qa);
  const double s = spectral_norm(r);
  return std::asin(std::min(1.0, s));
}

double rotation_equivariance_check(const OperatorMatrix& L, const OrthonormalBasis& basis, const RMatrix& O) {
  if (L.size() != basis.size()) throw ConfigError("rotation check: basis/operator size mismatch");
  RMatrix pi = rotation_on_basis(basis, O);
  CMatrix p = pi.cast<cplx>();
  return max_abs(CMatrix(p * L.values * p.adjoint() - L.values));
}

}  // namespace boltzspec
