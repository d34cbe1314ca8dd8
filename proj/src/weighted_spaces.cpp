#include "boltzspec/weighted_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "boltzspec/harmonics.hpp"
#include "boltzspec/quadrature.hpp"

namespace boltzspec {

double b_function(double q) {
  if (!(q > 2.0)) throw ConfigError("b(q) is defined for q > 2");
  return 4.0 / std::sqrt((q + 1.0) * (q - 2.0));
}

double k_star() { return 0.5 + 0.5 * (1.0 + std::sqrt(73.0)); }

namespace {

double step_kernel(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// Smooth step: 0 for t <= -1, 1 for t >= 1.
double smooth_step(double t) {
  const double a = step_kernel(1.0 + t), b = step_kernel(1.0 - t);
  return a / (a + b);
}

const Rule1D& gl_rule(int n) {
  static std::vector<Rule1D> cache(64);
  if (n < 1 || n >= 64) throw ConfigError("Gauss-Legendre order out of range");
  if (cache[n].nodes.empty()) cache[n] = gauss_legendre(n, -1.0, 1.0);
  return cache[n];
}

// Calls f(x, w) for a composite rule on [a, b] with panels no wider than h.
template <class F>
void composite(double a, double b, double h, int pts, F&& f) {
  if (!(b > a)) return;
  const int np = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
  const Rule1D& g = gl_rule(pts);
  const double w = (b - a) / np;
  for (int p = 0; p < np; ++p) {
    const double lo = a + p * w, mid = lo + 0.5 * w;
    for (std::size_t i = 0; i < g.size(); ++i) f(mid + 0.5 * w * g.nodes[i], 0.5 * w * g.weights[i]);
  }
}

// Angular panels on [0, pi], graded toward pi/2 (Gaussian in s cos theta) and
// toward pi (Gaussian in s sin theta) on the scale 1/s.
std::vector<double> theta_breaks(double s) {
  std::vector<double> br;
  for (int i = 0; i <= 8; ++i) br.push_back(kPi * i / 8.0);
  const double h0 = std::min(kPi / 16.0, 0.5 / std::max(s, 1e-12));
  for (double h = h0; h < kPi / 8.0; h *= 2.0) {
    br.push_back(0.5 * kPi - h);
    br.push_back(0.5 * kPi + h);
    br.push_back(kPi - h);
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end(), [](double x, double y) { return std::abs(x - y) < 1e-15; }), br.end());
  return br;
}

template <class F>
void theta_nodes(double s, int pts, F&& f) {
  const std::vector<double> br = theta_breaks(s);
  const Rule1D& g = gl_rule(pts);
  for (std::size_t p = 0; p + 1 < br.size(); ++p) {
    const double a = br[p], b = br[p + 1];
    for (std::size_t i = 0; i < g.size(); ++i)
      f(0.5 * (a + b) + 0.5 * (b - a) * g.nodes[i], 0.5 * (b - a) * g.weights[i], a, b);
  }
}

// Adjoint collision integrals at v = s e_1 for m zonal functions evaluated by eval(w, out).
template <class Eval>
void adjoint_engine(int d, double s, int m, Eval&& eval, const EkQuadrature& q, double* gain, double* loss) {
  std::fill(gain, gain + m, 0.0);
  std::fill(loss, loss + m, 0.0);
  std::vector<double> vals(m);
  const double S = sphere_measure(d);
  const double cg = d == 3 ? 4.0 / std::sqrt(2.0 * kPi) : 1.0 / kPi;
  const double cl = S * std::pow(2.0 * kPi, -0.5 * d);
  const double W = q.rho_halfwidth;
  theta_nodes(s, q.theta_points, [&](double th, double wt, double, double b) {
    if (s * std::cos(b) > W + 2.0) return;
    const double mu = std::cos(th), st = std::sin(th);
    const double ang = d == 3 ? 2.0 * kPi * st * wt : 2.0 * wt;
    const double c = -s * mu;
    const double lo = std::max(0.0, c - W), hi = c + W;
    if (hi <= 0.0) return;
    const double side = std::exp(-0.5 * s * s * st * st);
    auto body = [&](double rho, double wr) {
      const double w[3] = {s + rho * mu, rho * st, 0.0};
      const double gauss = std::exp(-0.5 * (rho - c) * (rho - c));
      if (gauss == 0.0) return;
      eval(w, vals.data());
      double fg, fl;
      if (d == 3) {
        fg = cg * ang * wr * rho * gauss;
        fl = cl * ang * wr * rho * rho * rho * gauss * side;
      } else {
        fg = cg * ang * wr * gauss * carleman_line_integral(rho, s * st);
        fl = cl * ang * wr * rho * rho * gauss * side;
      }
      for (int i = 0; i < m; ++i) {
        gain[i] += fg * vals[i];
        loss[i] += fl * vals[i];
      }
    };
    double a = lo;
    if (d == 2 && lo == 0.0) {
      // rho^2 log(rho) behaviour of the Carleman line integral at the origin
      for (double x = std::ldexp(1.0, -14); x < 1.0 && x < hi; x *= 2.0) {
        composite(a, x, 1.0, q.rho_points, body);
        a = x;
      }
    }
    composite(a, hi, 2.5, q.rho_points, body);
  });
}

// Forward collision integrals at v = s e_1 for functions supported in |w| <= support.
template <class Eval>
void forward_engine(int d, double s, double support, int m, Eval&& eval, const EkQuadrature& q, double* gain,
                    double* loss) {
  std::fill(gain, gain + m, 0.0);
  std::fill(loss, loss + m, 0.0);
  std::vector<double> vals(m);
  const double S = sphere_measure(d);
  const double cg = d == 3 ? 4.0 / std::sqrt(2.0 * kPi) : 1.0 / kPi;
  const double cl = maxwellian_r2(d, s * s) * S;
  const bool bounded = std::isfinite(support);
  Rule1D mapped;
  if (!bounded) mapped = mapped_radial_rule(std::max(64, q.radial_nodes / 2), 2.0 + s);
  theta_nodes(s, q.theta_points, [&](double th, double wt, double, double) {
    const double mu = std::cos(th), st = std::sin(th);
    const double ang = d == 3 ? 2.0 * kPi * st * wt : 2.0 * wt;
    const double gperp = std::exp(-0.5 * s * s * mu * mu);
    auto body = [&](double rho, double wr) {
      const double w[3] = {s + rho * mu, rho * st, 0.0};
      eval(w, vals.data());
      double fg, fl;
      if (d == 3) {
        fg = cg * ang * wr * rho * gperp;
        fl = cl * ang * wr * rho * rho * rho;
      } else {
        fg = cg * ang * wr * gperp * carleman_line_integral(rho, s * st);
        fl = cl * ang * wr * rho * rho;
      }
      for (int i = 0; i < m; ++i) {
        gain[i] += fg * vals[i];
        loss[i] += fl * vals[i];
      }
    };
    if (bounded) {
      const double disc = support * support - s * s * st * st;
      if (disc <= 0.0) return;
      const double lo = std::max(0.0, -s * mu - std::sqrt(disc)), hi = -s * mu + std::sqrt(disc);
      composite(lo, hi, 0.5, q.rho_points, body);
    } else {
      for (std::size_t i = 0; i < mapped.size(); ++i) body(mapped.nodes[i], mapped.weights[i]);
    }
  });
}

// All zonal functions rho_{nl}(|w|) |w|^l Z_l(w_1/|w|) * mult(|w|), flattened by (l, n).
struct ZonalFamily {
  const OrthonormalBasis& basis;
  std::vector<int> offset;
  int total = 0;
  mutable std::vector<double> sz, rad;

  explicit ZonalFamily(const OrthonormalBasis& b) : basis(b) {
    for (int l = 0; l <= b.degree(); ++l) {
      offset.push_back(total);
      total += b.radial_count(l);
    }
    sz.resize(b.degree() + 1);
    rad.resize(b.degree() / 2 + 2);
  }

  template <class Mult>
  void eval(const double* w, double* out, Mult&& mult) const {
    const int d = basis.dim();
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) r2 += w[i] * w[i];
    const double r = std::sqrt(r2), f = mult(r);
    if (f == 0.0) {
      std::fill(out, out + total, 0.0);
      return;
    }
    solid_zonal_harmonics(d, basis.degree(), w, sz.data());
    for (int l = 0; l <= basis.degree(); ++l) {
      basis.reduced_radial(l, r, rad.data());
      for (int n = 0; n < basis.radial_count(l); ++n) out[offset[l] + n] = rad[n] * sz[l] * f;
    }
  }
};

std::vector<double> zonal_at_pole(int d, int lmax) {
  std::vector<double> z(lmax + 1);
  zonal_harmonics(d, lmax, 1.0, z.data());
  return z;
}

// Radial blocks per l accumulated as sum_s w(s) test_i(s) trial_j(s).
using Blocks = std::vector<RMatrix>;

Blocks zero_blocks(const OrthonormalBasis& b) {
  Blocks out;
  for (int l = 0; l <= b.degree(); ++l) out.push_back(RMatrix::Zero(b.radial_count(l), b.radial_count(l)));
  return out;
}

RMatrix scatter(const OrthonormalBasis& b, const Blocks& blocks) {
  RMatrix M = RMatrix::Zero(b.size(), b.size());
  for (int l = 0; l <= b.degree(); ++l)
    for (int m : harmonic_orders(b.dim(), l)) {
      std::vector<int> idx = b.block(l, m);
      for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) M(idx[i], idx[j]) = blocks[l](i, j);
    }
  return M;
}

// Gain-part blocks <cK(c b_j), b_i>_{E(k)} via the adjoint integrals; no cutoff when cut is null.
Blocks gain_blocks(const OrthonormalBasis& basis, const EkQuadrature& q, const Cutoff* cut) {
  const int d = basis.dim();
  const double k = basis.weight_k();
  ZonalFamily fam(basis);
  const std::vector<double> z1 = zonal_at_pole(d, basis.degree());
  Blocks blocks = zero_blocks(basis);
  std::vector<double> gain(fam.total), loss(fam.total), rad(basis.degree() / 2 + 2);
  auto mult = [&](double r) { return std::pow(1.0 + r * r, k) * (cut ? (*cut)(r) : 1.0); };
  auto outer = [&](double s, double ws) {
    const double cs = cut ? (*cut)(s) : 1.0;
    if (cs == 0.0) return;
    adjoint_engine(d, s, fam.total, [&](const double* w, double* out) { fam.eval(w, out, mult); }, q, gain.data(),
                   loss.data());
    for (int l = 0; l <= basis.degree(); ++l) {
      basis.reduced_radial(l, s, rad.data());
      const double fac = ws * std::pow(s, d - 1 + l) * cs / z1[l];
      const int nr = basis.radial_count(l);
      for (int i = 0; i < nr; ++i) {
        const double gi = 2.0 * gain[fam.offset[l] + i] - loss[fam.offset[l] + i];
        for (int j = 0; j < nr; ++j) blocks[l](i, j) += fac * gi * rad[j];
      }
    }
  };
  if (cut) {
    composite(0.0, cut->support(), 0.25, q.rho_points, outer);
  } else {
    Rule1D r = mapped_radial_rule(q.radial_nodes);
    for (std::size_t i = 0; i < r.size(); ++i) outer(r.nodes[i], r.weights[i]);
  }
  return blocks;
}

// Radial multiplication blocks int f(s) rho_i rho_j s^{2l} <s>^{2k} s^{d-1} ds.
template <class F>
Blocks multiplier_blocks(const OrthonormalBasis& basis, const EkQuadrature& q, F&& f) {
  const int d = basis.dim();
  const double k = basis.weight_k();
  Blocks blocks = zero_blocks(basis);
  std::vector<double> rad(basis.degree() / 2 + 2);
  Rule1D r = mapped_radial_rule(q.radial_nodes);
  for (std::size_t t = 0; t < r.size(); ++t) {
    const double s = r.nodes[t];
    const double base = r.weights[t] * f(s) * std::pow(1.0 + s * s, k) * std::pow(s, d - 1);
    for (int l = 0; l <= basis.degree(); ++l) {
      basis.reduced_radial(l, s, rad.data());
      const double fac = base * std::pow(s, 2 * l);
      const int nr = basis.radial_count(l);
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nr; ++j) blocks[l](i, j) += fac * rad[i] * rad[j];
    }
  }
  return blocks;
}

// Forward A b_j on the radial grid: per l, rows = grid points, columns = n.
struct ForwardA {
  Rule1D grid;
  std::vector<RMatrix> values;  // c(s) K(c b)(s e_1) / Z_l(1)
};

ForwardA forward_A(const OrthonormalBasis& basis, const EkQuadrature& q, const Cutoff& cut) {
  const int d = basis.dim();
  ZonalFamily fam(basis);
  const std::vector<double> z1 = zonal_at_pole(d, basis.degree());
  ForwardA out;
  composite(0.0, cut.support(), 0.25, q.rho_points, [&](double s, double w) {
    out.grid.nodes.push_back(s);
    out.grid.weights.push_back(w);
  });
  const int ns = static_cast<int>(out.grid.size());
  for (int l = 0; l <= basis.degree(); ++l) out.values.push_back(RMatrix::Zero(ns, basis.radial_count(l)));
  std::vector<double> gain(fam.total), loss(fam.total);
  auto mult = [&](double r) { return cut(r); };
  for (int t = 0; t < ns; ++t) {
    const double s = out.grid.nodes[t], cs = cut(s);
    if (cs == 0.0) continue;
    forward_engine(d, s, cut.support(), fam.total, [&](const double* w, double* o) { fam.eval(w, o, mult); }, q,
                   gain.data(), loss.data());
    for (int l = 0; l <= basis.degree(); ++l)
      for (int n = 0; n < basis.radial_count(l); ++n)
        out.values[l](t, n) = cs * (2.0 * gain[fam.offset[l] + n] - loss[fam.offset[l] + n]) / z1[l];
  }
  return out;
}

// Per-l E-norm Gram of the forward values on [0, support].
std::vector<RMatrix> e_norm_grams(int d, const ForwardA& fa) {
  std::vector<RMatrix> out;
  for (const RMatrix& v : fa.values) {
    RMatrix G = RMatrix::Zero(v.cols(), v.cols());
    for (std::size_t t = 0; t < fa.grid.size(); ++t) {
      const double s = fa.grid.nodes[t];
      const double w = fa.grid.weights[t] * std::pow(s, d - 1) / maxwellian_r2(d, s * s);
      G += w * v.row(t).transpose() * v.row(t);
    }
    out.push_back(G);
  }
  return out;
}

double max_eigenvalue(const std::vector<RMatrix>& grams) {
  double m = 0.0;
  for (const RMatrix& g : grams) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
    m = std::max(m, es.eigenvalues().maxCoeff());
  }
  return m;
}

double quadratic_norm(const OrthonormalBasis& b, const std::vector<RMatrix>& grams, const CVector& g) {
  double acc = 0.0;
  for (int l = 0; l <= b.degree(); ++l)
    for (int m : harmonic_orders(b.dim(), l)) {
      std::vector<int> idx = b.block(l, m);
      CVector c(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) c(i) = g(idx[i]);
      acc += c.dot(grams[l].cast<cplx>() * c).real();
    }
  return acc;
}

CVector random_vector(int n, std::mt19937& gen) {
  std::normal_distribution<double> nd;
  CVector g(n);
  for (int i = 0; i < n; ++i) g(i) = cplx(nd(gen), nd(gen));
  return g;
}

void require_polynomial(const OrthonormalBasis& b) {
  if (b.gaussian()) throw ConfigError("the E(k) discretization needs a polynomial weight");
}

}  // namespace

double smooth_cutoff(double x, double R, double delta) {
  if (!(delta > 0.0)) throw ConfigError("cutoff width must be positive");
  if (R < 0.0) throw ConfigError("cutoff radius must be non-negative");
  return smooth_step((R - x) / delta) - smooth_step((-R - x) / delta);
}

double carleman_line_integral(double rho, double c) {
  // Panels graded toward t = 0 where sqrt(rho^2 + t^2) bends on the scale rho.
  const double W = 9.0;
  const double a = -c - W, b = -c + W;
  std::vector<double> br{a, b};
  for (double x = a + 1.5; x < b; x += 1.5) br.push_back(x);
  if (a < 0.0 && b > 0.0) {
    br.push_back(0.0);
    for (double h = std::max(rho, 1e-12); h < std::max(-a, b); h *= 2.0) {
      if (-h > a) br.push_back(-h);
      if (h < b) br.push_back(h);
    }
  }
  std::sort(br.begin(), br.end());
  double sum = 0.0;
  const Rule1D& g = gl_rule(10);
  for (std::size_t p = 0; p + 1 < br.size(); ++p) {
    const double lo = br[p], hi = br[p + 1];
    if (hi - lo < 1e-300) continue;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * g.nodes[i];
      sum += 0.5 * (hi - lo) * g.weights[i] * std::sqrt(rho * rho + t * t) * std::exp(-0.5 * (t + c) * (t + c));
    }
  }
  return sum;
}

AxisIntegrals adjoint_axis_integrals(int dim, double s, double (*chi)(const double*, void*), void* ctx,
                                     const EkQuadrature& q) {
  require_dim(dim);
  AxisIntegrals out;
  adjoint_engine(dim, s, 1, [&](const double* w, double* o) { o[0] = chi(w, ctx); }, q, &out.gain, &out.loss);
  return out;
}

AxisIntegrals forward_axis_integrals(int dim, double s, double support, double (*h)(const double*, void*), void* ctx,
                                     const EkQuadrature& q) {
  require_dim(dim);
  AxisIntegrals out;
  forward_engine(dim, s, support, 1, [&](const double* w, double* o) { o[0] = h(w, ctx); }, q, &out.gain,
                 &out.loss);
  return out;
}

EkDiscretization assemble_in_Ek(const BasisSpec& spec, const EkQuadrature& q) {
  spec.validate();
  if (spec.weight.kind != WeightKind::Polynomial)
    throw ConfigError("assemble_in_Ek needs a polynomial weight; Gaussian bases use collision_operator.assemble_L");
  if (!(spec.weight.k > k_star()))
    throw ConfigError("weight exponent k = " + std::to_string(spec.weight.k) + " must exceed k_* = " +
                      std::to_string(k_star()));
  EkDiscretization ek;
  ek.basis = build_basis(spec);
  ek.quadrature = q;
  const OrthonormalBasis& b = ek.basis;
  const int d = b.dim();

  Blocks gram = multiplier_blocks(b, q, [](double) { return 1.0; });
  for (const RMatrix& g : gram)
    ek.gram_error = std::max(ek.gram_error, (g - RMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff());
  if (ek.gram_error > 1e-8)
    throw NumericalError("E(k) Gram identity violated by " + std::to_string(ek.gram_error) +
                         "; increase radial_nodes");

  RMatrix nu = scatter(b, multiplier_blocks(b, q, [d](double s) { return compute_nu_speed(d, s); }));
  RMatrix K = scatter(b, gain_blocks(b, q, nullptr));

  auto wrap = [&](const RMatrix& m, const std::string& method) {
    OperatorMatrix o;
    o.values = m.cast<cplx>();
    o.basis = spec;
    o.tag = InnerProductTag::Polynomial;
    o.info.method = method;
    o.info.radial_order = q.radial_nodes;
    o.info.sphere_order = q.theta_points;
    return o;
  };
  ek.nu = wrap(nu, "multiplication by nu in the weighted pairing");
  ek.K = wrap(K, "adjoint Carleman gain minus K1 in the weighted pairing");
  ek.L = wrap(K - nu, "K - nu in the weighted pairing");
  ek.V = velocity_multipliers(b);
  return ek;
}

RMatrix project_invariants(const EkDiscretization& ek) {
  const OrthonormalBasis& b = ek.basis;
  const int d = b.dim(), n = b.size();
  QuadratureGrid g = build_quadrature(b.spec(), b.degree() + 4);
  RMatrix c = RMatrix::Zero(n, d + 2);
  std::vector<double> vals(n);
  const double k = b.weight_k();
  for (std::size_t t = 0; t < g.size(); ++t) {
    const double* v = g.point(t);
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) r2 += v[i] * v[i];
    const double m = maxwellian_r2(d, r2);
    if (m == 0.0) continue;
    b.evaluate(v, vals.data());
    const double w = g.weights[t] * std::pow(1.0 + r2, k) * m;
    double phi[5];
    phi[0] = 1.0;
    for (int i = 0; i < d; ++i) phi[1 + i] = v[i];
    phi[d + 1] = r2 - d;
    for (int j = 0; j < d + 2; ++j)
      for (int i = 0; i < n; ++i) c(i, j) += w * phi[j] * vals[i];
  }
  return c;
}

double invariant_residual(const EkDiscretization& ek) {
  RMatrix c = project_invariants(ek);
  double worst = 0.0;
  for (int j = 0; j < c.cols(); ++j) {
    CVector x = c.col(j).cast<cplx>();
    worst = std::max(worst, (ek.L.values * x).norm() / x.norm());
  }
  return worst;
}

WeightComparison compare_spectra(const CVector& gauss, const CVector& poly, double a) {
  WeightComparison out;
  std::vector<cplx> g, p;
  for (int i = 0; i < gauss.size(); ++i)
    if (gauss(i).real() > -a) g.push_back(gauss(i));
  for (int i = 0; i < poly.size(); ++i)
    if (poly(i).real() > -a) p.push_back(poly(i));
  out.count_gauss = static_cast<int>(g.size());
  out.count_poly = static_cast<int>(p.size());
  const bool swap = g.size() > p.size();
  std::vector<cplx>& small = swap ? p : g;
  std::vector<cplx>& large = swap ? g : p;
  std::vector<int> perm(large.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best;
  if (large.size() <= 9) {
    double best_cost = INFINITY;
    std::sort(perm.begin(), perm.end());
    do {
      double cost = 0.0;
      for (std::size_t i = 0; i < small.size(); ++i) cost += std::abs(small[i] - large[perm[i]]);
      if (cost < best_cost - 1e-15) best_cost = cost, best = perm;
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<bool> used(large.size(), false);
    for (std::size_t i = 0; i < small.size(); ++i) {
      int arg = -1;
      for (std::size_t j = 0; j < large.size(); ++j)
        if (!used[j] && (arg < 0 || std::abs(small[i] - large[j]) < std::abs(small[i] - large[arg])))
          arg = static_cast<int>(j);
      used[arg] = true;
      best.push_back(arg);
    }
  }
  for (std::size_t i = 0; i < small.size(); ++i) {
    MatchedPair mp;
    mp.gauss = swap ? large[best[i]] : small[i];
    mp.poly = swap ? small[i] : large[best[i]];
    mp.distance = std::abs(mp.gauss - mp.poly);
    out.max_distance = std::max(out.max_distance, mp.distance);
    out.pairs.push_back(mp);
  }
  std::sort(out.pairs.begin(), out.pairs.end(), [](const MatchedPair& x, const MatchedPair& y) {
    if (x.gauss.real() != y.gauss.real()) return x.gauss.real() > y.gauss.real();
    return x.gauss.imag() > y.gauss.imag();
  });
  return out;
}

SplittingSurrogate surrogate_splitting(const EkDiscretization& ek, const Cutoff& cutoff, unsigned seed, int samples) {
  require_polynomial(ek.basis);
  if (!(cutoff.delta > 0.0) || cutoff.R < 0.0) throw ConfigError("cutoff needs R >= 0 and delta > 0");
  SplittingSurrogate out;
  out.cutoff = cutoff;
  out.A = scatter(ek.basis, gain_blocks(ek.basis, ek.quadrature, &cutoff)).cast<cplx>();
  out.B = ek.L.values - out.A;
  out.margin = numerical_abscissa(out.B);
  std::mt19937 gen(seed);
  out.random_margin = -INFINITY;
  for (int i = 0; i < samples; ++i) {
    CVector g = random_vector(ek.basis.size(), gen);
    out.random_margin = std::max(out.random_margin, g.dot(out.B * g).real() / g.squaredNorm());
  }
  out.a1_emp = -out.margin;
  std::vector<double> speeds;
  for (int i = 0; i <= 400; ++i) speeds.push_back(0.25 * i);
  const NuBounds nb = estimate_nu_bounds(ek.basis.dim(), speeds);
  out.a1_reference = nb.nu0 * (1.0 - b_function(ek.basis.weight_k() - 0.5));
  return out;
}

RegularizationReport regularization_check(const EkDiscretization& ek, const Cutoff& cutoff, unsigned seed,
                                          int samples) {
  require_polynomial(ek.basis);
  RegularizationReport rep;
  const int d = ek.basis.dim();
  auto grams = e_norm_grams(d, forward_A(ek.basis, ek.quadrature, cutoff));
  auto fine = e_norm_grams(d, forward_A(ek.basis, ek.quadrature.refined(), cutoff));
  rep.C_A = std::sqrt(std::max(0.0, max_eigenvalue(grams)));
  rep.C_A_refined = std::sqrt(std::max(0.0, max_eigenvalue(fine)));
  rep.relative_change = rep.C_A_refined > 0.0 ? std::abs(rep.C_A - rep.C_A_refined) / rep.C_A_refined : 0.0;
  std::mt19937 gen(seed);
  for (int i = 0; i < samples; ++i) {
    CVector g = random_vector(ek.basis.size(), gen);
    rep.random_max = std::max(rep.random_max, std::sqrt(std::max(0.0, quadratic_norm(ek.basis, grams, g))) / g.norm());
  }
  return rep;
}

double truncated_B_ratio(const EkDiscretization& ek, const SplittingSurrogate& sur, double radius) {
  const OrthonormalBasis& b = ek.basis;
  const int d = b.dim();
  ZonalFamily fam(b);
  const std::vector<double> z1 = zonal_at_pole(d, b.degree());
  std::vector<RMatrix> grams;
  for (int l = 0; l <= b.degree(); ++l) grams.push_back(RMatrix::Zero(b.radial_count(l), b.radial_count(l)));
  std::vector<double> gain(fam.total), loss(fam.total), rad(b.degree() / 2 + 2);
  const double inf = std::numeric_limits<double>::infinity();
  composite(0.0, radius, 0.25, ek.quadrature.rho_points, [&](double s, double ws) {
    forward_engine(d, s, inf, fam.total, [&](const double* w, double* o) { fam.eval(w, o, [](double) { return 1.0; }); },
                   ek.quadrature, gain.data(), loss.data());
    std::vector<double> ag(fam.total), al(fam.total);
    forward_engine(d, s, sur.cutoff.support(), fam.total,
                   [&](const double* w, double* o) { fam.eval(w, o, [&](double r) { return sur.cutoff(r); }); },
                   ek.quadrature, ag.data(), al.data());
    const double nu = compute_nu_speed(d, s), cs = sur.cutoff(s);
    const double wt = ws * std::pow(s, d - 1) / maxwellian_r2(d, s * s);
    for (int l = 0; l <= b.degree(); ++l) {
      b.reduced_radial(l, s, rad.data());
      const int nr = b.radial_count(l);
      RVector val(nr);
      for (int n = 0; n < nr; ++n) {
        const int i = fam.offset[l] + n;
        const double Lb = (2.0 * gain[i] - loss[i]) / z1[l] - nu * rad[n] * std::pow(s, l);
        const double Ab = cs * (2.0 * ag[i] - al[i]) / z1[l];
        val(n) = Lb - Ab;
      }
      grams[l] += wt * val * val.transpose();
    }
  });
  return std::sqrt(std::max(0.0, max_eigenvalue(grams)));
}

DissipativityScan dissipativity_scan_B_xi(const CMatrix& B, const CMatrix& V, const std::vector<double>& r_list) {
  if (B.rows() != V.rows()) throw ConfigError("dissipativity scan: B and V sizes differ");
  DissipativityScan out;
  const double m0 = numerical_abscissa(B);
  for (double r : r_list) {
    out.r.push_back(r);
    out.margin.push_back(numerical_abscissa(CMatrix(B - cplx(0.0, r) * V)));
    out.max_relative_spread = std::max(out.max_relative_spread, std::abs(out.margin.back() - m0) / std::abs(m0));
  }
  return out;
}

}  // namespace boltzspec
