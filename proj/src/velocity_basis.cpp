#include "boltzspec/velocity_basis.hpp"

#include <algorithm>
#include <cmath>

#include "boltzspec/harmonics.hpp"
#include "boltzspec/weighted_spaces.hpp"

namespace boltzspec {

namespace {

int binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

int harmonic_offset(int dim, int l) {
  if (dim == 3) return l * l;
  return l == 0 ? 0 : 2 * l - 1;
}

int harmonic_position(int dim, int l, int m) {
  if (dim == 3) return m + l;
  return (l == 0 || m == l) ? 0 : 1;
}

}  // namespace

void BasisSpec::validate() const {
  require_dim(dim);
  if (max_degree < 2)
    throw ConfigError("max_degree must be >= 2 so the collision invariants are representable, got " +
                      std::to_string(max_degree));
  if (weight.kind == WeightKind::Polynomial) {
    if (!(weight.k > k_star()))
      throw ConfigError("polynomial weight requires k > k_* = " + std::to_string(k_star()) + ", got " +
                        std::to_string(weight.k));
    const int pmin = minimal_profile_exponent(dim, max_degree, weight.k);
    if (weight.p != 0 && weight.p < pmin)
      throw ConfigError("profile exponent p = " + std::to_string(weight.p) +
                        " leaves trial functions outside E(k); need p >= " + std::to_string(pmin));
  }
}

int BasisSpec::size() const { return binomial(max_degree + dim, dim); }

std::vector<MultiIndex> graded_lex_indices(int dim, int N) {
  std::vector<MultiIndex> out;
  for (int deg = 0; deg <= N; ++deg) {
    if (dim == 2) {
      for (int a = deg; a >= 0; --a) out.push_back({a, deg - a, 0});
    } else {
      for (int a = deg; a >= 0; --a)
        for (int b = deg - a; b >= 0; --b) out.push_back({a, b, deg - a - b});
    }
  }
  return out;
}

int minimal_profile_exponent(int dim, int N, double k) {
  // 4p > 2N + 2k + d + 2
  const double bound = (2.0 * N + 2.0 * k + dim + 2.0) / 4.0;
  int p = static_cast<int>(std::floor(bound)) + 1;
  return std::max(p, 2);
}

void hermite_normalized(int n, double x, double* out) {
  out[0] = 1.0;
  if (n >= 1) out[1] = x;
  for (int j = 1; j < n; ++j) out[j + 1] = (x * out[j] - std::sqrt(double(j)) * out[j - 1]) / std::sqrt(j + 1.0);
}

double gaussian_radial_norm(int dim, int n, int l) {
  const double alpha = l + 0.5 * dim - 1.0;
  const double lg = std::lgamma(n + 1.0) + 0.5 * dim * std::log(2.0 * kPi) - alpha * std::log(2.0) -
                    std::lgamma(n + alpha + 1.0);
  return std::exp(0.5 * lg);
}

Rule1D mapped_radial_rule(int nodes, double scale) {
  // Panels refined toward t = 1 where the map stretches.
  const int per = 16;
  const int panels = std::max(2, nodes / per);
  std::vector<double> breaks{0.0};
  for (int i = 1; i < panels; ++i) {
    const double u = double(i) / panels;
    breaks.push_back(1.0 - (1.0 - u) * (1.0 - u));
  }
  breaks.push_back(1.0);
  Rule1D t = composite_gauss_legendre(breaks, per);
  Rule1D r;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = t.nodes[i], den = 1.0 - x * x;
    r.nodes.push_back(scale * x / den);
    r.weights.push_back(t.weights[i] * scale * (1.0 + x * x) / (den * den));
  }
  return r;
}

QuadratureGrid build_quadrature(const BasisSpec& spec, int order) {
  spec.validate();
  if (order < 1) throw ConfigError("quadrature order must be positive");
  QuadratureGrid g;
  g.dim = spec.dim;
  g.order = order;
  if (spec.weight.kind == WeightKind::Gaussian) {
    if (order < spec.max_degree + 3)
      throw ConfigError("quadrature order " + std::to_string(order) + " below max_degree + 3 = " +
                        std::to_string(spec.max_degree + 3));
    Rule1D gh = gauss_hermite_normal(order);
    g.density = ReferenceDensity::Maxwellian;
    g.exactness = 2 * order - 1;
    const int n = order;
    if (spec.dim == 2) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          g.nodes.insert(g.nodes.end(), {gh.nodes[i], gh.nodes[j]});
          g.weights.push_back(gh.weights[i] * gh.weights[j]);
        }
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            g.nodes.insert(g.nodes.end(), {gh.nodes[i], gh.nodes[j], gh.nodes[k]});
            g.weights.push_back(gh.weights[i] * gh.weights[j] * gh.weights[k]);
          }
    }
    return g;
  }
  Rule1D rad = mapped_radial_rule(16 * order);
  SphereRule sph = sphere_rule(spec.dim, order);
  g.density = ReferenceDensity::Lebesgue;
  g.exactness = sph.exactness;
  for (std::size_t i = 0; i < rad.size(); ++i) {
    const double s = rad.nodes[i];
    const double ws = rad.weights[i] * std::pow(s, spec.dim - 1);
    for (std::size_t j = 0; j < sph.size(); ++j) {
      for (int c = 0; c < spec.dim; ++c) g.nodes.push_back(s * sph.point(j)[c]);
      g.weights.push_back(ws * sph.weights[j]);
    }
  }
  return g;
}

QuadratureGrid sphere_quadrature(int dim, int order) {
  SphereRule s = sphere_rule(dim, order);
  QuadratureGrid g;
  g.dim = dim;
  g.order = order;
  g.exactness = s.exactness;
  g.density = ReferenceDensity::Lebesgue;
  g.nodes = s.points;
  g.weights = s.weights;
  return g;
}

int OrthonormalBasis::index_of(const MultiIndex& a) const {
  for (int i = 0; i < static_cast<int>(indices_.size()); ++i)
    if (indices_[i] == a) return i;
  return -1;
}

std::vector<int> OrthonormalBasis::block(int l, int m) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(labels_.size()); ++i)
    if (labels_[i].l == l && labels_[i].m == m) out.push_back(i);
  return out;
}

double OrthonormalBasis::profile(double s) const {
  if (gaussian()) return maxwellian_r2(dim(), s * s);
  return std::pow(1.0 + s * s, -p_);
}

void OrthonormalBasis::reduced_radial(int l, double s, double* out) const {
  const int nl = radial_count(l);
  double raw[64];
  raw_radial(l, s, raw);
  const RMatrix& c = radial_coeffs_[l];
  for (int n = 0; n < nl; ++n) {
    double acc = 0.0;
    for (int j = 0; j < nl; ++j) acc += c(j, n) * raw[j];
    out[n] = acc;
  }
}

// span{s^{2j} (1+s^2)^{-p}, j < nl} = (1-t)^{p-nl+1} x polynomials of degree < nl in
// t = s^2/(1+s^2); shifted Legendre polynomials in t keep the Gram well conditioned.
void OrthonormalBasis::raw_radial(int l, double s, double* out) const {
  const int nl = radial_count(l);
  const double t = s * s / (1.0 + s * s), x = 2.0 * t - 1.0;
  const double env = std::pow(1.0 + s * s, -(p_ - nl + 1));
  out[0] = env;
  if (nl > 1) out[1] = x * env;
  for (int j = 1; j + 1 < nl; ++j) out[j + 1] = ((2 * j + 1) * x * out[j] - j * out[j - 1]) / (j + 1);
}

void OrthonormalBasis::evaluate_polynomial(const double* v, double* out) const {
  const int d = dim(), N = degree();
  if (gaussian()) {
    double h[3][64];
    for (int c = 0; c < d; ++c) hermite_normalized(N, v[c], h[c]);
    for (int i = 0; i < size_; ++i) {
      double p = 1.0;
      for (int c = 0; c < d; ++c) p *= h[c][indices_[i][c]];
      out[i] = p;
    }
    return;
  }
  const double w = profile(std::sqrt(v[0] * v[0] + v[1] * v[1] + (d == 3 ? v[2] * v[2] : 0.0)));
  evaluate(v, out);
  for (int i = 0; i < size_; ++i) out[i] /= w;
}

void OrthonormalBasis::evaluate(const double* v, double* out) const {
  const int d = dim(), N = degree();
  double r2 = 0.0;
  for (int c = 0; c < d; ++c) r2 += v[c] * v[c];
  if (gaussian()) {
    evaluate_polynomial(v, out);
    const double m = maxwellian_r2(d, r2);
    for (int i = 0; i < size_; ++i) out[i] *= m;
    return;
  }
  std::vector<double> sh((N + 1) * (N + 1));
  solid_harmonics(d, N, v, sh.data());
  const double s = std::sqrt(r2);
  std::vector<std::vector<double>> rad(N + 1);
  for (int l = 0; l <= N; ++l) {
    rad[l].resize(radial_count(l));
    reduced_radial(l, s, rad[l].data());
  }
  for (int i = 0; i < size_; ++i) {
    const HarmonicLabel& lab = labels_[i];
    out[i] = rad[lab.l][lab.n] * sh[harmonic_offset(d, lab.l) + harmonic_position(d, lab.l, lab.m)];
  }
}

RMatrix OrthonormalBasis::collision_invariants() const {
  if (!gaussian()) throw ConfigError("collision_invariants: only defined for the Gaussian basis");
  const int d = dim();
  RMatrix c = RMatrix::Zero(size_, d + 2);
  c(index_of({0, 0, 0}), 0) = 1.0;
  for (int j = 0; j < d; ++j) {
    MultiIndex e{0, 0, 0};
    e[j] = 1;
    c(index_of(e), 1 + j) = 1.0;
    e[j] = 2;
    c(index_of(e), d + 1) = std::sqrt(2.0);
  }
  return c;
}

namespace {

// One Gram pass with pivoted LDL^T: returns T with T^T G T = I.
RMatrix pivoted_orthonormalizer(const RMatrix& g) {
  Eigen::LDLT<RMatrix> ldlt(g);
  if (ldlt.info() != Eigen::Success) throw NumericalError("Gram factorization failed");
  const RVector dvec = ldlt.vectorD();
  const double dmax = dvec.cwiseAbs().maxCoeff();
  for (int i = 0; i < dvec.size(); ++i)
    if (!(dvec(i) > 1e-14 * dmax)) throw NumericalError("Gram matrix is numerically singular");
  RMatrix dinv = dvec.cwiseSqrt().cwiseInverse().asDiagonal();
  RMatrix x = ldlt.matrixU().solve(dinv);
  return ldlt.transpositionsP().transpose() * x;
}

}  // namespace

OrthonormalBasis build_basis(const BasisSpec& spec) {
  spec.validate();
  OrthonormalBasis b;
  b.spec_ = spec;
  b.indices_ = graded_lex_indices(spec.dim, spec.max_degree);
  b.size_ = static_cast<int>(b.indices_.size());
  if (spec.weight.kind == WeightKind::Gaussian) return b;

  const int d = spec.dim, N = spec.max_degree;
  const double k = spec.weight.k;
  b.p_ = spec.weight.p != 0 ? spec.weight.p : minimal_profile_exponent(d, N, k);
  b.spec_.weight.p = b.p_;
  for (int l = 0; l <= N; ++l)
    for (int m : harmonic_orders(d, l))
      for (int n = 0; n < b.radial_count(l); ++n) b.labels_.push_back({n, l, m});

  b.radial_coeffs_.resize(N + 1);
  for (int l = 0; l <= N; ++l) {
    const int nl = b.radial_count(l);
    auto gram = [&](int nodes) {
      Rule1D r = mapped_radial_rule(nodes);
      RMatrix g = RMatrix::Zero(nl, nl);
      std::vector<double> raw(nl);
      for (std::size_t q = 0; q < r.size(); ++q) {
        const double s = r.nodes[q];
        b.raw_radial(l, s, raw.data());
        const double meas = r.weights[q] * std::pow(s, 2 * l + d - 1) * std::pow(1.0 + s * s, k);
        for (int i = 0; i < nl; ++i)
          for (int j = 0; j < nl; ++j) g(i, j) += meas * raw[i] * raw[j];
      }
      return g;
    };
    int nodes = 128;
    RMatrix g = gram(nodes);
    for (int it = 0; it < 6; ++it) {
      RMatrix g2 = gram(2 * nodes);
      const double rel = (g2 - g).cwiseAbs().maxCoeff() / g2.cwiseAbs().maxCoeff();
      g = g2;
      nodes *= 2;
      if (rel < 1e-13) break;
    }
    RMatrix t = pivoted_orthonormalizer(g);
    RMatrix g1 = t.transpose() * g * t;
    t = t * pivoted_orthonormalizer(0.5 * (g1 + g1.transpose()));
    b.radial_coeffs_[l] = t;
  }
  return b;
}

cplx inner_product(const CVector& f, const CVector& g) {
  if (f.size() != g.size()) throw ConfigError("inner_product: coefficient vectors of different length");
  return g.dot(f);  // sum f_i conj(g_i)
}

namespace {

double weight_factor(const QuadratureGrid& grid, const double* v, const Weight& w) {
  double r2 = 0.0;
  for (int c = 0; c < grid.dim; ++c) r2 += v[c] * v[c];
  double omega = w.kind == WeightKind::Gaussian ? 1.0 / maxwellian_r2(grid.dim, r2) : std::pow(1.0 + r2, w.k);
  if (grid.density == ReferenceDensity::Maxwellian) omega /= maxwellian_r2(grid.dim, r2);
  return omega;
}

}  // namespace

cplx inner_product(const QuadratureGrid& grid, const CVector& f, const CVector& g, const Weight& w) {
  if (f.size() != static_cast<Eigen::Index>(grid.size()) || g.size() != f.size())
    throw ConfigError("inner_product: values do not match the grid");
  cplx acc = 0.0;
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const cplx fg = f(q) * std::conj(g(q));
    if (fg == 0.0) continue;  // underflowed Gaussian tails; avoids 0 * inf
    acc += grid.weights[q] * weight_factor(grid, grid.point(q), w) * fg;
  }
  return acc;
}

RMatrix basis_on_grid(const OrthonormalBasis& basis, const QuadratureGrid& grid) {
  if (grid.dim != basis.dim()) throw ConfigError("basis_on_grid: dimension mismatch");
  RMatrix out(basis.size(), grid.size());
  std::vector<double> vals(basis.size());
  for (std::size_t q = 0; q < grid.size(); ++q) {
    basis.evaluate(grid.point(q), vals.data());
    for (int i = 0; i < basis.size(); ++i) out(i, q) = vals[i];
  }
  return out;
}

RMatrix gram_matrix(const OrthonormalBasis& basis, const QuadratureGrid& grid) {
  if (grid.dim != basis.dim()) throw ConfigError("gram_matrix: dimension mismatch");
  const Weight& w = basis.spec().weight;
  RMatrix g = RMatrix::Zero(basis.size(), basis.size());
  std::vector<double> vals(basis.size());
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const double* v = grid.point(q);
    const double f = grid.weights[q] * weight_factor(grid, v, w);
    if (basis.gaussian() && grid.density == ReferenceDensity::Maxwellian) {
      // Work with the polynomial parts to avoid under/overflow of M and M^{-1}.
      basis.evaluate_polynomial(v, vals.data());
      for (int i = 0; i < basis.size(); ++i)
        for (int j = 0; j <= i; ++j) g(i, j) += grid.weights[q] * vals[i] * vals[j];
      continue;
    }
    basis.evaluate(v, vals.data());
    for (int i = 0; i < basis.size(); ++i)
      for (int j = 0; j <= i; ++j) g(i, j) += f * vals[i] * vals[j];
  }
  return g.selfadjointView<Eigen::Lower>();
}

}  // namespace boltzspec

namespace boltzspec {

namespace {

// Tensor Gauss-Hermite rule (Gaussian measure) with n nodes per direction.
QuadratureGrid tensor_hermite(int dim, int n) {
  Rule1D gh = gauss_hermite_normal(n);
  QuadratureGrid g;
  g.dim = dim;
  g.order = n;
  g.exactness = 2 * n - 1;
  if (dim == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        g.nodes.insert(g.nodes.end(), {gh.nodes[i], gh.nodes[j]});
        g.weights.push_back(gh.weights[i] * gh.weights[j]);
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          g.nodes.insert(g.nodes.end(), {gh.nodes[i], gh.nodes[j], gh.nodes[k]});
          g.weights.push_back(gh.weights[i] * gh.weights[j] * gh.weights[k]);
        }
  }
  return g;
}

}  // namespace

RMatrix hermite_to_spherical(int dim, int N, std::vector<HarmonicLabel>* labels) {
  OrthonormalBasis herm = build_basis(BasisSpec{dim, N, Weight::gaussian()});
  std::vector<HarmonicLabel> labs;
  for (int l = 0; l <= N; ++l)
    for (int m : harmonic_orders(dim, l))
      for (int n = 0; n <= (N - l) / 2; ++n) labs.push_back({n, l, m});
  const int size = herm.size();
  if (static_cast<int>(labs.size()) != size) throw NumericalError("spherical family has the wrong size");

  QuadratureGrid g = tensor_hermite(dim, N + 1);
  RMatrix c = RMatrix::Zero(size, size);
  std::vector<double> h(size), sh((N + 1) * (N + 1)), lag(N + 1), psi(size);
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double* v = g.point(q);
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) r2 += v[k] * v[k];
    herm.evaluate_polynomial(v, h.data());
    solid_harmonics(dim, N, v, sh.data());
    int prev_l = -1;
    for (int j = 0; j < size; ++j) {
      const HarmonicLabel& lab = labs[j];
      if (lab.l != prev_l) {
        laguerre(N, lab.l + 0.5 * dim - 1.0, 0.5 * r2, lag.data());
        prev_l = lab.l;
      }
      psi[j] = gaussian_radial_norm(dim, lab.n, lab.l) * lag[lab.n] *
               sh[harmonic_offset(dim, lab.l) + harmonic_position(dim, lab.l, lab.m)];
    }
    for (int a = 0; a < size; ++a)
      for (int j = 0; j < size; ++j) c(a, j) += g.weights[q] * h[a] * psi[j];
  }
  if (labels) *labels = labs;
  return c;
}

RMatrix rotation_on_basis(const OrthonormalBasis& basis, const RMatrix& O) {
  if (!basis.gaussian()) throw ConfigError("rotation_on_basis: Gaussian basis required");
  const int d = basis.dim();
  if (O.rows() != d || O.cols() != d) throw ConfigError("rotation_on_basis: O must be d x d");
  if ((O.transpose() * O - RMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-12)
    throw ConfigError("rotation_on_basis: O is not orthogonal");
  QuadratureGrid g = tensor_hermite(d, basis.degree() + 1);
  const int n = basis.size();
  RMatrix pi = RMatrix::Zero(n, n);
  std::vector<double> hb(n), ha(n);
  double w[3];
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double* v = g.point(q);
    for (int i = 0; i < d; ++i) {
      w[i] = 0.0;
      for (int j = 0; j < d; ++j) w[i] += O(j, i) * v[j];
    }
    basis.evaluate_polynomial(v, hb.data());
    basis.evaluate_polynomial(w, ha.data());
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) pi(b, a) += g.weights[q] * hb[b] * ha[a];
  }
  return pi;
}

}  // namespace boltzspec
