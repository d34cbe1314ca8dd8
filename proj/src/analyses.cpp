#include "boltzspec/analyses.hpp"

#include <cmath>

#include "boltzspec/semigroup_analysis.hpp"

namespace boltzspec {

namespace {

Json vector_json(const RVector& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_json(const CMatrix& m) {
  Json re = Json::array(), im = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json rr = Json::array(), ri = Json::array();
    for (int j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return Json{{"re", re}, {"im", im}};
}

Json header(const RunConfig& c) {
  return Json{{"schema_version", kSchemaVersion}, {"dim", c.dim}, {"degree", c.degree}};
}

// Direction of xi, or the configured direction when xi = 0.
RVector direction_of(const FrequencyPoint& fp, const RunConfig& c) {
  return fp.r > 0.0 ? fp.direction : c.unit_direction();
}

}  // namespace

RVector frequency_vector(const std::vector<double>& xi, int dim) {
  if (static_cast<int>(xi.size()) != dim)
    throw ConfigError("xi has " + std::to_string(xi.size()) + " components but the dimension is " +
                      std::to_string(dim) + " (L_xi needs xi in R^d)");
  RVector r(dim);
  for (int i = 0; i < dim; ++i) {
    if (!std::isfinite(xi[i])) throw ConfigError("xi must be finite");
    r(i) = xi[i];
  }
  return r;
}

std::vector<double> branch_r_grid(const RunConfig& c) {
  if (!c.r_grid.empty()) return c.r_grid;
  std::vector<double> g;
  for (int i = 0; i < 30; ++i) g.push_back(0.01 + (c.r0 - 0.01) * i / 29.0);
  return g;
}

std::string nu_csv(int dim, const std::vector<double>& speeds) {
  if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3");
  CsvTable t({"speed", "nu", "nu_over_bracket"});
  for (double s : speeds) {
    if (!(s >= 0.0)) throw ConfigError("speeds must be non-negative");
    const double nu = compute_nu_speed(dim, s);
    t.add_row({CsvTable::cell(s), CsvTable::cell(nu), CsvTable::cell(nu / std::sqrt(1.0 + s * s))});
  }
  return t.str();
}

Json spectrum_report(Session& s, const RVector& xi) {
  const RunConfig& c = s.config();
  const double a = s.thresholds().a;
  FrequencyPoint fp = FrequencyPoint::from_xi(xi);
  SpectralSlice sl = spectrum(assemble_L_xi(s.L(), s.V(direction_of(fp, c)), fp).values, fp);
  Json j = header(c);
  j["xi"] = vector_json(xi);
  j["a"] = a;
  j["eigenvalues"] = complex_list(sl.eigenvalues);
  j["branch_count"] = static_cast<int>(eigen_indices_right_of(sl, a).size());
  return j;
}

std::string branches_csv(Session& s, const std::vector<double>& r_grid, bool with_multiplicity) {
  const RVector dir = s.config().unit_direction();
  BranchTable t = trace_branches(s.L(), s.V(dir), s.basis(), dir, r_grid, s.thresholds().a);
  std::vector<std::string> head = {"r", "branch", "re", "im"};
  if (with_multiplicity) head.push_back("multiplicity");
  CsvTable csv(head);
  for (std::size_t i = 0; i < t.r.size(); ++i)
    for (int k = 0; k < kBranchCount; ++k) {
      std::vector<std::string> row = {CsvTable::cell(t.r[i]), std::to_string(k - 1),
                                      CsvTable::cell(t.lambda[k][i].real()), CsvTable::cell(t.lambda[k][i].imag())};
      if (with_multiplicity) row.push_back(std::to_string(t.multiplicity[k]));
      csv.add_row(row);
    }
  return csv.str();
}

Json coeffs_report(Session& s) {
  const RunConfig& c = s.config();
  const RVector dir = c.unit_direction();
  BranchTable t = trace_branches(s.L(), s.V(dir), s.basis(), dir, branch_r_grid(c), s.thresholds().a);
  FirstOrderModes modes = first_order_modes(s.basis(), dir);
  SecondOrderCoeffs so = second_order_coeffs(s.V(dir), s.reduced_resolvent(), modes);
  Json j = header(c);
  j["direction"] = vector_json(dir);
  Json l1 = Json::array(), l2 = Json::array(), res = Json::array();
  for (int k = 0; k < kBranchCount; ++k) {
    l1.push_back(Json{{"branch", k - 1}, {"exact", complex_json(modes.lambda1[k])}, {"fit", complex_json(t.lambda1_fit[k])}});
    l2.push_back(Json{{"branch", k - 1}, {"formula", so.lambda2[k]}, {"fit", complex_json(t.lambda2_fit[k])}});
    res.push_back(Json{{"branch", k - 1}, {"residual", t.fit_residual[k]}});
  }
  j["lambda1"] = l1;
  j["lambda2"] = l2;
  j["fit_residuals"] = res;
  return j;
}

Json projectors_report(Session& s, double r, bool with_matrices) {
  const RunConfig& c = s.config();
  if (!(r > 0.0) || r > c.r0) throw ConfigError("projector radius must lie in (0, r0]");
  const RVector dir = c.unit_direction();
  const double a = s.thresholds().a;
  FrequencyPoint fp = FrequencyPoint::polar(r, dir);
  CMatrix A = assemble_L_xi(s.L(), s.V(dir), fp).values;
  SpectralSlice sl = spectrum(A, fp);
  ProjectorSet ps = branch_projectors(sl, assign_branches(sl, first_order_modes(s.basis(), dir), a));
  ProjectorCoeffs pc = branch_projector_coeffs(s.L(), s.V(dir), s.basis(), dir, a);
  const CMatrix P0 = s.reduced_resolvent().kernel_projector();

  double algebra = 0.0;
  CMatrix sum0 = CMatrix::Zero(P0.rows(), P0.cols());
  Json branches = Json::array();
  for (int j = 0; j < kBranchCount; ++j) {
    for (int k = 0; k < kBranchCount; ++k) {
      CMatrix prod = ps.P[j] * ps.P[k];
      algebra = std::max(algebra, max_abs(j == k ? CMatrix(prod - ps.P[j]) : prod));
    }
    sum0 += pc.P0[j];
    Json b{{"branch", j - 1}, {"rank", static_cast<int>(std::lround(ps.P[j].trace().real()))}};
    if (with_matrices) {
      b["P"] = matrix_json(ps.P[j]);
      b["P0"] = matrix_json(pc.P0[j]);
      b["P1"] = matrix_json(pc.P1[j]);
    }
    branches.push_back(b);
  }
  Json j = header(c);
  j["r"] = r;
  j["direction"] = vector_json(dir);
  j["branches"] = branches;
  j["algebra_residual"] = algebra;
  j["zeroth_order_sum_residual"] = max_abs(CMatrix(sum0 - P0));
  return j;
}

Json semigroup_report(Session& s, const RVector& xi) {
  const RunConfig& c = s.config();
  FrequencyPoint fp = FrequencyPoint::from_xi(xi);
  const RVector dir = direction_of(fp, c);
  CMatrix A = assemble_L_xi(s.L(), s.V(dir), fp).values;
  std::vector<double> grid = c.t_grid;
  if (grid.empty())
    for (int i = 0; i <= 40; ++i) grid.push_back(0.25 * i);
  DecayReport rep;
  if (fp.r <= c.r0) {
    SpectralSlice sl = spectrum(A, fp);
    rep = splitting_check(A, sl, assign_branches(sl, first_order_modes(s.basis(), dir), s.thresholds().a), grid);
  } else {
    rep = large_xi_decay(A, fp, grid);
  }
  Json j = header(c);
  j["xi"] = vector_json(xi);
  j["regime"] = rep.regime;
  j["gamma_fit"] = rep.gamma_fit;
  j["C_fit"] = rep.C_fit;
  j["spectral_rate"] = rep.spectral_rate;
  j["commutation_residual"] = rep.commutation_residual;
  j["max_semigroup_norm"] = rep.max_norm;
  Json norms = Json::array();
  for (std::size_t i = 0; i < rep.t.size(); ++i) norms.push_back(Json{{"t", rep.t[i]}, {"v_norm", rep.norm[i]}});
  j["norms"] = norms;
  return j;
}

Json enlargement_report(Session& s, const RVector& xi) {
  const RunConfig& c = s.config();
  FrequencyPoint fp = FrequencyPoint::from_xi(xi);
  const RVector dir = direction_of(fp, c);
  SpectralSlice sg = spectrum(assemble_L_xi(s.L(), s.V(dir), fp).values, fp);
  const EkDiscretization& e = s.ek();
  OperatorMatrix Vp = combine_v(e.V, e.basis.spec(), InnerProductTag::Polynomial, dir);
  SpectralSlice sp = spectrum(assemble_L_xi(e.L, Vp, fp).values, fp);
  WeightComparison cmp = compare_spectra(sg.eigenvalues, sp.eigenvalues, s.thresholds().a);
  Json j = header(c);
  j["k"] = c.weight_k;
  j["poly_degree"] = e.basis.degree();
  j["xi"] = vector_json(xi);
  j["count_gauss"] = cmp.count_gauss;
  j["count_poly"] = cmp.count_poly;
  Json pairs = Json::array();
  for (const MatchedPair& p : cmp.pairs)
    pairs.push_back(Json{{"gauss", complex_json(p.gauss)}, {"poly", complex_json(p.poly)}, {"dist", p.distance}});
  j["pairs"] = pairs;
  j["max_dist"] = cmp.max_distance;
  return j;
}

}  // namespace boltzspec
