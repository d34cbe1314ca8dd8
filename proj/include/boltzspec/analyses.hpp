#pragma once

#include <string>
#include <vector>

#include "boltzspec/session.hpp"

namespace boltzspec {

// Machine-readable reports shared by the command-line tool and the Python module.
// Every report starts with schema_version, dim and degree.

std::string nu_csv(int dim, const std::vector<double>& speeds);

// xi must have dim components.
Json spectrum_report(Session& s, const RVector& xi);
// Hydrodynamic branches along the configured direction; one CSV row per (r, branch).
std::string branches_csv(Session& s, const std::vector<double>& r_grid, bool with_multiplicity);
Json coeffs_report(Session& s);
Json projectors_report(Session& s, double r, bool with_matrices);
Json semigroup_report(Session& s, const RVector& xi);
Json enlargement_report(Session& s, const RVector& xi);

// Checks a --xi style vector against the configured dimension.
RVector frequency_vector(const std::vector<double>& xi, int dim);
// Configured r grid, or 30 points from 0.01 to r0.
std::vector<double> branch_r_grid(const RunConfig& c);

}  // namespace boltzspec
