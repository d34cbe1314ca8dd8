#pragma once

#include <vector>

#include "boltzspec/common.hpp"

namespace boltzspec {

// Real harmonics on S^{d-1}, normalized in L^2(S^{d-1}).
//   d=3: m = -l..l, standard real spherical harmonics about the z-axis.
//   d=2: l = 0 has m = 0; l > 0 has m = +l (cos l theta) and m = -l (sin l theta).
int harmonic_count(int dim, int l);
std::vector<int> harmonic_orders(int dim, int l);

// Solid harmonics |x|^l Y_lm(x/|x|) for all l <= lmax, ordered by l then by
// harmonic_orders(dim, l). These are homogeneous polynomials.
void solid_harmonics(int dim, int lmax, const double* x, double* out);

// Zonal harmonics about the first coordinate axis, as functions of the cosine of
// the angle to the axis: Z_l(c) for l = 0..lmax, normalized like Y_lm.
void zonal_harmonics(int dim, int lmax, double c, double* out);

// Solid zonal harmonics |x|^l Z_l(x_1/|x|) for l = 0..lmax (polynomials).
void solid_zonal_harmonics(int dim, int lmax, const double* x, double* out);

// Generalized Laguerre L_n^{(alpha)}(x) for n = 0..nmax.
void laguerre(int nmax, double alpha, double x, double* out);

}  // namespace boltzspec
