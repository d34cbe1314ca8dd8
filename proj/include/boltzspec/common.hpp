#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace boltzspec {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Invalid arguments or configuration (maps to CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical invariant was violated or a computation could not be carried out
// (maps to CLI exit code 1).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Surface measure of the unit sphere in R^d.
inline double sphere_measure(int dim) { return dim == 2 ? 2.0 * kPi : 4.0 * kPi; }

// Standard Maxwellian exp(-|v|^2/2)/(2 pi)^{d/2} as a function of |v|^2.
inline double maxwellian_r2(int dim, double r2) {
  return std::exp(-0.5 * r2) / std::pow(2.0 * kPi, 0.5 * dim);
}

inline void require_dim(int dim) {
  if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3, got " + std::to_string(dim));
}

double max_abs(const CMatrix& a);
double max_abs(const RMatrix& a);
double spectral_norm(const CMatrix& a);

}  // namespace boltzspec
