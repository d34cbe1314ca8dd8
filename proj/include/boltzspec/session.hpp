#pragma once

#include <memory>
#include <optional>
#include <string>

#include "boltzspec/config.hpp"
#include "boltzspec/hydrodynamic_branches.hpp"
#include "boltzspec/weighted_spaces.hpp"

namespace boltzspec {

// Lazily built objects shared by the analyses of one run configuration.  L is read
// from and written to the matrix cache when a cache directory is configured.
class Session {
 public:
  explicit Session(RunConfig cfg);

  const RunConfig& config() const { return cfg_; }
  const OrthonormalBasis& basis();
  const OperatorMatrix& L();
  const std::string& cache_status() const { return cache_status_; }
  const std::vector<RMatrix>& velocity();
  OperatorMatrix V(const RVector& direction);
  const ReducedResolvent& reduced_resolvent();

  double a0();
  const EkDiscretization& ek();
  const SplittingSurrogate& surrogate();
  const Thresholds& thresholds();

  // Cache key of the Gaussian-space L for this configuration.
  Json L_cache_key() const;

 private:
  RunConfig cfg_;
  std::optional<OrthonormalBasis> basis_;
  std::optional<OperatorMatrix> L_;
  std::optional<std::vector<RMatrix>> velocity_;
  std::unique_ptr<ReducedResolvent> S_;
  std::optional<double> a0_;
  std::optional<EkDiscretization> ek_;
  std::optional<SplittingSurrogate> surrogate_;
  std::optional<Thresholds> thresholds_;
  std::string cache_status_ = "disabled";
};

}  // namespace boltzspec
