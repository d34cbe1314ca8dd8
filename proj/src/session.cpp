#include "boltzspec/session.hpp"

#include <chrono>

namespace boltzspec {

Session::Session(RunConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

const OrthonormalBasis& Session::basis() {
  if (!basis_) basis_ = build_basis(cfg_.gaussian_spec());
  return *basis_;
}

Json Session::L_cache_key() const {
  return Json{{"operator", "L"},
              {"basis", basis_spec_json(cfg_.gaussian_spec())},
              {"quad_order", cfg_.effective_quad_order()},
              {"format", 1}};
}

const OperatorMatrix& Session::L() {
  if (L_) return *L_;
  std::optional<MatrixCache> cache;
  if (!cfg_.cache_dir.empty()) {
    cache.emplace(cfg_.cache_dir);
    CacheLookup hit = cache->load(L_cache_key());
    cache_status_ = hit.status;
    if (hit.matrix) {
      L_ = std::move(hit.matrix);
      return *L_;
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  OperatorMatrix m = assemble_L(basis(), cfg_.effective_quad_order());
  m.info.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (cache) cache->store(L_cache_key(), m);
  L_ = std::move(m);
  return *L_;
}

const std::vector<RMatrix>& Session::velocity() {
  if (!velocity_) velocity_ = velocity_multipliers(basis());
  return *velocity_;
}

OperatorMatrix Session::V(const RVector& direction) {
  if (direction.size() != cfg_.dim)
    throw ConfigError("direction has " + std::to_string(direction.size()) + " components, dimension is " +
                      std::to_string(cfg_.dim));
  return combine_v(velocity(), basis().spec(), InnerProductTag::Gaussian, direction);
}

const ReducedResolvent& Session::reduced_resolvent() {
  if (!S_) S_ = std::make_unique<ReducedResolvent>(L(), basis());
  return *S_;
}

double Session::a0() {
  if (!a0_) a0_ = spectral_gap(L());
  return *a0_;
}

const EkDiscretization& Session::ek() {
  if (!ek_) ek_ = assemble_in_Ek(cfg_.polynomial_spec(), EkQuadrature{});
  return *ek_;
}

const SplittingSurrogate& Session::surrogate() {
  if (!surrogate_) surrogate_ = surrogate_splitting(ek(), Cutoff{cfg_.cutoff_R, cfg_.cutoff_delta}, cfg_.seed);
  return *surrogate_;
}

const Thresholds& Session::thresholds() {
  if (!thresholds_) thresholds_ = resolve_thresholds(cfg_, a0(), surrogate().a1_emp);
  return *thresholds_;
}

}  // namespace boltzspec
