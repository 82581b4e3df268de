#include "consensus/model.hpp"

#include <algorithm>
#include <cmath>

#include "consensus/error.hpp"

namespace consensus {

RankKernel RankKernel::inverse_product(double scale) {
  if (!(scale > 0.0)) throw DomainError("inverse product rank kernel needs scale > 0");
  return RankKernel([scale](double r, double s) { return std::min(1.0, scale / ((1.0 + r) * (1.0 + s))); },
                    "inverse_product", scale, false);
}

RankKernel RankKernel::distance_only(Kernel kernel) {
  const bool singular = kernel.singular_at_zero();
  RankKernel rk([k = kernel](double, double s) { return k.coupling(s); }, "distance_only", 1.0, singular);
  rk.base_ = std::move(kernel);
  return rk;
}

RankKernel RankKernel::custom(std::function<double(double, double)> fn, std::string name) {
  if (!fn) throw DomainError("custom rank kernel needs a callable");
  return RankKernel(std::move(fn), std::move(name), 1.0, false);
}

double RankKernel::coupling(double r, double s) const {
  if (s == 0.0 && singular_) return 0.0;
  return fn_(r, s);
}

Kernel RankKernel::distance_slice() const {
  auto fn = fn_;
  return Kernel::custom([fn](double s) { return fn(0.0, s); }, {}, false, name_ + "_slice");
}

const char* to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::Standard:
      return "standard";
    case ModelVariant::RankDependent:
      return "rank_dependent";
    case ModelVariant::NormalizedWeights:
      return "normalized";
  }
  return "unknown";
}

InfluenceModel InfluenceModel::rank_dependent(RankKernel rk) {
  Kernel slice = rk.distance_slice();
  return {std::move(slice), ModelVariant::RankDependent, std::move(rk)};
}

void InfluenceModel::check_consistent() const {
  if (variant == ModelVariant::RankDependent && !rank_kernel)
    throw UnsupportedError("rank-dependent model requires a rank kernel");
  if (variant != ModelVariant::RankDependent && rank_kernel)
    throw UnsupportedError(std::string("rank kernel combined with ") + to_string(variant) +
                           " weights is not supported");
}

}  // namespace consensus
