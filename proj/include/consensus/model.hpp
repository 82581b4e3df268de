#pragma once

#include <functional>
#include <optional>
#include <string>

#include "consensus/kernel.hpp"

namespace consensus {

// Two-argument kernel rho(r, s), nonincreasing in both the own-opinion norm r
// and the distance s. Used by the rank-dependent model.
class RankKernel {
 public:
  // rho(r, s) = min(1, scale / ((1 + r) (1 + s)))
  static RankKernel inverse_product(double scale = 1.0);
  // rho(r, s) = rho1(s), independent of r.
  static RankKernel distance_only(Kernel kernel);
  static RankKernel custom(std::function<double(double, double)> fn, std::string name = "custom");

  double operator()(double r, double s) const { return fn_(r, s); }
  // Weight for a pair at distance s; zero for coincident pairs when the
  // underlying kernel is singular.
  double coupling(double r, double s) const;

  // s -> rho(0, s); used as the distance kernel for energies and diagnostics.
  Kernel distance_slice() const;

  const std::string& name() const { return name_; }
  double scale() const { return scale_; }
  // The distance kernel of a distance_only rank kernel.
  const std::optional<Kernel>& distance_kernel() const { return base_; }

 private:
  RankKernel(std::function<double(double, double)> fn, std::string name, double scale, bool singular)
      : fn_(std::move(fn)), name_(std::move(name)), scale_(scale), singular_(singular) {}

  std::function<double(double, double)> fn_;
  std::string name_;
  double scale_ = 1.0;
  bool singular_ = false;
  std::optional<Kernel> base_;
};

enum class ModelVariant { Standard, RankDependent, NormalizedWeights };

const char* to_string(ModelVariant v);

// Influence model: how the pair weights mu_{v,w} follow from the opinions.
//   Standard:          mu = rho(|u(v) - u(w)|), symmetric.
//   RankDependent:     mu = rho(|u(v)|, |u(w) - u(v)|), orientation dependent.
//   NormalizedWeights: mu = d rho^2(|u(v) - u(w)|) / sum_x rho(|u(v) - u(x)|).
struct InfluenceModel {
  Kernel kernel;
  ModelVariant variant = ModelVariant::Standard;
  std::optional<RankKernel> rank_kernel;

  static InfluenceModel standard(Kernel k) { return {std::move(k), ModelVariant::Standard, std::nullopt}; }
  static InfluenceModel normalized(Kernel k) { return {std::move(k), ModelVariant::NormalizedWeights, std::nullopt}; }
  static InfluenceModel rank_dependent(RankKernel rk);

  bool symmetric() const { return variant == ModelVariant::Standard; }
  // Throws UnsupportedError for inconsistent combinations.
  void check_consistent() const;
};

}  // namespace consensus
