#pragma once

#include <string>
#include <vector>

#include "hpsens/sensitivity.hpp"

namespace hps {

inline constexpr std::size_t kMaxDimensionalityAxes = 20;

struct DimPoint {
  std::size_t size = 0;
  std::vector<std::string> best_subset;  // sorted axis names
  double score = 0.0;                    // -inf when every subset of this size is infeasible
};

/// Best-subset tuning curve: at each size, the free axes whose per-environment
/// tuning (all other axes pinned to h*) gives the highest mean gamma.
struct DimCurve {
  std::string algorithm;
  std::vector<DimPoint> points;  // sizes 0..n
  double per_env_tuned = 0.0;
  double threshold_fraction = 0.95;
  std::size_t d = 0;
};

/// Mean over environments of the best retained gamma among settings that
/// agree with h* on every axis outside `free_axes`.
double subset_score(const ScoreTable& scores, const std::string& alg, const std::vector<std::string>& free_axes,
                    EnvScope scope = {});

DimCurve dim_curve(const ScoreTable& scores, const std::string& alg, double threshold = 0.95, EnvScope scope = {});

/// Smallest subset size whose score reaches threshold_fraction * per_env_tuned.
std::size_t effective_dimensionality(const DimCurve& curve);

}  // namespace hps
