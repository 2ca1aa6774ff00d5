#include "hpsens/dimensionality.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <optional>

#include "hpsens/error.hpp"

namespace hps {

namespace {

struct Context {
  const ScoreTable& scores;
  std::size_t alg;
  std::vector<std::size_t> envs;
  std::size_t hstar;
};

Context make_context(const ScoreTable& scores, const std::string& alg, EnvScope scope) {
  const auto cross = cross_env_tuned(scores, alg, scope);
  return Context{scores, *scores.layout().algorithm_index(alg), resolve_scope(scores.layout(), scope),
                 cross.argmax_linear};
}

// Bit i of free_mask set = axis i tuned per environment. Returns the env
// index that had no feasible setting on failure.
std::optional<double> masked_score(const Context& ctx, std::uint32_t free_mask, std::size_t* failed_env = nullptr) {
  const auto& layout = ctx.scores.layout();
  const auto& space = layout.space;
  const std::size_t n = space.axis_count();
  double total = 0.0;
  for (std::size_t e : ctx.envs) {
    bool found = false;
    double best = 0.0;
    for (std::size_t s = 0; s < space.setting_count(); ++s) {
      bool agrees = true;
      for (std::size_t i = 0; i < n && agrees; ++i)
        if (!(free_mask >> i & 1u) && space.level(s, i) != space.level(ctx.hstar, i)) agrees = false;
      if (!agrees) continue;
      const auto& g = ctx.scores.gamma(ctx.alg, e, s);
      if (g && (!found || *g > best)) {
        best = *g;
        found = true;
      }
    }
    if (!found) {
      if (failed_env) *failed_env = e;
      return std::nullopt;
    }
    total += best;
  }
  return total / static_cast<double>(ctx.envs.size());
}

std::vector<std::string> mask_names(const HyperSpace& space, std::uint32_t mask) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < space.axis_count(); ++i)
    if (mask >> i & 1u) names.push_back(space.axes()[i].name);
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

double subset_score(const ScoreTable& scores, const std::string& alg, const std::vector<std::string>& free_axes,
                    EnvScope scope) {
  const auto& space = scores.layout().space;
  if (space.axis_count() > kMaxDimensionalityAxes)
    throw Error(ErrorKind::TooManyAxes, "subset search supports at most 20 axes");
  std::uint32_t mask = 0;
  for (const auto& name : free_axes) {
    auto axis = space.find_axis(name);
    if (!axis) throw Error(ErrorKind::InvalidArgument, "unknown axis '" + name + "'");
    mask |= 1u << *axis;
  }
  const auto ctx = make_context(scores, alg, scope);
  std::size_t failed = 0;
  auto score = masked_score(ctx, mask, &failed);
  if (!score)
    throw Error(ErrorKind::NoFeasibleSetting, "freezing leaves no retained setting in environment '" +
                                                  scores.layout().environments[failed] + "'");
  return *score;
}

DimCurve dim_curve(const ScoreTable& scores, const std::string& alg, double threshold, EnvScope scope) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "dimensionality threshold must lie in (0, 1]");
  const auto& space = scores.layout().space;
  const std::size_t n = space.axis_count();
  if (n > kMaxDimensionalityAxes)
    throw Error(ErrorKind::TooManyAxes, std::to_string(n) + " axes exceed the exhaustive-search limit of 20");
  const auto ctx = make_context(scores, alg, scope);

  DimCurve curve;
  curve.algorithm = alg;
  curve.threshold_fraction = threshold;
  curve.per_env_tuned = per_env_tuned(scores, alg, scope).score;
  curve.points.resize(n + 1);
  std::vector<bool> seen(n + 1, false);
  const std::uint32_t limit = n == 0 ? 1u : (1u << n);
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    const double score = masked_score(ctx, mask).value_or(-std::numeric_limits<double>::infinity());
    auto names = mask_names(space, mask);
    DimPoint& point = curve.points[size];
    if (!seen[size] || score > point.score || (score == point.score && names < point.best_subset)) {
      point = DimPoint{size, std::move(names), score};
      seen[size] = true;
    }
  }
  const double target = threshold * curve.per_env_tuned;
  curve.d = n;
  for (const auto& point : curve.points)
    if (point.score >= target) {
      curve.d = point.size;
      break;
    }
  return curve;
}

std::size_t effective_dimensionality(const DimCurve& curve) { return curve.d; }

}  // namespace hps
