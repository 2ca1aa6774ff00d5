#include "support/oracles.hpp"

#include <limits>
#include <vector>

namespace hps::testing {

BruteSensitivity brute_sensitivity(const ScoreTable& scores, std::size_t alg) {
  const auto& layout = scores.layout();
  const std::size_t E = layout.environments.size();
  const std::size_t S = layout.space.setting_count();
  BruteSensitivity out;
  double sum = 0.0;
  for (std::size_t e = 0; e < E; ++e) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < S; ++s)
      if (auto g = scores.gamma(alg, e, s)) best = std::max(best, *g);
    sum += best;
  }
  out.per_env = sum / static_cast<double>(E);
  out.cross = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < S; ++s) {
    double total = 0.0;
    bool ok = true;
    for (std::size_t e = 0; e < E && ok; ++e) {
      if (auto g = scores.gamma(alg, e, s)) {
        total += *g;
      } else {
        ok = false;
      }
    }
    if (ok && total / static_cast<double>(E) > out.cross) {
      out.cross = total / static_cast<double>(E);
      out.hstar = s;
    }
  }
  out.phi = out.per_env - out.cross;
  return out;
}

std::size_t brute_force_dimensionality(const ScoreTable& scores, std::size_t alg, double threshold) {
  const auto& layout = scores.layout();
  const auto& space = layout.space;
  const std::size_t E = layout.environments.size();
  const std::size_t n = space.axis_count();
  const auto base = brute_sensitivity(scores, alg);
  const double target = threshold * base.per_env;

  std::vector<std::vector<std::size_t>> retained(E);
  for (std::size_t e = 0; e < E; ++e)
    for (std::size_t s = 0; s < space.setting_count(); ++s)
      if (scores.gamma(alg, e, s)) retained[e].push_back(s);

  // Odometer over one retained setting per environment.
  std::vector<std::size_t> pick(E, 0);
  std::size_t best_fixed = 0;
  bool feasible = false;
  while (true) {
    double sum = 0.0;
    for (std::size_t e = 0; e < E; ++e) sum += *scores.gamma(alg, e, retained[e][pick[e]]);
    if (sum / static_cast<double>(E) >= target) {
      std::size_t fixed = 0;
      for (std::size_t i = 0; i < n; ++i) {
        bool all = true;
        for (std::size_t e = 0; e < E && all; ++e)
          all = space.level(retained[e][pick[e]], i) == space.level(base.hstar, i);
        fixed += all ? 1 : 0;
      }
      feasible = true;
      best_fixed = std::max(best_fixed, fixed);
    }
    std::size_t k = 0;
    while (k < E && ++pick[k] == retained[k].size()) pick[k++] = 0;
    if (k == E) break;
  }
  return feasible ? n - best_fixed : n;
}

}  // namespace hps::testing
