#include "hpsens/scoring.hpp"

#include <algorithm>

#include "hpsens/error.hpp"
#include "hpsens/quantile.hpp"

namespace hps {

const EnvNorm* EnvNorms::find(const std::string& env) const {
  auto it = std::find(environments.begin(), environments.end(), env);
  if (it == environments.end()) return nullptr;
  return &norms[static_cast<std::size_t>(it - environments.begin())];
}

EnvNorms env_percentiles(const CellTable& cells, double q_lo, double q_hi) {
  if (!(q_lo > 0.0 && q_hi < 100.0 && q_lo < q_hi))
    throw Error(ErrorKind::InvalidArgument, "percentile ranks need 0 < q_lo < q_hi < 100");
  const auto& layout = cells.layout();
  EnvNorms out;
  out.environments = layout.environments;
  out.q_lo = q_lo;
  out.q_hi = q_hi;
  std::vector<double> pool;
  for (std::size_t e = 0; e < layout.environments.size(); ++e) {
    pool.clear();
    for (std::size_t a = 0; a < layout.algorithms.size(); ++a)
      for (std::size_t s = 0; s < layout.space.setting_count(); ++s)
        if (const auto& cell = cells.at(a, e, s); cell.retained) pool.push_back(*cell.mean_perf);
    std::sort(pool.begin(), pool.end());
    const std::string& env = layout.environments[e];
    if (pool.size() < 2)
      throw Error(ErrorKind::TooFewCells, "environment '" + env + "' has fewer than 2 retained cells");
    if (pool.front() == pool.back())
      throw Error(ErrorKind::DegenerateNormalization, "environment '" + env + "' has no spread in cell means");
    EnvNorm norm{quantile_sorted(pool, q_lo), quantile_sorted(pool, q_hi)};
    if (!(norm.p_hi > norm.p_lo))
      throw Error(ErrorKind::DegenerateNormalization, "environment '" + env + "' has equal percentile anchors");
    out.norms.push_back(norm);
  }
  return out;
}

ScoreTable::ScoreTable(TableLayout layout, std::vector<std::optional<double>> gammas, EnvNorms norms)
    : layout_(std::move(layout)), gammas_(std::move(gammas)), norms_(std::move(norms)) {
  if (gammas_.size() != layout_.cell_count())
    throw Error(ErrorKind::InvalidArgument, "gamma vector does not match the table layout");
}

ScoreTable ScoreTable::from_gammas(TableLayout layout, std::vector<std::optional<double>> gammas) {
  EnvNorms norms;
  norms.environments = layout.environments;
  norms.norms.assign(layout.environments.size(), EnvNorm{0.0, 1.0});
  return ScoreTable(std::move(layout), std::move(gammas), std::move(norms));
}

ScoreTable normalize(const CellTable& cells, const EnvNorms& norms) {
  const auto& layout = cells.layout();
  std::vector<EnvNorm> per_env;
  for (const auto& env : layout.environments) {
    const EnvNorm* norm = norms.find(env);
    if (!norm) throw Error(ErrorKind::MissingEnvNorm, "no normalization anchors for environment '" + env + "'");
    per_env.push_back(*norm);
  }
  std::vector<std::optional<double>> gammas(layout.cell_count());
  for (std::size_t a = 0; a < layout.algorithms.size(); ++a)
    for (std::size_t e = 0; e < layout.environments.size(); ++e) {
      const EnvNorm& n = per_env[e];
      for (std::size_t s = 0; s < layout.space.setting_count(); ++s)
        if (const auto& cell = cells.at(a, e, s); cell.retained)
          gammas[layout.index(a, e, s)] = (*cell.mean_perf - n.p_lo) / (n.p_hi - n.p_lo);
    }
  EnvNorms used = norms;
  used.environments = layout.environments;
  used.norms = per_env;
  return ScoreTable(layout, std::move(gammas), std::move(used));
}

}  // namespace hps
