#include "support/fixtures.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hpsens/rng.hpp"

namespace hps::testing {

std::string fixture_path(const std::string& name) { return std::string(HPSENS_FIXTURE_DIR) + "/" + name; }
std::string golden_path(const std::string& name) { return std::string(HPSENS_GOLDEN_DIR) + "/" + name; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScoreTable two_by_two_scores(bool third_env) {
  TableLayout layout{HyperSpace({{"A", {0.0, 1.0}}, {"B", {0.0, 1.0}}}), {"ppo"}, {"e1", "e2"}};
  if (third_env) layout.environments.push_back("e3");
  std::vector<std::optional<double>> gammas(layout.cell_count());
  const std::size_t h1 = 0;  // (0,0)
  const std::size_t h2 = 3;  // (1,1)
  gammas[layout.index(0, 0, h1)] = 1.0;
  gammas[layout.index(0, 0, h2)] = 0.2;
  for (std::size_t e = 1; e < layout.environments.size(); ++e) {
    gammas[layout.index(0, e, h1)] = 0.3;
    gammas[layout.index(0, e, h2)] = 0.9;
  }
  return ScoreTable::from_gammas(std::move(layout), std::move(gammas));
}

ScoreTable random_score_table(std::mt19937_64& rng, std::size_t envs, const std::vector<std::size_t>& axis_sizes,
                              double drop_probability, std::size_t algorithms) {
  std::vector<Axis> axes;
  for (std::size_t i = 0; i < axis_sizes.size(); ++i) {
    Axis axis{"x" + std::to_string(i), {}};
    for (std::size_t v = 0; v < axis_sizes[i]; ++v) axis.values.emplace_back(static_cast<double>(v));
    axes.push_back(std::move(axis));
  }
  TableLayout layout{HyperSpace(std::move(axes)), {}, {}};
  for (std::size_t a = 0; a < algorithms; ++a) layout.algorithms.push_back(a == 0 ? "alg" : "alg" + std::to_string(a));
  for (std::size_t e = 0; e < envs; ++e) layout.environments.push_back("env" + std::to_string(e));
  std::uniform_real_distribution<double> value(-0.2, 1.2);
  std::bernoulli_distribution drop(drop_probability);
  std::vector<std::optional<double>> gammas(layout.cell_count());
  for (auto& g : gammas)
    if (!drop(rng)) g = value(rng);
  return ScoreTable::from_gammas(std::move(layout), std::move(gammas));
}

RunSet random_run_set(std::mt19937_64& rng, std::size_t max_envs, std::size_t max_axes, std::size_t max_levels) {
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  const std::size_t n_axes = pick(1, max_axes);
  std::vector<Axis> axes;
  for (std::size_t i = 0; i < n_axes; ++i) {
    Axis axis{"hp" + std::to_string(i), {}};
    const std::size_t levels = pick(2, max_levels);
    for (std::size_t v = 0; v < levels; ++v) axis.values.emplace_back(std::pow(10.0, -static_cast<double>(v)));
    axes.push_back(std::move(axis));
  }
  HyperSpace space(std::move(axes));
  const std::size_t n_envs = pick(1, max_envs);
  const std::size_t n_algs = pick(1, 3);
  const std::size_t seeds = pick(2, 5);
  std::uniform_real_distribution<double> level(0.0, 100.0);
  std::normal_distribution<double> noise(0.0, 3.0);
  std::bernoulli_distribution diverge(0.03);
  std::vector<RunRecord> runs;
  for (std::size_t a = 0; a < n_algs; ++a)
    for (std::size_t e = 0; e < n_envs; ++e) {
      const double env_scale = std::pow(10.0, static_cast<double>(e));
      for (std::size_t s = 0; s < space.setting_count(); ++s) {
        const double base = level(rng);
        for (std::size_t k = 0; k < seeds; ++k)
          runs.push_back(RunRecord{"alg" + std::to_string(a), "env" + std::to_string(e), space.coord_of(s),
                                   static_cast<std::int64_t>(k), env_scale * (base + noise(rng)), diverge(rng)});
      }
    }
  return RunSet(std::move(space), std::move(runs));
}

RunSet affine_transform(const RunSet& runs, const std::map<std::string, std::pair<double, double>>& per_env) {
  std::vector<RunRecord> out = runs.runs();
  for (auto& r : out) {
    auto it = per_env.find(r.environment);
    if (it != per_env.end()) r.perf = it->second.first * r.perf + it->second.second;
  }
  return RunSet(runs.space(), std::move(out));
}

synth::Spec random_synth_spec(std::uint64_t seed, std::size_t seeds_per_cell, double sigma_fraction) {
  synth::Spec spec;
  spec.space = HyperSpace({{"lr", {1e-3, 1e-2, 1e-1}}, {"lambda", {0.5, 0.7, 0.9}}});
  spec.algorithms = {"base", "variant"};
  spec.seeds_per_cell = seeds_per_cell;
  auto rng = make_stream(seed, 0xfeed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<std::pair<double, double>> affine = {{100.0, 20.0}, {2000.0, -100.0}, {40.0, 1.0}};
  const std::vector<std::string> ids = {"ant", "hopper", "swimmer"};
  for (std::size_t e = 0; e < ids.size(); ++e) {
    synth::Environment env;
    env.id = ids[e];
    env.scale = affine[e].first;
    env.offset = affine[e].second;
    env.sigma = sigma_fraction * affine[e].first;
    for (const auto& alg : spec.algorithms) {
      std::vector<double> surface(spec.space.setting_count());
      for (auto& v : surface) v = unit(rng);
      env.surfaces.emplace(alg, std::move(surface));
    }
    spec.environments.push_back(std::move(env));
  }
  return spec;
}

}  // namespace hps::testing
