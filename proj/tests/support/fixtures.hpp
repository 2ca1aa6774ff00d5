#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hpsens/data_model.hpp"
#include "hpsens/scoring.hpp"
#include "hpsens/synthgen.hpp"

namespace hps::testing {

std::string fixture_path(const std::string& name);
std::string golden_path(const std::string& name);
std::string read_text(const std::string& path);

/// Axes A, B in {0, 1}; algorithm "ppo"; h1 = (0,0), h2 = (1,1), other
/// settings dropped. Gammas e1: (1.0, 0.2), e2: (0.3, 0.9) and, when
/// `third_env`, e3 identical to e2.
ScoreTable two_by_two_scores(bool third_env = false);

/// Table over `envs` environments and the given axis sizes for algorithm
/// "alg". Gammas uniform in [-0.2, 1.2]; each cell independently dropped
/// with `drop_probability`.
ScoreTable random_score_table(std::mt19937_64& rng, std::size_t envs, const std::vector<std::size_t>& axis_sizes,
                              double drop_probability, std::size_t algorithms = 1);

/// Random small sweep: random axes, 1-3 algorithms, noisy per-run perfs with
/// occasional divergence.
RunSet random_run_set(std::mt19937_64& rng, std::size_t max_envs, std::size_t max_axes, std::size_t max_levels);

/// Applies x -> a * x + b per environment to every run's performance.
RunSet affine_transform(const RunSet& runs, const std::map<std::string, std::pair<double, double>>& per_env);

/// Three environments over a 3x3 grid for two algorithms with explicit
/// surfaces derived from `seed`; no divergence.
synth::Spec random_synth_spec(std::uint64_t seed, std::size_t seeds_per_cell, double sigma_fraction);

}  // namespace hps::testing
