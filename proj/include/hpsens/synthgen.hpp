#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hpsens/data_model.hpp"
#include "hpsens/scoring.hpp"

namespace hps::synth {

struct Environment {
  std::string id;
  double scale = 1.0;  // a > 0
  double offset = 0.0; // b
  double sigma = 0.0;  // per-run Gaussian noise on raw performance
  /// True score per algorithm, indexed by linear setting.
  std::map<std::string, std::vector<double>> surfaces;
};

struct DivergenceRule {
  std::string algorithm;
  std::string environment;
  SettingCoord setting;
  double probability = 0.0;
};

struct Spec {
  HyperSpace space;
  std::vector<std::string> algorithms;
  std::vector<Environment> environments;
  std::size_t seeds_per_cell = 1;
  std::vector<DivergenceRule> divergence;

  /// Throws InvalidArgument when a surface is missing or mis-sized, a scale
  /// is not positive, or seeds_per_cell is zero.
  void validate() const;
};

struct AlgorithmTruth {
  double per_env_tuned = 0.0;
  double cross_env_tuned = 0.0;
  double phi = 0.0;
  std::size_t d = 0;
  /// Indexed by subset size 0..n: best free-axis subset (sorted names) and its score.
  std::vector<std::vector<std::string>> best_subsets;
  std::vector<double> subset_scores;
};

struct GroundTruth {
  TableLayout layout;
  /// Noiseless normalized scores, layout-indexed.
  std::vector<double> gammas;
  std::map<std::string, AlgorithmTruth> algorithms;
  double threshold = 0.95;
};

/// Brute-force reference metrics on the noiseless surfaces. Norms use the
/// same interpolated percentiles as the pipeline; phi enumerates both terms
/// directly and d maximizes the number of coordinates pinned to h* over
/// every pin pattern. Throws TooLarge above 10^6 settings.
GroundTruth oracle_metrics(const Spec& spec, double threshold = 0.95, double q_lo = 5.0, double q_hi = 95.0);

/// Raw run performance = scale * surface + offset + N(0, sigma); divergence
/// drawn per rule. Each cell draws from its own counter-derived substream.
std::pair<RunSet, GroundTruth> generate(const Spec& spec, std::uint64_t seed, double threshold = 0.95);

/// TOML-style spec reader (see README for the schema).
Spec parse_spec(std::string_view text);
Spec load_spec(const std::filesystem::path& path);

}  // namespace hps::synth
