#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpsens/scoring.hpp"

namespace hps {

/// Environment subset over which a metric is evaluated; empty means every
/// environment of the score table.
using EnvScope = std::span<const std::string>;

struct PerEnvTuned {
  double score = 0.0;
  /// Best retained setting per environment, in layout environment order.
  std::vector<std::pair<std::string, SettingCoord>> argmax;
};

struct CrossEnvTuned {
  double score = 0.0;
  SettingCoord argmax;          // h*
  std::size_t argmax_linear = 0;
  std::size_t eligible_count = 0;
};

struct SensitivityReport {
  std::string algorithm;
  double per_env_tuned = 0.0;
  double cross_env_tuned = 0.0;
  double phi = 0.0;
  std::vector<std::pair<std::string, SettingCoord>> per_env_argmax;
  SettingCoord cross_env_argmax;
  std::size_t eligible_count = 0;
  std::vector<std::string> env_set;
};

/// Resolves a scope to ascending layout environment indices. Unknown names
/// throw InvalidArgument; duplicates are collapsed.
std::vector<std::size_t> resolve_scope(const TableLayout& layout, EnvScope scope);

/// Mean over environments of the best retained gamma. Ties go to the lowest
/// setting in lexicographic coordinate order.
PerEnvTuned per_env_tuned(const ScoreTable& scores, const std::string& alg, EnvScope scope = {});

/// Best mean gamma of one fixed setting. Only settings retained in every
/// environment of the scope compete.
CrossEnvTuned cross_env_tuned(const ScoreTable& scores, const std::string& alg, EnvScope scope = {});

/// phi = per-environment tuned score - cross-environment tuned score.
SensitivityReport sensitivity(const ScoreTable& scores, const std::string& alg, EnvScope scope = {});

/// For every environment, sensitivity of each algorithm with that
/// environment removed. Norms are left untouched.
std::map<std::string, std::vector<SensitivityReport>> leave_one_out(const ScoreTable& scores,
                                                                   const std::vector<std::string>& algs);

}  // namespace hps
