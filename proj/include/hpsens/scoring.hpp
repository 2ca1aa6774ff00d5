#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hpsens/data_model.hpp"

namespace hps {

struct EnvNorm {
  double p_lo = 0.0;
  double p_hi = 1.0;

  bool operator==(const EnvNorm&) const = default;
};

/// Per-environment percentile anchors, indexed like the layout's environments.
struct EnvNorms {
  std::vector<std::string> environments;
  std::vector<EnvNorm> norms;
  double q_lo = 5.0;
  double q_hi = 95.0;

  const EnvNorm* find(const std::string& env) const;
  bool operator==(const EnvNorms&) const = default;
};

/// Pools the retained cell means of every algorithm and setting per
/// environment and takes interpolated q_lo / q_hi percentiles.
EnvNorms env_percentiles(const CellTable& cells, double q_lo = 5.0, double q_hi = 95.0);

/// Normalized environment scores (mean_perf - p_lo) / (p_hi - p_lo), unclipped.
/// Absent exactly where the source cell was dropped.
class ScoreTable {
 public:
  ScoreTable(TableLayout layout, std::vector<std::optional<double>> gammas, EnvNorms norms);

  /// Builds a table directly from gamma values (absent = dropped cell); the
  /// attached norms are the identity anchors (0, 1).
  static ScoreTable from_gammas(TableLayout layout, std::vector<std::optional<double>> gammas);

  const TableLayout& layout() const noexcept { return layout_; }
  const EnvNorms& norms() const noexcept { return norms_; }
  const std::optional<double>& gamma(std::size_t alg, std::size_t env, std::size_t setting) const {
    return gammas_[layout_.index(alg, env, setting)];
  }
  const std::vector<std::optional<double>>& gammas() const noexcept { return gammas_; }

  bool operator==(const ScoreTable&) const = default;

 private:
  TableLayout layout_;
  std::vector<std::optional<double>> gammas_;
  EnvNorms norms_;
};

ScoreTable normalize(const CellTable& cells, const EnvNorms& norms);

}  // namespace hps
