#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpsens/data_model.hpp"

namespace hps {

/// (quantile(alpha/2), quantile(1 - alpha/2)) of the samples, using the same
/// interpolated estimator as the score normalization.
std::pair<double, double> percentile_interval(std::span<const double> samples, double alpha);

struct BootstrapOptions {
  std::size_t replicates = 10000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  bool freeze_norms = false;
  double divergence_threshold = 0.10;
  double q_lo = 5.0;
  double q_hi = 95.0;
  /// Environments used by the metrics; empty = all. Norms always pool every environment's own cells.
  std::vector<std::string> env_scope;
  /// 0 = hardware concurrency. Results do not depend on this.
  std::size_t workers = 0;
};

/// Joint percentile intervals for (per-environment tuned score, sensitivity).
struct IntervalPair {
  std::string algorithm;
  double perf_lo = 0.0;
  double perf_hi = 0.0;
  double sens_lo = 0.0;
  double sens_hi = 0.0;
  double point_phi = 0.0;
  double point_perf = 0.0;
  std::size_t replicates = 0;
  std::size_t skipped = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  bool freeze_norms = false;

  bool operator==(const IntervalPair&) const = default;
};

/// Stratified bootstrap: each replicate resamples seeds with replacement
/// inside every (alg, env, setting) cell, then reruns filtering,
/// normalization (unless frozen) and the sensitivity metrics. Replicates that
/// violate a pipeline precondition are skipped; more than 10% skipped throws
/// Error(ReplicateFailure).
std::map<std::string, IntervalPair> bootstrap_metrics(const RunSet& runs, const std::vector<std::string>& algs,
                                                      const BootstrapOptions& options);

}  // namespace hps
