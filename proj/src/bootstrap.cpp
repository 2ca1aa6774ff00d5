#include "hpsens/bootstrap.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <thread>

#include "hpsens/error.hpp"
#include "hpsens/quantile.hpp"
#include "hpsens/rng.hpp"
#include "hpsens/scoring.hpp"
#include "hpsens/sensitivity.hpp"

namespace hps {

std::pair<double, double> percentile_interval(std::span<const double> samples, double alpha) {
  if (samples.empty()) throw Error(ErrorKind::EmptySamples, "no bootstrap samples");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return {quantile_sorted(sorted, 100.0 * (alpha / 2.0)), quantile_sorted(sorted, 100.0 * (1.0 - alpha / 2.0))};
}

namespace {

struct Metrics {
  double phi;
  double perf;
};

using Replicate = std::optional<std::vector<Metrics>>;

std::vector<Metrics> evaluate(const CellTable& cells, const EnvNorms* frozen, const std::vector<std::string>& algs,
                              const BootstrapOptions& options) {
  const EnvNorms norms = frozen ? *frozen : env_percentiles(cells, options.q_lo, options.q_hi);
  const ScoreTable scores = normalize(cells, norms);
  std::vector<Metrics> out;
  out.reserve(algs.size());
  for (const auto& alg : algs) {
    const auto report = sensitivity(scores, alg, options.env_scope);
    out.push_back({report.phi, report.per_env_tuned});
  }
  return out;
}

}  // namespace

std::map<std::string, IntervalPair> bootstrap_metrics(const RunSet& runs, const std::vector<std::string>& algs,
                                                      const BootstrapOptions& options) {
  if (options.replicates < 1) throw Error(ErrorKind::InvalidArgument, "bootstrap needs at least 1 replicate");
  if (!(options.alpha > 0.0 && options.alpha < 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");

  const CellTable full = build_cells(runs, options.divergence_threshold);
  const EnvNorms full_norms = env_percentiles(full, options.q_lo, options.q_hi);
  const auto point = evaluate(full, &full_norms, algs, options);

  const TableLayout& layout = full.layout();
  std::vector<std::vector<Observation>> grouped(layout.cell_count());
  for (const auto& run : runs.runs()) {
    const auto a = *layout.algorithm_index(run.algorithm);
    const auto e = *layout.environment_index(run.environment);
    grouped[layout.index(a, e, layout.space.linear_index(run.setting))].push_back({run.perf, run.diverged});
  }
  // Fixed within-cell order so resampled indices mean the same runs on every load order.
  for (auto& group : grouped)
    std::sort(group.begin(), group.end(), [](const Observation& x, const Observation& y) {
      return std::pair(x.diverged, x.perf) < std::pair(y.diverged, y.perf);
    });

  const EnvNorms* frozen = options.freeze_norms ? &full_norms : nullptr;
  std::vector<Replicate> results(options.replicates);

  auto run_replicate = [&](std::size_t b) {
    auto rng = make_stream(options.seed, b);
    std::vector<Cell> cells(grouped.size());
    std::vector<Observation> draw;
    for (std::size_t c = 0; c < grouped.size(); ++c) {
      const auto& group = grouped[c];
      if (group.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, group.size() - 1);
      draw.clear();
      for (std::size_t k = 0; k < group.size(); ++k) draw.push_back(group[pick(rng)]);
      cells[c] = summarize_cell(draw, options.divergence_threshold);
    }
    try {
      results[b] = evaluate(CellTable(layout, std::move(cells), options.divergence_threshold), frozen, algs, options);
    } catch (const Error&) {
      results[b] = std::nullopt;
    }
  };

  std::size_t workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.workers;
  workers = std::min(workers, options.replicates);
  if (workers <= 1) {
    for (std::size_t b = 0; b < options.replicates; ++b) run_replicate(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < options.replicates; b = next++) run_replicate(b);
      });
    for (auto& t : pool) t.join();
  }

  const auto skipped = static_cast<std::size_t>(std::count(results.begin(), results.end(), std::nullopt));
  if (skipped * 10 > options.replicates)
    throw Error(ErrorKind::ReplicateFailure, std::to_string(skipped) + " of " + std::to_string(options.replicates) +
                                                 " bootstrap replicates violated pipeline preconditions");

  std::map<std::string, IntervalPair> out;
  std::vector<double> phis;
  std::vector<double> perfs;
  for (std::size_t i = 0; i < algs.size(); ++i) {
    phis.clear();
    perfs.clear();
    for (const auto& r : results)
      if (r) {
        phis.push_back((*r)[i].phi);
        perfs.push_back((*r)[i].perf);
      }
    IntervalPair pair;
    pair.algorithm = algs[i];
    std::tie(pair.perf_lo, pair.perf_hi) = percentile_interval(perfs, options.alpha);
    std::tie(pair.sens_lo, pair.sens_hi) = percentile_interval(phis, options.alpha);
    pair.point_phi = point[i].phi;
    pair.point_perf = point[i].perf;
    pair.replicates = options.replicates;
    pair.skipped = skipped;
    pair.alpha = options.alpha;
    pair.seed = options.seed;
    pair.freeze_norms = options.freeze_norms;
    out.emplace(algs[i], pair);
  }
  return out;
}

}  // namespace hps
