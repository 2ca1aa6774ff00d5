#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hpsens/hyperspace.hpp"

namespace hps {

/// How a return curve collapses to one performance scalar.
struct PerfMetric {
  enum class Kind { Auc, FinalReturn };

  Kind kind = Kind::Auc;
  std::size_t window = 0;  // FinalReturn only

  static PerfMetric auc() { return {Kind::Auc, 0}; }
  static PerfMetric final_return(std::size_t window) { return {Kind::FinalReturn, window}; }

  /// Parses `auc` or `final:<window>`.
  static PerfMetric parse(std::string_view text);
  std::string to_string() const;

  bool operator==(const PerfMetric&) const = default;
};

using ReturnCurve = std::vector<double>;
using Outcome = std::variant<double, ReturnCurve>;

/// AUC is the mean of the curve; FinalReturn(w) sums the last w entries.
/// Scalar outcomes pass through unchanged.
double perf_from_outcome(const Outcome& outcome, const PerfMetric& metric);

/// One observed run p(alg, env, setting, seed).
struct RunRecord {
  std::string algorithm;
  std::string environment;
  SettingCoord setting;
  std::int64_t seed = 0;
  double perf = 0.0;
  bool diverged = false;
};

/// Validated sweep: every run lies on the grid and (alg, env, setting, seed)
/// is unique. Non-finite performance is marked diverged on construction.
class RunSet {
 public:
  RunSet() = default;
  RunSet(HyperSpace space, std::vector<RunRecord> runs);

  const HyperSpace& space() const noexcept { return space_; }
  const std::vector<RunRecord>& runs() const noexcept { return runs_; }
  std::size_t size() const noexcept { return runs_.size(); }
  bool empty() const noexcept { return runs_.empty(); }

  /// Sorted, unique.
  std::vector<std::string> algorithms() const;
  std::vector<std::string> environments() const;

 private:
  HyperSpace space_;
  std::vector<RunRecord> runs_;
};

enum class FileFormat { Jsonl, Csv };

/// `.csv` selects CSV, anything else JSONL.
FileFormat format_for_path(const std::filesystem::path& path);

/// Reads run rows. Without a manifest the space is inferred: axes sorted by
/// name, numeric levels ascending, text levels lexicographic.
RunSet load_runs(const std::filesystem::path& path, FileFormat format, const PerfMetric& metric,
                 const std::optional<HyperSpace>& manifest = std::nullopt);
RunSet parse_runs(std::istream& in, FileFormat format, const PerfMetric& metric,
                  const std::optional<HyperSpace>& manifest = std::nullopt);

/// `[axes]` table of `name = [levels...]`, in declaration order.
HyperSpace parse_manifest(std::string_view text);
HyperSpace load_manifest(const std::filesystem::path& path);

/// Algorithms x environments x settings addressing shared by cell and score tables.
struct TableLayout {
  HyperSpace space;
  std::vector<std::string> algorithms;
  std::vector<std::string> environments;

  std::size_t cell_count() const noexcept {
    return algorithms.size() * environments.size() * space.setting_count();
  }
  std::size_t index(std::size_t alg, std::size_t env, std::size_t setting) const noexcept {
    return (alg * environments.size() + env) * space.setting_count() + setting;
  }
  std::optional<std::size_t> algorithm_index(std::string_view name) const;
  std::optional<std::size_t> environment_index(std::string_view name) const;

  bool operator==(const TableLayout&) const = default;
};

struct Cell {
  std::size_t n_runs = 0;
  std::size_t n_diverged = 0;
  std::optional<double> mean_perf;
  bool retained = false;

  bool operator==(const Cell&) const = default;
};

struct Observation {
  double perf = 0.0;
  bool diverged = false;
};

/// Aggregates one cell's runs. Retained iff the divergence fraction is at
/// most `threshold` and at least one run survived; the mean is taken over
/// survivors in ascending order so that it does not depend on run order.
Cell summarize_cell(std::span<const Observation> runs, double threshold);

class CellTable {
 public:
  CellTable(TableLayout layout, std::vector<Cell> cells, double threshold);

  const TableLayout& layout() const noexcept { return layout_; }
  double divergence_threshold() const noexcept { return threshold_; }
  const Cell& at(std::size_t alg, std::size_t env, std::size_t setting) const {
    return cells_[layout_.index(alg, env, setting)];
  }
  const std::vector<Cell>& cells() const noexcept { return cells_; }

  bool operator==(const CellTable&) const = default;

 private:
  TableLayout layout_;
  std::vector<Cell> cells_;
  double threshold_ = 0.10;
};

CellTable build_cells(const RunSet& runs, double threshold = 0.10);

}  // namespace hps
