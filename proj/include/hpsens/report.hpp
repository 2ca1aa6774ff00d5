#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hpsens/bootstrap.hpp"
#include "hpsens/dimensionality.hpp"
#include "hpsens/plane.hpp"
#include "hpsens/sensitivity.hpp"
#include "hpsens/synthgen.hpp"
#include "json.hpp"

namespace hps {

inline constexpr std::string_view kToolName = "hpsens";
inline constexpr std::string_view kToolVersion = "0.1.0";

using OrderedJson = nlohmann::ordered_json;

/// "fnv1a64:<16 hex digits>" over the raw bytes.
std::string content_digest(std::string_view bytes);

OrderedJson axis_value_json(const AxisValue& value);
OrderedJson setting_json(const HyperSpace& space, const SettingCoord& coord);

OrderedJson to_json(const SensitivityReport& report, const HyperSpace& space);
OrderedJson to_json(const IntervalPair& interval);
OrderedJson to_json(const DimCurve& curve);
OrderedJson to_json(const EnvNorms& norms);
OrderedJson to_json(const synth::GroundTruth& truth);

/// alg,env,hp.<axis>...,n_runs,n_diverged,mean_perf,retained for every cell that saw a run.
std::string cells_csv(const CellTable& cells);
/// alg,env,hp.<axis>...,gamma for every cell that saw a run; gamma empty when dropped.
std::string scores_csv(const ScoreTable& scores, const CellTable& cells);
/// alg,size,subset,score with subsets joined by '+'.
std::string dim_curves_csv(const std::vector<DimCurve>& curves);

/// One JSON object per run in the layout ingested by load_runs.
void write_runs_jsonl(const RunSet& runs, std::ostream& out);

/// Builds plane points from a `sensitivity` report and, optionally, the
/// matching bootstrap report. Throws InvalidArgument on schema mismatch.
std::vector<PlanePoint> plane_points_from_reports(const OrderedJson& sensitivity,
                                                  const std::optional<OrderedJson>& bootstrap);

}  // namespace hps
