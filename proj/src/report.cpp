#include "hpsens/report.hpp"

#include <cmath>
#include <cstdint>
#include <ostream>

#include <fmt/format.h>

#include "hpsens/error.hpp"

namespace hps {

namespace {

// JSON has no infinities; the curve's infeasible points are written as null.
OrderedJson number_or_null(double v) { return std::isfinite(v) ? OrderedJson(v) : OrderedJson(nullptr); }

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string layout_header(const TableLayout& layout) {
  std::string header = "alg,env";
  for (const auto& axis : layout.space.axes()) header += ",hp." + csv_field(axis.name);
  return header;
}

std::string cell_prefix(const TableLayout& layout, std::size_t a, std::size_t e, std::size_t s) {
  std::string row = csv_field(layout.algorithms[a]) + "," + csv_field(layout.environments[e]);
  const auto coord = layout.space.coord_of(s);
  for (std::size_t i = 0; i < coord.indices.size(); ++i)
    row += "," + csv_field(format_axis_value(layout.space.axes()[i].values[coord.indices[i]]));
  return row;
}

}  // namespace

std::string content_digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("fnv1a64:{:016x}", h);
}

OrderedJson axis_value_json(const AxisValue& value) {
  if (const auto* x = std::get_if<double>(&value)) return *x;
  return std::get<std::string>(value);
}

OrderedJson setting_json(const HyperSpace& space, const SettingCoord& coord) {
  OrderedJson obj = OrderedJson::object();
  for (std::size_t i = 0; i < space.axis_count(); ++i)
    obj[space.axes()[i].name] = axis_value_json(space.axes()[i].values[coord.indices.at(i)]);
  return obj;
}

OrderedJson to_json(const SensitivityReport& report, const HyperSpace& space) {
  OrderedJson per_env = OrderedJson::object();
  for (const auto& [env, coord] : report.per_env_argmax) per_env[env] = setting_json(space, coord);
  return OrderedJson{{"algorithm", report.algorithm},
                     {"per_env_tuned", report.per_env_tuned},
                     {"cross_env_tuned", report.cross_env_tuned},
                     {"phi", report.phi},
                     {"per_env_argmax", per_env},
                     {"cross_env_argmax", setting_json(space, report.cross_env_argmax)},
                     {"eligible_count", report.eligible_count},
                     {"env_set", report.env_set}};
}

OrderedJson to_json(const IntervalPair& iv) {
  return OrderedJson{{"algorithm", iv.algorithm},
                     {"perf_lo", iv.perf_lo},
                     {"perf_hi", iv.perf_hi},
                     {"sens_lo", iv.sens_lo},
                     {"sens_hi", iv.sens_hi},
                     {"point", {{"phi", iv.point_phi}, {"per_env_tuned", iv.point_perf}}},
                     {"replicates", iv.replicates},
                     {"skipped", iv.skipped},
                     {"alpha", iv.alpha},
                     {"seed", iv.seed},
                     {"freeze_norms", iv.freeze_norms}};
}

OrderedJson to_json(const DimCurve& curve) {
  OrderedJson points = OrderedJson::array();
  for (const auto& p : curve.points)
    points.push_back({{"size", p.size}, {"best_subset", p.best_subset}, {"score", number_or_null(p.score)}});
  return OrderedJson{{"algorithm", curve.algorithm},
                     {"points", points},
                     {"per_env_tuned", curve.per_env_tuned},
                     {"threshold_fraction", curve.threshold_fraction},
                     {"d", curve.d}};
}

OrderedJson to_json(const EnvNorms& norms) {
  OrderedJson envs = OrderedJson::object();
  for (std::size_t e = 0; e < norms.environments.size(); ++e)
    envs[norms.environments[e]] = {{"p_lo", norms.norms[e].p_lo}, {"p_hi", norms.norms[e].p_hi}};
  return OrderedJson{{"q_lo", norms.q_lo}, {"q_hi", norms.q_hi}, {"environments", envs}};
}

OrderedJson to_json(const synth::GroundTruth& truth) {
  OrderedJson algs = OrderedJson::object();
  for (const auto& [name, t] : truth.algorithms) {
    OrderedJson subsets = OrderedJson::array();
    for (std::size_t s = 0; s < t.best_subsets.size(); ++s)
      subsets.push_back({{"size", s}, {"best_subset", t.best_subsets[s]}, {"score", number_or_null(t.subset_scores[s])}});
    algs[name] = {{"per_env_tuned", t.per_env_tuned},
                  {"cross_env_tuned", t.cross_env_tuned},
                  {"phi", t.phi},
                  {"d", t.d},
                  {"best_subsets", subsets}};
  }
  OrderedJson scores = OrderedJson::array();
  const auto& layout = truth.layout;
  for (std::size_t a = 0; a < layout.algorithms.size(); ++a)
    for (std::size_t e = 0; e < layout.environments.size(); ++e)
      for (std::size_t s = 0; s < layout.space.setting_count(); ++s)
        scores.push_back({{"alg", layout.algorithms[a]},
                          {"env", layout.environments[e]},
                          {"setting", setting_json(layout.space, layout.space.coord_of(s))},
                          {"gamma", truth.gammas[layout.index(a, e, s)]}});
  return OrderedJson{{"threshold", truth.threshold}, {"algorithms", algs}, {"scores", scores}};
}

std::string cells_csv(const CellTable& cells) {
  const auto& layout = cells.layout();
  std::string csv = layout_header(layout) + ",n_runs,n_diverged,mean_perf,retained\n";
  for (std::size_t a = 0; a < layout.algorithms.size(); ++a)
    for (std::size_t e = 0; e < layout.environments.size(); ++e)
      for (std::size_t s = 0; s < layout.space.setting_count(); ++s) {
        const Cell& cell = cells.at(a, e, s);
        if (cell.n_runs == 0) continue;
        csv += cell_prefix(layout, a, e, s) +
               fmt::format(",{},{},{},{}\n", cell.n_runs, cell.n_diverged,
                           cell.mean_perf ? fmt::format("{}", *cell.mean_perf) : std::string(),
                           cell.retained ? "true" : "false");
      }
  return csv;
}

std::string scores_csv(const ScoreTable& scores, const CellTable& cells) {
  const auto& layout = scores.layout();
  std::string csv = layout_header(layout) + ",gamma\n";
  for (std::size_t a = 0; a < layout.algorithms.size(); ++a)
    for (std::size_t e = 0; e < layout.environments.size(); ++e)
      for (std::size_t s = 0; s < layout.space.setting_count(); ++s) {
        if (cells.at(a, e, s).n_runs == 0) continue;
        const auto& g = scores.gamma(a, e, s);
        csv += cell_prefix(layout, a, e, s) + "," + (g ? fmt::format("{}", *g) : std::string()) + "\n";
      }
  return csv;
}

std::string dim_curves_csv(const std::vector<DimCurve>& curves) {
  std::string csv = "alg,size,subset,score\n";
  for (const auto& curve : curves)
    for (const auto& p : curve.points) {
      std::string subset;
      for (const auto& name : p.best_subset) subset += (subset.empty() ? "" : "+") + name;
      csv += fmt::format("{},{},{},{}\n", csv_field(curve.algorithm), p.size, csv_field(subset),
                         std::isfinite(p.score) ? fmt::format("{}", p.score) : std::string());
    }
  return csv;
}

void write_runs_jsonl(const RunSet& runs, std::ostream& out) {
  const auto& space = runs.space();
  for (const auto& run : runs.runs()) {
    OrderedJson row{{"alg", run.algorithm}, {"env", run.environment}, {"seed", run.seed}};
    for (std::size_t i = 0; i < space.axis_count(); ++i)
      row["hp." + space.axes()[i].name] = axis_value_json(space.axes()[i].values[run.setting.indices[i]]);
    row["perf"] = std::isfinite(run.perf) ? OrderedJson(run.perf) : OrderedJson(nullptr);
    if (run.diverged) row["diverged"] = true;
    out << row.dump() << '\n';
  }
}

std::vector<PlanePoint> plane_points_from_reports(const OrderedJson& sensitivity,
                                                  const std::optional<OrderedJson>& bootstrap) {
  if (!sensitivity.is_object() || !sensitivity.contains("reports") || !sensitivity["reports"].is_array())
    throw Error(ErrorKind::InvalidArgument, "sensitivity input lacks a 'reports' array");
  std::vector<PlanePoint> points;
  for (const auto& r : sensitivity["reports"]) {
    if (!r.contains("algorithm") || !r.contains("phi") || !r.contains("per_env_tuned"))
      throw Error(ErrorKind::InvalidArgument, "sensitivity report entry missing algorithm/phi/per_env_tuned");
    PlanePoint p;
    p.label = r["algorithm"].get<std::string>();
    p.phi = r["phi"].get<double>();
    p.perf = r["per_env_tuned"].get<double>();
    if (!std::isfinite(p.phi) || !std::isfinite(p.perf))
      throw Error(ErrorKind::InvalidArgument, "non-finite coordinates for '" + p.label + "'");
    points.push_back(std::move(p));
  }
  if (bootstrap) {
    if (!bootstrap->contains("intervals") || !(*bootstrap)["intervals"].is_array())
      throw Error(ErrorKind::InvalidArgument, "bootstrap input lacks an 'intervals' array");
    for (const auto& iv : (*bootstrap)["intervals"]) {
      const auto label = iv.at("algorithm").get<std::string>();
      for (auto& p : points)
        if (p.label == label) {
          IntervalPair pair;
          pair.algorithm = label;
          pair.perf_lo = iv.at("perf_lo").get<double>();
          pair.perf_hi = iv.at("perf_hi").get<double>();
          pair.sens_lo = iv.at("sens_lo").get<double>();
          pair.sens_hi = iv.at("sens_hi").get<double>();
          pair.point_phi = iv.at("point").at("phi").get<double>();
          pair.point_perf = iv.at("point").at("per_env_tuned").get<double>();
          pair.replicates = iv.at("replicates").get<std::size_t>();
          pair.skipped = iv.value("skipped", std::size_t{0});
          pair.alpha = iv.at("alpha").get<double>();
          pair.seed = iv.at("seed").get<std::uint64_t>();
          pair.freeze_norms = iv.value("freeze_norms", false);
          p.interval = pair;
        }
    }
  }
  return points;
}

}  // namespace hps
