#include "hpsens/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "hpsens/bootstrap.hpp"
#include "hpsens/dimensionality.hpp"
#include "hpsens/error.hpp"
#include "hpsens/plane.hpp"
#include "hpsens/report.hpp"
#include "hpsens/scoring.hpp"
#include "hpsens/sensitivity.hpp"
#include "hpsens/synthgen.hpp"
#include "hpsens/transforms.hpp"

namespace hps::cli {

namespace {

namespace fs = std::filesystem;

struct PipelineFlags {
  std::string runs;
  std::string manifest;
  std::string metric = "auc";
  double div_threshold = 0.10;
  double q_lo = 5.0;
  double q_hi = 95.0;
  std::vector<std::string> algs;
};

struct BootstrapFlags {
  std::string out;
  std::size_t replicates = 10000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  bool freeze_norms = false;
  std::size_t workers = 0;
};

struct Loaded {
  RunSet runs;
  OrderedJson input;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f, bool with_quantiles) {
  cmd->add_option("--runs", f.runs, "Run records (.jsonl or .csv)");
  cmd->add_option("--manifest", f.manifest, "TOML-style axis manifest");
  cmd->add_option("--metric", f.metric, "auc or final:<window>")->capture_default_str();
  cmd->add_option("--div-threshold", f.div_threshold, "Drop cells diverging more often than this")->capture_default_str();
  if (with_quantiles) {
    cmd->add_option("--q-lo", f.q_lo, "Lower normalization percentile")->capture_default_str();
    cmd->add_option("--q-hi", f.q_hi, "Upper normalization percentile")->capture_default_str();
  }
  cmd->add_option("--algs", f.algs, "Algorithms to report (default: all)")->delimiter(',');
}

void add_bootstrap_flags(CLI::App* cmd, BootstrapFlags& b) {
  cmd->add_option("--bootstrap-out", b.out, "Write bootstrap intervals to this JSON file");
  cmd->add_option("--bootstrap", b.replicates, "Bootstrap replicates")->capture_default_str();
  cmd->add_option("--alpha", b.alpha, "Interval level is 1 - alpha")->capture_default_str();
  cmd->add_option("--seed", b.seed, "Master seed")->capture_default_str();
  cmd->add_flag("--freeze-norms", b.freeze_norms, "Reuse full-data norms in every replicate");
  cmd->add_option("--workers", b.workers, "Worker threads (0 = all cores)")->capture_default_str();
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::IoFailure, "cannot write '" + path + "'");
  file << text;
  if (!file) throw Error(ErrorKind::IoFailure, "failed while writing '" + path + "'");
}

std::string dump(const OrderedJson& doc) { return doc.dump(2) + "\n"; }

void validate_pipeline(const PipelineFlags& f, bool with_quantiles) {
  if (f.runs.empty()) invalid("--runs <file> is required");
  PerfMetric::parse(f.metric);
  if (!(f.div_threshold >= 0.0 && f.div_threshold <= 1.0)) invalid("--div-threshold must lie in [0, 1]");
  if (with_quantiles && !(f.q_lo > 0.0 && f.q_hi < 100.0 && f.q_lo < f.q_hi))
    invalid("--q-lo/--q-hi need 0 < q-lo < q-hi < 100");
}

void validate_bootstrap(const BootstrapFlags& b) {
  if (b.replicates < 1) invalid("--bootstrap must be at least 1");
  if (!(b.alpha > 0.0 && b.alpha < 1.0)) invalid("--alpha must lie in (0, 1)");
}

Loaded load(const PipelineFlags& f) {
  Loaded loaded;
  std::optional<HyperSpace> manifest;
  const std::string bytes = read_file(f.runs);
  OrderedJson input{{"runs", f.runs}, {"runs_digest", content_digest(bytes)}};
  if (!f.manifest.empty()) {
    const std::string text = read_file(f.manifest);
    manifest = parse_manifest(text);
    input["manifest"] = f.manifest;
    input["manifest_digest"] = content_digest(text);
  }
  std::istringstream in(bytes);
  loaded.runs = parse_runs(in, format_for_path(f.runs), PerfMetric::parse(f.metric), manifest);
  if (loaded.runs.empty()) throw Error(ErrorKind::InvalidArgument, "'" + f.runs + "' contains no runs");
  loaded.input = std::move(input);
  return loaded;
}

std::vector<std::string> selected_algs(const PipelineFlags& f, const RunSet& runs) {
  const auto all = runs.algorithms();
  if (f.algs.empty()) return all;
  for (const auto& a : f.algs)
    if (std::find(all.begin(), all.end(), a) == all.end()) invalid("--algs names unknown algorithm '" + a + "'");
  return f.algs;
}

OrderedJson pipeline_config(const PipelineFlags& f, bool with_quantiles) {
  OrderedJson cfg{{"metric", f.metric}, {"div_threshold", f.div_threshold}};
  if (with_quantiles) {
    cfg["q_lo"] = f.q_lo;
    cfg["q_hi"] = f.q_hi;
  }
  if (!f.algs.empty()) cfg["algs"] = f.algs;
  return cfg;
}

OrderedJson envelope(const std::string& command, OrderedJson config, OrderedJson input) {
  return OrderedJson{{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                     {"command", command},
                     {"config", std::move(config)},
                     {"input", std::move(input)}};
}

BootstrapOptions bootstrap_options(const PipelineFlags& f, const BootstrapFlags& b) {
  BootstrapOptions o;
  o.replicates = b.replicates;
  o.alpha = b.alpha;
  o.seed = b.seed;
  o.freeze_norms = b.freeze_norms;
  o.divergence_threshold = f.div_threshold;
  o.q_lo = f.q_lo;
  o.q_hi = f.q_hi;
  o.workers = b.workers;
  return o;
}

OrderedJson bootstrap_config(const BootstrapFlags& b) {
  return {{"replicates", b.replicates}, {"alpha", b.alpha}, {"seed", b.seed}, {"freeze_norms", b.freeze_norms}};
}

ScoreTable score_runs(const RunSet& runs, const PipelineFlags& f) {
  const CellTable cells = build_cells(runs, f.div_threshold);
  return normalize(cells, env_percentiles(cells, f.q_lo, f.q_hi));
}

int cmd_ingest(const PipelineFlags& f, const std::string& cells_out, const std::string& out_path, std::ostream& out) {
  validate_pipeline(f, false);
  const Loaded loaded = load(f);
  const CellTable cells = build_cells(loaded.runs, f.div_threshold);
  std::size_t observed = 0;
  std::size_t retained = 0;
  std::size_t diverged_runs = 0;
  for (const auto& c : cells.cells()) {
    if (c.n_runs > 0) ++observed;
    if (c.retained) ++retained;
    diverged_runs += c.n_diverged;
  }
  OrderedJson axes = OrderedJson::array();
  for (const auto& axis : loaded.runs.space().axes()) {
    OrderedJson values = OrderedJson::array();
    for (const auto& v : axis.values) values.push_back(axis_value_json(v));
    axes.push_back({{"name", axis.name}, {"values", values}});
  }
  auto doc = envelope("ingest", pipeline_config(f, false), loaded.input);
  doc["summary"] = {{"runs", loaded.runs.size()},
                    {"diverged_runs", diverged_runs},
                    {"algorithms", loaded.runs.algorithms()},
                    {"environments", loaded.runs.environments()},
                    {"axes", axes},
                    {"settings", loaded.runs.space().setting_count()},
                    {"cells_observed", observed},
                    {"cells_retained", retained},
                    {"cells_dropped", observed - retained}};
  if (!cells_out.empty()) write_output(cells_out, cells_csv(cells), out);
  write_output(out_path, dump(doc), out);
  return kExitOk;
}

int cmd_score(const PipelineFlags& f, const std::string& norms_out, const std::string& out_path, std::ostream& out) {
  validate_pipeline(f, true);
  const Loaded loaded = load(f);
  const CellTable cells = build_cells(loaded.runs, f.div_threshold);
  const EnvNorms norms = env_percentiles(cells, f.q_lo, f.q_hi);
  const ScoreTable scores = normalize(cells, norms);
  if (!norms_out.empty()) {
    auto doc = envelope("score", pipeline_config(f, true), loaded.input);
    doc["norms"] = to_json(norms);
    write_output(norms_out, dump(doc), out);
  }
  write_output(out_path, scores_csv(scores, cells), out);
  return kExitOk;
}

int cmd_sensitivity(const PipelineFlags& f, const BootstrapFlags& b, const std::string& out_path, std::ostream& out) {
  validate_pipeline(f, true);
  validate_bootstrap(b);
  const Loaded loaded = load(f);
  const auto algs = selected_algs(f, loaded.runs);
  const ScoreTable scores = score_runs(loaded.runs, f);
  auto doc = envelope("sensitivity", pipeline_config(f, true), loaded.input);
  OrderedJson reports = OrderedJson::array();
  for (const auto& alg : algs) reports.push_back(to_json(sensitivity(scores, alg), scores.layout().space));
  doc["reports"] = std::move(reports);
  if (!b.out.empty()) {
    const auto intervals = bootstrap_metrics(loaded.runs, algs, bootstrap_options(f, b));
    auto cfg = pipeline_config(f, true);
    cfg["bootstrap"] = bootstrap_config(b);
    auto boot = envelope("sensitivity", cfg, loaded.input);
    OrderedJson list = OrderedJson::array();
    for (const auto& alg : algs) list.push_back(to_json(intervals.at(alg)));
    boot["intervals"] = std::move(list);
    write_output(b.out, dump(boot), out);
  }
  write_output(out_path, dump(doc), out);
  return kExitOk;
}

int cmd_loo(const PipelineFlags& f, const BootstrapFlags& b, const std::string& out_path, std::ostream& out) {
  validate_pipeline(f, true);
  validate_bootstrap(b);
  const Loaded loaded = load(f);
  const auto algs = selected_algs(f, loaded.runs);
  const ScoreTable scores = score_runs(loaded.runs, f);
  const auto loo = leave_one_out(scores, algs);
  auto doc = envelope("loo", pipeline_config(f, true), loaded.input);
  OrderedJson by_env = OrderedJson::object();
  for (const auto& [env, reports] : loo) {
    OrderedJson list = OrderedJson::array();
    for (const auto& r : reports) list.push_back(to_json(r, scores.layout().space));
    by_env[env] = std::move(list);
  }
  doc["left_out"] = std::move(by_env);
  if (!b.out.empty()) {
    auto cfg = pipeline_config(f, true);
    cfg["bootstrap"] = bootstrap_config(b);
    auto boot = envelope("loo", cfg, loaded.input);
    OrderedJson by_env_iv = OrderedJson::object();
    const auto& envs = scores.layout().environments;
    for (const auto& left_out : envs) {
      auto opts = bootstrap_options(f, b);
      for (const auto& e : envs)
        if (e != left_out) opts.env_scope.push_back(e);
      const auto intervals = bootstrap_metrics(loaded.runs, algs, opts);
      OrderedJson list = OrderedJson::array();
      for (const auto& alg : algs) list.push_back(to_json(intervals.at(alg)));
      by_env_iv[left_out] = {{"intervals", std::move(list)}};
    }
    boot["left_out"] = std::move(by_env_iv);
    write_output(b.out, dump(boot), out);
  }
  write_output(out_path, dump(doc), out);
  return kExitOk;
}

int cmd_dimensionality(const PipelineFlags& f, double dim_threshold, const std::string& csv_out,
                       const std::string& out_path, std::ostream& out) {
  validate_pipeline(f, true);
  if (!(dim_threshold > 0.0 && dim_threshold <= 1.0)) invalid("--dim-threshold must lie in (0, 1]");
  const Loaded loaded = load(f);
  const auto algs = selected_algs(f, loaded.runs);
  const ScoreTable scores = score_runs(loaded.runs, f);
  std::vector<DimCurve> curves;
  for (const auto& alg : algs) curves.push_back(dim_curve(scores, alg, dim_threshold));
  auto cfg = pipeline_config(f, true);
  cfg["dim_threshold"] = dim_threshold;
  auto doc = envelope("dimensionality", cfg, loaded.input);
  OrderedJson list = OrderedJson::array();
  for (const auto& c : curves) list.push_back(to_json(c));
  doc["curves"] = std::move(list);
  if (!csv_out.empty()) write_output(csv_out, dim_curves_csv(curves), out);
  write_output(out_path, dump(doc), out);
  return kExitOk;
}

OrderedJson read_json(const std::string& path, const char* flag) {
  const std::string text = read_file(path);
  try {
    return OrderedJson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string(flag) + " '" + path + "' is not valid JSON: " + e.what());
  }
}

int cmd_plane(const std::string& sens_path, const std::string& boot_path, const std::string& ref_label,
              const std::string& svg_out, const std::string& points_csv, std::ostream& out) {
  if (sens_path.empty())
    invalid("plane needs the sensitivity report: pass --sensitivity <file> produced by `hpsens sensitivity`");
  if (ref_label.empty()) invalid("plane needs --ref <algorithm>");
  if (svg_out.empty()) invalid("plane needs --out <file.svg>");
  const OrderedJson sens = read_json(sens_path, "--sensitivity");
  std::optional<OrderedJson> boot;
  if (!boot_path.empty()) boot = read_json(boot_path, "--bootstrap-json");
  const auto points = plane_points_from_reports(sens, boot);
  auto ref = std::find_if(points.begin(), points.end(), [&](const PlanePoint& p) { return p.label == ref_label; });
  if (ref == points.end()) invalid("--ref '" + ref_label + "' is not in the sensitivity report");
  render_plane(points, *ref, svg_out);
  if (!points_csv.empty()) write_output(points_csv, plane_points_csv(points, *ref), out);
  OrderedJson regions = OrderedJson::object();
  for (const auto& p : points) regions[p.label] = std::string(to_string(classify_region(*ref, p)));
  OrderedJson input{{"sensitivity", sens_path}, {"sensitivity_digest", content_digest(sens.dump())}};
  if (boot) {
    input["bootstrap"] = boot_path;
    input["bootstrap_digest"] = content_digest(boot->dump());
  }
  auto doc = envelope("plane", {{"ref", ref_label}, {"out", svg_out}}, input);
  doc["regions"] = std::move(regions);
  out << dump(doc);
  return kExitOk;
}

int cmd_synth(const std::string& spec_path, std::uint64_t seed, double dim_threshold, const std::string& runs_out,
              const std::string& truth_out, std::ostream& out) {
  if (spec_path.empty()) invalid("synth needs --spec <file>");
  if (!(dim_threshold > 0.0 && dim_threshold <= 1.0)) invalid("--dim-threshold must lie in (0, 1]");
  const std::string text = read_file(spec_path);
  const auto spec = synth::parse_spec(text);
  auto [runs, truth] = synth::generate(spec, seed, dim_threshold);
  std::ostringstream jsonl;
  write_runs_jsonl(runs, jsonl);
  write_output(runs_out, jsonl.str(), out);
  if (!truth_out.empty()) {
    auto doc = envelope("synth", {{"seed", seed}, {"dim_threshold", dim_threshold}},
                        {{"spec", spec_path}, {"spec_digest", content_digest(text)}});
    doc["truth"] = to_json(truth);
    write_output(truth_out, dump(doc), out);
  }
  return kExitOk;
}

int cmd_selfcheck(std::ostream& out) {
  bool all = true;
  for (const auto& r : transforms::selfcheck()) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) out << " (" << r.detail << ")";
    out << '\n';
    all = all && r.passed;
  }
  return all ? kExitOk : kExitComputation;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperparameter sensitivity analysis of sweep results", std::string(kToolName)};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  PipelineFlags pf;
  BootstrapFlags bf;
  std::string out_path;
  std::string cells_out;
  std::string norms_out;
  std::string csv_out;
  double dim_threshold = 0.95;
  std::string sens_path, boot_path, ref_label, points_csv;
  std::string spec_path, truth_out;
  std::uint64_t synth_seed = 0;

  auto* ingest = app.add_subcommand("ingest", "Validate and summarize a run file");
  add_pipeline_flags(ingest, pf, false);
  ingest->add_option("--cells-out", cells_out, "Write the cell table as CSV");
  ingest->add_option("--out", out_path, "Summary JSON (default stdout)");

  auto* score = app.add_subcommand("score", "Normalized environment scores as CSV");
  add_pipeline_flags(score, pf, true);
  score->add_option("--norms-out", norms_out, "Write per-environment percentile anchors as JSON");
  score->add_option("--out", out_path, "Score CSV (default stdout)");

  auto* sens = app.add_subcommand("sensitivity", "Hyperparameter sensitivity per algorithm");
  add_pipeline_flags(sens, pf, true);
  add_bootstrap_flags(sens, bf);
  sens->add_option("--out", out_path, "Report JSON (default stdout)");

  auto* loo = app.add_subcommand("loo", "Sensitivity with each environment left out");
  add_pipeline_flags(loo, pf, true);
  add_bootstrap_flags(loo, bf);
  loo->add_option("--out", out_path, "Report JSON (default stdout)");

  auto* dim = app.add_subcommand("dimensionality", "Best-subset tuning curves and effective dimensionality");
  add_pipeline_flags(dim, pf, true);
  dim->add_option("--dim-threshold", dim_threshold, "Fraction of the per-environment tuned score")->capture_default_str();
  dim->add_option("--csv", csv_out, "Write (alg, size, subset, score) CSV");
  dim->add_option("--out", out_path, "Report JSON (default stdout)");

  auto* plane = app.add_subcommand("plane", "Render the performance-sensitivity plane as SVG");
  plane->add_option("--sensitivity", sens_path, "Report written by `sensitivity`");
  plane->add_option("--bootstrap-json", boot_path, "Intervals written by `sensitivity --bootstrap-out`");
  plane->add_option("--ref", ref_label, "Reference algorithm at the center");
  plane->add_option("--out", out_path, "SVG output path");
  plane->add_option("--points-csv", points_csv, "Write plotted points as CSV");

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic sweep with known ground truth");
  synth_cmd->add_option("--spec", spec_path, "Synthetic spec (TOML-style)");
  synth_cmd->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--dim-threshold", dim_threshold, "Threshold for the true dimensionality")->capture_default_str();
  synth_cmd->add_option("--out", out_path, "Runs JSONL (default stdout)");
  synth_cmd->add_option("--truth", truth_out, "Ground-truth JSON");

  auto* transforms_cmd = app.add_subcommand("transforms", "Normalization transform utilities");
  transforms_cmd->require_subcommand(1);
  auto* selfcheck = transforms_cmd->add_subcommand("selfcheck", "Run the transform invariant suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(pf, cells_out, out_path, out);
    if (score->parsed()) return cmd_score(pf, norms_out, out_path, out);
    if (sens->parsed()) return cmd_sensitivity(pf, bf, out_path, out);
    if (loo->parsed()) return cmd_loo(pf, bf, out_path, out);
    if (dim->parsed()) return cmd_dimensionality(pf, dim_threshold, csv_out, out_path, out);
    if (plane->parsed()) return cmd_plane(sens_path, boot_path, ref_label, out_path, points_csv, out);
    if (synth_cmd->parsed()) return cmd_synth(spec_path, synth_seed, dim_threshold, out_path, truth_out, out);
    if (selfcheck->parsed()) return cmd_selfcheck(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_validation_error(e.kind()) ? kExitValidation : kExitComputation;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed report input: " << e.what() << '\n';
    return kExitValidation;
  }
  err << "error: no subcommand\n";
  return kExitValidation;
}

}  // namespace hps::cli
