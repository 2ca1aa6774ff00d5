#include "hpsens/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "hpsens/error.hpp"
#include "hpsens/quantile.hpp"
#include "hpsens/rng.hpp"
#include "hpsens/toml_lite.hpp"

namespace hps::synth {

namespace {

constexpr std::size_t kMaxOracleSettings = 1'000'000;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidArgument, "synth spec: " + what); }

const std::vector<double>& surface_of(const Environment& env, const std::string& alg) {
  auto it = env.surfaces.find(alg);
  if (it == env.surfaces.end()) invalid("environment '" + env.id + "' has no surface for '" + alg + "'");
  return it->second;
}

}  // namespace

void Spec::validate() const {
  if (algorithms.empty()) invalid("no algorithms");
  if (environments.empty()) invalid("no environments");
  if (seeds_per_cell < 1) invalid("seeds_per_cell must be at least 1");
  for (const auto& env : environments) {
    if (!(env.scale > 0.0)) invalid("environment '" + env.id + "' needs scale > 0");
    if (!(env.sigma >= 0.0)) invalid("environment '" + env.id + "' needs sigma >= 0");
    for (const auto& alg : algorithms) {
      const auto& surface = surface_of(env, alg);
      if (surface.size() != space.setting_count())
        invalid("surface of '" + alg + "' in '" + env.id + "' has " + std::to_string(surface.size()) +
                " entries, expected " + std::to_string(space.setting_count()));
    }
  }
  for (const auto& rule : divergence) {
    if (!space.contains(rule.setting)) invalid("divergence rule setting off the grid");
    if (std::find(algorithms.begin(), algorithms.end(), rule.algorithm) == algorithms.end())
      invalid("divergence rule names unknown algorithm '" + rule.algorithm + "'");
    if (std::none_of(environments.begin(), environments.end(), [&](const Environment& e) { return e.id == rule.environment; }))
      invalid("divergence rule names unknown environment '" + rule.environment + "'");
    if (!(rule.probability >= 0.0 && rule.probability <= 1.0)) invalid("divergence probability outside [0, 1]");
  }
}

GroundTruth oracle_metrics(const Spec& spec, double threshold, double q_lo, double q_hi) {
  spec.validate();
  const HyperSpace& space = spec.space;
  const std::size_t S = space.setting_count();
  if (S > kMaxOracleSettings) throw Error(ErrorKind::TooLarge, "oracle enumeration limited to 10^6 settings");
  const std::size_t n = space.axis_count();
  if (n > 20) throw Error(ErrorKind::TooLarge, "oracle pin-pattern enumeration limited to 20 axes");

  GroundTruth truth;
  truth.threshold = threshold;
  truth.layout.space = space;
  truth.layout.algorithms = spec.algorithms;
  std::sort(truth.layout.algorithms.begin(), truth.layout.algorithms.end());
  std::vector<const Environment*> envs;
  for (const auto& env : spec.environments) envs.push_back(&env);
  std::sort(envs.begin(), envs.end(), [](auto* x, auto* y) { return x->id < y->id; });
  for (auto* env : envs) truth.layout.environments.push_back(env->id);
  const std::size_t A = truth.layout.algorithms.size();
  const std::size_t E = envs.size();

  // Gamma(alg, env, s) from noiseless raw values.
  truth.gammas.assign(truth.layout.cell_count(), 0.0);
  for (std::size_t e = 0; e < E; ++e) {
    std::vector<double> raw;
    for (const auto& alg : truth.layout.algorithms)
      for (double v : surface_of(*envs[e], alg)) raw.push_back(envs[e]->scale * v + envs[e]->offset);
    const double lo = quantile(raw, q_lo);
    const double hi = quantile(raw, q_hi);
    if (!(hi > lo))
      throw Error(ErrorKind::DegenerateNormalization, "noiseless surface of '" + envs[e]->id + "' has no spread");
    for (std::size_t a = 0; a < A; ++a) {
      const auto& surface = surface_of(*envs[e], truth.layout.algorithms[a]);
      for (std::size_t s = 0; s < S; ++s)
        truth.gammas[truth.layout.index(a, e, s)] = (envs[e]->scale * surface[s] + envs[e]->offset - lo) / (hi - lo);
    }
  }

  for (std::size_t a = 0; a < A; ++a) {
    auto gamma = [&](std::size_t e, std::size_t s) { return truth.gammas[truth.layout.index(a, e, s)]; };
    AlgorithmTruth t;

    double sum_of_max = 0.0;
    for (std::size_t e = 0; e < E; ++e) {
      double best = gamma(e, 0);
      for (std::size_t s = 1; s < S; ++s) best = std::max(best, gamma(e, s));
      sum_of_max += best;
    }
    t.per_env_tuned = sum_of_max / static_cast<double>(E);

    std::size_t hstar = 0;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < S; ++s) {
      double sum = 0.0;
      for (std::size_t e = 0; e < E; ++e) sum += gamma(e, s);
      const double mean = sum / static_cast<double>(E);
      if (mean > best_mean) {
        best_mean = mean;
        hstar = s;
      }
    }
    t.cross_env_tuned = best_mean;
    t.phi = t.per_env_tuned - t.cross_env_tuned;

    // pinned bit i: coordinate i of every h^e equals h*_i; the per-environment
    // choices are otherwise independent, so each environment maximizes alone.
    const double target = threshold * t.per_env_tuned;
    const std::uint32_t patterns = 1u << n;
    std::size_t most_pinned = 0;
    bool any_feasible = false;
    t.best_subsets.assign(n + 1, {});
    t.subset_scores.assign(n + 1, -std::numeric_limits<double>::infinity());
    std::vector<bool> have(n + 1, false);
    for (std::uint32_t pinned = 0; pinned < patterns; ++pinned) {
      double sum = 0.0;
      for (std::size_t e = 0; e < E; ++e) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < S; ++s) {
          bool ok = true;
          for (std::size_t i = 0; i < n; ++i)
            if ((pinned >> i & 1u) && space.level(s, i) != space.level(hstar, i)) {
              ok = false;
              break;
            }
          if (ok) best = std::max(best, gamma(e, s));
        }
        sum += best;
      }
      const double value = sum / static_cast<double>(E);
      std::size_t pinned_count = 0;
      std::vector<std::string> free_names;
      for (std::size_t i = 0; i < n; ++i) {
        if (pinned >> i & 1u) {
          ++pinned_count;
        } else {
          free_names.push_back(space.axes()[i].name);
        }
      }
      std::sort(free_names.begin(), free_names.end());
      if (value >= target) {
        any_feasible = true;
        most_pinned = std::max(most_pinned, pinned_count);
      }
      const std::size_t free_count = n - pinned_count;
      if (!have[free_count] || value > t.subset_scores[free_count] ||
          (value == t.subset_scores[free_count] && free_names < t.best_subsets[free_count])) {
        t.subset_scores[free_count] = value;
        t.best_subsets[free_count] = std::move(free_names);
        have[free_count] = true;
      }
    }
    t.d = any_feasible ? n - most_pinned : n;
    truth.algorithms.emplace(truth.layout.algorithms[a], std::move(t));
  }
  return truth;
}

std::pair<RunSet, GroundTruth> generate(const Spec& spec, std::uint64_t seed, double threshold) {
  GroundTruth truth = oracle_metrics(spec, threshold);
  const auto& layout = truth.layout;
  std::vector<RunRecord> runs;
  runs.reserve(layout.cell_count() * spec.seeds_per_cell);
  for (std::size_t a = 0; a < layout.algorithms.size(); ++a) {
    const std::string& alg = layout.algorithms[a];
    for (std::size_t e = 0; e < layout.environments.size(); ++e) {
      const std::string& env_id = layout.environments[e];
      const Environment& env =
          *std::find_if(spec.environments.begin(), spec.environments.end(), [&](const auto& x) { return x.id == env_id; });
      const auto& surface = surface_of(env, alg);
      for (std::size_t s = 0; s < layout.space.setting_count(); ++s) {
        const SettingCoord coord = layout.space.coord_of(s);
        double p_div = 0.0;
        for (const auto& rule : spec.divergence)
          if (rule.algorithm == alg && rule.environment == env_id && rule.setting == coord) p_div = rule.probability;
        auto rng = make_stream(seed, layout.index(a, e, s));
        std::normal_distribution<double> noise(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double mean = env.scale * surface[s] + env.offset;
        for (std::size_t k = 0; k < spec.seeds_per_cell; ++k) {
          const double perf = env.sigma > 0.0 ? mean + env.sigma * noise(rng) : mean;
          const bool diverged = p_div > 0.0 && unit(rng) < p_div;
          runs.push_back(RunRecord{alg, env_id, coord, static_cast<std::int64_t>(k), perf, diverged});
        }
      }
    }
  }
  return {RunSet(layout.space, std::move(runs)), std::move(truth)};
}

namespace {

using Json = nlohmann::ordered_json;

double number_field(const Json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) invalid(std::string("'") + key + "' must be a number");
  return obj[key].get<double>();
}

AxisValue axis_value(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  invalid("axis values must be numbers or strings");
}

}  // namespace

Spec parse_spec(std::string_view text) {
  const Json doc = parse_toml_lite(text);
  Spec spec;
  spec.space = [&] {
    if (!doc.contains("axes") || !doc["axes"].is_object()) invalid("needs an [axes] table");
    std::vector<Axis> axes;
    for (auto it = doc["axes"].begin(); it != doc["axes"].end(); ++it) {
      if (!it.value().is_array()) invalid("axis '" + it.key() + "' must be an array");
      Axis axis{it.key(), {}};
      for (const auto& v : it.value()) axis.values.push_back(axis_value(v));
      axes.push_back(std::move(axis));
    }
    return HyperSpace(std::move(axes));
  }();
  if (!doc.contains("algorithms") || !doc["algorithms"].is_array()) invalid("needs an 'algorithms' array");
  for (const auto& a : doc["algorithms"]) {
    if (!a.is_string()) invalid("algorithm names must be strings");
    spec.algorithms.push_back(a.get<std::string>());
  }
  if (doc.contains("seeds_per_cell")) {
    if (!doc["seeds_per_cell"].is_number_integer() || doc["seeds_per_cell"].get<std::int64_t>() < 1)
      invalid("seeds_per_cell must be a positive integer");
    spec.seeds_per_cell = doc["seeds_per_cell"].get<std::size_t>();
  }
  if (!doc.contains("environments") || !doc["environments"].is_array()) invalid("needs [[environments]] entries");
  for (const auto& e : doc["environments"]) {
    Environment env;
    if (!e.contains("id") || !e["id"].is_string()) invalid("every environment needs a string id");
    env.id = e["id"].get<std::string>();
    env.scale = number_field(e, "scale", 1.0);
    env.offset = number_field(e, "offset", 0.0);
    env.sigma = number_field(e, "sigma", 0.0);
    if (!e.contains("surface") || !e["surface"].is_object()) invalid("environment '" + env.id + "' needs a surface table");
    for (auto it = e["surface"].begin(); it != e["surface"].end(); ++it) {
      std::vector<double> values;
      if (it.value().is_array()) {
        for (const auto& v : it.value()) {
          if (!v.is_number()) invalid("surface entries must be numbers");
          values.push_back(v.get<double>());
        }
      } else if (it.value().is_object() && it.value().contains("random_seed")) {
        const auto& gen = it.value();
        const double lo = number_field(gen, "min", 0.0);
        const double hi = number_field(gen, "max", 1.0);
        auto rng = make_stream(gen["random_seed"].get<std::uint64_t>(), 0);
        std::uniform_real_distribution<double> unit(lo, hi);
        values.resize(spec.space.setting_count());
        for (auto& v : values) v = unit(rng);
      } else {
        invalid("surface '" + it.key() + "' must be an array or { random_seed = N }");
      }
      env.surfaces.emplace(it.key(), std::move(values));
    }
    spec.environments.push_back(std::move(env));
  }
  if (doc.contains("divergence")) {
    for (const auto& r : doc["divergence"]) {
      DivergenceRule rule;
      if (!r.contains("alg") || !r.contains("env") || !r.contains("setting")) invalid("divergence rules need alg, env, setting");
      rule.algorithm = r["alg"].get<std::string>();
      rule.environment = r["env"].get<std::string>();
      rule.probability = number_field(r, "probability", 0.0);
      rule.setting.indices.assign(spec.space.axis_count(), 0);
      std::vector<bool> set(spec.space.axis_count(), false);
      for (auto it = r["setting"].begin(); it != r["setting"].end(); ++it) {
        auto axis = spec.space.find_axis(it.key());
        if (!axis) invalid("divergence rule names unknown axis '" + it.key() + "'");
        auto level = spec.space.find_value(*axis, axis_value(it.value()));
        if (!level) invalid("divergence rule value off the grid for axis '" + it.key() + "'");
        rule.setting.indices[*axis] = *level;
        set[*axis] = true;
      }
      if (std::find(set.begin(), set.end(), false) != set.end()) invalid("divergence rule must set every axis");
      spec.divergence.push_back(std::move(rule));
    }
  }
  spec.validate();
  return spec;
}

Spec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

}  // namespace hps::synth
