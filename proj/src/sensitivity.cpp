#include "hpsens/sensitivity.hpp"

#include <algorithm>
#include <limits>

#include "hpsens/error.hpp"

namespace hps {

namespace {

std::size_t require_algorithm(const TableLayout& layout, const std::string& alg) {
  auto a = layout.algorithm_index(alg);
  if (!a) throw Error(ErrorKind::InvalidArgument, "unknown algorithm '" + alg + "'");
  return *a;
}

}  // namespace

std::vector<std::size_t> resolve_scope(const TableLayout& layout, EnvScope scope) {
  std::vector<std::size_t> envs;
  if (scope.empty()) {
    for (std::size_t e = 0; e < layout.environments.size(); ++e) envs.push_back(e);
  } else {
    for (const auto& name : scope) {
      auto e = layout.environment_index(name);
      if (!e) throw Error(ErrorKind::InvalidArgument, "unknown environment '" + name + "'");
      envs.push_back(*e);
    }
    std::sort(envs.begin(), envs.end());
    envs.erase(std::unique(envs.begin(), envs.end()), envs.end());
  }
  if (envs.empty()) throw Error(ErrorKind::InvalidArgument, "no environments in scope");
  return envs;
}

PerEnvTuned per_env_tuned(const ScoreTable& scores, const std::string& alg, EnvScope scope) {
  const auto& layout = scores.layout();
  const std::size_t a = require_algorithm(layout, alg);
  const auto envs = resolve_scope(layout, scope);
  PerEnvTuned out;
  double total = 0.0;
  for (std::size_t e : envs) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_s = 0;
    bool found = false;
    for (std::size_t s = 0; s < layout.space.setting_count(); ++s) {
      const auto& g = scores.gamma(a, e, s);
      if (g && (!found || *g > best)) {
        best = *g;
        best_s = s;
        found = true;
      }
    }
    if (!found)
      throw Error(ErrorKind::NoRetainedSettings,
                  "algorithm '" + alg + "' has no retained setting in environment '" + layout.environments[e] + "'");
    total += best;
    out.argmax.emplace_back(layout.environments[e], layout.space.coord_of(best_s));
  }
  out.score = total / static_cast<double>(envs.size());
  return out;
}

CrossEnvTuned cross_env_tuned(const ScoreTable& scores, const std::string& alg, EnvScope scope) {
  const auto& layout = scores.layout();
  const std::size_t a = require_algorithm(layout, alg);
  const auto envs = resolve_scope(layout, scope);
  CrossEnvTuned out;
  bool found = false;
  for (std::size_t s = 0; s < layout.space.setting_count(); ++s) {
    double total = 0.0;
    bool eligible = true;
    for (std::size_t e : envs) {
      const auto& g = scores.gamma(a, e, s);
      if (!g) {
        eligible = false;
        break;
      }
      total += *g;
    }
    if (!eligible) continue;
    ++out.eligible_count;
    const double mean = total / static_cast<double>(envs.size());
    if (!found || mean > out.score) {
      out.score = mean;
      out.argmax_linear = s;
      found = true;
    }
  }
  if (!found)
    throw Error(ErrorKind::NoEligibleSetting,
                "algorithm '" + alg + "' has no setting retained in every environment in scope");
  out.argmax = layout.space.coord_of(out.argmax_linear);
  return out;
}

SensitivityReport sensitivity(const ScoreTable& scores, const std::string& alg, EnvScope scope) {
  auto first = per_env_tuned(scores, alg, scope);
  auto second = cross_env_tuned(scores, alg, scope);
  SensitivityReport report;
  report.algorithm = alg;
  report.per_env_tuned = first.score;
  report.cross_env_tuned = second.score;
  report.phi = first.score - second.score;
  report.per_env_argmax = std::move(first.argmax);
  report.cross_env_argmax = std::move(second.argmax);
  report.eligible_count = second.eligible_count;
  for (std::size_t e : resolve_scope(scores.layout(), scope)) report.env_set.push_back(scores.layout().environments[e]);
  return report;
}

std::map<std::string, std::vector<SensitivityReport>> leave_one_out(const ScoreTable& scores,
                                                                   const std::vector<std::string>& algs) {
  const auto& envs = scores.layout().environments;
  if (envs.size() < 2) throw Error(ErrorKind::InvalidArgument, "leave-one-out needs at least 2 environments");
  std::map<std::string, std::vector<SensitivityReport>> out;
  for (const auto& left_out : envs) {
    std::vector<std::string> kept;
    for (const auto& e : envs)
      if (e != left_out) kept.push_back(e);
    auto& reports = out[left_out];
    for (const auto& alg : algs) reports.push_back(sensitivity(scores, alg, kept));
  }
  return out;
}

}  // namespace hps
