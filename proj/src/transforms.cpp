#include "hpsens/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "hpsens/error.hpp"
#include "hpsens/quantile.hpp"

namespace hps::transforms {

double symlog(double x) noexcept { return std::copysign(std::log1p(std::abs(x)), x); }

double symexp(double x) noexcept { return std::copysign(std::expm1(std::abs(x)), x); }

std::vector<double> observation_symlog(std::span<const double> x) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](double v) { return symlog(v); });
  return out;
}

std::vector<double> zero_mean_normalize(std::span<const double> batch, double eps) {
  if (batch.empty()) throw Error(ErrorKind::EmptyBatch, "cannot normalize an empty batch");
  const auto n = static_cast<double>(batch.size());
  const double mean = std::accumulate(batch.begin(), batch.end(), 0.0) / n;
  double ss = 0.0;
  for (double a : batch) ss += (a - mean) * (a - mean);
  const double denom = std::sqrt(ss / n) + eps;
  std::vector<double> out(batch.size());
  std::transform(batch.begin(), batch.end(), out.begin(), [&](double a) { return (a - mean) / denom; });
  return out;
}

std::vector<double> RunningMoments::variance() const {
  std::vector<double> var(m2.size(), 0.0);
  if (count == 0) return var;
  for (std::size_t i = 0; i < m2.size(); ++i) var[i] = m2[i] / static_cast<double>(count);
  return var;
}

void RunningMoments::update(std::span<const double> x) {
  if (count == 0 && mean.empty()) {
    mean.assign(x.size(), 0.0);
    m2.assign(x.size(), 0.0);
  }
  if (x.size() != mean.size())
    throw Error(ErrorKind::DimensionMismatch, "observation has " + std::to_string(x.size()) +
                                                  " dimensions, state has " + std::to_string(mean.size()));
  ++count;
  const auto n = static_cast<double>(count);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = x[i] - mean[i];
    mean[i] += delta / n;
    m2[i] += delta * (x[i] - mean[i]);
  }
}

NormalizedObservation observation_normalize(RunningMoments state, std::span<const double> x) {
  state.update(x);
  const auto var = state.variance();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - state.mean[i]) / (std::sqrt(var[i]) + state.eps);
  return {std::move(out), std::move(state)};
}

double PercentileScaler::denominator() const {
  if (!ema_lo || !ema_hi) throw Error(ErrorKind::InvalidArgument, "percentile scaler has not seen a batch yet");
  const double spread = *ema_hi - *ema_lo;
  if (lower_bound) return std::max(*lower_bound, spread);
  if (spread == 0.0) throw Error(ErrorKind::ZeroDenominator, "percentile spread of returns is zero");
  return spread;
}

ScaledAdvantages percentile_scale(PercentileScaler state, std::span<const double> returns_batch,
                                  std::span<const double> advantages) {
  if (returns_batch.size() < 2) throw Error(ErrorKind::TooFewReturns, "percentile scaling needs at least 2 returns");
  if (!(state.decay > 0.0 && state.decay < 1.0)) throw Error(ErrorKind::InvalidArgument, "decay must lie in (0, 1)");
  if (state.lower_bound && !(*state.lower_bound > 0.0))
    throw Error(ErrorKind::InvalidArgument, "lower bound must be positive");
  std::vector<double> sorted(returns_batch.begin(), returns_batch.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = quantile_sorted(sorted, state.q_lo);
  const double hi = quantile_sorted(sorted, state.q_hi);
  if (!state.ema_lo || !state.ema_hi) {
    state.ema_lo = lo;
    state.ema_hi = hi;
  } else {
    state.ema_lo = state.decay * *state.ema_lo + (1.0 - state.decay) * lo;
    state.ema_hi = state.decay * *state.ema_hi + (1.0 - state.decay) * hi;
  }
  const double denom = state.denominator();
  std::vector<double> out(advantages.size());
  std::transform(advantages.begin(), advantages.end(), out.begin(), [&](double a) { return a / denom; });
  return {std::move(out), std::move(state)};
}

namespace {

// Deterministic pseudo-random fixture stream (LCG) so the self-check needs no seed plumbing.
std::vector<double> fixture_stream(std::size_t n, double scale, std::uint64_t state) {
  std::vector<double> out(n);
  for (auto& v : out) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    v = scale * (static_cast<double>(state >> 11) * 0x1.0p-53 - 0.3);
  }
  return out;
}

}  // namespace

std::vector<SelfCheckResult> selfcheck() {
  std::vector<SelfCheckResult> results;

  {
    double worst = 0.0;
    for (int k = 0; k <= 240; ++k) {
      const double mag = std::pow(10.0, -6.0 + 12.0 * k / 240.0);
      for (double x : {mag, -mag}) worst = std::max(worst, std::abs(symexp(symlog(x)) - x) / std::abs(x));
    }
    results.push_back({"symexp(symlog(x)) == x over |x| in [1e-6, 1e6]", worst <= 1e-9,
                       fmt::format("max relative error {:.3g}", worst)});
  }
  {
    bool ok = symlog(0.0) == 0.0;
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = -200; k <= 200; ++k) {
      const double x = std::sinh(k / 20.0);
      const double y = symlog(x);
      ok = ok && y > prev && std::abs(y) <= std::abs(x) && symlog(-x) == -y;
      prev = y;
    }
    results.push_back({"symlog odd, increasing, contracting", ok, ""});
  }
  {
    const auto batch = fixture_stream(257, 40.0, 11);
    const auto z = zero_mean_normalize(batch);
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
    double ss = 0.0;
    for (double v : z) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(z.size()));
    results.push_back({"minibatch normalization mean 0, std 1", std::abs(mean) <= 1e-12 && std::abs(sd - 1.0) <= 1e-6,
                       fmt::format("mean {:.3g}, std {:.12g}", mean, sd)});
  }
  {
    bool ok = true;
    double worst = 0.0;
    for (double c : {1e-3, 1e3}) {
      auto base = PercentileScaler::plain();
      auto scaled = PercentileScaler::plain();
      for (std::uint64_t batch = 0; batch < 20; ++batch) {
        auto ret = fixture_stream(64, 100.0, 100 + batch);
        auto adv = fixture_stream(64, 5.0, 900 + batch);
        std::vector<double> ret_c(ret), adv_c(adv);
        for (auto& v : ret_c) v *= c;
        for (auto& v : adv_c) v *= c;
        auto r1 = percentile_scale(base, ret, adv);
        auto r2 = percentile_scale(scaled, ret_c, adv_c);
        base = r1.state;
        scaled = r2.state;
        for (std::size_t i = 0; i < adv.size(); ++i)
          worst = std::max(worst, std::abs(r1.advantages[i] - r2.advantages[i]) /
                                      std::max(1e-300, std::abs(r1.advantages[i])));
      }
    }
    ok = worst <= 1e-9;
    results.push_back({"plain percentile scaling invariant to stream rescaling", ok,
                       fmt::format("max relative deviation {:.3g}", worst)});
  }
  {
    bool ok = true;
    auto plain = PercentileScaler::plain();
    auto bounded = PercentileScaler::lower_bounded(1.0);
    for (std::uint64_t batch = 0; batch < 20; ++batch) {
      auto ret = fixture_stream(64, 100.0, 300 + batch);
      auto adv = fixture_stream(64, 5.0, 700 + batch);
      auto r1 = percentile_scale(plain, ret, adv);
      auto r2 = percentile_scale(bounded, ret, adv);
      plain = r1.state;
      bounded = r2.state;
      if (plain.denominator() >= 1.0) ok = ok && r1.advantages == r2.advantages;
    }
    auto tight = PercentileScaler::lower_bounded(1.0);
    std::vector<double> ret = {0.0, 0.5 / 0.9};
    std::vector<double> adv = {2.0, -3.0};
    auto r = percentile_scale(tight, ret, adv);
    ok = ok && r.advantages == adv;
    results.push_back({"lower-bounded scaling equals plain when spread >= bound", ok, ""});
  }
  {
    const auto stream = fixture_stream(3 * 500, 7.0, 42);
    RunningMoments moments;
    for (std::size_t t = 0; t < 500; ++t) moments.update(std::span<const double>(stream).subspan(3 * t, 3));
    double worst = 0.0;
    const auto var = moments.variance();
    for (std::size_t d = 0; d < 3; ++d) {
      double mean = 0.0;
      for (std::size_t t = 0; t < 500; ++t) mean += stream[3 * t + d];
      mean /= 500.0;
      double ss = 0.0;
      for (std::size_t t = 0; t < 500; ++t) ss += (stream[3 * t + d] - mean) * (stream[3 * t + d] - mean);
      worst = std::max({worst, std::abs(moments.mean[d] - mean) / std::abs(mean),
                        std::abs(var[d] - ss / 500.0) / (ss / 500.0)});
    }
    results.push_back({"running moments match two-pass statistics", worst <= 1e-10,
                       fmt::format("max relative deviation {:.3g}", worst)});
  }
  return results;
}

}  // namespace hps::transforms
