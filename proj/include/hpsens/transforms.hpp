#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hps::transforms {

/// sign(x) * ln(|x| + 1)
double symlog(double x) noexcept;
/// sign(x) * (exp(|x|) - 1); inverse of symlog.
double symexp(double x) noexcept;

/// Critic-side pairing: regress on symlog(target), read values through symexp.
inline double symlog_target(double target) noexcept { return symlog(target); }
inline double symexp_prediction(double raw_output) noexcept { return symexp(raw_output); }

/// Elementwise symlog of an observation vector.
std::vector<double> observation_symlog(std::span<const double> x);

/// (a_i - mean) / (std + eps) with the population standard deviation.
std::vector<double> zero_mean_normalize(std::span<const double> batch, double eps = 1e-8);

/// Per-dimension running mean / sum of squared deviations (Welford).
struct RunningMoments {
  std::size_t count = 0;
  std::vector<double> mean;
  std::vector<double> m2;
  double eps = 1e-8;

  std::size_t dims() const noexcept { return mean.size(); }
  /// m2 / count; zero before the first update.
  std::vector<double> variance() const;
  void update(std::span<const double> x);
};

struct NormalizedObservation {
  std::vector<double> value;
  RunningMoments state;
};

/// Folds x into the moments, then returns (x - mean) / (sqrt(variance) + eps).
/// An empty state adopts the dimension of the first observation.
NormalizedObservation observation_normalize(RunningMoments state, std::span<const double> x);

/// EMA-tracked spread of (q_lo, q_hi) return percentiles used to scale advantages.
struct PercentileScaler {
  double decay = 0.99;
  std::optional<double> lower_bound;  // set for the lower-bounded variant
  std::optional<double> ema_lo;
  std::optional<double> ema_hi;
  double q_lo = 5.0;
  double q_hi = 95.0;

  static PercentileScaler plain(double decay = 0.99) {
    PercentileScaler s;
    s.decay = decay;
    return s;
  }
  static PercentileScaler lower_bounded(double bound = 1.0, double decay = 0.99) {
    PercentileScaler s;
    s.decay = decay;
    s.lower_bound = bound;
    return s;
  }
  /// Current divisor; throws ZeroDenominator for a zero plain spread.
  double denominator() const;
};

struct ScaledAdvantages {
  std::vector<double> advantages;
  PercentileScaler state;
};

/// Updates the EMAs with this batch's return percentiles (the first batch
/// seeds them directly) and divides the advantages by the resulting spread,
/// clamped from below by the bound in the lower-bounded variant.
ScaledAdvantages percentile_scale(PercentileScaler state, std::span<const double> returns_batch,
                                  std::span<const double> advantages);

struct SelfCheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant suite behind `transforms selfcheck`.
std::vector<SelfCheckResult> selfcheck();

}  // namespace hps::transforms
