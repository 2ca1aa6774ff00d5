#include "hpsens/quantile.hpp"

#include <algorithm>
#include <cmath>

#include "hpsens/error.hpp"

namespace hps {

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorKind::EmptySamples, "quantile of an empty sample");
  if (!(q >= 0.0 && q <= 100.0)) throw Error(ErrorKind::InvalidArgument, "percentile rank outside [0, 100]");
  const double r = (q / 100.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(r));
  const auto hi = std::min(static_cast<std::size_t>(std::ceil(r)), sorted.size() - 1);
  const double frac = r - static_cast<double>(lo);
  if (frac == 0.0 || lo == hi) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile(std::span<const double> values, double q) {
  std::vector<double> copy(values.begin(), values.end());
  std::sort(copy.begin(), copy.end());
  return quantile_sorted(copy, q);
}

}  // namespace hps
