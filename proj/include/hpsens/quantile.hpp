#pragma once

#include <span>
#include <vector>

namespace hps {

/// Linearly interpolated quantile of already-sorted values.
///
/// For n values v_0..v_{n-1} and percentile rank q in [0, 100] the position
/// is r = (q / 100) * (n - 1) and the result v_floor(r) + frac(r) * (v_ceil(r) - v_floor(r)).
/// Throws Error(EmptySamples) on empty input and Error(InvalidArgument) when q
/// lies outside [0, 100].
double quantile_sorted(std::span<const double> sorted, double q);

/// Same estimator on unsorted input; sorts a copy.
double quantile(std::span<const double> values, double q);

}  // namespace hps
