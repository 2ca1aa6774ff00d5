#include <numeric>
#include <vector>

#include "doctest.h"
#include "hpsens/error.hpp"
#include "hpsens/quantile.hpp"

using hps::Error;
using hps::ErrorKind;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected hps::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("interpolated quantile on eleven evenly spaced values") {
  std::vector<double> v;
  for (int i = 0; i <= 100; i += 10) v.push_back(i);
  CHECK(hps::quantile_sorted(v, 5.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(hps::quantile_sorted(v, 95.0) == doctest::Approx(95.0).epsilon(1e-14));
  CHECK(hps::quantile_sorted(v, 0.0) == 0.0);
  CHECK(hps::quantile_sorted(v, 100.0) == 100.0);
  CHECK(hps::quantile_sorted(v, 50.0) == 50.0);
}

TEST_CASE("two-point interpolation") {
  const std::vector<double> v{0.0, 100.0};
  CHECK(hps::quantile_sorted(v, 5.0) == doctest::Approx(5.0));
  CHECK(hps::quantile_sorted(v, 95.0) == doctest::Approx(95.0));
}

TEST_CASE("unsorted input is sorted first") {
  const std::vector<double> v{100.0, 0.0, 50.0};
  CHECK(hps::quantile(v, 25.0) == doctest::Approx(25.0));
}

TEST_CASE("singleton returns its element for every rank") {
  const std::vector<double> v{3.5};
  for (double q : {0.0, 5.0, 50.0, 100.0}) CHECK(hps::quantile_sorted(v, q) == 3.5);
}

TEST_CASE("quantile is monotone in the rank") {
  std::vector<double> v{-3, -1, 0, 0, 2, 7, 7, 11};
  double prev = hps::quantile_sorted(v, 0.0);
  for (int q = 1; q <= 100; ++q) {
    const double cur = hps::quantile_sorted(v, q);
    CHECK(cur >= prev);
    prev = cur;
  }
}

TEST_CASE("errors") {
  const std::vector<double> empty;
  const std::vector<double> one{1.0};
  CHECK(kind_of([&] { hps::quantile_sorted(empty, 50.0); }) == ErrorKind::EmptySamples);
  CHECK(kind_of([&] { hps::quantile(empty, 50.0); }) == ErrorKind::EmptySamples);
  CHECK(kind_of([&] { hps::quantile_sorted(one, -1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { hps::quantile_sorted(one, 100.5); }) == ErrorKind::InvalidArgument);
}
