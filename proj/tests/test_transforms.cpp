#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "hpsens/error.hpp"
#include "hpsens/transforms.hpp"

using namespace hps;
using namespace hps::transforms;

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

std::vector<double> ramp(int lo, int hi) {
  std::vector<double> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

}  // namespace

TEST_CASE("symlog examples") {
  CHECK(symlog(0.0) == 0.0);
  CHECK(symlog(std::exp(1.0) - 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(symlog(-(std::exp(1.0) - 1.0)) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(symexp(symlog(12345.678)) - 12345.678) <= 1e-9 * 12345.678);
  CHECK(symlog_target(0.0) == 0.0);
  CHECK(symlog_target(1000.0) == doctest::Approx(std::log(1001.0)).epsilon(1e-15));
  CHECK(symlog_target(1000.0) == doctest::Approx(6.9088).epsilon(1e-5));
  CHECK(symexp(1.0) == doctest::Approx(std::exp(1.0) - 1.0));
}

TEST_CASE("symlog is odd, increasing and contracting; symexp inverts it") {
  double prev = -INFINITY;
  for (int k = -300; k <= 300; ++k) {
    const double x = (k < 0 ? -1.0 : 1.0) * std::pow(10.0, std::abs(k) / 50.0 - 6.0);
    const double y = symlog(x);
    CHECK(symlog(-x) == -y);
    CHECK(std::abs(y) <= std::abs(x));
    if (k != 0) CHECK(y > prev);
    prev = y;
    CHECK(std::abs(symexp_prediction(symlog_target(x)) - x) <= 1e-9 * std::abs(x));
  }
}

TEST_CASE("observation symlog is elementwise") {
  const std::vector<double> x{-5.0, 0.0, 2.5};
  const auto y = observation_symlog(x);
  REQUIRE(y.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(y[i] == symlog(x[i]));
}

TEST_CASE("zero_mean_normalize examples") {
  const auto z = zero_mean_normalize(std::vector<double>{1, 2, 3});
  CHECK(z[0] == doctest::Approx(-1.22474).epsilon(1e-4));
  CHECK(z[1] == doctest::Approx(0.0));
  CHECK(z[2] == doctest::Approx(1.22474).epsilon(1e-4));
  CHECK(zero_mean_normalize(std::vector<double>{7, 7}) == std::vector<double>{0, 0});
  CHECK(zero_mean_normalize(std::vector<double>{5}) == std::vector<double>{0});
  CHECK(kind_of([] { zero_mean_normalize(std::vector<double>{}); }) == ErrorKind::EmptyBatch);
}

TEST_CASE("zero_mean_normalize moments on random batches") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(3.0, 40.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> b(2 + t * 7);
    for (auto& v : b) v = n(rng);
    const auto z = zero_mean_normalize(b);
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
    double ss = 0;
    for (double v : z) ss += (v - mean) * (v - mean);
    CHECK(std::abs(mean) <= 1e-12);
    CHECK(std::sqrt(ss / static_cast<double>(z.size())) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("percentile scaling of a first batch") {
  const auto returns = ramp(0, 100);
  const std::vector<double> adv{9.0};
  const auto r = percentile_scale(PercentileScaler::plain(), returns, adv);
  CHECK(*r.state.ema_lo == doctest::Approx(5.0));
  CHECK(*r.state.ema_hi == doctest::Approx(95.0));
  CHECK(r.state.denominator() == doctest::Approx(90.0));
  CHECK(r.advantages[0] == doctest::Approx(0.1));
}

TEST_CASE("later batches decay the EMAs") {
  auto s = percentile_scale(PercentileScaler::plain(0.9), ramp(0, 100), std::vector<double>{1.0}).state;
  s = percentile_scale(s, ramp(100, 200), std::vector<double>{1.0}).state;
  CHECK(*s.ema_lo == doctest::Approx(0.9 * 5.0 + 0.1 * 105.0));
  CHECK(*s.ema_hi == doctest::Approx(0.9 * 95.0 + 0.1 * 195.0));
  CHECK(*s.ema_lo <= *s.ema_hi);
}

TEST_CASE("lower-bounded variant") {
  // Batch spread 0.5 < L = 1: advantages pass through.
  const std::vector<double> returns{0.0, 0.5 / 0.9};
  const std::vector<double> adv{2.0, -3.0};
  const auto r = percentile_scale(PercentileScaler::lower_bounded(1.0), returns, adv);
  CHECK(r.state.denominator() == 1.0);
  CHECK(r.advantages == adv);
  const auto plain = percentile_scale(PercentileScaler::plain(), ramp(0, 100), adv);
  const auto bounded = percentile_scale(PercentileScaler::lower_bounded(1.0), ramp(0, 100), adv);
  CHECK(plain.advantages == bounded.advantages);
}

TEST_CASE("plain scaling is invariant to rescaling the whole stream") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0.0, 50.0);
  for (double c : {1e-3, 1e3, 7.5}) {
    auto a = PercentileScaler::plain(), b = PercentileScaler::plain();
    for (int step = 0; step < 15; ++step) {
      std::vector<double> ret(32), adv(32);
      for (auto& v : ret) v = n(rng);
      for (auto& v : adv) v = n(rng);
      std::vector<double> ret_c = ret, adv_c = adv;
      for (auto& v : ret_c) v *= c;
      for (auto& v : adv_c) v *= c;
      auto ra = percentile_scale(a, ret, adv);
      auto rb = percentile_scale(b, ret_c, adv_c);
      for (std::size_t i = 0; i < adv.size(); ++i)
        CHECK(std::abs(ra.advantages[i] - rb.advantages[i]) <= 1e-9 * std::max(1.0, std::abs(ra.advantages[i])));
      a = ra.state;
      b = rb.state;
    }
  }
}

TEST_CASE("percentile scaling errors") {
  const std::vector<double> one{1.0};
  CHECK(kind_of([&] { percentile_scale(PercentileScaler::plain(), one, one); }) == ErrorKind::TooFewReturns);
  const std::vector<double> flat{4.0, 4.0, 4.0};
  CHECK(kind_of([&] { percentile_scale(PercentileScaler::plain(), flat, one); }) == ErrorKind::ZeroDenominator);
  CHECK(percentile_scale(PercentileScaler::lower_bounded(2.0), flat, one).advantages[0] == 0.5);
}

TEST_CASE("observation normalization") {
  RunningMoments m;
  const std::vector<double> x0{1.0, -2.0, 3.0};
  auto r = observation_normalize(m, x0);
  CHECK(r.value == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(r.state.count == 1);
  const std::vector<double> bad{1.0};
  CHECK(kind_of([&] { observation_normalize(r.state, bad); }) == ErrorKind::DimensionMismatch);

  RunningMoments constant;
  for (int i = 0; i < 10; ++i) {
    auto c = observation_normalize(constant, std::vector<double>{2.5, 2.5});
    CHECK(c.value == std::vector<double>{0.0, 0.0});
    constant = c.state;
  }
  CHECK(RunningMoments{}.variance().empty());
}

TEST_CASE("running moments match the two-pass statistics") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(1000.0, 3.0);
  const std::size_t T = 2000;
  std::vector<std::vector<double>> xs(T, std::vector<double>(2));
  RunningMoments m;
  std::vector<double> last;
  for (auto& x : xs) {
    x[0] = n(rng);
    x[1] = symlog(n(rng) - 1000.0);
    auto r = observation_normalize(m, x);
    m = r.state;
    last = r.value;
  }
  for (std::size_t d = 0; d < 2; ++d) {
    double mean = 0;
    for (const auto& x : xs) mean += x[d];
    mean /= T;
    double ss = 0;
    for (const auto& x : xs) ss += (x[d] - mean) * (x[d] - mean);
    const double var = ss / T;
    CHECK(std::abs(m.mean[d] - mean) <= 1e-10 * std::abs(mean));
    CHECK(std::abs(m.variance()[d] - var) <= 1e-10 * var);
    CHECK(last[d] == doctest::Approx((xs.back()[d] - mean) / (std::sqrt(var) + 1e-8)).epsilon(1e-9));
  }
}

TEST_CASE("selfcheck suite passes") {
  const auto results = selfcheck();
  CHECK(results.size() >= 6);
  for (const auto& r : results) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}
