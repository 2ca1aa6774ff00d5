#include <cstdio>
#include <filesystem>
#include <random>
#include <regex>

#include "doctest.h"
#include "hpsens/error.hpp"
#include "hpsens/plane.hpp"
#include "support/fixtures.hpp"

using namespace hps;

namespace {

PlanePoint at(double phi, double perf, std::string label = "p") { return PlanePoint{std::move(label), phi, perf, {}}; }

Region delta(double ds, double dp) { return classify_region(at(0.4, 0.6), at(0.4 + ds, 0.6 + dp)); }

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

struct Marker {
  std::string label;
  double cx, cy;
};

std::vector<Marker> markers(const std::string& svg) {
  static const std::regex re(R"re(<circle class="point" data-label="([^"]*)" cx="([-0-9.]+)" cy="([-0-9.]+)")re");
  std::vector<Marker> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
    out.push_back({(*it)[1], std::stod((*it)[2]), std::stod((*it)[3])});
  return out;
}

}  // namespace

TEST_CASE("canonical deltas") {
  CHECK(delta(-0.1, 0.1) == Region::R1);
  CHECK(delta(0.1, 0.2) == Region::R2);
  CHECK(delta(0.2, 0.1) == Region::R4);
  CHECK(delta(0.1, -0.1) == Region::R5);
  CHECK(delta(-0.2, -0.1) == Region::R3);
  CHECK(delta(-0.1, -0.2) == Region::Unclassified);
  CHECK(delta(0.0, 0.0) == Region::Boundary);
  CHECK(classify_region(at(0.3, 0.7), at(0.3, 0.7)) == Region::Boundary);
}

TEST_CASE("edge conventions") {
  // Using a reference at the origin so the deltas are exact.
  auto cls = [](double ds, double dp) { return classify_region(at(0, 0), at(ds, dp)); };
  CHECK(cls(0.0, 0.5) == Region::R1);
  CHECK(cls(-0.5, 0.0) == Region::R1);
  CHECK(cls(0.5, 0.5) == Region::R4);
  CHECK(cls(0.5, 0.0) == Region::R5);
  CHECK(cls(0.0, -0.5) == Region::R5);
  CHECK(cls(-0.5, -0.5) == Region::Unclassified);
  CHECK(cls(1e-13, -1e-13) == Region::Boundary);
  CHECK(cls(2e-12, 0.0) == Region::R5);
}

TEST_CASE("the seven predicates partition the plane") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> grid(-4, 4);
  for (int i = 0; i < 20000; ++i) {
    // Half continuous, half on a lattice that hits the axes and the diagonal.
    const double ds = i % 2 ? u(rng) : 0.25 * grid(rng);
    const double dp = i % 2 ? u(rng) : 0.25 * grid(rng);
    const auto truth = region_predicates(ds, dp);
    CHECK(std::count(truth.begin(), truth.end(), true) == 1);
  }
}

TEST_CASE("regions are invariant to common positive scaling about the reference") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const PlanePoint ref = at(0.25, 0.5);
  for (int i = 0; i < 2000; ++i) {
    const double ds = u(rng), dp = u(rng);
    const Region base = classify_region(ref, at(ref.phi + ds, ref.perf + dp), 0.0);
    for (double c : {1e-3, 0.5, 7.0})
      CHECK(classify_region(at(0, 0), at(c * ds, c * dp), 0.0) ==
            classify_region(at(0, 0), at(ds, dp), 0.0));
    (void)base;
  }
}

TEST_CASE("single point at the reference") {
  const PlanePoint ref = at(0.3, 0.95, "ppo");
  const std::string svg = render_plane_svg({ref}, ref);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  const auto m = markers(svg);
  REQUIRE(m.size() == 1);
  CHECK(m[0].cx == doctest::Approx(320.0));
  CHECK(m[0].cy == doctest::Approx(320.0));
  // The identity line passes through the reference marker.
  static const std::regex line(R"re(class="identity" x1="([-0-9.]+)" y1="([-0-9.]+)" x2="([-0-9.]+)" y2="([-0-9.]+)")re");
  std::smatch mt;
  REQUIRE(std::regex_search(svg, mt, line));
  const double x1 = std::stod(mt[1]), y1 = std::stod(mt[2]), x2 = std::stod(mt[3]), y2 = std::stod(mt[4]);
  const double cross = (x2 - x1) * (m[0].cy - y1) - (y2 - y1) * (m[0].cx - x1);
  CHECK(std::abs(cross) / std::hypot(x2 - x1, y2 - y1) < 0.5);
}

TEST_CASE("marker positions follow the affine axis transform") {
  const PlanePoint ref = at(0.30, 0.95, "ppo");
  const std::vector<PlanePoint> points = {ref, at(0.10, 0.80, "a2c"), at(0.45, 1.05, "dqn")};
  const auto m = markers(render_plane_svg(points, ref));
  REQUIRE(m.size() == 3);
  // Largest displacement is |0.10 - 0.30| = 0.20; the span adds 10%.
  const double half = 0.22;
  const double px_per_unit = (320.0 - 70.0) / half;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(m[i].label == points[i].label);
    CHECK(std::abs(m[i].cx - (320.0 + (points[i].phi - ref.phi) * px_per_unit)) < 0.5);
    CHECK(std::abs(m[i].cy - (320.0 - (points[i].perf - ref.perf) * px_per_unit)) < 0.5);
  }
}

TEST_CASE("structure: regions, labels, error bars") {
  IntervalPair iv;
  iv.sens_lo = 0.2;
  iv.sens_hi = 0.4;
  iv.perf_lo = 0.9;
  iv.perf_hi = 1.0;
  PlanePoint ref = at(0.3, 0.95, "ppo");
  ref.interval = iv;
  PlanePoint other = at(0.1, 0.7, "a<b");
  other.interval = iv;
  const std::string svg = render_plane_svg({ref, other, at(0.5, 0.5, "plain")}, ref);
  CHECK(count(svg, "class=\"errorbar\"") == 8);
  CHECK(count(svg, "class=\"region\"") == 5);
  for (const char* id : {"R1", "R2", "R3", "R4", "R5"}) CHECK(svg.find(std::string("id=\"") + id + "\"") != std::string::npos);
  CHECK(svg.find(">hyperparameter sensitivity<") != std::string::npos);
  CHECK(svg.find(">per-environment tuned score<") != std::string::npos);
  CHECK(svg.find("a&lt;b") != std::string::npos);
  CHECK(svg == render_plane_svg({ref, other, at(0.5, 0.5, "plain")}, ref));
}

TEST_CASE("file output and errors") {
  const auto path = std::filesystem::temp_directory_path() / "hpsens_plane_test.svg";
  const PlanePoint ref = at(0.3, 0.9, "ppo");
  render_plane({ref}, ref, path);
  CHECK(hps::testing::read_text(path.string()) == render_plane_svg({ref}, ref));
  std::filesystem::remove(path);
  try {
    render_plane({ref}, ref, "/nonexistent-dir/x.svg");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoFailure);
  }
  CHECK_THROWS_AS(render_plane({}, ref, path), Error);
}

TEST_CASE("points csv") {
  const PlanePoint ref = at(0.3, 0.9, "ppo");
  const std::string csv = plane_points_csv({ref, at(0.2, 1.0, "sac")}, ref);
  CHECK(csv == "label,phi,perf,region,sens_lo,sens_hi,perf_lo,perf_hi\n"
               "ppo,0.3,0.9,Boundary,,,,\n"
               "sac,0.2,1,R1,,,,\n");
}
