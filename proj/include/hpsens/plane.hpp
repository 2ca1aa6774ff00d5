#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hpsens/bootstrap.hpp"

namespace hps {

struct PlanePoint {
  std::string label;
  double phi = 0.0;
  double perf = 0.0;  // per-environment tuned score
  std::optional<IntervalPair> interval;
};

enum class Region { R1, R2, R3, R4, R5, Boundary, Unclassified };

inline constexpr std::array<Region, 7> kAllRegions = {Region::R1, Region::R2,       Region::R3,          Region::R4,
                                                      Region::R5, Region::Boundary, Region::Unclassified};

std::string_view to_string(Region region) noexcept;

/// Truth value of each region predicate for a displacement (ds, dp) from the
/// reference, in kAllRegions order. Exactly one entry is true for any input.
std::array<bool, 7> region_predicates(double ds, double dp, double tol = 1e-12) noexcept;

/// Region of `pt` relative to `ref`:
///   R1   ds <= 0, dp >= 0            less sensitive, no worse
///   R2   ds > 0, dp > ds             gain outpaces added sensitivity
///   R4   ds > 0, 0 < dp <= ds        gain paid for with more sensitivity
///   R5   ds >= 0, dp < 0 or ds > 0, dp == 0
///   R3   ds < 0, ds < dp < 0         sensitivity drops faster than performance
///   Unclassified  ds < 0, dp <= ds
/// with both |ds|, |dp| <= tol reported as Boundary.
Region classify_region(const PlanePoint& ref, const PlanePoint& pt, double tol = 1e-12);

/// Pixel geometry shared by the renderer and its tests.
struct PlaneGeometry {
  double width = 640.0;
  double height = 640.0;
  double margin = 70.0;
  double half_span = 1.0;  // data units from the reference to the plot edge, both axes
  double ref_phi = 0.0;
  double ref_perf = 0.0;

  double x(double phi) const { return width / 2.0 + (phi - ref_phi) / half_span * (width / 2.0 - margin); }
  double y(double perf) const { return height / 2.0 - (perf - ref_perf) / half_span * (height / 2.0 - margin); }
};

/// Span covering every point and interval endpoint with 10% headroom.
PlaneGeometry plane_geometry(const std::vector<PlanePoint>& points, const PlanePoint& ref);

std::string render_plane_svg(const std::vector<PlanePoint>& points, const PlanePoint& ref);
/// Writes the SVG; throws Error(IoFailure) when the file cannot be written.
void render_plane(const std::vector<PlanePoint>& points, const PlanePoint& ref, const std::filesystem::path& out);

/// label,phi,perf,region[,sens_lo,sens_hi,perf_lo,perf_hi]
std::string plane_points_csv(const std::vector<PlanePoint>& points, const PlanePoint& ref);

}  // namespace hps
