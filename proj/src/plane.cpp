#include "hpsens/plane.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "hpsens/error.hpp"

namespace hps {

std::string_view to_string(Region region) noexcept {
  switch (region) {
    case Region::R1: return "R1";
    case Region::R2: return "R2";
    case Region::R3: return "R3";
    case Region::R4: return "R4";
    case Region::R5: return "R5";
    case Region::Boundary: return "Boundary";
    case Region::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

std::array<bool, 7> region_predicates(double ds, double dp, double tol) noexcept {
  const bool boundary = std::abs(ds) <= tol && std::abs(dp) <= tol;
  const bool open = !boundary;
  return {
      open && ds <= 0 && dp >= 0,                                // R1
      open && ds > 0 && dp > ds,                                 // R2
      open && ds < 0 && dp < 0 && dp > ds,                       // R3
      open && ds > 0 && dp > 0 && dp <= ds,                      // R4
      open && ((ds > 0 && dp <= 0) || (ds == 0 && dp < 0)),      // R5
      boundary,                                                  // Boundary
      open && ds < 0 && dp <= ds,                                // Unclassified
  };
}

Region classify_region(const PlanePoint& ref, const PlanePoint& pt, double tol) {
  const auto truth = region_predicates(pt.phi - ref.phi, pt.perf - ref.perf, tol);
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (truth[i]) return kAllRegions[i];
  return Region::Unclassified;  // only reachable for NaN input
}

PlaneGeometry plane_geometry(const std::vector<PlanePoint>& points, const PlanePoint& ref) {
  double extent = 0.0;
  auto grow = [&](double phi, double perf) {
    extent = std::max({extent, std::abs(phi - ref.phi), std::abs(perf - ref.perf)});
  };
  grow(ref.phi, ref.perf);
  for (const auto& p : points) {
    grow(p.phi, p.perf);
    if (p.interval) {
      grow(p.interval->sens_lo, p.interval->perf_lo);
      grow(p.interval->sens_hi, p.interval->perf_hi);
    }
  }
  PlaneGeometry geo;
  geo.half_span = extent > 0.0 ? 1.1 * extent : 1.0;
  geo.ref_phi = ref.phi;
  geo.ref_perf = ref.perf;
  return geo;
}

namespace {

std::string escape_xml(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Shade {
  const char* id;
  const char* fill;
  std::vector<std::pair<double, double>> corners;  // in units of half_span around ref
};

}  // namespace

std::string render_plane_svg(const std::vector<PlanePoint>& points, const PlanePoint& ref) {
  const PlaneGeometry geo = plane_geometry(points, ref);
  const double L = geo.half_span;
  auto px = [&](double ds) { return geo.x(ref.phi + ds); };
  auto py = [&](double dp) { return geo.y(ref.perf + dp); };

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\">\n",
      geo.width, geo.height);
  svg += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const std::vector<Shade> shades = {
      {"R1", "#b7e1b0", {{-1, 0}, {0, 0}, {0, 1}, {-1, 1}}},
      {"R2", "#cfe3f5", {{0, 0}, {1, 1}, {0, 1}}},
      {"R4", "#fbe3b8", {{0, 0}, {1, 0}, {1, 1}}},
      {"R5", "#f4b6b6", {{0, 0}, {1, 0}, {1, -1}, {0, -1}}},
      {"R3", "#e2d4f0", {{0, 0}, {-1, 0}, {-1, -1}}},
  };
  for (const auto& shade : shades) {
    std::string pts;
    for (const auto& [u, v] : shade.corners) {
      if (!pts.empty()) pts += ' ';
      pts += fmt::format("{:.3f},{:.3f}", px(u * L), py(v * L));
    }
    svg += fmt::format("<polygon class=\"region\" id=\"{}\" points=\"{}\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
                       shade.id, pts, shade.fill);
  }
  const std::vector<std::pair<const char*, std::pair<double, double>>> region_labels = {
      {"1", {-0.5, 0.5}}, {"2", {0.3, 0.7}}, {"4", {0.7, 0.3}}, {"5", {0.5, -0.5}}, {"3", {-0.7, -0.3}}};
  for (const auto& [name, at] : region_labels)
    svg += fmt::format("<text class=\"region-label\" x=\"{:.3f}\" y=\"{:.3f}\" font-size=\"18\" fill=\"#555\">{}</text>\n",
                       px(at.first * L), py(at.second * L), name);

  // Axes through the reference and the identity line shifted onto it.
  svg += fmt::format(
      "<line class=\"axis\" x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"#333\" stroke-width=\"1\"/>\n",
      px(-L), py(0), px(L), py(0));
  svg += fmt::format(
      "<line class=\"axis\" x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"#333\" stroke-width=\"1\"/>\n",
      px(0), py(-L), px(0), py(L));
  svg += fmt::format(
      "<line class=\"identity\" x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"#333\" "
      "stroke-dasharray=\"6,4\" stroke-width=\"1.5\"/>\n",
      px(-L), py(-L), px(L), py(L));

  // Frame and tick labels at the plot edges.
  svg += fmt::format(
      "<rect class=\"frame\" x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"none\" stroke=\"#000\"/>\n",
      px(-L), py(L), px(L) - px(-L), py(-L) - py(L));
  for (int k = -1; k <= 1; ++k) {
    svg += fmt::format("<text class=\"tick\" x=\"{:.3f}\" y=\"{:.3f}\" font-size=\"11\" text-anchor=\"middle\">{:.4g}</text>\n",
                       px(k * L), py(-L) + 16.0, ref.phi + k * L);
    svg += fmt::format("<text class=\"tick\" x=\"{:.3f}\" y=\"{:.3f}\" font-size=\"11\" text-anchor=\"end\">{:.4g}</text>\n",
                       px(-L) - 6.0, py(k * L) + 4.0, ref.perf + k * L);
  }
  svg += fmt::format(
      "<text class=\"axis-label\" x=\"{:.3f}\" y=\"{:.3f}\" font-size=\"14\" text-anchor=\"middle\">hyperparameter sensitivity</text>\n",
      geo.width / 2.0, geo.height - 20.0);
  svg += fmt::format(
      "<text class=\"axis-label\" x=\"{0:.3f}\" y=\"{1:.3f}\" font-size=\"14\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 {0:.3f} {1:.3f})\">per-environment tuned score</text>\n",
      20.0, geo.height / 2.0);

  for (const auto& p : points) {
    const double cx = geo.x(p.phi);
    const double cy = geo.y(p.perf);
    if (p.interval) {
      const auto& iv = *p.interval;
      const std::array<std::array<double, 2>, 4> ends = {{{geo.x(iv.sens_lo), cy},
                                                          {geo.x(iv.sens_hi), cy},
                                                          {cx, geo.y(iv.perf_lo)},
                                                          {cx, geo.y(iv.perf_hi)}}};
      for (const auto& end : ends)
        svg += fmt::format(
            "<line class=\"errorbar\" x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"#222\" stroke-width=\"1.2\"/>\n",
            cx, cy, end[0], end[1]);
    }
    const bool is_ref = p.label == ref.label;
    svg += fmt::format("<circle class=\"point\" data-label=\"{}\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"5\" fill=\"{}\"/>\n",
                       escape_xml(p.label), cx, cy, is_ref ? "#000" : "#1f5fbf");
    svg += fmt::format("<text class=\"point-label\" x=\"{:.3f}\" y=\"{:.3f}\" font-size=\"12\">{}</text>\n", cx + 7.0,
                       cy - 7.0, escape_xml(p.label));
  }
  svg += "</svg>\n";
  return svg;
}

void render_plane(const std::vector<PlanePoint>& points, const PlanePoint& ref, const std::filesystem::path& out) {
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "plane needs at least one point");
  const std::string svg = render_plane_svg(points, ref);
  std::ofstream file(out, std::ios::binary);
  if (!file) throw Error(ErrorKind::IoFailure, "cannot write '" + out.string() + "'");
  file << svg;
  if (!file) throw Error(ErrorKind::IoFailure, "failed while writing '" + out.string() + "'");
}

std::string plane_points_csv(const std::vector<PlanePoint>& points, const PlanePoint& ref) {
  std::string csv = "label,phi,perf,region,sens_lo,sens_hi,perf_lo,perf_hi\n";
  for (const auto& p : points) {
    csv += fmt::format("{},{},{},{}", p.label, p.phi, p.perf, to_string(classify_region(ref, p)));
    if (p.interval) {
      csv += fmt::format(",{},{},{},{}\n", p.interval->sens_lo, p.interval->sens_hi, p.interval->perf_lo,
                         p.interval->perf_hi);
    } else {
      csv += ",,,,\n";
    }
  }
  return csv;
}

}  // namespace hps
