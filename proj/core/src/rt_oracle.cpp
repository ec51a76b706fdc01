#include "a2g/rt_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "a2g/error.hpp"

namespace a2g {
namespace {

// Largest parameter t in [0, 1] at which segment a->b touches segment c->d,
// or a negative value when they are disjoint.
double last_contact(Point2 a, Point2 b, Point2 c, Point2 d) {
  const Point2 r = b - a;
  const Point2 s = d - c;
  const double denom = cross(r, s);
  const Point2 ca = c - a;
  if (denom != 0.0) {
    const double t = cross(ca, s) / denom;
    const double u = cross(ca, r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return -1.0;
    return t;
  }
  if (cross(ca, r) != 0.0) return -1.0;
  const double rr = dot(r, r);
  if (rr == 0.0) return -1.0;
  const double t0 = dot(ca, r) / rr;
  const double t1 = dot(d - a, r) / rr;
  const double lo = std::max(0.0, std::min(t0, t1));
  const double hi = std::min(1.0, std::max(t0, t1));
  return lo <= hi ? hi : -1.0;
}

}  // namespace

bool ray_blocked_by(Point2 ue, const AbsState& abs, const Building& building) {
  const Box& bb = building.bbox();
  if (std::max(ue.x, abs.position.x) < bb.min.x || std::min(ue.x, abs.position.x) > bb.max.x ||
      std::max(ue.y, abs.position.y) < bb.min.y || std::min(ue.y, abs.position.y) > bb.max.y) {
    return false;
  }
  const std::span<const Point2> base = building.base();
  const std::size_t n = base.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = last_contact(abs.position, ue, base[i], base[(i + 1) % n]);
    if (t < 0.0) continue;
    if (abs.height * (1.0 - t) <= building.height()) return true;
  }
  return false;
}

LinkState los_at_point(Point2 ue, const AbsState& abs, std::span<const Building> buildings) {
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    const Building& b = buildings[i];
    if (b.bbox().contains(ue) && locate(ue, b.base(), 0.0) == Location::Inside) {
      throw InvalidQuery("query point lies inside building " + std::to_string(i));
    }
  }
  for (const Building& b : buildings) {
    if (ray_blocked_by(ue, abs, b)) return LinkState::Nlos;
  }
  return LinkState::Los;
}

RtLabels segment_route_rt(const Route& route, double samples_per_meter, const AbsState& abs,
                          std::span<const Building> buildings) {
  if (!(samples_per_meter > 0.0)) throw InvalidArgument("samples per meter must be positive");
  const double length = route.length();
  const auto m = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(length * samples_per_meter)) + 1);
  RtLabels out;
  out.sample_arclengths.reserve(m);
  out.labels.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double s = k + 1 == m ? length : length * static_cast<double>(k) / static_cast<double>(m - 1);
    out.sample_arclengths.push_back(s);
    out.labels.push_back(los_at_point(route.point_at(s), abs, buildings));
  }
  return out;
}

MismatchReport compare_labels(const LabeledSegments& gbsp, const RtLabels& rt, double epsilon) {
  MismatchReport report;
  for (std::size_t k = 0; k < rt.labels.size(); ++k) {
    const double s = rt.sample_arclengths[k];
    if (gbsp.distance_to_boundary(s) <= epsilon) {
      ++report.excluded;
      continue;
    }
    ++report.compared;
    const LinkState g = gbsp.label_at(s);
    if (g != rt.labels[k]) report.mismatches.push_back({k, s, g, rt.labels[k]});
  }
  return report;
}

}  // namespace a2g
