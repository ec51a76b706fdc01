#include "a2g/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "a2g/error.hpp"
#include "a2g/overlay.hpp"

namespace a2g {

double segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return distance(p, a + d * t);
}

void Box::expand(Point2 p) {
  min.x = std::min(min.x, p.x);
  min.y = std::min(min.y, p.y);
  max.x = std::max(max.x, p.x);
  max.y = std::max(max.y, p.y);
}

Box Box::empty() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {{inf, inf}, {-inf, -inf}};
}

double signed_area(std::span<const Point2> ring) {
  double twice = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(ring[i], ring[(i + 1) % n]);
  return 0.5 * twice;
}

Box bounding_box(std::span<const Point2> points) {
  Box b = Box::empty();
  for (const Point2& p : points) b.expand(p);
  return b;
}

double area(const Polygon& polygon) {
  double a = std::abs(signed_area(polygon.outer));
  for (const Ring& hole : polygon.holes) a -= std::abs(signed_area(hole));
  return a;
}

Location locate(Point2 p, std::span<const Point2> ring, double tol) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = ring[j];
    const Point2 b = ring[i];
    if (segment_distance(p, a, b) <= tol) return Location::Boundary;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside ? Location::Inside : Location::Outside;
}

Location locate(Point2 p, const Polygon& polygon, double tol) {
  const Location outer = locate(p, polygon.outer, tol);
  if (outer != Location::Inside) return outer;
  for (const Ring& hole : polygon.holes) {
    const Location h = locate(p, hole, tol);
    if (h == Location::Inside) return Location::Outside;
    if (h == Location::Boundary) return Location::Boundary;
  }
  return Location::Inside;
}

// ---------------------------------------------------------------------------
// Region

namespace {

void orient_polygon(Polygon& poly) {
  if (signed_area(poly.outer) < 0.0) std::reverse(poly.outer.begin(), poly.outer.end());
  for (Ring& hole : poly.holes) {
    if (signed_area(hole) > 0.0) std::reverse(hole.begin(), hole.end());
  }
}

bool segments_touch(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) {
    return true;
  }
  return segment_distance(c, a, b) <= kSnapTolerance || segment_distance(d, a, b) <= kSnapTolerance ||
         segment_distance(a, c, d) <= kSnapTolerance || segment_distance(b, c, d) <= kSnapTolerance;
}

bool ring_is_simple(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    if (distance(a, b) <= kSnapTolerance) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const Point2 c = ring[j];
      const Point2 d = ring[(j + 1) % n];
      if (adjacent) {
        // Neighbouring edges may only share their common vertex.
        const Point2 shared = (j == i + 1) ? b : a;
        const Point2 other_self = (j == i + 1) ? a : b;
        const Point2 other_next = (j == i + 1) ? d : c;
        if (std::abs(orient(other_self, shared, other_next)) <= kSnapTolerance * distance(other_self, shared) &&
            dot(other_self - shared, other_next - shared) > 0.0) {
          return false;
        }
        continue;
      }
      if (segments_touch(a, b, c, d)) return false;
    }
  }
  return true;
}

bool ring_is_convex(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    const Point2 c = ring[(i + 2) % n];
    if (orient(a, b, c) < -kSnapTolerance * distance(a, c)) return false;
  }
  return true;
}

}  // namespace

Region::Region(std::vector<Polygon> polygons, Box bounds)
    : polygons_(std::move(polygons)), bounds_(bounds) {
  boxes_.reserve(polygons_.size());
  for (Polygon& p : polygons_) {
    orient_polygon(p);
    boxes_.push_back(bounding_box(p.outer));
  }
}

Region Region::full(Box bounds) {
  Polygon rect{{bounds.min, {bounds.max.x, bounds.min.y}, bounds.max, {bounds.min.x, bounds.max.y}}, {}};
  return Region({std::move(rect)}, bounds);
}

std::size_t Region::edge_count() const {
  std::size_t n = 0;
  for (const Polygon& p : polygons_) {
    n += p.outer.size();
    for (const Ring& h : p.holes) n += h.size();
  }
  return n;
}

Location Region::locate(Point2 p, double tol) const {
  for (std::size_t i = 0; i < polygons_.size(); ++i) {
    if (!boxes_[i].contains(p, tol)) continue;
    const Location loc = a2g::locate(p, polygons_[i], tol);
    if (loc != Location::Outside) return loc;
  }
  return Location::Outside;
}

// ---------------------------------------------------------------------------
// Building, AbsState, Route

Building::Building(std::vector<Point2> base, double height) : base_(std::move(base)), height_(height) {
  if (base_.size() < 3) throw InvalidArgument("building needs at least 3 base vertices");
  if (!(height_ > 0.0) || !std::isfinite(height_)) throw InvalidArgument("building height must be positive");
  for (const Point2& p : base_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidArgument("building vertex is not finite");
  }
  if (!ring_is_simple(base_)) throw InvalidArgument("building base is not a simple polygon");
  if (signed_area(base_) < 0.0) std::reverse(base_.begin(), base_.end());
  bbox_ = bounding_box(base_);
  convex_ = ring_is_convex(base_);
}

AbsState::AbsState(Point2 p, double h) : position(p), height(h) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidArgument("ABS position is not finite");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("ABS height must be positive");
}

Route::Route(std::vector<Point2> waypoints) : waypoints_(std::move(waypoints)) {
  if (waypoints_.size() < 2) throw InvalidArgument("route needs at least 2 waypoints");
  cumulative_.reserve(waypoints_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    const Point2 a = waypoints_[i - 1];
    const Point2 b = waypoints_[i];
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(a.x) || !std::isfinite(a.y)) {
      throw InvalidArgument("route waypoint is not finite");
    }
    if (a == b) throw InvalidArgument("consecutive route waypoints coincide");
    cumulative_.push_back(cumulative_.back() + distance(a, b));
  }
}

Point2 Route::point_at(double s) const {
  if (s <= 0.0) return waypoints_.front();
  if (s >= length()) return waypoints_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double seg = cumulative_[k + 1] - cumulative_[k];
  const double t = (s - cumulative_[k]) / seg;
  return waypoints_[k] + (waypoints_[k + 1] - waypoints_[k]) * t;
}

// ---------------------------------------------------------------------------
// LabeledSegments

LabeledSegments::LabeledSegments(std::vector<LabeledSegment> segments) {
  for (const LabeledSegment& s : segments) {
    if (!(s.end > s.start)) continue;
    if (!segments_.empty() && segments_.back().label == s.label) {
      segments_.back().end = s.end;
    } else {
      segments_.push_back(s);
    }
  }
}

double LabeledSegments::total_length() const {
  double total = 0.0;
  for (const auto& s : segments_) total += s.length();
  return total;
}

double LabeledSegments::length_of(LinkState label) const {
  double total = 0.0;
  for (const auto& s : segments_) {
    if (s.label == label) total += s.length();
  }
  return total;
}

LinkState LabeledSegments::label_at(double s) const {
  if (segments_.empty()) return LinkState::Los;
  auto it = std::lower_bound(segments_.begin(), segments_.end(), s,
                             [](const LabeledSegment& seg, double v) { return seg.end < v; });
  if (it == segments_.end()) return segments_.back().label;
  if (it->end == s && std::next(it) != segments_.end()) {
    // Shared boundary point: closed shadows make it NLOS.
    return (it->label == LinkState::Nlos || std::next(it)->label == LinkState::Nlos) ? LinkState::Nlos
                                                                                       : it->label;
  }
  return it->label;
}

double LabeledSegments::distance_to_boundary(double s) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
    best = std::min(best, std::abs(segments_[i].end - s));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Shadow projection

Point2 project_roof_vertex(Point2 vertex, double building_height, const AbsState& abs) {
  if (building_height >= abs.height) {
    throw DegenerateProjection("roof at or above the ABS has no finite ground projection");
  }
  const double scale = abs.height / (abs.height - building_height);
  const Point2 s = (vertex - abs.position) * scale + abs.position;
  if (!std::isfinite(s.x) || !std::isfinite(s.y)) throw DegenerateProjection("non-finite roof projection");
  return s;
}

Ring clip_to_box(std::span<const Point2> ring, const Box& box) {
  Ring current(ring.begin(), ring.end());
  // Each pass clips against one side; coordinates on the cut are set exactly.
  auto pass = [&](auto inside, auto cut) {
    if (current.empty()) return;
    Ring next;
    next.reserve(current.size() + 4);
    for (std::size_t i = 0; i < current.size(); ++i) {
      const Point2 a = current[i];
      const Point2 b = current[(i + 1) % current.size()];
      const bool ia = inside(a);
      const bool ib = inside(b);
      if (ia) next.push_back(a);
      if (ia != ib) next.push_back(cut(a, b));
    }
    current = std::move(next);
  };
  pass([&](Point2 p) { return p.x >= box.min.x; },
       [&](Point2 a, Point2 b) { return Point2{box.min.x, a.y + (b.y - a.y) * (box.min.x - a.x) / (b.x - a.x)}; });
  pass([&](Point2 p) { return p.x <= box.max.x; },
       [&](Point2 a, Point2 b) { return Point2{box.max.x, a.y + (b.y - a.y) * (box.max.x - a.x) / (b.x - a.x)}; });
  pass([&](Point2 p) { return p.y >= box.min.y; },
       [&](Point2 a, Point2 b) { return Point2{a.x + (b.x - a.x) * (box.min.y - a.y) / (b.y - a.y), box.min.y}; });
  pass([&](Point2 p) { return p.y <= box.max.y; },
       [&](Point2 a, Point2 b) { return Point2{a.x + (b.x - a.x) * (box.max.y - a.y) / (b.y - a.y), box.max.y}; });

  Ring out;
  for (const Point2& p : current) {
    if (out.empty() || distance(out.back(), p) > kSnapTolerance) out.push_back(p);
  }
  while (out.size() > 1 && distance(out.front(), out.back()) <= kSnapTolerance) out.pop_back();
  if (out.size() < 3 || std::abs(signed_area(out)) <= kSnapTolerance * kSnapTolerance) return {};
  return out;
}

Ring convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw DegenerateHull("convex hull needs at least 3 distinct points");

  // Andrew's monotone chain; only strict left turns survive.
  Ring hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point2& p : pts) {
    while (k >= 2 && orient(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Point2 p = pts[i];
    while (k >= lower && orient(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);

  // Near-collinear vertices within the snap tolerance.
  bool changed = true;
  while (changed && hull.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Point2 prev = hull[(i + hull.size() - 1) % hull.size()];
      const Point2 next = hull[(i + 1) % hull.size()];
      if (segment_distance(hull[i], prev, next) <= kSnapTolerance) {
        hull.erase(hull.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (hull.size() < 3 || signed_area(hull) <= 0.0) throw DegenerateHull("all hull points are collinear");
  return hull;
}

namespace {

// Far points along rays from `apex` through `from` .. `to` (counter-clockwise
// sweep), at radius `radius`, with at most 30 degrees between samples so the
// polygon's far boundary stays outside radius * cos(15 deg).
void append_arc(Ring& out, Point2 apex, Point2 from, Point2 to, double radius, bool ccw) {
  const double a0 = std::atan2(from.y - apex.y, from.x - apex.x);
  double a1 = std::atan2(to.y - apex.y, to.x - apex.x);
  if (ccw) {
    while (a1 < a0) a1 += 2.0 * std::numbers::pi;
  } else {
    while (a1 > a0) a1 -= 2.0 * std::numbers::pi;
  }
  const double sweep = a1 - a0;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(sweep) / (std::numbers::pi / 6.0))));
  for (int k = 0; k <= steps; ++k) {
    const double a = a0 + sweep * k / steps;
    out.push_back({apex.x + radius * std::cos(a), apex.y + radius * std::sin(a)});
  }
}

double far_radius(const AbsState& abs, const Box& bounds, const Building& b) {
  Box all = bounds;
  all.expand(abs.position);
  for (const Point2& v : b.base()) all.expand(v);
  return 2.0 * (distance(all.min, all.max) + 1.0);
}

Region occlusion_region(const Building& b, const AbsState& abs, const Box& bounds, ShadowMethod method) {
  if (locate(abs.position, b.base()) != Location::Outside) return Region::full(bounds);
  const double radius = far_radius(abs, bounds, b);
  const auto base = b.base();
  std::vector<Polygon> pieces;
  auto keep = [&](const Ring& ring) {
    Ring clipped = clip_to_box(ring, bounds);
    if (!clipped.empty()) pieces.push_back({std::move(clipped), {}});
  };

  if (b.is_convex() && method != ShadowMethod::WallFaces) {
    // Tangent vertices: extreme angular positions seen from the ABS.
    std::size_t right = 0;
    std::size_t left = 0;
    for (std::size_t i = 1; i < base.size(); ++i) {
      if (orient(abs.position, base[right], base[i]) < 0.0) right = i;
      if (orient(abs.position, base[left], base[i]) > 0.0) left = i;
    }
    Ring poly(base.begin(), base.end());
    append_arc(poly, abs.position, base[right], base[left], radius, true);
    keep(convex_hull(poly));
  } else {
    if (bounds.contains(b.bbox().min) && bounds.contains(b.bbox().max)) {
      pieces.push_back(b.footprint());
    } else {
      for (Polygon& p : overlay::combine(std::vector<Polygon>{b.footprint()}, Region::full(bounds).polygons(),
                                         overlay::Op::Intersection)) {
        pieces.push_back(std::move(p));
      }
    }
    for (std::size_t i = 0; i < base.size(); ++i) {
      const Point2 a = base[i];
      const Point2 c = base[(i + 1) % base.size()];
      if (std::abs(orient(abs.position, a, c)) <= kSnapTolerance * distance(a, c)) continue;
      Ring wedge{a, c};
      // Sweep from c back to a the short way round.
      append_arc(wedge, abs.position, c, a, radius, orient(abs.position, a, c) < 0.0);
      keep(convex_hull(wedge));
    }
  }
  if (pieces.size() == 1) return Region(std::move(pieces), bounds);
  return Region(overlay::unite(pieces), bounds);
}

}  // namespace

Region building_shadow(const Building& b, const AbsState& abs, const Box& bounds, ShadowMethod method) {
  if (method == ShadowMethod::ConvexHull && !b.is_convex()) {
    throw InvalidArgument("convex-hull shadow requires a convex footprint");
  }
  if (b.height() >= abs.height) return occlusion_region(b, abs, bounds, method);

  const auto base = b.base();
  std::vector<Point2> roof;
  roof.reserve(base.size());
  for (const Point2& v : base) roof.push_back(project_roof_vertex(v, b.height(), abs));

  if (method == ShadowMethod::ConvexHull || (method == ShadowMethod::Auto && b.is_convex())) {
    std::vector<Point2> pts(base.begin(), base.end());
    pts.insert(pts.end(), roof.begin(), roof.end());
    return Region({Polygon{convex_hull(pts), {}}}, bounds);
  }

  std::vector<Polygon> pieces{b.footprint()};
  for (std::size_t i = 0; i < base.size(); ++i) {
    const std::size_t j = (i + 1) % base.size();
    Ring quad{base[i], base[j], roof[j], roof[i]};
    if (std::abs(signed_area(quad)) <= kSnapTolerance * (distance(base[i], base[j]) + distance(base[i], roof[i]))) {
      continue;
    }
    pieces.push_back({std::move(quad), {}});
  }
  return Region(overlay::unite(pieces), bounds);
}

Region union_shadows(std::span<const Region> shadows, const Box& bounds) {
  const Region box_region = Region::full(bounds);
  std::vector<Polygon> pieces;
  for (const Region& shadow : shadows) {
    for (const Polygon& poly : shadow.polygons()) {
      const Box bb = bounding_box(poly.outer);
      if (bounds.contains(bb.min) && bounds.contains(bb.max)) {
        pieces.push_back(poly);
      } else if (poly.holes.empty() && ring_is_convex(poly.outer)) {
        Ring clipped = clip_to_box(poly.outer, bounds);
        if (!clipped.empty()) pieces.push_back({std::move(clipped), {}});
      } else {
        for (Polygon& p : overlay::combine(std::span<const Polygon>(&poly, 1), box_region.polygons(),
                                           overlay::Op::Intersection)) {
          pieces.push_back(std::move(p));
        }
      }
    }
  }
  if (pieces.empty()) return Region(bounds);
  return Region(overlay::unite(pieces), bounds);
}

Region los_map(const Region& outdoor, const Region& total_shadow) { return subtract(outdoor, total_shadow); }

double polygon_area(const Region& region) {
  double total = 0.0;
  for (const Polygon& p : region.polygons()) total += area(p);
  return std::max(total, 0.0);
}

LosProbability los_probability(const Region& total_shadow, const Region& outdoor) {
  const double outdoor_area = polygon_area(outdoor);
  if (!(outdoor_area > 0.0)) throw InvalidEnvironment("outdoor area is zero");
  const double shadowed = polygon_area(intersect(total_shadow, outdoor));
  const double nlos = std::clamp(shadowed / outdoor_area, 0.0, 1.0);
  return {1.0 - nlos, nlos};
}

LabeledSegments segment_route(const Route& route, const Region& total_shadow) {
  const auto wp = route.waypoints();
  const auto cum = route.cumulative();
  std::vector<Box> boxes;
  boxes.reserve(total_shadow.polygons().size());
  for (const Polygon& p : total_shadow.polygons()) boxes.push_back(bounding_box(p.outer));

  std::vector<LabeledSegment> pieces;
  std::vector<double> ts;
  for (std::size_t k = 0; k + 1 < wp.size(); ++k) {
    const Point2 a = wp[k];
    const Point2 b = wp[k + 1];
    const Point2 d = b - a;
    const double len = norm(d);
    Box leg{{std::min(a.x, b.x), std::min(a.y, b.y)}, {std::max(a.x, b.x), std::max(a.y, b.y)}};

    ts.assign({0.0, 1.0});
    auto add_param = [&](double along) {
      if (along > 0.0 && along < len) ts.push_back(along / len);
    };
    auto scan_ring = [&](const Ring& ring) {
      for (std::size_t i = 0; i < ring.size(); ++i) {
        const Point2 c = ring[i];
        const Point2 e = ring[(i + 1) % ring.size()];
        const Point2 s = e - c;
        // Signed distances of the edge endpoints from the route leg's line.
        const double dc = cross(d, c - a) / len;
        const double de = cross(d, e - a) / len;
        if (std::abs(dc) <= kSnapTolerance) add_param(dot(c - a, d) / len);
        if (std::abs(de) <= kSnapTolerance) add_param(dot(e - a, d) / len);
        if ((dc > kSnapTolerance && de < -kSnapTolerance) || (dc < -kSnapTolerance && de > kSnapTolerance)) {
          const Point2 x = c + s * (dc / (dc - de));
          // Keep only crossings within the leg (with tolerance at its ends).
          const double along = dot(x - a, d) / len;
          if (along >= -kSnapTolerance && along <= len + kSnapTolerance) add_param(along);
        }
      }
    };
    for (std::size_t pi = 0; pi < total_shadow.polygons().size(); ++pi) {
      if (!boxes[pi].overlaps(leg, kSnapTolerance)) continue;
      const Polygon& poly = total_shadow.polygons()[pi];
      scan_ring(poly.outer);
      for (const Ring& hole : poly.holes) scan_ring(hole);
    }
    std::sort(ts.begin(), ts.end());
    // Merge parameters closer than the snap tolerance; the leg ends stay exact.
    std::vector<double> cuts{0.0};
    for (double t : ts) {
      if ((t - cuts.back()) * len > kSnapTolerance) cuts.push_back(t);
    }
    if ((1.0 - cuts.back()) * len <= kSnapTolerance && cuts.size() > 1) cuts.back() = 1.0;
    if (cuts.back() != 1.0) cuts.push_back(1.0);

    const double s0 = cum[k];
    const double s1 = cum[k + 1];
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      const double start = s0 + cuts[i - 1] * len;
      const double end = (i + 1 == cuts.size()) ? s1 : s0 + cuts[i] * len;
      const Point2 mid = a + d * (0.5 * (cuts[i - 1] + cuts[i]));
      const LinkState label = total_shadow.contains(mid) ? LinkState::Nlos : LinkState::Los;
      pieces.push_back({start, end, label});
    }
  }
  return LabeledSegments(std::move(pieces));
}

}  // namespace a2g
