#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace a2g {

/// Snap tolerance (meters) used by every boolean operation and boundary test.
inline constexpr double kSnapTolerance = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {a.x * s, a.y * s}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
/// Twice the signed area of triangle (a, b, c); positive when counter-clockwise.
constexpr double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
/// Distance from p to the closed segment [a, b].
double segment_distance(Point2 p, Point2 a, Point2 b);

/// Axis-aligned rectangle; also used for the target area A.
struct Box {
  Point2 min;
  Point2 max;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  double area() const { return width() * height(); }
  bool contains(Point2 p, double tol = 0.0) const {
    return p.x >= min.x - tol && p.x <= max.x + tol && p.y >= min.y - tol && p.y <= max.y + tol;
  }
  bool overlaps(const Box& o, double tol = 0.0) const {
    return min.x <= o.max.x + tol && o.min.x <= max.x + tol && min.y <= o.max.y + tol &&
           o.min.y <= max.y + tol;
  }
  void expand(Point2 p);
  static Box empty();
  static Box square(double side) { return {{0.0, 0.0}, {side, side}}; }
};

/// Closed ring stored without repeating the first vertex.
using Ring = std::vector<Point2>;

double signed_area(std::span<const Point2> ring);
Box bounding_box(std::span<const Point2> points);

/// Simple polygon: counter-clockwise outer ring plus clockwise holes.
struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

double area(const Polygon& polygon);

enum class Location { Outside, Boundary, Inside };

/// Classify p against a ring (holes ignored); Boundary when within tol of an edge.
Location locate(Point2 p, std::span<const Point2> ring, double tol = kSnapTolerance);
Location locate(Point2 p, const Polygon& polygon, double tol = kSnapTolerance);

/// A set of interior-disjoint polygons inside a rectangular target area.
///
/// Rings are reoriented on construction (outer CCW, holes CW). Pairwise
/// disjointness is the caller's contract; every operation in this library
/// that produces a Region guarantees it.
class Region {
public:
  Region() = default;
  explicit Region(Box bounds) : bounds_(bounds) {}
  Region(std::vector<Polygon> polygons, Box bounds);

  /// The whole rectangle as a single polygon.
  static Region full(Box bounds);

  const std::vector<Polygon>& polygons() const { return polygons_; }
  const Box& bounds() const { return bounds_; }
  bool empty() const { return polygons_.empty(); }
  /// Total number of ring edges, outer and hole rings alike.
  std::size_t edge_count() const;

  Location locate(Point2 p, double tol = kSnapTolerance) const;
  /// Closed-set membership: boundary points count as contained.
  bool contains(Point2 p) const { return locate(p) != Location::Outside; }

private:
  std::vector<Polygon> polygons_;
  std::vector<Box> boxes_;
  Box bounds_{};
};

/// Vertical prism with a simple polygonal base and a flat roof.
class Building {
public:
  /// Throws InvalidArgument unless the base has >= 3 vertices, is simple and height > 0.
  /// The base is stored counter-clockwise.
  Building(std::vector<Point2> base, double height);

  std::size_t vertex_count() const { return base_.size(); }
  std::span<const Point2> base() const { return base_; }
  double height() const { return height_; }
  const Box& bbox() const { return bbox_; }
  bool is_convex() const { return convex_; }
  Polygon footprint() const { return Polygon{base_, {}}; }

private:
  std::vector<Point2> base_;
  double height_;
  Box bbox_;
  bool convex_;
};

/// Aerial base station pose: ground projection plus hovering height.
struct AbsState {
  Point2 position;
  double height = 0.0;

  AbsState() = default;
  /// Throws InvalidArgument unless height > 0 and coordinates are finite.
  AbsState(Point2 position, double height);
};

/// Piecewise-linear user route through consecutive waypoints.
class Route {
public:
  /// Throws InvalidArgument for fewer than two waypoints or repeated consecutive ones.
  explicit Route(std::vector<Point2> waypoints);

  std::span<const Point2> waypoints() const { return waypoints_; }
  double length() const { return cumulative_.back(); }
  /// Arc length at each waypoint; starts at 0.
  std::span<const double> cumulative() const { return cumulative_; }
  /// Point at arc length s, clamped to [0, length].
  Point2 point_at(double s) const;

private:
  std::vector<Point2> waypoints_;
  std::vector<double> cumulative_;
};

enum class LinkState { Los, Nlos };

inline const char* to_string(LinkState s) { return s == LinkState::Los ? "LOS" : "NLOS"; }

struct LabeledSegment {
  double start = 0.0;
  double end = 0.0;
  LinkState label = LinkState::Los;

  double length() const { return end - start; }
};

/// Contiguous LOS/NLOS partition of [0, route length]; neighbours alternate labels.
class LabeledSegments {
public:
  LabeledSegments() = default;
  /// Merges equal-label neighbours and drops empty pieces; the input must be contiguous.
  explicit LabeledSegments(std::vector<LabeledSegment> segments);

  const std::vector<LabeledSegment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  double total_length() const;
  double length_of(LinkState label) const;
  /// Label at arc length s. A point shared by two segments is NLOS (closed shadows).
  LinkState label_at(double s) const;
  /// Distance from s to the nearest interior segment boundary (infinity if none).
  double distance_to_boundary(double s) const;

private:
  std::vector<LabeledSegment> segments_;
};

// ---------------------------------------------------------------------------
// Shadow projection

/// Ground projection of a roof vertex as seen from the ABS.
/// Throws DegenerateProjection when building_height >= abs.height.
Point2 project_roof_vertex(Point2 vertex, double building_height, const AbsState& abs);

enum class ShadowMethod {
  Auto,       ///< convex hull for convex footprints below the ABS, wall faces otherwise
  WallFaces,  ///< footprint united with one quadrilateral per wall face
  ConvexHull  ///< hull of base + projected roof vertices; convex footprints only
};

/// Ground shadow of one building. Buildings at or above the ABS height cast an
/// unbounded occlusion wedge, returned clipped to `bounds`.
Region building_shadow(const Building& building, const AbsState& abs, const Box& bounds,
                       ShadowMethod method = ShadowMethod::Auto);

/// Union of building shadows, clipped to `bounds`.
Region union_shadows(std::span<const Region> shadows, const Box& bounds);

/// LOS map: outdoor area minus the total shadow.
Region los_map(const Region& outdoor, const Region& total_shadow);

struct LosProbability {
  double los;
  double nlos;
};

/// Area-ratio LOS/NLOS probability over the outdoor area.
/// Throws InvalidEnvironment when the outdoor area is zero.
LosProbability los_probability(const Region& total_shadow, const Region& outdoor);

/// Split the route into LOS and NLOS stretches; boundary points are NLOS.
LabeledSegments segment_route(const Route& route, const Region& total_shadow);

/// Shoelace area over every polygon (outer minus holes).
double polygon_area(const Region& region);

/// Counter-clockwise convex hull without collinear vertices.
/// Throws DegenerateHull when the points span no area.
Ring convex_hull(std::span<const Point2> points);

/// Sutherland-Hodgman clip of a convex ring against a box; empty when disjoint.
Ring clip_to_box(std::span<const Point2> ring, const Box& box);

}  // namespace a2g
