#include "a2g/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "a2g/error.hpp"
#include "spatial_grid.hpp"

namespace a2g::overlay {
namespace {

constexpr double kTol = kSnapTolerance;

// Merges points closer than kTol into a single node.
class NodeTable {
public:
  int insert(Point2 p) {
    const std::int64_t cx = key(p.x);
    const std::int64_t cy = key(p.y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto [lo, hi] = cells_.equal_range(hash(cx + dx, cy + dy));
        for (auto it = lo; it != hi; ++it) {
          if (distance(points_[it->second], p) <= kTol) return it->second;
        }
      }
    }
    const int id = static_cast<int>(points_.size());
    points_.push_back(p);
    cells_.emplace(hash(cx, cy), id);
    return id;
  }

  const Point2& operator[](int id) const { return points_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point2>& points() const { return points_; }

private:
  static constexpr double kCell = 4.0 * kTol;
  static std::int64_t key(double v) { return static_cast<std::int64_t>(std::floor(v / kCell)); }
  static std::uint64_t hash(std::int64_t x, std::int64_t y) {
    return static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ULL ^
           (static_cast<std::uint64_t>(y) + 0x632BE59BD9B4E019ULL);
  }

  std::vector<Point2> points_;
  std::unordered_multimap<std::uint64_t, int> cells_;
};

struct Edge {
  int from;
  int to;
  int poly;
};

struct Contribution {
  int poly;
  bool same_direction;
};

struct Fragment {
  int from;
  int to;
  std::vector<Contribution> owners;
};

struct Directed {
  int from;
  int to;
  int fragment;
};

Ring normalize_ring(const Ring& ring) {
  Ring out;
  out.reserve(ring.size());
  for (const Point2& p : ring) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return {};
    if (out.empty() || distance(out.back(), p) > kTol) out.push_back(p);
  }
  while (out.size() > 1 && distance(out.front(), out.back()) <= kTol) out.pop_back();
  return out;
}

// Removes vertices lying on the segment between their neighbours.
void drop_collinear(Ring& ring) {
  bool changed = true;
  while (changed && ring.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < ring.size() && ring.size() >= 3; ++i) {
      const Point2& prev = ring[(i + ring.size() - 1) % ring.size()];
      const Point2& next = ring[(i + 1) % ring.size()];
      if (segment_distance(ring[i], prev, next) <= kTol) {
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
}

double perimeter(const Ring& ring) {
  double total = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) total += distance(ring[i], ring[(i + 1) % ring.size()]);
  return total;
}

// Clockwise sweep from `reference` to `dir`, in (0, 2*pi].
double clockwise_angle(Point2 reference, Point2 dir) {
  double a = -std::atan2(cross(reference, dir), dot(reference, dir));
  if (a <= 0.0) a += 2.0 * std::numbers::pi;
  return a;
}

class Engine {
public:
  Engine(std::vector<Polygon> polygons, std::vector<int> groups)
      : polys_(std::move(polygons)), groups_(std::move(groups)) {}

  template <class Predicate>
  std::vector<Polygon> run(Predicate&& inside, bool single_group_union) {
    if (polys_.empty()) return {};
    normalize();
    build_edges();
    if (edges_.empty()) return {};
    split_edges();
    auto directed = classify(inside, single_group_union);
    auto rings = link(directed);
    return assemble(std::move(rings));
  }

private:
  void normalize() {
    boxes_.reserve(polys_.size());
    for (std::size_t i = 0; i < polys_.size(); ++i) {
      Polygon& poly = polys_[i];
      poly.outer = normalize_ring(poly.outer);
      if (poly.outer.size() < 3 || std::abs(signed_area(poly.outer)) <= kTol * kTol) {
        throw GeometryError("degenerate ring after snapping", i);
      }
      if (signed_area(poly.outer) < 0.0) std::reverse(poly.outer.begin(), poly.outer.end());
      for (Ring& hole : poly.holes) {
        hole = normalize_ring(hole);
        if (hole.size() < 3 || std::abs(signed_area(hole)) <= kTol * kTol) {
          throw GeometryError("degenerate hole after snapping", i);
        }
        if (signed_area(hole) > 0.0) std::reverse(hole.begin(), hole.end());
      }
      boxes_.push_back(bounding_box(poly.outer));
    }
  }

  void add_ring(const Ring& ring, int poly) {
    std::vector<int> ids;
    ids.reserve(ring.size());
    for (const Point2& p : ring) {
      const int id = nodes_.insert(p);
      if (ids.empty() || ids.back() != id) ids.push_back(id);
    }
    while (ids.size() > 1 && ids.front() == ids.back()) ids.pop_back();
    if (ids.size() < 3) throw GeometryError("ring collapsed after snapping", static_cast<std::size_t>(poly));
    for (std::size_t k = 0; k < ids.size(); ++k) {
      edges_.push_back({ids[k], ids[(k + 1) % ids.size()], poly});
    }
  }

  void build_edges() {
    for (std::size_t i = 0; i < polys_.size(); ++i) {
      add_ring(polys_[i].outer, static_cast<int>(i));
      for (const Ring& hole : polys_[i].holes) add_ring(hole, static_cast<int>(i));
    }
  }

  // Inserts crossing points as nodes, then splits every edge at every node
  // lying on it.
  void split_edges() {
    Box extent = bounding_box(nodes_.points());
    SpatialGrid grid(extent, edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      grid.insert_segment(static_cast<int>(e), nodes_[edges_[e].from], nodes_[edges_[e].to], kTol);
    }

    std::vector<std::uint64_t> pairs;
    grid.for_each_cell([&](const std::vector<int>& items) {
      for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) {
          const auto a = static_cast<std::uint64_t>(std::min(items[i], items[j]));
          const auto b = static_cast<std::uint64_t>(std::max(items[i], items[j]));
          pairs.push_back(a << 32 | b);
        }
      }
    });
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    for (std::uint64_t key : pairs) {
      const Edge& e1 = edges_[key >> 32];
      const Edge& e2 = edges_[key & 0xffffffffULL];
      if (e1.from == e2.from || e1.from == e2.to || e1.to == e2.from || e1.to == e2.to) continue;
      add_crossing(e1, e2);
    }

    SpatialGrid node_grid(extent, nodes_.size());
    for (std::size_t n = 0; n < nodes_.size(); ++n) node_grid.insert_point(static_cast<int>(n), nodes_[static_cast<int>(n)]);

    chains_.resize(edges_.size());
    std::vector<std::pair<double, int>> splits;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const Point2 a = nodes_[edges_[e].from];
      const Point2 b = nodes_[edges_[e].to];
      const Point2 d = b - a;
      const double len = norm(d);
      splits.clear();
      node_grid.visit_segment(a, b, kTol, [&](const std::vector<int>& items) {
        for (int n : items) {
          if (n == edges_[e].from || n == edges_[e].to) continue;
          const Point2 p = nodes_[n];
          const double along = dot(p - a, d) / len;
          if (along <= kTol || along >= len - kTol) continue;
          if (std::abs(cross(d, p - a)) / len > kTol) continue;
          splits.emplace_back(along, n);
        }
      });
      std::sort(splits.begin(), splits.end());
      auto& chain = chains_[e];
      chain.push_back(edges_[e].from);
      for (const auto& [along, n] : splits) {
        if (chain.back() != n) chain.push_back(n);
      }
      if (chain.back() != edges_[e].to) chain.push_back(edges_[e].to);
    }
  }

  void add_crossing(const Edge& e1, const Edge& e2) {
    const Point2 p = nodes_[e1.from];
    const Point2 r = nodes_[e1.to] - p;
    const Point2 q = nodes_[e2.from];
    const Point2 s = nodes_[e2.to] - q;
    const double lr = norm(r);
    const double ls = norm(s);
    // Signed distances of each endpoint from the other edge's supporting line.
    const double pa = cross(s, p - q) / ls;
    const double pb = cross(s, p + r - q) / ls;
    const double qa = cross(r, q - p) / lr;
    const double qb = cross(r, q + s - p) / lr;
    const bool straddle1 = (pa > kTol && pb < -kTol) || (pa < -kTol && pb > kTol);
    const bool straddle2 = (qa > kTol && qb < -kTol) || (qa < -kTol && qb > kTol);
    if (!straddle1 || !straddle2) return;
    const double t = pa / (pa - pb);
    nodes_.insert(p + r * t);
  }

  template <class Predicate>
  std::vector<Directed> classify(Predicate&& inside, bool single_group_union) {
    std::unordered_map<std::uint64_t, int> index;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto& chain = chains_[e];
      for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        const int u = chain[k];
        const int v = chain[k + 1];
        const auto key = static_cast<std::uint64_t>(std::min(u, v)) << 32 |
                         static_cast<std::uint64_t>(std::max(u, v));
        auto [it, fresh] = index.emplace(key, static_cast<int>(fragments_.size()));
        if (fresh) fragments_.push_back({u, v, {}});
        Fragment& f = fragments_[static_cast<std::size_t>(it->second)];
        f.owners.push_back({edges_[e].poly, f.from == u});
      }
    }

    Box extent = bounding_box(nodes_.points());
    SpatialGrid poly_grid(extent, polys_.size());
    for (std::size_t i = 0; i < polys_.size(); ++i) poly_grid.insert_box(static_cast<int>(i), boxes_[i]);

    std::vector<Directed> out;
    std::vector<int> seen;
    for (std::size_t fi = 0; fi < fragments_.size(); ++fi) {
      const Fragment& f = fragments_[fi];
      unsigned left = 0;
      unsigned right = 0;
      seen.clear();
      for (const Contribution& c : f.owners) {
        const unsigned bit = 1u << groups_[static_cast<std::size_t>(c.poly)];
        (c.same_direction ? left : right) |= bit;
        seen.push_back(c.poly);
      }
      const Point2 mid = (nodes_[f.from] + nodes_[f.to]) * 0.5;
      if (!(single_group_union && (left & right & 1u))) {
        const auto& candidates = poly_grid.items_at(mid);
        for (int pi : candidates) {
          if (single_group_union && (left & 1u) && (right & 1u)) break;
          const unsigned bit = 1u << groups_[static_cast<std::size_t>(pi)];
          if ((left & bit) && (right & bit)) continue;
          if (!boxes_[static_cast<std::size_t>(pi)].contains(mid)) continue;
          if (std::find(seen.begin(), seen.end(), pi) != seen.end()) continue;
          if (locate_strict(mid, polys_[static_cast<std::size_t>(pi)])) {
            left |= bit;
            right |= bit;
          }
        }
      }
      const bool in_left = inside(left);
      const bool in_right = inside(right);
      if (in_left && !in_right) out.push_back({f.from, f.to, static_cast<int>(fi)});
      if (!in_left && in_right) out.push_back({f.to, f.from, static_cast<int>(fi)});
    }
    return out;
  }

  // Even-odd test. Fragment midpoints on this polygon's boundary were already
  // accounted for through the fragment owners.
  static bool locate_strict(Point2 p, const Polygon& poly) {
    auto crossings = [&](const Ring& ring) {
      bool in = false;
      for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        const Point2 a = ring[j];
        const Point2 b = ring[i];
        if ((a.y > p.y) != (b.y > p.y)) {
          const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
          if (p.x < x) in = !in;
        }
      }
      return in;
    };
    if (!crossings(poly.outer)) return false;
    for (const Ring& hole : poly.holes) {
      if (crossings(hole)) return false;
    }
    return true;
  }

  std::vector<Ring> link(const std::vector<Directed>& directed) {
    std::vector<std::vector<int>> outgoing(nodes_.size());
    for (std::size_t i = 0; i < directed.size(); ++i) {
      outgoing[static_cast<std::size_t>(directed[i].from)].push_back(static_cast<int>(i));
    }
    std::vector<char> used(directed.size(), 0);
    std::vector<Ring> rings;
    for (std::size_t start = 0; start < directed.size(); ++start) {
      if (used[start]) continue;
      Ring ring;
      std::size_t cur = start;
      const int origin = directed[start].from;
      std::size_t guard = 0;
      while (true) {
        used[cur] = 1;
        ring.push_back(nodes_[directed[cur].from]);
        const int at = directed[cur].to;
        if (at == origin) break;
        const Point2 back = nodes_[directed[cur].from] - nodes_[at];
        int best = -1;
        double best_angle = std::numeric_limits<double>::infinity();
        for (int cand : outgoing[static_cast<std::size_t>(at)]) {
          if (used[static_cast<std::size_t>(cand)]) continue;
          const double a = clockwise_angle(back, nodes_[directed[static_cast<std::size_t>(cand)].to] - nodes_[at]);
          if (a < best_angle) {
            best_angle = a;
            best = cand;
          }
        }
        if (best < 0 || ++guard > directed.size()) {
          const Fragment& f = fragments_[static_cast<std::size_t>(directed[cur].fragment)];
          throw GeometryError("open boundary while linking overlay rings",
                              static_cast<std::size_t>(f.owners.front().poly));
        }
        cur = static_cast<std::size_t>(best);
      }
      rings.push_back(std::move(ring));
    }
    return rings;
  }

  static std::vector<Polygon> assemble(std::vector<Ring> rings) {
    std::vector<Polygon> outers;
    std::vector<Box> outer_boxes;
    std::vector<double> outer_areas;
    std::vector<Ring> holes;
    for (Ring& ring : rings) {
      drop_collinear(ring);
      if (ring.size() < 3) continue;
      const double a = signed_area(ring);
      if (std::abs(a) <= kTol * perimeter(ring)) continue;
      if (a > 0.0) {
        outer_boxes.push_back(bounding_box(ring));
        outer_areas.push_back(a);
        outers.push_back({std::move(ring), {}});
      } else {
        holes.push_back(std::move(ring));
      }
    }
    std::vector<std::size_t> order(outers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return outer_areas[a] < outer_areas[b]; });

    for (Ring& hole : holes) {
      const Box hb = bounding_box(hole);
      const double hole_area = -signed_area(hole);
      std::size_t fallback = outers.size();
      bool placed = false;
      for (std::size_t oi : order) {
        if (outer_areas[oi] < hole_area - kTol || !outer_boxes[oi].contains(hb.min, kTol) ||
            !outer_boxes[oi].contains(hb.max, kTol)) {
          continue;
        }
        if (fallback == outers.size()) fallback = oi;
        Location verdict = Location::Boundary;
        for (std::size_t k = 0; k < hole.size() && verdict == Location::Boundary; ++k) {
          verdict = locate(hole[k], outers[oi].outer);
          if (verdict == Location::Boundary) {
            verdict = locate((hole[k] + hole[(k + 1) % hole.size()]) * 0.5, outers[oi].outer);
          }
        }
        if (verdict == Location::Inside || verdict == Location::Boundary) {
          outers[oi].holes.push_back(std::move(hole));
          placed = true;
          break;
        }
      }
      if (!placed && fallback < outers.size()) outers[fallback].holes.push_back(std::move(hole));
    }
    return outers;
  }

  std::vector<Polygon> polys_;
  std::vector<int> groups_;
  std::vector<Box> boxes_;
  NodeTable nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> chains_;
  std::vector<Fragment> fragments_;
};

}  // namespace

std::vector<Polygon> unite(std::span<const Polygon> polygons) {
  Engine engine(std::vector<Polygon>(polygons.begin(), polygons.end()),
                std::vector<int>(polygons.size(), 0));
  return engine.run([](unsigned mask) { return (mask & 1u) != 0; }, true);
}

std::vector<Polygon> combine(std::span<const Polygon> a, std::span<const Polygon> b, Op op) {
  std::vector<Polygon> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::vector<int> groups(a.size(), 0);
  groups.resize(all.size(), 1);
  Engine engine(std::move(all), std::move(groups));
  switch (op) {
    case Op::Union:
      return engine.run([](unsigned m) { return m != 0; }, false);
    case Op::Intersection:
      return engine.run([](unsigned m) { return m == 3u; }, false);
    case Op::Difference:
      return engine.run([](unsigned m) { return m == 1u; }, false);
  }
  return {};
}

}  // namespace a2g::overlay

namespace a2g {

Region intersect(const Region& a, const Region& b) {
  if (a.empty() || b.empty()) return Region(a.bounds());
  return Region(overlay::combine(a.polygons(), b.polygons(), overlay::Op::Intersection), a.bounds());
}

Region subtract(const Region& a, const Region& b) {
  if (a.empty() || b.empty()) return a;
  return Region(overlay::combine(a.polygons(), b.polygons(), overlay::Op::Difference), a.bounds());
}

Region unite(const Region& a, const Region& b) {
  if (a.empty()) return Region(b.polygons(), a.bounds());
  if (b.empty()) return a;
  return Region(overlay::combine(a.polygons(), b.polygons(), overlay::Op::Union), a.bounds());
}

}  // namespace a2g
