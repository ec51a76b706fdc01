#include "a2g/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <thread>

#include "a2g/error.hpp"
#include "a2g/overlay.hpp"

namespace a2g {
namespace {

std::uint64_t digest_heights(std::span<const Building> buildings) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Building& b : buildings) {
    const double v = b.height();
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// True when the segment a->b passes through the interior of the footprint.
bool leg_enters(Point2 a, Point2 b, const Building& building) {
  const Box& bb = building.bbox();
  if (std::max(a.x, b.x) < bb.min.x || std::min(a.x, b.x) > bb.max.x || std::max(a.y, b.y) < bb.min.y ||
      std::min(a.y, b.y) > bb.max.y) {
    return false;
  }
  std::vector<double> cuts{0.0, 1.0};
  const std::span<const Point2> base = building.base();
  const Point2 r = b - a;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Point2 c = base[i];
    const Point2 d = base[(i + 1) % base.size()];
    const Point2 s = d - c;
    const double denom = cross(r, s);
    if (denom == 0.0) continue;
    const double t = cross(c - a, s) / denom;
    const double u = cross(c - a, r) / denom;
    if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Point2 mid = a + r * (0.5 * (cuts[i] + cuts[i + 1]));
    if (locate(mid, base) == Location::Inside) return true;
  }
  return false;
}

Box outer_box(const Region& region) {
  Box box = Box::empty();
  for (const Polygon& p : region.polygons()) {
    for (Point2 v : p.outer) box.expand(v);
  }
  return box;
}

}  // namespace

AbsState AbsDistribution::sample(Rng& rng) const {
  const double x = uniform(rng, x_min, x_max);
  const double y = uniform(rng, y_min, y_max);
  const double h = uniform(rng, h_min, h_max);
  return AbsState({x, y}, h);
}

void AbsDistribution::validate() const {
  if (!(x_min < x_max) || !(y_min < y_max)) throw InvalidArgument("ABS position bounds must be ordered");
  if (!(h_min > 0.0) || !(h_min < h_max)) throw InvalidArgument("ABS height bounds must be positive and ordered");
}

void CampaignConfig::validate() const {
  if (environments.empty()) throw InvalidArgument("at least one environment is required");
  for (const ItuParams& p : environments) grid_dimensions(p);
  if (realizations < 1) throw InvalidArgument("realizations must be at least 1");
  if (!(sample_step > 0.0)) throw InvalidArgument("sample_step must be positive");
  if (!(target_side > 0.0)) throw InvalidArgument("target_side must be positive");
  if (eirp_dbm.empty()) throw InvalidArgument("at least one EIRP value is required");
  for (double e : eirp_dbm) {
    if (!std::isfinite(e)) throw InvalidArgument("EIRP values must be finite");
  }
  if (!std::isfinite(sensitivity_dbm)) throw InvalidArgument("sensitivity must be finite");
  if (route.policy == RouteSpec::Policy::Explicit && route.waypoints.size() < 2) {
    throw InvalidArgument("explicit route needs at least two waypoints");
  }
  abs.validate();
  channel.validate();
}

Route build_route(const GridLayout& layout, const RouteSpec& spec, Rng& rng) {
  if (spec.policy == RouteSpec::Policy::Explicit) {
    Route route(spec.waypoints);
    for (std::size_t k = 0; k < spec.waypoints.size(); ++k) {
      for (std::size_t i = 0; i < layout.buildings.size(); ++i) {
        const Building& b = layout.buildings[i];
        const bool inside = locate(spec.waypoints[k], b.base()) == Location::Inside;
        const bool crosses = k + 1 < spec.waypoints.size() && leg_enters(spec.waypoints[k], spec.waypoints[k + 1], b);
        if (inside || crosses) throw InvalidRoute("route enters building " + std::to_string(i));
      }
    }
    return route;
  }
  const bool vertical_axis = rng() & 1u;
  const int count = vertical_axis ? layout.columns : layout.rows;
  if (count < 2) throw InvalidRoute("layout has no interior street");
  const int street = std::uniform_int_distribution<int>(1, count - 1)(rng);
  const double pitch = layout.dims.pitch();
  const double half = 0.5 * layout.dims.street_width;
  const Box& b = layout.bounds;
  if (vertical_axis) {
    const double x = street * pitch + half;
    return Route({{x, b.min.y}, {x, b.max.y}});
  }
  const double y = (street - 1) * pitch + layout.dims.building_width + half;
  return Route({{b.min.x, y}, {b.max.x, y}});
}

ChannelTrace trace_channel(const Route& route, const LabeledSegments& segments, const AbsState& abs,
                           const ChannelParams& params, double step, bool fading, Rng& rng) {
  if (!(step > 0.0)) throw InvalidArgument("sample step must be positive");
  const double length = route.length();
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / step)));
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = static_cast<double>(k) * step;

  std::vector<double> unit = fading ? route_unit_process(s, params.decorr_distance, rng) : std::vector<double>(n, 0.0);
  ChannelTrace trace(n);
  const double reference = reference_path_loss(abs.height, params.frequency_hz);
  for (std::size_t k = 0; k < n; ++k) {
    ChannelSample& c = trace[k];
    c.arclength = s[k];
    c.position = route.point_at(s[k]);
    c.theta_deg = elevation_angle(c.position, abs);
    c.state = segments.label_at(s[k]);
    c.reference_db = reference;
    c.excess_db = excess_path_loss(c.theta_deg, c.state);
    c.fading_db = shadow_std(c.theta_deg, c.state, params) * unit[k];
    c.total_db = c.reference_db + c.excess_db + c.fading_db;
  }
  return trace;
}

std::vector<Interval> outage_segments(const ChannelTrace& trace, double threshold_db, double step,
                                      double route_length) {
  std::vector<Interval> out;
  std::size_t k = 0;
  while (k < trace.size()) {
    if (!in_outage(trace[k].total_db, threshold_db)) {
      ++k;
      continue;
    }
    const std::size_t first = k;
    while (k + 1 < trace.size() && in_outage(trace[k + 1].total_db, threshold_db)) ++k;
    out.push_back({trace[first].arclength, std::min(trace[k].arclength + step, route_length)});
    ++k;
  }
  return out;
}

GridLayout realization_layout(const CampaignConfig& config, std::size_t env_index, int index,
                              std::uint64_t* layout_seed) {
  const ItuParams& env = config.environments.at(env_index);
  const auto slot = static_cast<std::uint64_t>(config.regenerate_layout ? index : 0);
  const std::uint64_t seed = derive_seed(config.master_seed, "layout:" + env.name, slot);
  if (layout_seed) *layout_seed = seed;
  Rng rng(seed);
  return generate_manhattan(env, config.target_side, rng);
}

Region total_shadow(std::span<const Building> buildings, const AbsState& abs, const Box& bounds) {
  std::vector<Region> shadows;
  shadows.reserve(buildings.size());
  for (const Building& b : buildings) shadows.push_back(building_shadow(b, abs, bounds));
  return union_shadows(shadows, bounds);
}

Region route_shadow(std::span<const Building> buildings, const AbsState& abs, const Box& bounds, const Route& route) {
  // Only shadows that reach the route's bounding box can label it.
  Box route_box = bounding_box(route.waypoints());
  route_box.min = route_box.min - Point2{1e-6, 1e-6};
  route_box.max = route_box.max + Point2{1e-6, 1e-6};
  std::vector<Region> shadows;
  for (const Building& b : buildings) {
    Region s = building_shadow(b, abs, bounds);
    if (!s.empty() && outer_box(s).overlaps(route_box)) shadows.push_back(std::move(s));
  }
  return union_shadows(shadows, bounds);
}

RealizationResult run_realization(const CampaignConfig& config, std::size_t env_index, int index) {
  const ItuParams& env = config.environments.at(env_index);
  const auto idx = static_cast<std::uint64_t>(index);
  RealizationResult r;
  r.environment = env.name;
  r.index = index;

  std::uint64_t layout_seed = 0;
  const GridLayout layout = realization_layout(config, env_index, index, &layout_seed);
  r.layout = {layout_seed, layout.columns, layout.rows, digest_heights(layout.buildings)};

  Rng abs_rng = make_stream(config.master_seed, "abs:" + env.name, idx);
  r.abs = config.abs.sample(abs_rng);
  Rng route_rng = make_stream(config.master_seed, "route:" + env.name, idx);
  r.route = build_route(layout, config.route, route_rng);

  const Region shadow = route_shadow(layout.buildings, r.abs, layout.bounds, r.route);
  r.segments = segment_route(r.route, shadow);

  Rng fading_rng = make_stream(config.master_seed, "fading:" + env.name, idx);
  r.trace = trace_channel(r.route, r.segments, r.abs, config.channel, config.sample_step, config.fading, fading_rng);
  for (double eirp : config.eirp_dbm) {
    r.outage.push_back(outage_segments(r.trace, outage_threshold(eirp, config.sensitivity_dbm), config.sample_step,
                                       r.route.length()));
  }
  return r;
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("empirical CDF of an empty sample");
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.push_back({values[i], static_cast<double>(i + 1) / n});
  }
  out.back().probability = 1.0;
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  auto k = static_cast<std::size_t>(std::ceil(q * n));
  if (k > 0) --k;
  return values[std::min(k, values.size() - 1)];
}

void accumulate(EnvironmentStats& stats, const RealizationResult& r) {
  ++stats.realizations;
  stats.total_route_length += r.route.length();
  for (const LabeledSegment& s : r.segments.segments()) {
    (s.label == LinkState::Los ? stats.los_lengths : stats.nlos_lengths).push_back(s.length());
  }
  for (const ChannelSample& c : r.trace) stats.losses_db.push_back(c.total_db);
  if (stats.outage_lengths.size() < r.outage.size()) stats.outage_lengths.resize(r.outage.size());
  for (std::size_t e = 0; e < r.outage.size(); ++e) {
    for (const Interval& iv : r.outage[e]) stats.outage_lengths[e].push_back(iv.length());
  }
}

void finalize(EnvironmentStats& stats) {
  stats.outage_probability.assign(stats.outage_lengths.size(), 0.0);
  if (!(stats.total_route_length > 0.0)) return;
  for (std::size_t e = 0; e < stats.outage_lengths.size(); ++e) {
    double sum = 0.0;
    for (double v : stats.outage_lengths[e]) sum += v;
    stats.outage_probability[e] = sum / stats.total_route_length;
  }
  double los = 0.0;
  for (double v : stats.los_lengths) los += v;
  stats.p_los = los / stats.total_route_length;
}

RealizationRecord make_record(const RealizationResult& r) {
  RealizationRecord rec;
  rec.environment = r.environment;
  rec.index = r.index;
  rec.layout = r.layout;
  rec.abs = r.abs;
  rec.route.assign(r.route.waypoints().begin(), r.route.waypoints().end());
  rec.segments = r.segments;
  rec.outage = r.outage;
  return rec;
}

CampaignStats run_campaign(const CampaignConfig& config, unsigned threads, std::vector<RealizationRecord>* records) {
  config.validate();
  const std::size_t envs = config.environments.size();
  const auto per_env = static_cast<std::size_t>(config.realizations);
  const std::size_t total = envs * per_env;

  struct Slot {
    EnvironmentStats partial;
    RealizationRecord record;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      Slot& slot = slots[job];
      try {
        const RealizationResult r = run_realization(config, job / per_env, static_cast<int>(job % per_env));
        accumulate(slot.partial, r);
        if (records) slot.record = make_record(r);
      } catch (...) {
        slot.error = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  CampaignStats stats;
  stats.eirp_dbm = config.eirp_dbm;
  stats.environments.resize(envs);
  if (records) records->clear();
  for (std::size_t e = 0; e < envs; ++e) {
    EnvironmentStats& es = stats.environments[e];
    es.environment = config.environments[e].name;
    es.dims = grid_dimensions(config.environments[e]);
    es.outage_lengths.resize(config.eirp_dbm.size());
    for (std::size_t i = 0; i < per_env; ++i) {
      Slot& slot = slots[e * per_env + i];
      if (slot.error) std::rethrow_exception(slot.error);
      const EnvironmentStats& p = slot.partial;
      es.realizations += p.realizations;
      es.total_route_length += p.total_route_length;
      es.los_lengths.insert(es.los_lengths.end(), p.los_lengths.begin(), p.los_lengths.end());
      es.nlos_lengths.insert(es.nlos_lengths.end(), p.nlos_lengths.begin(), p.nlos_lengths.end());
      es.losses_db.insert(es.losses_db.end(), p.losses_db.begin(), p.losses_db.end());
      for (std::size_t k = 0; k < p.outage_lengths.size(); ++k) {
        es.outage_lengths[k].insert(es.outage_lengths[k].end(), p.outage_lengths[k].begin(),
                                    p.outage_lengths[k].end());
      }
      slot.partial = {};
      if (records) records->push_back(std::move(slot.record));
    }
    finalize(es);
  }
  return stats;
}

std::vector<std::uint8_t> rasterize(const Region& region, Point2 origin, double spacing, std::size_t width,
                                    std::size_t height) {
  std::vector<std::uint8_t> out(width * height, 0);
  std::vector<std::pair<Point2, Point2>> edges;
  auto add_ring = [&](const Ring& ring) {
    for (std::size_t i = 0; i < ring.size(); ++i) edges.emplace_back(ring[i], ring[(i + 1) % ring.size()]);
  };
  for (const Polygon& p : region.polygons()) {
    add_ring(p.outer);
    for (const Ring& h : p.holes) add_ring(h);
  }
  std::vector<double> xs;
  for (std::size_t row = 0; row < height; ++row) {
    const double y = origin.y + (static_cast<double>(row) + 0.5) * spacing;
    xs.clear();
    for (const auto& [a, b] : edges) {
      if ((a.y > y) == (b.y > y)) continue;
      xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double lo = std::ceil((xs[k] - origin.x) / spacing - 0.5);
      const double hi = std::floor((xs[k + 1] - origin.x) / spacing - 0.5);
      const double first = std::max(lo, 0.0);
      const double last = std::min(hi, static_cast<double>(width) - 1.0);
      for (double c = first; c <= last; c += 1.0) out[row * width + static_cast<std::size_t>(c)] = 1;
    }
  }
  return out;
}

Raster radio_map(const GridLayout& layout, const AbsState& abs, double grid_spacing, const ChannelParams& params,
                 Rng& rng, bool fading) {
  params.validate();
  if (!(grid_spacing > 0.0) || grid_spacing > params.decorr_distance / 2.0) {
    throw InvalidArgument("grid spacing must lie in (0, d_decorr / 2]");
  }
  Raster map;
  map.origin = layout.bounds.min;
  map.spacing = grid_spacing;
  map.width = static_cast<std::size_t>(std::ceil(layout.bounds.width() / grid_spacing));
  map.height = static_cast<std::size_t>(std::ceil(layout.bounds.height() / grid_spacing));
  const std::size_t cells = map.width * map.height;

  std::vector<Polygon> footprints;
  footprints.reserve(layout.buildings.size());
  for (const Building& b : layout.buildings) footprints.push_back(b.footprint());
  const auto indoor =
      rasterize(Region(std::move(footprints), layout.bounds), map.origin, map.spacing, map.width, map.height);
  const auto shadowed = rasterize(total_shadow(layout.buildings, abs, layout.bounds), map.origin, map.spacing,
                                  map.width, map.height);

  std::vector<double> unit(cells, 0.0);
  if (fading) {
    unit = map_unit_field(map.origin, map.spacing, map.width, map.height, params.decorr_distance, rng).unit_values;
  }
  const double reference = reference_path_loss(abs.height, params.frequency_hz);
  map.values.assign(cells, std::numeric_limits<double>::quiet_NaN());
  map.los.assign(cells, 0);
  for (std::size_t row = 0; row < map.height; ++row) {
    for (std::size_t col = 0; col < map.width; ++col) {
      const std::size_t k = row * map.width + col;
      if (indoor[k]) continue;
      const LinkState state = shadowed[k] ? LinkState::Nlos : LinkState::Los;
      const double theta = elevation_angle(map.cell_center(col, row), abs);
      map.los[k] = state == LinkState::Los;
      map.values[k] =
          reference + excess_path_loss(theta, state) + shadow_std(theta, state, params) * unit[k];
    }
  }
  return map;
}

}  // namespace a2g
