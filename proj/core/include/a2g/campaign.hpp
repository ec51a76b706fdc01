#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "a2g/channel.hpp"
#include "a2g/environment.hpp"
#include "a2g/fading.hpp"
#include "a2g/geometry.hpp"
#include "a2g/rng.hpp"

namespace a2g {

struct RouteSpec {
  enum class Policy { StreetRoute, Explicit };
  Policy policy = Policy::StreetRoute;
  std::vector<Point2> waypoints;  ///< used by Explicit
};

/// Independent uniform boxes for the ABS pose.
struct AbsDistribution {
  double x_min = 0.0, x_max = 1000.0;
  double y_min = 0.0, y_max = 1000.0;
  double h_min = 30.0, h_max = 250.0;

  AbsState sample(Rng& rng) const;
  void validate() const;
};

struct CampaignConfig {
  std::vector<ItuParams> environments{preset("Suburban")};
  int realizations = 1000;
  RouteSpec route;
  AbsDistribution abs;
  std::vector<double> eirp_dbm{13.0, 18.0, 23.0};
  double sensitivity_dbm = -84.7;
  double sample_step = 1.0;
  double target_side = 1000.0;
  bool regenerate_layout = true;  ///< false keeps one city per environment
  bool fading = true;
  ChannelParams channel;
  std::uint64_t master_seed = 1;

  /// Throws InvalidArgument on any out-of-range field.
  void validate() const;
};

struct ChannelSample {
  double arclength;
  Point2 position;
  double theta_deg;
  LinkState state;
  double reference_db;
  double excess_db;
  double fading_db;
  double total_db;
};

using ChannelTrace = std::vector<ChannelSample>;

struct Interval {
  double start;
  double end;
  double length() const { return end - start; }
};

struct LayoutSummary {
  std::uint64_t seed = 0;
  int columns = 0;
  int rows = 0;
  std::uint64_t heights_digest = 0;  ///< FNV-1a over the height bit patterns
};

struct RealizationResult {
  std::string environment;
  int index = 0;
  LayoutSummary layout;
  AbsState abs;
  Route route{{{0.0, 0.0}, {1.0, 0.0}}};
  LabeledSegments segments;
  ChannelTrace trace;
  std::vector<std::vector<Interval>> outage;  ///< one list per configured EIRP
};

/// Street-route policy: a random interior street (axis chosen uniformly), with
/// a straight route along its centre line across the whole target area.
/// Explicit waypoints are checked against the footprints.
/// Throws InvalidRoute when the route touches a footprint interior.
Route build_route(const GridLayout& layout, const RouteSpec& spec, Rng& rng);

/// Samples at k * step for k = 0 .. ceil(length / step) - 1.
ChannelTrace trace_channel(const Route& route, const LabeledSegments& segments, const AbsState& abs,
                           const ChannelParams& params, double step, bool fading, Rng& rng);

/// Maximal runs of samples with loss strictly above the threshold, as
/// [first arclength, last arclength + step], clamped to route_length.
std::vector<Interval> outage_segments(const ChannelTrace& trace, double threshold_db, double step,
                                      double route_length);

GridLayout realization_layout(const CampaignConfig& config, std::size_t env_index, int index,
                              std::uint64_t* layout_seed = nullptr);

RealizationResult run_realization(const CampaignConfig& config, std::size_t env_index, int index);

struct CdfPoint {
  double value;
  double probability;
};

/// Right-continuous step CDF at each distinct value. Throws InvalidArgument on empty input.
std::vector<CdfPoint> empirical_cdf(std::vector<double> values);

/// Smallest sample whose empirical CDF reaches q.
double quantile(std::vector<double> values, double q);

struct EnvironmentStats {
  std::string environment;
  GridDimensions dims{0.0, 0.0};
  int realizations = 0;
  double total_route_length = 0.0;
  std::vector<double> los_lengths;
  std::vector<double> nlos_lengths;
  std::vector<double> losses_db;
  std::vector<std::vector<double>> outage_lengths;  ///< per EIRP
  std::vector<double> outage_probability;           ///< per EIRP
  double p_los = 0.0;                               ///< LOS share of the route length
};

struct CampaignStats {
  std::vector<double> eirp_dbm;
  std::vector<EnvironmentStats> environments;
};

/// Folds one realization into the environment's statistics.
void accumulate(EnvironmentStats& stats, const RealizationResult& r);
/// Recomputes the ratios after accumulation.
void finalize(EnvironmentStats& stats);

/// Compact per-realization record without the sample trace.
struct RealizationRecord {
  std::string environment;
  int index = 0;
  LayoutSummary layout;
  AbsState abs;
  std::vector<Point2> route;
  LabeledSegments segments;
  std::vector<std::vector<Interval>> outage;  ///< per EIRP
};

RealizationRecord make_record(const RealizationResult& r);

/// Runs every realization of every environment. Results do not depend on the
/// thread count: realizations are reduced in (environment, index) order.
CampaignStats run_campaign(const CampaignConfig& config, unsigned threads = 1,
                           std::vector<RealizationRecord>* records = nullptr);

/// Raster of total loss. Cells whose centre lies inside a footprint are NaN.
struct Raster {
  Point2 origin;
  double spacing = 1.0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> los;  ///< 1 LOS, 0 NLOS or no-data

  double at(std::size_t col, std::size_t row) const { return values[row * width + col]; }
  Point2 cell_center(std::size_t col, std::size_t row) const {
    return {origin.x + (static_cast<double>(col) + 0.5) * spacing,
            origin.y + (static_cast<double>(row) + 0.5) * spacing};
  }
};

Raster radio_map(const GridLayout& layout, const AbsState& abs, double grid_spacing, const ChannelParams& params,
                 Rng& rng, bool fading = true);

/// Even-odd scanline fill of a region sampled at cell centres.
std::vector<std::uint8_t> rasterize(const Region& region, Point2 origin, double spacing, std::size_t width,
                                    std::size_t height);

/// Shadows of every building, united and clipped to the bounds.
Region total_shadow(std::span<const Building> buildings, const AbsState& abs, const Box& bounds);

/// Union of only those shadows that reach the route's bounding box. Labels
/// the route exactly as total_shadow would.
Region route_shadow(std::span<const Building> buildings, const AbsState& abs, const Box& bounds, const Route& route);

}  // namespace a2g
