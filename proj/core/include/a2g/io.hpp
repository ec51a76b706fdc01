#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "a2g/campaign.hpp"
#include "a2g/environment.hpp"
#include "a2g/geometry.hpp"

namespace a2g::io {

// GeoJSON -------------------------------------------------------------------

/// FeatureCollection with one Polygon per building (properties: i, j, height),
/// a "bbox" member and a "metadata" member (W, St, I, J, alpha, beta, gamma, seed).
std::string layout_geojson(const GridLayout& layout, std::uint64_t seed);

/// Inverse of layout_geojson. Buildings without metadata are accepted; the
/// bounds then come from "bbox" or from the footprints.
/// Throws InvalidArgument on malformed input.
GridLayout parse_layout_geojson(std::string_view text);

/// Region as MultiPolygon features tagged with "kind".
std::string losmap_geojson(const Region& shadow, const Region& los, const AbsState& abs, double p_los);

/// Route pieces as LineStrings with a "los" boolean property.
std::string segments_geojson(const Route& route, const LabeledSegments& segments, const AbsState& abs);

// Configuration -------------------------------------------------------------

/// Parses the campaign part of a JSON config. Sections belonging to other
/// subcommands ("validate", "losmap", "radiomap") are ignored here.
/// Throws InvalidArgument on bad types, unknown keys or values out of range.
CampaignConfig parse_config(std::string_view text);

/// Canonical JSON echo of a config.
std::string config_json(const CampaignConfig& config, int indent = 2);

ItuParams parse_environment(std::string_view json_value);

// Results -------------------------------------------------------------------

/// One JSON object on a single line.
std::string record_json(const RealizationRecord& record);
RealizationRecord parse_record(std::string_view line);

struct Summary {
  struct Env {
    std::string environment;
    int realizations = 0;
    double route_length = 0.0;
    double p_los = 0.0;
    std::vector<double> outage_probability;  ///< per EIRP
  };
  std::vector<double> eirp_dbm;
  std::vector<Env> environments;
};

/// Aggregates the records per environment, in first-seen order.
Summary summarize(const std::vector<RealizationRecord>& records, const std::vector<double>& eirp_dbm);

/// summary.json body: outage probabilities, P_LOS, seeds and the config echo.
std::string summary_json(const Summary& summary, const CampaignConfig& config);

/// "value,probability,environment[,eirp]" rows.
struct CdfTable {
  std::string header;
  std::vector<std::string> rows;
};

/// Step CDF rows; when max_points > 0 the table is thinned to at most that
/// many points taken at evenly spaced probabilities.
void append_cdf(CdfTable& table, const std::vector<double>& values, const std::string& environment,
                const std::string& eirp = {}, std::size_t max_points = 0);
std::string to_csv(const CdfTable& table);

/// Row-major grid with a comment header carrying origin and spacing.
std::string raster_csv(const Raster& raster);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace a2g::io
