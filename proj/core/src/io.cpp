#include "a2g/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "a2g/error.hpp"

namespace a2g::io {
namespace {

using json = nlohmann::ordered_json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json point_json(Point2 p) { return json::array({p.x, p.y}); }

json ring_json(const Ring& ring) {
  json out = json::array();
  for (Point2 p : ring) out.push_back(point_json(p));
  if (!ring.empty()) out.push_back(point_json(ring.front()));
  return out;
}

json polygon_coords(const Polygon& p) {
  json out = json::array();
  out.push_back(ring_json(p.outer));
  for (const Ring& h : p.holes) out.push_back(ring_json(h));
  return out;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed ") + what + ": " + e.what());
  }
}

Point2 to_point(const json& j) {
  if (!j.is_array() || j.size() < 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InvalidArgument("expected an [x, y] coordinate pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Ring to_ring(const json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a coordinate ring");
  Ring ring;
  for (const json& p : j) ring.push_back(to_point(p));
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  return ring;
}

double get_number(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) throw InvalidArgument(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

std::uint64_t get_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::uint64_t out = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return out;
  }
  throw InvalidArgument("seed must be a non-negative 64-bit integer");
}

ItuParams environment_from(const json& j) {
  if (j.is_string()) return preset(j.get<std::string>());
  if (!j.is_object()) throw InvalidArgument("environment must be a preset name or an object");
  ItuParams p;
  p.name = j.value("name", std::string("Custom"));
  p.alpha = get_number(j, "alpha");
  p.beta = get_number(j, "beta");
  p.gamma = get_number(j, "gamma");
  grid_dimensions(p);
  return p;
}

std::pair<double, double> range_from(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InvalidArgument(std::string("'") + key + "' must be a [min, max] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json interval_list(const std::vector<Interval>& list) {
  json out = json::array();
  for (const Interval& iv : list) out.push_back(json::array({iv.start, iv.end}));
  return out;
}

}  // namespace

// GeoJSON -------------------------------------------------------------------

std::string layout_geojson(const GridLayout& layout, std::uint64_t seed) {
  json doc;
  doc["type"] = "FeatureCollection";
  const Box& b = layout.bounds;
  doc["bbox"] = json::array({b.min.x, b.min.y, b.max.x, b.max.y});
  doc["metadata"] = {{"environment", layout.params.name},
                     {"alpha", layout.params.alpha},
                     {"beta", layout.params.beta},
                     {"gamma", layout.params.gamma},
                     {"W", layout.dims.building_width},
                     {"St", layout.dims.street_width},
                     {"I", layout.columns},
                     {"J", layout.rows},
                     {"seed", seed}};
  json features = json::array();
  for (int i = 1; i <= layout.columns; ++i) {
    for (int j = 1; j <= layout.rows; ++j) {
      const Building& bld = layout.buildings[layout.index(i, j)];
      features.push_back({{"type", "Feature"},
                          {"properties", {{"i", i}, {"j", j}, {"height", bld.height()}}},
                          {"geometry", {{"type", "Polygon"}, {"coordinates", polygon_coords(bld.footprint())}}}});
    }
  }
  // Buildings outside the grid indexing (hand-made layouts).
  if (layout.buildings.size() != static_cast<std::size_t>(layout.columns) * static_cast<std::size_t>(layout.rows)) {
    features = json::array();
    for (const Building& bld : layout.buildings) {
      features.push_back({{"type", "Feature"},
                          {"properties", {{"height", bld.height()}}},
                          {"geometry", {{"type", "Polygon"}, {"coordinates", polygon_coords(bld.footprint())}}}});
    }
  }
  doc["features"] = std::move(features);
  return doc.dump(1) + "\n";
}

GridLayout parse_layout_geojson(std::string_view text) {
  const json doc = parse_json(text, "GeoJSON");
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw InvalidArgument("layout must be a GeoJSON FeatureCollection");
  }
  GridLayout layout;
  layout.params.name = "Custom";
  Box box = Box::empty();
  for (const json& f : doc["features"]) {
    if (!f.is_object() || !f.contains("geometry") || !f["geometry"].is_object()) {
      throw InvalidArgument("feature without geometry");
    }
    const json& g = f["geometry"];
    if (g.value("type", "") != "Polygon" || !g.contains("coordinates") || !g["coordinates"].is_array() ||
        g["coordinates"].empty()) {
      throw InvalidArgument("building geometry must be a Polygon");
    }
    if (!f.contains("properties") || !f["properties"].is_object()) throw InvalidArgument("building without properties");
    Ring base = to_ring(g["coordinates"][0]);
    for (Point2 p : base) box.expand(p);
    layout.buildings.emplace_back(std::move(base), get_number(f["properties"], "height"));
  }
  if (doc.contains("bbox")) {
    const json& bb = doc["bbox"];
    if (!bb.is_array() || bb.size() != 4) throw InvalidArgument("bbox must have four numbers");
    for (const json& v : bb) {
      if (!v.is_number()) throw InvalidArgument("bbox must have four numbers");
    }
    layout.bounds = {{bb[0].get<double>(), bb[1].get<double>()}, {bb[2].get<double>(), bb[3].get<double>()}};
  } else if (!layout.buildings.empty()) {
    layout.bounds = box;
  } else {
    throw InvalidArgument("layout without buildings needs a bbox");
  }
  if (!(layout.bounds.width() > 0.0) || !(layout.bounds.height() > 0.0)) throw InvalidArgument("empty bbox");
  if (doc.contains("metadata") && doc["metadata"].is_object()) {
    const json& m = doc["metadata"];
    layout.params.name = m.value("environment", std::string("Custom"));
    layout.params.alpha = m.value("alpha", 0.0);
    layout.params.beta = m.value("beta", 0.0);
    layout.params.gamma = m.value("gamma", 0.0);
    layout.dims = {m.value("W", 0.0), m.value("St", 0.0)};
    layout.columns = m.value("I", 0);
    layout.rows = m.value("J", 0);
  }
  return layout;
}

std::string losmap_geojson(const Region& shadow, const Region& los, const AbsState& abs, double p_los) {
  json doc;
  doc["type"] = "FeatureCollection";
  const Box& b = shadow.bounds();
  doc["bbox"] = json::array({b.min.x, b.min.y, b.max.x, b.max.y});
  doc["metadata"] = {{"abs", json::array({abs.position.x, abs.position.y, abs.height})}, {"p_los", p_los}};
  json features = json::array();
  auto add = [&](const Region& region, const char* kind) {
    json coords = json::array();
    for (const Polygon& p : region.polygons()) coords.push_back(polygon_coords(p));
    features.push_back({{"type", "Feature"},
                        {"properties", {{"kind", kind}}},
                        {"geometry", {{"type", "MultiPolygon"}, {"coordinates", std::move(coords)}}}});
  };
  add(shadow, "shadow");
  add(los, "los");
  doc["features"] = std::move(features);
  return doc.dump(1) + "\n";
}

std::string segments_geojson(const Route& route, const LabeledSegments& segments, const AbsState& abs) {
  json doc;
  doc["type"] = "FeatureCollection";
  doc["metadata"] = {{"abs", json::array({abs.position.x, abs.position.y, abs.height})}};
  json features = json::array();
  const auto cum = route.cumulative();
  for (const LabeledSegment& s : segments.segments()) {
    json line = json::array();
    line.push_back(point_json(route.point_at(s.start)));
    for (std::size_t k = 1; k + 1 < cum.size(); ++k) {
      if (cum[k] > s.start && cum[k] < s.end) line.push_back(point_json(route.waypoints()[k]));
    }
    line.push_back(point_json(route.point_at(s.end)));
    features.push_back({{"type", "Feature"},
                        {"properties", {{"los", s.label == LinkState::Los}, {"start", s.start}, {"end", s.end}}},
                        {"geometry", {{"type", "LineString"}, {"coordinates", std::move(line)}}}});
  }
  doc["features"] = std::move(features);
  return doc.dump(1) + "\n";
}

// Configuration -------------------------------------------------------------

ItuParams parse_environment(std::string_view json_value) {
  return environment_from(parse_json(json_value, "environment"));
}

CampaignConfig parse_config(std::string_view text) {
  const json doc = parse_json(text, "config");
  if (!doc.is_object()) throw InvalidArgument("config must be a JSON object");
  static const std::set<std::string> known{"environment", "environments", "realizations", "route",
                                           "abs",         "eirp_dbm",     "sensitivity_dbm", "sample_step",
                                           "target_side", "regenerate_layout", "fading", "channel",
                                           "master_seed", "validate",     "losmap",      "radiomap",
                                           "description"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw InvalidArgument("unknown config key '" + key + "'");
  }
  CampaignConfig c;
  try {
    if (doc.contains("environment") && doc.contains("environments")) {
      throw InvalidArgument("give either 'environment' or 'environments'");
    }
    if (doc.contains("environment")) c.environments = {environment_from(doc["environment"])};
    if (doc.contains("environments")) {
      if (!doc["environments"].is_array()) throw InvalidArgument("'environments' must be a list");
      c.environments.clear();
      for (const json& e : doc["environments"]) c.environments.push_back(environment_from(e));
    }
    if (doc.contains("realizations")) {
      if (!doc["realizations"].is_number_integer()) throw InvalidArgument("'realizations' must be an integer");
      c.realizations = doc["realizations"].get<int>();
    }
    if (doc.contains("route")) {
      const json& r = doc["route"];
      if (r.is_string()) {
        if (r.get<std::string>() != "street-route") throw InvalidArgument("unknown route policy");
        c.route.policy = RouteSpec::Policy::StreetRoute;
      } else if (r.is_object() && r.contains("waypoints") && r["waypoints"].is_array()) {
        c.route.policy = RouteSpec::Policy::Explicit;
        for (const json& p : r["waypoints"]) c.route.waypoints.push_back(to_point(p));
      } else {
        throw InvalidArgument("'route' must be \"street-route\" or {\"waypoints\": [...]}");
      }
    }
    if (doc.contains("abs")) {
      const json& a = doc["abs"];
      if (!a.is_object()) throw InvalidArgument("'abs' must be an object");
      for (const auto& [key, value] : a.items()) {
        if (key == "x") std::tie(c.abs.x_min, c.abs.x_max) = range_from(value, "abs.x");
        else if (key == "y") std::tie(c.abs.y_min, c.abs.y_max) = range_from(value, "abs.y");
        else if (key == "h") std::tie(c.abs.h_min, c.abs.h_max) = range_from(value, "abs.h");
        else throw InvalidArgument("unknown key 'abs." + key + "'");
      }
    }
    if (doc.contains("eirp_dbm")) {
      const json& e = doc["eirp_dbm"];
      if (!e.is_array()) throw InvalidArgument("'eirp_dbm' must be a list");
      c.eirp_dbm.clear();
      for (const json& v : e) {
        if (!v.is_number()) throw InvalidArgument("'eirp_dbm' entries must be numbers");
        c.eirp_dbm.push_back(v.get<double>());
      }
    }
    if (doc.contains("sensitivity_dbm")) c.sensitivity_dbm = get_number(doc, "sensitivity_dbm");
    if (doc.contains("sample_step")) c.sample_step = get_number(doc, "sample_step");
    if (doc.contains("target_side")) c.target_side = get_number(doc, "target_side");
    if (doc.contains("regenerate_layout")) c.regenerate_layout = doc["regenerate_layout"].get<bool>();
    if (doc.contains("fading")) c.fading = doc["fading"].get<bool>();
    if (doc.contains("channel")) {
      const json& ch = doc["channel"];
      if (!ch.is_object()) throw InvalidArgument("'channel' must be an object");
      for (const auto& [key, value] : ch.items()) {
        if (!value.is_number()) throw InvalidArgument("channel." + key + " must be a number");
        const double v = value.get<double>();
        if (key == "frequency_hz") c.channel.frequency_hz = v;
        else if (key == "rho_los") c.channel.rho_los = v;
        else if (key == "rho_nlos") c.channel.rho_nlos = v;
        else if (key == "mu_los") c.channel.mu_los = v;
        else if (key == "mu_nlos") c.channel.mu_nlos = v;
        else if (key == "decorr_distance") c.channel.decorr_distance = v;
        else throw InvalidArgument("unknown key 'channel." + key + "'");
      }
    }
    if (doc.contains("master_seed")) c.master_seed = get_seed(doc["master_seed"]);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_json(const CampaignConfig& c, int indent) {
  json doc;
  json envs = json::array();
  for (const ItuParams& p : c.environments) {
    envs.push_back({{"name", p.name}, {"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}});
  }
  doc["environments"] = std::move(envs);
  doc["realizations"] = c.realizations;
  if (c.route.policy == RouteSpec::Policy::StreetRoute) {
    doc["route"] = "street-route";
  } else {
    json wp = json::array();
    for (Point2 p : c.route.waypoints) wp.push_back(point_json(p));
    doc["route"] = {{"waypoints", std::move(wp)}};
  }
  doc["abs"] = {{"x", {c.abs.x_min, c.abs.x_max}}, {"y", {c.abs.y_min, c.abs.y_max}}, {"h", {c.abs.h_min, c.abs.h_max}}};
  doc["eirp_dbm"] = c.eirp_dbm;
  doc["sensitivity_dbm"] = c.sensitivity_dbm;
  doc["sample_step"] = c.sample_step;
  doc["target_side"] = c.target_side;
  doc["regenerate_layout"] = c.regenerate_layout;
  doc["fading"] = c.fading;
  doc["channel"] = {{"frequency_hz", c.channel.frequency_hz}, {"rho_los", c.channel.rho_los},
                    {"rho_nlos", c.channel.rho_nlos},         {"mu_los", c.channel.mu_los},
                    {"mu_nlos", c.channel.mu_nlos},           {"decorr_distance", c.channel.decorr_distance}};
  doc["master_seed"] = c.master_seed;
  return doc.dump(indent);
}

// Results -------------------------------------------------------------------

std::string record_json(const RealizationRecord& r) {
  json doc;
  doc["environment"] = r.environment;
  doc["index"] = r.index;
  doc["layout"] = {{"seed", r.layout.seed},
                   {"I", r.layout.columns},
                   {"J", r.layout.rows},
                   {"heights_digest", r.layout.heights_digest}};
  doc["abs"] = json::array({r.abs.position.x, r.abs.position.y, r.abs.height});
  json route = json::array();
  for (Point2 p : r.route) route.push_back(point_json(p));
  doc["route"] = std::move(route);
  json segs = json::array();
  for (const LabeledSegment& s : r.segments.segments()) {
    segs.push_back(json::array({s.start, s.end, s.label == LinkState::Los ? "LOS" : "NLOS"}));
  }
  doc["segments"] = std::move(segs);
  json outage = json::array();
  for (const auto& list : r.outage) outage.push_back(interval_list(list));
  doc["outage"] = std::move(outage);
  return doc.dump();
}

RealizationRecord parse_record(std::string_view line) {
  const json doc = parse_json(line, "realization record");
  RealizationRecord r;
  try {
    r.environment = doc.at("environment").get<std::string>();
    r.index = doc.at("index").get<int>();
    const json& l = doc.at("layout");
    r.layout = {l.at("seed").get<std::uint64_t>(), l.at("I").get<int>(), l.at("J").get<int>(),
                l.at("heights_digest").get<std::uint64_t>()};
    const json& a = doc.at("abs");
    r.abs = AbsState({a.at(0).get<double>(), a.at(1).get<double>()}, a.at(2).get<double>());
    for (const json& p : doc.at("route")) r.route.push_back(to_point(p));
    std::vector<LabeledSegment> segs;
    for (const json& s : doc.at("segments")) {
      const std::string label = s.at(2).get<std::string>();
      if (label != "LOS" && label != "NLOS") throw InvalidArgument("bad segment label");
      segs.push_back({s.at(0).get<double>(), s.at(1).get<double>(), label == "LOS" ? LinkState::Los : LinkState::Nlos});
    }
    r.segments = LabeledSegments(std::move(segs));
    for (const json& list : doc.at("outage")) {
      std::vector<Interval> ivs;
      for (const json& iv : list) ivs.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
      r.outage.push_back(std::move(ivs));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed realization record: ") + e.what());
  }
  return r;
}

Summary summarize(const std::vector<RealizationRecord>& records, const std::vector<double>& eirp_dbm) {
  Summary s;
  s.eirp_dbm = eirp_dbm;
  std::map<std::string, std::size_t> slot;
  std::vector<double> los_length;
  std::vector<std::vector<double>> outage_length;
  for (const RealizationRecord& r : records) {
    auto [it, fresh] = slot.emplace(r.environment, s.environments.size());
    if (fresh) {
      s.environments.push_back({r.environment, 0, 0.0, 0.0, {}});
      los_length.push_back(0.0);
      outage_length.emplace_back(eirp_dbm.size(), 0.0);
    }
    const std::size_t e = it->second;
    Summary::Env& env = s.environments[e];
    ++env.realizations;
    env.route_length += r.segments.total_length();
    los_length[e] += r.segments.length_of(LinkState::Los);
    if (r.outage.size() != eirp_dbm.size()) throw InvalidArgument("record EIRP count does not match");
    for (std::size_t k = 0; k < r.outage.size(); ++k) {
      for (const Interval& iv : r.outage[k]) outage_length[e][k] += iv.length();
    }
  }
  for (std::size_t e = 0; e < s.environments.size(); ++e) {
    Summary::Env& env = s.environments[e];
    env.p_los = env.route_length > 0.0 ? los_length[e] / env.route_length : 0.0;
    for (double v : outage_length[e]) env.outage_probability.push_back(env.route_length > 0.0 ? v / env.route_length : 0.0);
  }
  return s;
}

std::string summary_json(const Summary& summary, const CampaignConfig& config) {
  json doc;
  doc["master_seed"] = config.master_seed;
  doc["eirp_dbm"] = summary.eirp_dbm;
  json envs = json::array();
  for (const Summary::Env& e : summary.environments) {
    json outage = json::object();
    for (std::size_t k = 0; k < e.outage_probability.size(); ++k) {
      outage[num(summary.eirp_dbm[k])] = e.outage_probability[k];
    }
    envs.push_back({{"environment", e.environment},
                    {"realizations", e.realizations},
                    {"route_length_m", e.route_length},
                    {"p_los", e.p_los},
                    {"outage_probability", std::move(outage)}});
  }
  doc["environments"] = std::move(envs);
  doc["config"] = json::parse(config_json(config, -1));
  return doc.dump(2) + "\n";
}

void append_cdf(CdfTable& table, const std::vector<double>& values, const std::string& environment,
                const std::string& eirp, std::size_t max_points) {
  if (table.header.empty()) table.header = eirp.empty() ? "value,probability,environment" : "value,probability,environment,eirp";
  if (values.empty()) return;
  const std::vector<CdfPoint> cdf = empirical_cdf(values);
  std::vector<std::size_t> keep;
  if (max_points == 0 || cdf.size() <= max_points) {
    keep.resize(cdf.size());
    for (std::size_t i = 0; i < cdf.size(); ++i) keep[i] = i;
  } else {
    // First CDF point at or above each evenly spaced probability level.
    std::size_t i = 0;
    for (std::size_t q = 1; q <= max_points; ++q) {
      const double level = static_cast<double>(q) / static_cast<double>(max_points);
      while (i + 1 < cdf.size() && cdf[i].probability < level) ++i;
      if (keep.empty() || keep.back() != i) keep.push_back(i);
    }
  }
  for (std::size_t i : keep) {
    std::string row = num(cdf[i].value) + "," + num(cdf[i].probability) + "," + environment;
    if (!eirp.empty()) row += "," + eirp;
    table.rows.push_back(std::move(row));
  }
}

std::string to_csv(const CdfTable& table) {
  std::string out = table.header + "\n";
  for (const std::string& r : table.rows) out += r + "\n";
  return out;
}

std::string raster_csv(const Raster& raster) {
  std::string out = "# origin_x=" + num(raster.origin.x) + " origin_y=" + num(raster.origin.y) +
                    " spacing=" + num(raster.spacing) + " width=" + std::to_string(raster.width) +
                    " height=" + std::to_string(raster.height) + "\n";
  for (std::size_t row = 0; row < raster.height; ++row) {
    for (std::size_t col = 0; col < raster.width; ++col) {
      if (col) out += ',';
      out += num(raster.at(col, row));
    }
    out += '\n';
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace a2g::io
