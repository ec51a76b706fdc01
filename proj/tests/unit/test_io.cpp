#include <doctest.h>
#include <json.hpp>

#include <sstream>

#include "a2g/error.hpp"
#include "a2g/io.hpp"

using namespace a2g;
using nlohmann::json;

TEST_SUITE("layout GeoJSON") {
  TEST_CASE("round trip") {
    Rng rng(1);
    const GridLayout l = generate_manhattan(preset("Urban"), 500, rng);
    const std::string text = io::layout_geojson(l, 1234);
    const GridLayout back = io::parse_layout_geojson(text);
    CHECK(back.columns == l.columns);
    CHECK(back.rows == l.rows);
    CHECK(back.params.alpha == l.params.alpha);
    CHECK(back.dims.street_width == l.dims.street_width);
    CHECK(back.bounds.min == l.bounds.min);
    CHECK(back.bounds.max == l.bounds.max);
    REQUIRE(back.buildings.size() == l.buildings.size());
    for (std::size_t k = 0; k < l.buildings.size(); ++k) {
      CHECK(back.buildings[k].height() == l.buildings[k].height());
      CHECK(std::equal(back.buildings[k].base().begin(), back.buildings[k].base().end(),
                       l.buildings[k].base().begin()));
    }
    const json doc = json::parse(text);
    CHECK(doc["metadata"]["seed"].get<std::uint64_t>() == 1234);
    CHECK(doc["features"][0]["properties"]["i"] == 1);
    CHECK(doc["features"][0]["properties"]["j"] == 1);
    CHECK(io::layout_geojson(l, 1234) == text);
  }

  TEST_CASE("hand-written layout without metadata") {
    const std::string text = R"({"type":"FeatureCollection","features":[
      {"type":"Feature","properties":{"height":12},
       "geometry":{"type":"Polygon","coordinates":[[[0,0],[10,0],[10,5],[0,5],[0,0]]]}}]})";
    const GridLayout l = io::parse_layout_geojson(text);
    REQUIRE(l.buildings.size() == 1);
    CHECK(l.buildings[0].vertex_count() == 4);
    CHECK(l.bounds.max == Point2{10, 5});
  }

  TEST_CASE("malformed input") {
    CHECK_THROWS_AS(io::parse_layout_geojson("{"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_layout_geojson(R"({"type":"Feature"})"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_layout_geojson(R"({"type":"FeatureCollection","features":[{"properties":{}}]})"),
                    InvalidArgument);
    CHECK_THROWS_AS(io::parse_layout_geojson(R"({"type":"FeatureCollection","features":[
      {"type":"Feature","properties":{},
       "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1]]]}}]})"),
                    InvalidArgument);
    CHECK_THROWS_AS(io::parse_layout_geojson(R"({"type":"FeatureCollection","features":[]})"), InvalidArgument);
  }

  TEST_CASE("LOS map and segments are valid GeoJSON") {
    const Box bounds{{0, 0}, {100, 100}};
    const std::vector<Building> b{Building({{40, 40}, {60, 40}, {60, 60}, {40, 60}}, 20)};
    const AbsState abs({10, 10}, 50);
    const Region shadow = total_shadow(b, abs, bounds);
    const Region los = los_map(outdoor_area(b, bounds), shadow);
    const json m = json::parse(io::losmap_geojson(shadow, los, abs, 0.8));
    CHECK(m["features"].size() == 2);
    CHECK(m["features"][0]["properties"]["kind"] == "shadow");
    CHECK(m["features"][1]["geometry"]["type"] == "MultiPolygon");
    CHECK(m["metadata"]["p_los"] == 0.8);

    const Route route({{0, 90}, {100, 90}});
    const LabeledSegments seg({{0, 30, LinkState::Los}, {30, 70, LinkState::Nlos}, {70, 100, LinkState::Los}});
    const json s = json::parse(io::segments_geojson(route, seg, abs));
    REQUIRE(s["features"].size() == 3);
    CHECK(s["features"][1]["properties"]["los"] == false);
    CHECK(s["features"][1]["geometry"]["coordinates"][0][0] == 30.0);
  }
}

TEST_SUITE("configuration") {
  TEST_CASE("defaults") {
    const CampaignConfig c = io::parse_config("{}");
    CHECK(c.realizations == 1000);
    CHECK(c.environments.size() == 1);
    CHECK(c.eirp_dbm == std::vector<double>{13, 18, 23});
    CHECK(c.sensitivity_dbm == -84.7);
  }

  TEST_CASE("full config round trip") {
    const std::string text = R"({
      "environments": ["Suburban", {"name": "Mine", "alpha": 0.2, "beta": 400, "gamma": 10}],
      "realizations": 25,
      "route": {"waypoints": [[0, 10], [500, 10]]},
      "abs": {"x": [100, 900], "h": [50, 100]},
      "eirp_dbm": [20],
      "sensitivity_dbm": -90,
      "sample_step": 0.5,
      "target_side": 800,
      "regenerate_layout": false,
      "fading": false,
      "channel": {"frequency_hz": 3.5e9, "decorr_distance": 20},
      "master_seed": "18446744073709551615",
      "validate": {"scenes": 3}
    })";
    const CampaignConfig c = io::parse_config(text);
    CHECK(c.environments[1].name == "Mine");
    CHECK(c.environments[1].gamma == 10);
    CHECK(c.route.policy == RouteSpec::Policy::Explicit);
    CHECK(c.route.waypoints.size() == 2);
    CHECK(c.abs.x_min == 100);
    CHECK(c.abs.y_max == 1000);
    CHECK(c.abs.h_max == 100);
    CHECK(c.sample_step == 0.5);
    CHECK_FALSE(c.regenerate_layout);
    CHECK_FALSE(c.fading);
    CHECK(c.channel.frequency_hz == 3.5e9);
    CHECK(c.channel.decorr_distance == 20);
    CHECK(c.master_seed == 18446744073709551615ull);

    const CampaignConfig again = io::parse_config(io::config_json(c));
    CHECK(io::config_json(again) == io::config_json(c));
  }

  TEST_CASE("rejected configs") {
    CHECK_THROWS_AS(io::parse_config("[1]"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_config(R"({"realisations": 3})"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_config(R"({"realizations": "many"})"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_config(R"({"realizations": 0})"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_config(R"({"environment": "Rural"})"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_config(R"({"environment": "Urban", "environments": ["Urban"]})"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_config(R"({"route": "diagonal"})"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_config(R"({"abs": {"z": [0, 1]}})"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_config(R"({"abs": {"h": [0, 1, 2]}})"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_config(R"({"channel": {"rho_los": "x"}})"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_config(R"({"master_seed": -4})"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_config(R"({"fading": 1})"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_config(R"({"environments": [{"alpha": 1.2, "beta": 300, "gamma": 5}]})"),
                    InvalidParameters);
  }

  TEST_CASE("environment values") {
    CHECK(io::parse_environment(R"("DenseUrban")").alpha == 0.5);
    CHECK(io::parse_environment(R"({"alpha": 0.4, "beta": 350, "gamma": 12})").name == "Custom");
  }
}

TEST_SUITE("results") {
  TEST_CASE("records round trip exactly") {
    CampaignConfig c;
    c.environments = {preset("Urban")};
    c.realizations = 5;
    c.master_seed = 3;
    std::vector<RealizationRecord> records;
    run_campaign(c, 1, &records);
    for (const RealizationRecord& r : records) {
      const std::string line = io::record_json(r);
      CHECK(line.find('\n') == std::string::npos);
      const RealizationRecord back = io::parse_record(line);
      CHECK(io::record_json(back) == line);
      CHECK(back.abs.height == r.abs.height);
      CHECK(back.segments.size() == r.segments.size());
    }
    CHECK_THROWS_AS(io::parse_record(R"({"environment": "Urban"})"), InvalidArgument);
  }

  TEST_CASE("summary agrees with the campaign statistics") {
    CampaignConfig c;
    c.environments = {preset("Suburban"), preset("DenseUrban")};
    c.realizations = 8;
    std::vector<RealizationRecord> records;
    const CampaignStats stats = run_campaign(c, 2, &records);
    const io::Summary s = io::summarize(records, c.eirp_dbm);
    REQUIRE(s.environments.size() == 2);
    for (std::size_t e = 0; e < 2; ++e) {
      CHECK(s.environments[e].environment == stats.environments[e].environment);
      CHECK(s.environments[e].realizations == 8);
      CHECK(s.environments[e].p_los == doctest::Approx(stats.environments[e].p_los).epsilon(1e-12));
      for (std::size_t k = 0; k < c.eirp_dbm.size(); ++k) {
        CHECK(s.environments[e].outage_probability[k] ==
              doctest::Approx(stats.environments[e].outage_probability[k]).epsilon(1e-12));
      }
    }
    const json doc = json::parse(io::summary_json(s, c));
    CHECK(doc["environments"][0]["outage_probability"].contains("13"));
    CHECK(doc["config"]["realizations"] == 8);
    CHECK(doc["master_seed"] == c.master_seed);
  }

  TEST_CASE("CDF tables") {
    io::CdfTable t;
    io::append_cdf(t, {1, 1, 3}, "Urban");
    CHECK(t.header == "value,probability,environment");
    REQUIRE(t.rows.size() == 2);
    CHECK(io::to_csv(t).rfind("value,probability,environment\n", 0) == 0);
    CHECK(t.rows[1] == "3,1,Urban");

    io::CdfTable thin;
    std::vector<double> many;
    for (int k = 0; k < 10000; ++k) many.push_back(k * 0.5);
    io::append_cdf(thin, many, "Urban", "13", 1000);
    CHECK(thin.rows.size() <= 1000);
    CHECK(thin.rows.size() >= 900);
    CHECK(thin.header == "value,probability,environment,eirp");
    CHECK(thin.rows.back() == "4999.5,1,Urban,13");
  }

  TEST_CASE("raster CSV") {
    Raster r;
    r.origin = {5, 6};
    r.spacing = 2;
    r.width = 2;
    r.height = 2;
    r.values = {1.5, std::numeric_limits<double>::quiet_NaN(), 3, 4};
    r.los = {1, 0, 0, 1};
    const std::string csv = io::raster_csv(r);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line[0] == '#');
    CHECK(line.find("spacing") != std::string::npos);
    std::getline(in, line);
    CHECK(line == "1.5,nan");
    std::getline(in, line);
    CHECK(line == "3,4");
  }
}
