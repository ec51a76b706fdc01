#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <filesystem>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "a2g/campaign.hpp"
#include "a2g/error.hpp"
#include "a2g/io.hpp"
#include "a2g/rt_oracle.hpp"

namespace a2g::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned threads = 1;
  bool verbose = false;
};

// Configuration problems map to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_raw(const Common& c) {
  if (c.config_path.empty()) return json::object();
  try {
    return json::parse(io::read_file(c.config_path));
  } catch (const json::exception& e) {
    throw UsageError("malformed config '" + c.config_path + "': " + e.what());
  }
}

CampaignConfig load_config(const Common& c) {
  CampaignConfig cfg = c.config_path.empty() ? CampaignConfig{} : io::parse_config(io::read_file(c.config_path));
  if (c.seed_set) cfg.master_seed = c.seed;
  return cfg;
}

fs::path out_dir(const Common& c) {
  fs::path dir(c.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory '" + c.out_dir + "'");
  return dir;
}

AbsState parse_abs(const std::vector<double>& v) {
  if (v.size() != 3) throw UsageError("ABS pose needs x, y and h");
  return AbsState({v[0], v[1]}, v[2]);
}

AbsState abs_from(const json& section, const std::vector<double>& flag) {
  if (!flag.empty()) return parse_abs(flag);
  if (section.contains("abs") && section["abs"].is_array()) return parse_abs(section["abs"].get<std::vector<double>>());
  throw UsageError("ABS pose missing: pass --abs x,y,h or set it in the config");
}

GridLayout layout_from(const Common& c, const std::string& layout_path, const json& section) {
  if (!layout_path.empty()) return io::parse_layout_geojson(io::read_file(layout_path));
  if (section.contains("layout") && section["layout"].is_string()) {
    fs::path p = section["layout"].get<std::string>();
    if (p.is_relative() && !c.config_path.empty()) p = fs::path(c.config_path).parent_path() / p;
    return io::parse_layout_geojson(io::read_file(p.string()));
  }
  CampaignConfig cfg = load_config(c);
  if (section.contains("environment")) cfg.environments = {io::parse_environment(section["environment"].dump())};
  return realization_layout(cfg, 0, 0);
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (t == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// generate-env ---------------------------------------------------------------

int cmd_generate_env(const Common& c, const std::string& env_name, std::ostream& out) {
  CampaignConfig cfg = load_config(c);
  if (!env_name.empty()) cfg.environments = {preset(env_name)};
  std::uint64_t seed = 0;
  const GridLayout layout = realization_layout(cfg, 0, 0, &seed);
  const fs::path path = out_dir(c) / "layout.geojson";
  io::write_file(path.string(), io::layout_geojson(layout, seed));
  out << layout.params.name << ": W=" << layout.dims.building_width << " St=" << layout.dims.street_width
      << " I=" << layout.columns << " J=" << layout.rows << " buildings=" << layout.buildings.size() << "\n"
      << "wrote " << path.string() << "\n";
  return kOk;
}

// losmap ---------------------------------------------------------------------

int cmd_losmap(const Common& c, const std::string& layout_path, const std::vector<double>& abs_flag,
               std::ostream& out) {
  const json raw = load_raw(c);
  const json section = raw.value("losmap", json::object());
  const GridLayout layout = layout_from(c, layout_path, section);
  const AbsState abs = abs_from(section, abs_flag);
  const Region shadow = total_shadow(layout.buildings, abs, layout.bounds);
  const Region outdoor = outdoor_area(layout);
  const LosProbability p = los_probability(shadow, outdoor);
  const Region los = los_map(outdoor, shadow);
  const fs::path path = out_dir(c) / "losmap.geojson";
  io::write_file(path.string(), io::losmap_geojson(shadow, los, abs, p.los));
  out << "P_LOS " << p.los << "\nP_NLOS " << p.nlos << "\nshadow polygons " << shadow.polygons().size() << "\n"
      << "wrote " << path.string() << "\n";
  return kOk;
}

// validate -------------------------------------------------------------------

struct SceneResult {
  std::size_t compared = 0;
  std::size_t excluded = 0;
  std::vector<Mismatch> mismatches;
  std::string environment;
};

int cmd_validate(const Common& c, int scenes_flag, int samples_flag, bool inject_flip, std::ostream& out) {
  const json raw = load_raw(c);
  const json section = raw.value("validate", json::object());
  CampaignConfig cfg = load_config(c);
  if (!raw.contains("environment") && !raw.contains("environments")) {
    cfg.environments.clear();
    for (const std::string& n : preset_names()) cfg.environments.push_back(preset(n));
  }
  const int scenes = scenes_flag > 0 ? scenes_flag : section.value("scenes", 100);
  const int samples = samples_flag > 0 ? samples_flag : section.value("samples", 10000);
  const double epsilon = section.value("epsilon", 1e-6);
  if (scenes < 1 || samples < 2 || !(epsilon >= 0.0)) throw UsageError("validate needs scenes >= 1, samples >= 2");

  std::vector<SceneResult> results(static_cast<std::size_t>(scenes));
  parallel_for(results.size(), c.threads, [&](std::size_t s) {
    const ItuParams& env = cfg.environments[s % cfg.environments.size()];
    Rng layout_rng = make_stream(cfg.master_seed, "validate-layout", s);
    const GridLayout layout = generate_manhattan(env, cfg.target_side, layout_rng);
    Rng abs_rng = make_stream(cfg.master_seed, "validate-abs", s);
    const AbsState abs = cfg.abs.sample(abs_rng);
    Rng route_rng = make_stream(cfg.master_seed, "validate-route", s);
    const Route route = build_route(layout, RouteSpec{}, route_rng);
    const LabeledSegments gbsp = segment_route(route, total_shadow(layout.buildings, abs, layout.bounds));
    RtLabels rt = segment_route_rt(route, (samples - 0.5) / route.length(), abs, layout.buildings);
    if (inject_flip && s == 0) {
      // Test hook: corrupt the sample farthest from any boundary.
      std::size_t pick = 0;
      double best = -1.0;
      for (std::size_t k = 0; k < rt.sample_count(); ++k) {
        const double d = gbsp.distance_to_boundary(rt.sample_arclengths[k]);
        if (d > best) best = d, pick = k;
      }
      rt.labels[pick] = rt.labels[pick] == LinkState::Los ? LinkState::Nlos : LinkState::Los;
    }
    const MismatchReport rep = compare_labels(gbsp, rt, epsilon);
    results[s] = {rep.compared, rep.excluded, rep.mismatches, env.name};
  });

  std::size_t compared = 0, excluded = 0, mismatches = 0;
  json report;
  json bad = json::array();
  for (std::size_t s = 0; s < results.size(); ++s) {
    compared += results[s].compared;
    excluded += results[s].excluded;
    mismatches += results[s].mismatches.size();
    for (const Mismatch& m : results[s].mismatches) {
      bad.push_back({{"scene", s}, {"environment", results[s].environment}, {"sample", m.sample},
                     {"arclength", m.arclength}, {"gbsp", to_string(m.gbsp)}, {"rt", to_string(m.rt)}});
    }
  }
  report["scenes"] = scenes;
  report["samples_per_scene"] = samples;
  report["points_compared"] = compared;
  report["points_excluded"] = excluded;
  report["epsilon"] = epsilon;
  report["mismatches"] = mismatches;
  report["mismatch_list"] = std::move(bad);
  io::write_file((out_dir(c) / "validate_report.json").string(), report.dump(2) + "\n");
  out << "scenes " << scenes << ", points " << compared << " (" << excluded << " within boundary band)\n"
      << mismatches << " mismatches\n";
  return mismatches == 0 ? kOk : kFailure;
}

// simulate -------------------------------------------------------------------

void write_campaign_outputs(const fs::path& dir, const CampaignConfig& cfg, const CampaignStats& stats,
                            const std::vector<RealizationRecord>& records) {
  io::CdfTable los, nlos, channel, outage;
  los.header = nlos.header = channel.header = "value,probability,environment";
  outage.header = "value,probability,environment,eirp";
  for (const EnvironmentStats& e : stats.environments) {
    io::append_cdf(los, e.los_lengths, e.environment);
    io::append_cdf(nlos, e.nlos_lengths, e.environment);
    io::append_cdf(channel, e.losses_db, e.environment, {}, 1000);
    for (std::size_t k = 0; k < stats.eirp_dbm.size(); ++k) {
      json v = stats.eirp_dbm[k];
      io::append_cdf(outage, e.outage_lengths[k], e.environment, v.dump());
    }
  }
  io::write_file((dir / "cdf_los.csv").string(), io::to_csv(los));
  io::write_file((dir / "cdf_nlos.csv").string(), io::to_csv(nlos));
  io::write_file((dir / "cdf_channel.csv").string(), io::to_csv(channel));
  io::write_file((dir / "cdf_outage.csv").string(), io::to_csv(outage));
  std::string lines;
  for (const RealizationRecord& r : records) lines += io::record_json(r) + "\n";
  io::write_file((dir / "realizations.jsonl").string(), lines);
  io::write_file((dir / "config.json").string(), io::config_json(cfg) + "\n");
  io::write_file((dir / "summary.json").string(), io::summary_json(io::summarize(records, cfg.eirp_dbm), cfg));
}

int cmd_simulate(const Common& c, int realizations_flag, std::ostream& out) {
  CampaignConfig cfg = load_config(c);
  if (realizations_flag > 0) cfg.realizations = realizations_flag;
  const fs::path dir = out_dir(c);
  std::vector<RealizationRecord> records;
  const CampaignStats stats = run_campaign(cfg, c.threads, &records);
  write_campaign_outputs(dir, cfg, stats, records);
  if (c.verbose) {
    const fs::path dumps = dir / "realizations";
    fs::create_directories(dumps);
    for (std::size_t e = 0; e < cfg.environments.size(); ++e) {
      for (int i = 0; i < cfg.realizations; ++i) {
        const RealizationResult r = run_realization(cfg, e, i);
        io::write_file((dumps / (r.environment + "_" + std::to_string(i) + ".geojson")).string(),
                       io::segments_geojson(r.route, r.segments, r.abs));
      }
    }
  }
  for (const EnvironmentStats& e : stats.environments) {
    out << e.environment << ": realizations " << e.realizations << ", P_LOS(route) " << e.p_los;
    for (std::size_t k = 0; k < stats.eirp_dbm.size(); ++k) {
      out << ", outage@" << stats.eirp_dbm[k] << "dBm " << e.outage_probability[k];
    }
    out << "\n";
  }
  out << "wrote " << dir.string() << "\n";
  return kOk;
}

// radiomap -------------------------------------------------------------------

int cmd_radiomap(const Common& c, const std::string& layout_path, const std::vector<double>& abs_flag,
                 double spacing_flag, bool no_fading, std::ostream& out) {
  const json raw = load_raw(c);
  const json section = raw.value("radiomap", json::object());
  const CampaignConfig cfg = load_config(c);
  const GridLayout layout = layout_from(c, layout_path, section);
  const AbsState abs = abs_from(section, abs_flag);
  const double spacing = spacing_flag > 0.0 ? spacing_flag : section.value("spacing", 2.0);
  const bool fading = !no_fading && section.value("fading", true);
  Rng rng = make_stream(cfg.master_seed, "radiomap", 0);
  const Raster map = radio_map(layout, abs, spacing, cfg.channel, rng, fading);
  const fs::path path = out_dir(c) / "radiomap.csv";
  io::write_file(path.string(), io::raster_csv(map));
  out << "raster " << map.width << "x" << map.height << " at " << spacing << " m\nwrote " << path.string() << "\n";
  return kOk;
}

// stats ----------------------------------------------------------------------

int cmd_stats(const Common& c, const std::string& results_dir, std::ostream& out, std::ostream& err) {
  const fs::path dir(results_dir);
  if (results_dir.empty() || !fs::is_directory(dir)) throw UsageError("results directory '" + results_dir + "' not found");
  const fs::path cfg_path = dir / "config.json";
  const fs::path rec_path = dir / "realizations.jsonl";
  if (!fs::exists(cfg_path) || !fs::exists(rec_path)) throw UsageError("results directory lacks config.json or realizations.jsonl");
  CampaignConfig cfg = io::parse_config(io::read_file(cfg_path.string()));
  std::vector<RealizationRecord> records;
  std::istringstream lines(io::read_file(rec_path.string()));
  for (std::string line; std::getline(lines, line);) {
    if (!line.empty()) records.push_back(io::parse_record(line));
  }
  const std::size_t expected = cfg.environments.size() * static_cast<std::size_t>(cfg.realizations);
  if (records.size() < expected) {
    err << "warning: " << records.size() << " of " << expected << " realizations present\n";
  }
  const fs::path target = c.out_dir == "." ? dir : out_dir(c);
  const fs::path path = target / "summary.json";
  io::write_file(path.string(), io::summary_json(io::summarize(records, cfg.eirp_dbm), cfg));
  out << "summarised " << records.size() << " realizations\nwrote " << path.string() << "\n";
  return kOk;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON configuration file");
  app->add_option("--out", c.out_dir, "Output directory");
  app->add_option_function<std::uint64_t>(
      "--seed", [&c](std::uint64_t s) { c.seed = s, c.seed_set = true; }, "Override the master seed");
  app->add_option("--threads", c.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  app->add_flag("--verbose,-v", c.verbose, "Extra output");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Air-to-ground channel simulator for aerial base stations", "a2g"};
  app.require_subcommand(1);
  Common c;

  std::string env_name, layout_path, results_dir;
  std::vector<double> abs_pose;
  double spacing = 0.0;
  int scenes = 0, samples = 0, realizations = 0;
  bool inject_flip = false, no_fading = false;

  auto* gen = app.add_subcommand("generate-env", "Write a Manhattan-grid layout as GeoJSON");
  add_common(gen, c);
  gen->add_option("--env", env_name, "Environment preset (overrides the config)");

  auto* los = app.add_subcommand("losmap", "Shadow and LOS map for one ABS pose");
  add_common(los, c);
  los->add_option("--layout", layout_path, "Layout GeoJSON");
  los->add_option("--abs", abs_pose, "ABS pose x,y,h")->delimiter(',')->expected(3);

  auto* val = app.add_subcommand("validate", "Compare shadow projection with the ray-tracing oracle");
  add_common(val, c);
  val->add_option("--scenes", scenes, "Number of random scenes");
  val->add_option("--samples", samples, "Route samples per scene");
  val->add_flag("--inject-flip", inject_flip, "Flip one oracle label (self-test)")->group("");

  auto* sim = app.add_subcommand("simulate", "Run the Monte-Carlo campaign");
  add_common(sim, c);
  sim->add_option("--realizations", realizations, "Override the realization count");

  auto* rm = app.add_subcommand("radiomap", "Channel-loss raster for one ABS pose");
  add_common(rm, c);
  rm->add_option("--layout", layout_path, "Layout GeoJSON");
  rm->add_option("--abs", abs_pose, "ABS pose x,y,h")->delimiter(',')->expected(3);
  rm->add_option("--spacing", spacing, "Cell size in meters");
  rm->add_flag("--no-fading", no_fading, "Suppress shadow fading");

  auto* st = app.add_subcommand("stats", "Recompute summary.json from a results directory");
  add_common(st, c);
  st->add_option("--results", results_dir, "Directory written by simulate")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*gen) return cmd_generate_env(c, env_name, out);
    if (*los) return cmd_losmap(c, layout_path, abs_pose, out);
    if (*val) return cmd_validate(c, scenes, samples, inject_flip, out);
    if (*sim) return cmd_simulate(c, realizations, out);
    if (*rm) return cmd_radiomap(c, layout_path, abs_pose, spacing, no_fading, out);
    if (*st) return cmd_stats(c, results_dir, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidRoute& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidParameters& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace a2g::cli
