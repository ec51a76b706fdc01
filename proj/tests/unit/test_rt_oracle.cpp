#include <doctest.h>

#include <random>

#include "a2g/campaign.hpp"
#include "a2g/environment.hpp"
#include "a2g/error.hpp"
#include "a2g/rt_oracle.hpp"
#include "oracles.hpp"

using namespace a2g;

namespace {

Building box(double x0, double y0, double x1, double y1, double h) {
  return Building({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, h);
}

struct Scene {
  std::vector<Building> buildings;
  AbsState abs;
};

Scene random_scene(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> c(-200, 200), s(5, 30), h(5, 80);
  Scene scene;
  scene.abs = AbsState({0, 0}, 100);
  while (static_cast<int>(scene.buildings.size()) < count) {
    const double x = c(rng), y = c(rng);
    const double w = s(rng), d = s(rng);
    if (x <= 0 && x + w >= 0 && y <= 0 && y + d >= 0) continue;
    scene.buildings.push_back(box(x, y, x + w, y + d, h(rng)));
  }
  return scene;
}

bool indoor(Point2 p, const std::vector<Building>& buildings) {
  for (const Building& b : buildings) {
    if (locate(p, b.footprint()) != Location::Outside) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("point classification") {
  TEST_CASE("no buildings is LOS") {
    CHECK(los_at_point({50, 50}, AbsState({0, 0}, 100), std::vector<Building>{}) == LinkState::Los);
  }

  TEST_CASE("height at the crossing decides") {
    // The ray is about 30 m high over the block.
    const AbsState abs({0, 0}, 60);
    const std::vector<Building> tall{box(49.5, -5, 50.5, 5, 50)};
    const std::vector<Building> low{box(49.5, -5, 50.5, 5, 20)};
    CHECK(los_at_point({100, 0}, abs, tall) == LinkState::Nlos);
    CHECK(los_at_point({100, 0}, abs, low) == LinkState::Los);
  }

  TEST_CASE("grazing counts as blocking") {
    const Building b = box(10, 10, 20, 20, 100);
    CHECK(ray_blocked_by({20, 0}, AbsState({0, 20}, 50), b));
    CHECK(ray_blocked_by({30, 10}, AbsState({0, 10}, 50), b));
    CHECK_FALSE(ray_blocked_by({30, 9.999}, AbsState({0, 9.999}, 50), b));
  }

  TEST_CASE("exact tie at roof height is blocked") {
    // Far wall at x = 60, t = 0.6: ray height 100 * 0.4 = 40.
    const AbsState abs({0, 0}, 100);
    CHECK(ray_blocked_by({100, 0}, abs, box(40, -5, 60, 5, 40)));
    CHECK_FALSE(ray_blocked_by({100, 0}, abs, box(40, -5, 60, 5, 39.999)));
  }

  TEST_CASE("query inside a footprint") {
    const std::vector<Building> b{box(0, 0, 10, 10, 5)};
    CHECK_THROWS_AS(los_at_point({5, 5}, AbsState({50, 50}, 100), b), InvalidQuery);
    CHECK(los_at_point({10, 5}, AbsState({50, 5}, 100), b) == LinkState::Nlos);
  }

  TEST_CASE("agrees with the slab test on boxes") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> c(-100, 100), s(1, 40), h(1, 150), H(20, 200);
    int blocked = 0;
    for (int k = 0; k < 100000; ++k) {
      const double x = c(rng), y = c(rng), w = s(rng), d = s(rng), bh = h(rng);
      const Building b = box(x, y, x + w, y + d, bh);
      const AbsState abs({c(rng), c(rng)}, H(rng));
      const Point2 ue{c(rng), c(rng)};
      if (locate(ue, b.footprint()) == Location::Inside) continue;
      const bool expected = oracle::slab_blocked(ue, abs.position, abs.height, x, x + w, y, y + d, bh);
      blocked += expected;
      REQUIRE(ray_blocked_by(ue, abs, b) == expected);
    }
    CHECK(blocked > 1000);
  }

  TEST_CASE("translation and quarter-turn invariance") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> c(-300, 300);
    for (int trial = 0; trial < 20; ++trial) {
      const Scene scene = random_scene(rng, 15);
      std::vector<Building> shifted, turned;
      const Point2 t{512.0, -256.0};
      for (const Building& b : scene.buildings) {
        std::vector<Point2> ps, pr;
        for (Point2 p : b.base()) {
          ps.push_back(p + t);
          pr.push_back({-p.y, p.x});
        }
        shifted.emplace_back(ps, b.height());
        turned.emplace_back(pr, b.height());
      }
      const AbsState abs_shifted(scene.abs.position + t, scene.abs.height);
      for (int k = 0; k < 200; ++k) {
        const Point2 ue{c(rng), c(rng)};
        if (indoor(ue, scene.buildings)) continue;
        const LinkState base = los_at_point(ue, scene.abs, scene.buildings);
        CHECK(los_at_point(ue + t, abs_shifted, shifted) == base);
        CHECK(los_at_point({-ue.y, ue.x}, scene.abs, turned) == base);
      }
    }
  }

  TEST_CASE("raising a building never clears a ray") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> c(-300, 300), lift(0, 60);
    for (int trial = 0; trial < 20; ++trial) {
      const Scene scene = random_scene(rng, 15);
      std::vector<Building> raised;
      for (const Building& b : scene.buildings) {
        raised.emplace_back(std::vector<Point2>(b.base().begin(), b.base().end()), b.height() + lift(rng));
      }
      for (int k = 0; k < 200; ++k) {
        const Point2 ue{c(rng), c(rng)};
        if (indoor(ue, scene.buildings)) continue;
        if (los_at_point(ue, scene.abs, scene.buildings) == LinkState::Nlos) {
          CHECK(los_at_point(ue, scene.abs, raised) == LinkState::Nlos);
        }
      }
    }
  }
}

TEST_SUITE("route sampling") {
  TEST_CASE("sample placement") {
    const Route route({{0, 0}, {100, 0}});
    const RtLabels rt = segment_route_rt(route, 10.0, AbsState({50, 50}, 100), std::vector<Building>{});
    REQUIRE(rt.sample_count() == 1001);
    CHECK(rt.sample_arclengths.front() == 0.0);
    CHECK(rt.sample_arclengths.back() == 100.0);
    for (std::size_t k = 1; k < rt.sample_count(); ++k) {
      CHECK(rt.sample_arclengths[k] > rt.sample_arclengths[k - 1]);
    }
    for (LinkState s : rt.labels) CHECK(s == LinkState::Los);
    CHECK(segment_route_rt(Route({{0, 0}, {0.1, 0}}), 1.0, AbsState({0, 0}, 10), std::vector<Building>{})
              .sample_count() == 2);
    CHECK_THROWS_AS(segment_route_rt(route, 0.0, AbsState({0, 0}, 10), std::vector<Building>{}), InvalidArgument);
  }

  TEST_CASE("chord through one shadow") {
    // Roof projects to [80, 120] x [-20, 20]; the line x = 90 crosses 40 m of shadow.
    const AbsState abs({0, 0}, 100);
    const std::vector<Building> b{box(40, -10, 60, 10, 50)};
    const Route route({{90, -100}, {90, 100}});
    const RtLabels rt = segment_route_rt(route, 10.0, abs, b);
    std::size_t nlos = 0;
    for (LinkState s : rt.labels) nlos += s == LinkState::Nlos;
    CHECK(std::abs(static_cast<double>(nlos) * 0.1 - 40.0) <= 0.2);

    const Box bounds{{-50, -150}, {250, 150}};
    const Region shadow = union_shadows(std::vector<Region>{building_shadow(b[0], abs, bounds)}, bounds);
    const LabeledSegments seg = segment_route(route, shadow);
    CHECK(seg.length_of(LinkState::Nlos) == doctest::Approx(40.0));
    CHECK(compare_labels(seg, rt, 1e-6).count() == 0);
  }

  TEST_CASE("Manhattan scenes agree with the shadow segmentation") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      Rng rng = make_stream(seed, "rt-scene", 0);
      const GridLayout layout = generate_manhattan(preset(preset_names()[seed]), 400.0, rng);
      const AbsState abs({200, 180}, 90);
      RouteSpec spec;
      const Route route = build_route(layout, spec, rng);
      const Region shadow = total_shadow(layout.buildings, abs, layout.bounds);
      const LabeledSegments seg = segment_route(route, shadow);
      const RtLabels rt = segment_route_rt(route, 5.0, abs, layout.buildings);
      const MismatchReport report = compare_labels(seg, rt, 1e-6);
      CHECK(report.count() == 0);
      CHECK(report.compared + report.excluded == rt.sample_count());
    }
  }
}

TEST_SUITE("label comparison") {
  const LabeledSegments kSegments({{0, 40, LinkState::Los}, {40, 100, LinkState::Nlos}});

  RtLabels labels_from(const LabeledSegments& seg) {
    RtLabels rt;
    for (int k = 0; k <= 100; ++k) {
      rt.sample_arclengths.push_back(k);
      rt.labels.push_back(seg.label_at(k));
    }
    return rt;
  }

  TEST_CASE("identical labels") {
    const MismatchReport r = compare_labels(kSegments, labels_from(kSegments), 1e-6);
    CHECK(r.count() == 0);
    CHECK(r.excluded == 1);
    CHECK(r.compared == 100);
  }

  TEST_CASE("one flipped sample") {
    RtLabels rt = labels_from(kSegments);
    rt.labels[70] = LinkState::Los;
    const MismatchReport r = compare_labels(kSegments, rt, 1e-6);
    REQUIRE(r.count() == 1);
    CHECK(r.mismatches[0].sample == 70);
    CHECK(r.mismatches[0].arclength == 70.0);
    CHECK(r.mismatches[0].gbsp == LinkState::Nlos);
    CHECK(r.mismatches[0].rt == LinkState::Los);
  }

  TEST_CASE("flips inside the boundary band are ignored") {
    RtLabels rt = labels_from(kSegments);
    rt.labels[40] = LinkState::Los;
    CHECK(compare_labels(kSegments, rt, 1e-6).count() == 0);
    rt.labels[39] = LinkState::Nlos;
    CHECK(compare_labels(kSegments, rt, 1e-6).count() == 1);
    CHECK(compare_labels(kSegments, rt, 1.5).count() == 0);
  }
}
