#include <doctest.h>

#include <cmath>

#include "a2g/error.hpp"
#include "a2g/fading.hpp"
#include "oracles.hpp"

using namespace a2g;

namespace {

// Pooled correlation over many maps at cell offset (dx, dy).
double map_acf(const std::vector<FadingMap>& maps, int dx, int dy) {
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (const FadingMap& m : maps) {
    const int w = static_cast<int>(m.width), h = static_cast<int>(m.height);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const int c2 = c + dx, r2 = r + dy;
        if (c2 < 0 || c2 >= w || r2 < 0 || r2 >= h) continue;
        const double a = m.at(c, r), b = m.at(c2, r2);
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
      }
    }
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<FadingMap> make_maps(int count, std::size_t side, double spacing, std::uint64_t seed) {
  std::vector<FadingMap> maps;
  for (int k = 0; k < count; ++k) {
    Rng rng = make_stream(seed, "map-test", static_cast<std::uint64_t>(k));
    maps.push_back(map_unit_field({0, 0}, spacing, side, side, 11.0, rng));
  }
  return maps;
}

}  // namespace

TEST_SUITE("route process") {
  TEST_CASE("duplicated points give identical values") {
    Rng rng(1);
    const std::vector<double> s{0, 1, 1, 2, 2, 2, 3};
    const std::vector<double> u = route_unit_process(s, 11.0, rng);
    CHECK(u[1] == u[2]);
    CHECK(u[3] == u[4]);
    CHECK(u[4] == u[5]);
  }

  TEST_CASE("decreasing arc lengths are rejected") {
    Rng rng(1);
    CHECK_THROWS_AS(route_unit_process(std::vector<double>{0, 2, 1}, 11.0, rng), InvalidArgument);
    CHECK_THROWS_AS(route_unit_process(std::vector<double>{0, 1}, 0.0, rng), InvalidArgument);
  }

  TEST_CASE("exponential autocorrelation") {
    Rng rng(2);
    std::vector<double> s(1000000);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = static_cast<double>(k);
    const std::vector<double> u = route_unit_process(s, 11.0, rng);
    CHECK(oracle::mean(u) == doctest::Approx(0.0).epsilon(0.02).scale(1.0));
    CHECK(oracle::variance(u) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(oracle::acf(u, 11) == doctest::Approx(std::exp(-1.0)).epsilon(0.01 / std::exp(-1.0)));
    CHECK(std::abs(oracle::acf(u, 220)) < 0.01);
    for (std::size_t lag : {1u, 5u, 22u, 33u}) {
      CHECK(oracle::acf(u, lag) == doctest::Approx(std::exp(-static_cast<double>(lag) / 11.0)).epsilon(0.05));
    }
  }

  TEST_CASE("irregular spacing keeps the exact correlation") {
    // Pairs at distance 7 m, preceded by random gaps.
    double sxy = 0.0, sxx = 0.0;
    Rng rng(3);
    std::uniform_real_distribution<double> gap(0, 30);
    for (int k = 0; k < 100000; ++k) {
      const double s0 = gap(rng);
      const std::vector<double> s{0.0, s0, s0 + 7.0};
      const std::vector<double> u = route_unit_process(s, 11.0, rng);
      sxy += u[1] * u[2];
      sxx += u[1] * u[1];
    }
    CHECK(sxy / sxx == doctest::Approx(std::exp(-7.0 / 11.0)).epsilon(0.03));
  }

  TEST_CASE("deterministic for a given seed") {
    std::vector<double> s(1000);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = 0.5 * static_cast<double>(k);
    Rng a(42), b(42);
    CHECK(route_unit_process(s, 11.0, a) == route_unit_process(s, 11.0, b));
  }
}

TEST_SUITE("map field") {
  TEST_CASE("single cell is standard normal") {
    std::vector<double> v;
    for (int k = 0; k < 20000; ++k) {
      Rng rng = make_stream(5, "cell", static_cast<std::uint64_t>(k));
      const FadingMap m = map_unit_field({0, 0}, 2.0, 1, 1, 11.0, rng);
      REQUIRE(m.unit_values.size() == 1);
      v.push_back(m.unit_values[0]);
    }
    CHECK(std::abs(oracle::mean(v)) < 0.03);
    CHECK(oracle::variance(v) == doctest::Approx(1.0).epsilon(0.03));
  }

  TEST_CASE("spacing above half the decorrelation distance is rejected") {
    Rng rng(6);
    CHECK_THROWS_AS(map_unit_field({0, 0}, 6.0, 10, 10, 11.0, rng), InvalidArgument);
    CHECK_THROWS_AS(map_unit_field({0, 0}, 0.0, 10, 10, 11.0, rng), InvalidArgument);
  }

  TEST_CASE("moments of a large map") {
    Rng rng(7);
    const FadingMap m = map_unit_field({0, 0}, 2.0, 400, 400, 11.0, rng);
    CHECK(std::abs(oracle::mean(m.unit_values)) < 0.1);
    const std::vector<FadingMap> maps = make_maps(50, 200, 2.0, 8);
    std::vector<double> all;
    for (const FadingMap& f : maps) all.insert(all.end(), f.unit_values.begin(), f.unit_values.end());
    CHECK(std::abs(oracle::mean(all)) < 0.02);
    CHECK(std::abs(oracle::variance(all) - 1.0) < 0.05);
  }

  TEST_CASE("isotropic exponential autocorrelation") {
    const std::vector<FadingMap> maps = make_maps(50, 200, 2.0, 9);
    CHECK(map_acf(maps, 5, 0) == doctest::Approx(std::exp(-10.0 / 11.0)).epsilon(0.05 / std::exp(-10.0 / 11.0)));
    for (int k = 1; k <= 16; ++k) {
      const double expected = std::exp(-2.0 * k / 11.0);
      const double h = map_acf(maps, k, 0);
      const double v = map_acf(maps, 0, k);
      CHECK(std::abs(h - expected) < 0.05);
      CHECK(std::abs(v - expected) < 0.05);
      CHECK(std::abs(h - v) < 0.05);
      if (k <= 11) CHECK(std::abs(map_acf(maps, k, k) - std::exp(-2.0 * k * std::sqrt(2.0) / 11.0)) < 0.05);
    }
  }

  TEST_CASE("finer spacing keeps the correlation") {
    const std::vector<FadingMap> maps = make_maps(20, 200, 1.0, 10);
    for (int k : {1, 5, 11, 22, 33}) CHECK(std::abs(map_acf(maps, k, 0) - std::exp(-k / 11.0)) < 0.05);
    for (int k : {1, 5, 11, 22, 33}) CHECK(std::abs(map_acf(maps, 0, k) - std::exp(-k / 11.0)) < 0.05);
  }

  TEST_CASE("deterministic for a given seed") {
    Rng a(11), b(11);
    CHECK(map_unit_field({0, 0}, 2.0, 50, 40, 11.0, a).unit_values ==
          map_unit_field({0, 0}, 2.0, 50, 40, 11.0, b).unit_values);
  }
}

TEST_SUITE("exact oracle") {
  TEST_CASE("single point is standard normal") {
    Rng rng(12);
    std::vector<double> v;
    const std::vector<Point2> pts{{3, 4}};
    for (const auto& d : exact_covariance_draws(pts, 11.0, rng, 20000)) v.push_back(d[0]);
    CHECK(std::abs(oracle::mean(v)) < 0.03);
    CHECK(oracle::variance(v) == doctest::Approx(1.0).epsilon(0.03));
  }

  TEST_CASE("two points at the decorrelation distance") {
    Rng rng(13);
    const std::vector<Point2> pts{{0, 0}, {11, 0}};
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (const auto& d : exact_covariance_draws(pts, 11.0, rng, 100000)) {
      sxy += d[0] * d[1];
      sxx += d[0] * d[0];
      syy += d[1] * d[1];
    }
    CHECK(std::abs(sxy / std::sqrt(sxx * syy) - std::exp(-1.0)) < 0.01);
  }

  TEST_CASE("collinear points match the route process") {
    const int n = 100;
    std::vector<Point2> pts;
    std::vector<double> s;
    for (int k = 0; k < n; ++k) {
      pts.push_back({2.0 * k, 0.0});
      s.push_back(2.0 * k);
    }
    Rng a(14), b(15);
    const auto exact = exact_covariance_draws(pts, 11.0, a, 2000);
    std::vector<double> inc_exact, inc_route, lag5_exact, lag5_route;
    for (int r = 0; r < 2000; ++r) {
      const std::vector<double> u = route_unit_process(s, 11.0, b);
      inc_exact.push_back(exact[r][51] - exact[r][50]);
      inc_route.push_back(u[51] - u[50]);
      lag5_exact.push_back(exact[r][55] - exact[r][50]);
      lag5_route.push_back(u[55] - u[50]);
    }
    CHECK(oracle::ks_pvalue(inc_exact, inc_route) > 0.01);
    CHECK(oracle::ks_pvalue(lag5_exact, lag5_route) > 0.01);
  }

  TEST_CASE("dense configurations factorise") {
    std::vector<Point2> pts;
    for (int k = 0; k < 300; ++k) pts.push_back({0.001 * k, 0.0});
    Rng rng(16);
    CHECK(exact_covariance_oracle(pts, 11.0, rng).size() == 300);
    std::vector<Point2> many(2001);
    CHECK_THROWS_AS(exact_covariance_oracle(many, 11.0, rng), InvalidArgument);
  }
}

TEST_SUITE("scaling") {
  TEST_CASE("overhead fading vanishes") {
    const std::vector<double> u{0.3, -1.2, 2.0};
    const std::vector<double> t(3, 90.0);
    const std::vector<LinkState> st{LinkState::Los, LinkState::Nlos, LinkState::Los};
    for (double v : scale_fading(u, t, st, ChannelParams{})) CHECK(v == 0.0);
  }

  TEST_CASE("LOS at 30 degrees") {
    Rng rng(17);
    std::vector<double> s(1000000);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = 20.0 * static_cast<double>(k);
    const std::vector<double> u = route_unit_process(s, 11.0, rng);
    const std::vector<double> t(u.size(), 30.0);
    const std::vector<LinkState> st(u.size(), LinkState::Los);
    const std::vector<double> xi = scale_fading(u, t, st, ChannelParams{});
    CHECK(std::sqrt(oracle::variance(xi)) == doctest::Approx(0.580).epsilon(0.02));
    CHECK(std::abs(oracle::mean(xi)) < 0.01);
  }

  TEST_CASE("state only changes the scale") {
    const std::vector<double> u{0.7, 0.7};
    const std::vector<double> t{40.0, 40.0};
    const std::vector<LinkState> st{LinkState::Los, LinkState::Nlos};
    const ChannelParams p;
    const std::vector<double> xi = scale_fading(u, t, st, p);
    CHECK(xi[0] / shadow_std(40, LinkState::Los, p) == doctest::Approx(xi[1] / shadow_std(40, LinkState::Nlos, p)));
  }

  TEST_CASE("length mismatch") {
    const std::vector<double> u{0.1, 0.2};
    const std::vector<double> t{45.0};
    const std::vector<LinkState> st{LinkState::Los, LinkState::Los};
    CHECK_THROWS_AS(scale_fading(u, t, st, ChannelParams{}), InvalidArgument);
  }
}
