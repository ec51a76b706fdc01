#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "a2g/environment.hpp"
#include "a2g/error.hpp"
#include "oracles.hpp"

using namespace a2g;

TEST_CASE("presets") {
  const ItuParams s = preset("Suburban");
  CHECK(s.alpha == 0.1);
  CHECK(s.beta == 750.0);
  CHECK(s.gamma == 8.0);
  const ItuParams u = preset("Urban");
  CHECK(u.alpha == 0.3);
  CHECK(u.beta == 500.0);
  CHECK(u.gamma == 15.0);
  const ItuParams d = preset("DenseUrban");
  CHECK(d.alpha == 0.5);
  CHECK(d.beta == 300.0);
  CHECK(d.gamma == 20.0);
  const ItuParams h = preset("HighRiseUrban");
  CHECK(h.alpha == 0.5);
  CHECK(h.beta == 300.0);
  CHECK(h.gamma == 50.0);
  CHECK(preset("high-rise urban").name == "HighRiseUrban");
  CHECK_THROWS_AS(preset("Rural"), InvalidArgument);
}

TEST_CASE("grid dimensions") {
  const GridDimensions s = grid_dimensions(preset("Suburban"));
  CHECK(s.building_width == doctest::Approx(11.547).epsilon(1e-4));
  CHECK(s.street_width == doctest::Approx(24.968).epsilon(1e-4));
  const GridDimensions u = grid_dimensions(preset("Urban"));
  CHECK(u.building_width == doctest::Approx(24.495).epsilon(1e-4));
  CHECK(u.street_width == doctest::Approx(20.226).epsilon(1e-3));
  const GridDimensions d = grid_dimensions(preset("DenseUrban"));
  CHECK(d.building_width == doctest::Approx(40.825).epsilon(1e-4));
  CHECK(d.street_width == doctest::Approx(16.910).epsilon(1e-3));
  // alpha >= 1 is rejected before the street width check.
  CHECK_THROWS_AS(grid_dimensions({"x", 1.0, 300, 10}), InvalidParameters);
  CHECK_THROWS_AS(grid_dimensions({"x", 0.5, 0.0, 10}), InvalidParameters);
  CHECK_THROWS_AS(grid_dimensions({"x", 0.5, 300, -1}), InvalidParameters);
}

TEST_CASE("Suburban layout in a 1000 m square") {
  Rng rng(1);
  const GridLayout l = generate_manhattan(preset("Suburban"), 1000.0, rng);
  CHECK(l.columns == 27);
  CHECK(l.rows == 27);
  CHECK(l.buildings.size() == 729);
  const Box& first = l.buildings[l.index(1, 1)].bbox();
  CHECK(first.min.x == doctest::Approx(24.968).epsilon(1e-4));
  CHECK(first.max.x == doctest::Approx(36.515).epsilon(1e-4));
  CHECK(first.min.y == 0.0);
  CHECK(first.max.y == doctest::Approx(11.547).epsilon(1e-4));
  for (const Building& b : l.buildings) {
    CHECK(l.bounds.contains(b.bbox().min));
    CHECK(l.bounds.contains(b.bbox().max));
    CHECK(signed_area(b.base()) > 0.0);
  }
}

TEST_CASE("street pitch and disjoint footprints") {
  Rng rng(2);
  const GridLayout l = generate_manhattan(preset("Urban"), 1000.0, rng);
  const double pitch = l.dims.pitch();
  for (int i = 1; i < l.columns; ++i) {
    const double a = l.buildings[l.index(i, 1)].bbox().min.x;
    const double b = l.buildings[l.index(i + 1, 1)].bbox().min.x;
    CHECK(b - a == doctest::Approx(pitch));
    CHECK(l.buildings[l.index(i + 1, 1)].bbox().min.x > l.buildings[l.index(i, 1)].bbox().max.x);
  }
  for (int j = 1; j < l.rows; ++j) {
    CHECK(l.buildings[l.index(1, j + 1)].bbox().min.y > l.buildings[l.index(1, j)].bbox().max.y);
  }
}

TEST_CASE("built-up ratio approaches alpha") {
  for (const std::string& name : preset_names()) {
    Rng rng(3);
    const ItuParams p = preset(name);
    const GridLayout l = generate_manhattan(p, 5000.0, rng);
    const double ratio = static_cast<double>(l.buildings.size()) * l.dims.building_width * l.dims.building_width /
                         l.bounds.area();
    CHECK(ratio == doctest::Approx(p.alpha).epsilon(0.03));
  }
}

TEST_CASE("target smaller than one block is rejected") {
  Rng rng(4);
  CHECK_THROWS_AS(generate_manhattan(preset("Suburban"), 30.0, rng), InvalidParameters);
}

TEST_CASE("same seed gives the same layout") {
  Rng a(99), b(99);
  const GridLayout la = generate_manhattan(preset("DenseUrban"), 1000.0, a);
  const GridLayout lb = generate_manhattan(preset("DenseUrban"), 1000.0, b);
  REQUIRE(la.buildings.size() == lb.buildings.size());
  for (std::size_t k = 0; k < la.buildings.size(); ++k) CHECK(la.buildings[k].height() == lb.buildings[k].height());
}

TEST_CASE("Rayleigh heights") {
  Rng rng(5);
  const double gamma = 15.0;
  std::vector<double> h(100000);
  for (double& v : h) v = sample_rayleigh(gamma, rng);
  CHECK(oracle::mean(h) == doctest::Approx(gamma * std::sqrt(std::numbers::pi / 2)).epsilon(0.01));

  // One-sample KS against the Rayleigh CDF, first 10^4 draws.
  std::vector<double> s(h.begin(), h.begin() + 10000);
  std::sort(s.begin(), s.end());
  double d = 0.0;
  const double n = static_cast<double>(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double f = 1.0 - std::exp(-s[k] * s[k] / (2 * gamma * gamma));
    d = std::max({d, std::abs(f - k / n), std::abs((k + 1) / n - f)});
  }
  CHECK(d < 1.63 / std::sqrt(n));
}

TEST_CASE("outdoor area") {
  const Box bounds{{0, 0}, {100, 100}};
  CHECK(area(outdoor_area(std::vector<Building>{}, bounds).polygons()[0]) == doctest::Approx(10000.0));
  const std::vector<Building> one{Building({{10, 10}, {20, 10}, {20, 20}, {10, 20}}, 5)};
  CHECK(polygon_area(outdoor_area(one, bounds)) == doctest::Approx(9900.0));

  Rng rng(6);
  const GridLayout l = generate_manhattan(preset("Suburban"), 1000.0, rng);
  const Region outdoor = outdoor_area(l);
  const double w = l.dims.building_width;
  const double expected = 1.0 - static_cast<double>(l.buildings.size()) * w * w / 1e6;
  CHECK(polygon_area(outdoor) / 1e6 == doctest::Approx(expected).epsilon(1e-9));

  oracle::ManhattanCaster caster(l);
  std::mt19937_64 u(7);
  std::uniform_real_distribution<double> c(0, 1000);
  int out = 0;
  const int n = 1000000;
  for (int k = 0; k < n; ++k) out += !caster.indoor({c(u), c(u)});
  CHECK(static_cast<double>(out) / n == doctest::Approx(expected).epsilon(0.002));
}
