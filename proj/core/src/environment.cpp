#include "a2g/environment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "a2g/error.hpp"
#include "a2g/overlay.hpp"

namespace a2g {
namespace {

struct PresetRow {
  const char* name;
  double alpha;
  double beta;
  double gamma;
};

constexpr PresetRow kPresets[] = {
    {"Suburban", 0.1, 750.0, 8.0},
    {"Urban", 0.3, 500.0, 15.0},
    {"DenseUrban", 0.5, 300.0, 20.0},
    {"HighRiseUrban", 0.5, 300.0, 50.0},
};

std::string fold(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

void ItuParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameters("alpha must lie in (0, 1)");
  if (!(beta > 0.0)) throw InvalidParameters("beta must be positive");
  if (!(gamma > 0.0)) throw InvalidParameters("gamma must be positive");
}

ItuParams preset(std::string_view name) {
  const std::string key = fold(name);
  for (const PresetRow& row : kPresets) {
    if (fold(row.name) == key) return {row.name, row.alpha, row.beta, row.gamma};
  }
  throw InvalidArgument("unknown environment preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const PresetRow& row : kPresets) names.emplace_back(row.name);
  return names;
}

GridDimensions grid_dimensions(const ItuParams& params) {
  params.validate();
  const double w = 1000.0 * std::sqrt(params.alpha / params.beta);
  const double st = 1000.0 / std::sqrt(params.beta) - w;
  if (!(st > 0.0)) throw InvalidParameters("street width is not positive for these parameters");
  return {w, st};
}

double sample_rayleigh(double scale, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Inverse CDF; 1 - u keeps the log argument in (0, 1].
  return scale * std::sqrt(-2.0 * std::log(1.0 - unit(rng)));
}

GridLayout generate_manhattan(const ItuParams& params, double target_side, Rng& rng) {
  const GridDimensions dims = grid_dimensions(params);
  if (!(target_side > dims.pitch())) throw InvalidParameters("target area is smaller than one grid block");

  GridLayout layout;
  layout.params = params;
  layout.dims = dims;
  layout.bounds = Box::square(target_side);
  const double pitch = dims.pitch();
  const int count = static_cast<int>(std::floor(target_side / pitch));
  layout.columns = count;
  layout.rows = count;
  layout.buildings.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    const double x0 = (i - 1) * pitch + dims.street_width;
    const double x1 = i * pitch;
    for (int j = 1; j <= count; ++j) {
      const double y0 = (j - 1) * pitch;
      const double y1 = (j - 1) * pitch + dims.building_width;
      const double h = sample_rayleigh(params.gamma, rng);
      layout.buildings.emplace_back(std::vector<Point2>{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, h);
    }
  }
  return layout;
}

Region outdoor_area(std::span<const Building> buildings, const Box& bounds) {
  Region area = Region::full(bounds);
  if (buildings.empty()) return area;
  std::vector<Polygon> footprints;
  footprints.reserve(buildings.size());
  for (const Building& b : buildings) footprints.push_back(b.footprint());
  return Region(overlay::combine(area.polygons(), footprints, overlay::Op::Difference), bounds);
}

Region outdoor_area(const GridLayout& layout) { return outdoor_area(layout.buildings, layout.bounds); }

}  // namespace a2g
