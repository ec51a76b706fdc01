#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "a2g/geometry.hpp"
#include "a2g/rng.hpp"

namespace a2g {

/// ITU built-up parameters: area ratio, buildings per km^2, Rayleigh height scale.
struct ItuParams {
  std::string name;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  /// Throws InvalidParameters unless 0 < alpha < 1, beta > 0 and gamma > 0.
  void validate() const;
};

/// Suburban, Urban, DenseUrban or HighRiseUrban. Throws InvalidArgument otherwise.
ItuParams preset(std::string_view name);
std::vector<std::string> preset_names();

struct GridDimensions {
  double building_width;  ///< W
  double street_width;    ///< St
  double pitch() const { return building_width + street_width; }
};

/// W = 1000 sqrt(alpha / beta), St = 1000 / sqrt(beta) - W.
/// Throws InvalidParameters when St <= 0.
GridDimensions grid_dimensions(const ItuParams& params);

struct GridLayout {
  ItuParams params;
  GridDimensions dims{0.0, 0.0};
  int columns = 0;  ///< I, buildings along x
  int rows = 0;     ///< J, buildings along y
  std::vector<Building> buildings;
  Box bounds{};

  /// Index of building (i, j), both 1-based as in the vertex matrix.
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(rows) + static_cast<std::size_t>(j - 1);
  }
};

/// Square footprints laid out on a Manhattan grid inside [0, target_side]^2.
///
/// Building (i, j) spans x in [(i-1)(St+W)+St, i(St+W)] and
/// y in [(j-1)(St+W), (j-1)(St+W)+W]; I = J = floor(target_side / (St+W)),
/// the largest count whose footprints all fit. Heights are drawn
/// independently from Rayleigh(gamma) in building-index order.
GridLayout generate_manhattan(const ItuParams& params, double target_side, Rng& rng);

double sample_rayleigh(double scale, Rng& rng);

/// Outdoor area: the bounds minus every footprint.
Region outdoor_area(const GridLayout& layout);
Region outdoor_area(std::span<const Building> buildings, const Box& bounds);

}  // namespace a2g
