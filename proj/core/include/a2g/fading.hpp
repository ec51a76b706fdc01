#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "a2g/channel.hpp"
#include "a2g/geometry.hpp"
#include "a2g/rng.hpp"

namespace a2g {

struct FadingTrace {
  std::vector<double> arclengths;
  std::vector<double> unit_values;
  std::vector<double> scaled_db;
};

/// Row-major raster of unit-variance correlated values.
struct FadingMap {
  Point2 origin;
  double spacing = 1.0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> unit_values;

  double at(std::size_t col, std::size_t row) const { return unit_values[row * width + col]; }
  Point2 cell_center(std::size_t col, std::size_t row) const {
    return {origin.x + (static_cast<double>(col) + 0.5) * spacing,
            origin.y + (static_cast<double>(row) + 0.5) * spacing};
  }
};

/// First-order Gauss-Markov process along a route: u0 ~ N(0,1),
/// u[k+1] = a u[k] + sqrt(1 - a^2) w[k] with a = exp(-(s[k+1] - s[k]) / d_decorr).
/// Exact exponential autocorrelation in 1D. Throws InvalidArgument when the
/// arc lengths decrease.
std::vector<double> route_unit_process(std::span<const double> arclengths, double d_decorr, Rng& rng);

/// 2D field with exponential autocorrelation exp(-r / d_decorr), sampled by
/// circulant embedding of the covariance on a padded periodic grid.
/// Throws InvalidArgument when spacing > d_decorr / 2.
FadingMap map_unit_field(Point2 origin, double spacing, std::size_t width, std::size_t height, double d_decorr,
                         Rng& rng);

/// Exact multivariate normal draw with covariance exp(-|pi - pj| / d_decorr),
/// via Cholesky factorisation. Test oracle; at most 2000 points.
std::vector<double> exact_covariance_oracle(std::span<const Point2> points, double d_decorr, Rng& rng);

/// `count` independent draws sharing one factorisation.
std::vector<std::vector<double>> exact_covariance_draws(std::span<const Point2> points, double d_decorr, Rng& rng,
                                                        std::size_t count);

/// xi[k] = sigma(theta[k], state[k]) * u[k].
std::vector<double> scale_fading(std::span<const double> unit_values, std::span<const double> thetas_deg,
                                 std::span<const LinkState> states, const ChannelParams& params);

}  // namespace a2g
