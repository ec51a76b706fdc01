#include "a2g/fading.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <complex>
#include <cmath>

#include "a2g/error.hpp"

namespace a2g {
namespace {

// Smallest n >= lo whose only prime factors are 2, 3 and 5.
std::size_t fft_size(std::size_t lo) {
  for (std::size_t n = std::max<std::size_t>(lo, 1);; ++n) {
    std::size_t m = n;
    for (std::size_t p : {2u, 3u, 5u}) {
      while (m % p == 0) m /= p;
    }
    if (m == 1) return n;
  }
}

// In-place 2D transform of a row-major rows x cols array.
void fft2(std::vector<std::complex<double>>& a, std::size_t rows, std::size_t cols, Eigen::FFT<double>& fft) {
  std::vector<std::complex<double>> in, out;
  in.resize(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(a.begin() + static_cast<long>(r * cols), cols, in.begin());
    fft.fwd(out, in);
    std::copy_n(out.begin(), cols, a.begin() + static_cast<long>(r * cols));
  }
  in.resize(rows);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) in[r] = a[r * cols + c];
    fft.fwd(out, in);
    for (std::size_t r = 0; r < rows; ++r) a[r * cols + c] = out[r];
  }
}

}  // namespace

std::vector<double> route_unit_process(std::span<const double> arclengths, double d_decorr, Rng& rng) {
  if (!(d_decorr > 0.0)) throw InvalidArgument("decorrelation distance must be positive");
  std::vector<double> out(arclengths.size());
  if (arclengths.empty()) return out;
  std::normal_distribution<double> normal;
  out[0] = normal(rng);
  for (std::size_t k = 1; k < arclengths.size(); ++k) {
    const double step = arclengths[k] - arclengths[k - 1];
    if (!(step >= 0.0)) throw InvalidArgument("arc lengths must be non-decreasing");
    const double a = std::exp(-step / d_decorr);
    out[k] = a * out[k - 1] + std::sqrt(1.0 - a * a) * normal(rng);
  }
  return out;
}

FadingMap map_unit_field(Point2 origin, double spacing, std::size_t width, std::size_t height, double d_decorr,
                         Rng& rng) {
  if (!(d_decorr > 0.0)) throw InvalidArgument("decorrelation distance must be positive");
  if (!(spacing > 0.0) || spacing > d_decorr / 2.0) {
    throw InvalidArgument("map spacing must lie in (0, d_decorr / 2]");
  }
  FadingMap map;
  map.origin = origin;
  map.spacing = spacing;
  map.width = width;
  map.height = height;
  map.unit_values.assign(width * height, 0.0);

  if (width == 0 || height == 0) return map;

  // Circulant embedding on a periodic grid padded by at least 8 d beyond the
  // map, which keeps the exponential kernel's spectrum non-negative.
  const auto pad = static_cast<std::size_t>(std::ceil(8.0 * d_decorr / spacing));
  const std::size_t cols = fft_size(std::max(2 * width, width + pad));
  const std::size_t rows = fft_size(std::max(2 * height, height + pad));
  std::vector<std::complex<double>> spectrum(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const double dy = static_cast<double>(std::min(r, rows - r));
    for (std::size_t c = 0; c < cols; ++c) {
      const double dx = static_cast<double>(std::min(c, cols - c));
      spectrum[r * cols + c] = std::exp(-spacing * std::hypot(dx, dy) / d_decorr);
    }
  }
  Eigen::FFT<double> fft;
  fft2(spectrum, rows, cols, fft);

  const double n = static_cast<double>(rows * cols);
  std::normal_distribution<double> normal;
  std::vector<std::complex<double>> field(rows * cols);
  for (std::size_t k = 0; k < field.size(); ++k) {
    // Residual negative eigenvalues are round-off; clamp them.
    const double lambda = std::max(0.0, spectrum[k].real());
    const double re = normal(rng);
    const double im = normal(rng);
    field[k] = std::sqrt(lambda / n) * std::complex<double>(re, im);
  }
  fft2(field, rows, cols, fft);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) map.unit_values[r * width + c] = field[r * cols + c].real();
  }
  return map;
}

std::vector<std::vector<double>> exact_covariance_draws(std::span<const Point2> points, double d_decorr, Rng& rng,
                                                        std::size_t count) {
  if (!(d_decorr > 0.0)) throw InvalidArgument("decorrelation distance must be positive");
  if (points.size() > 2000) throw InvalidArgument("exact covariance oracle is limited to 2000 points");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      c(i, j) = std::exp(-distance(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]) /
                         d_decorr);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) {
    c.diagonal().array() += 1e-10;
    llt.compute(c);
    if (llt.info() != Eigen::Success) throw Error("covariance factorisation failed");
  }
  const Eigen::MatrixXd lower = llt.matrixL();
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> out;
  out.reserve(count);
  Eigen::VectorXd z(n);
  for (std::size_t k = 0; k < count; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
    const Eigen::VectorXd x = lower.triangularView<Eigen::Lower>() * z;
    out.emplace_back(x.data(), x.data() + n);
  }
  return out;
}

std::vector<double> exact_covariance_oracle(std::span<const Point2> points, double d_decorr, Rng& rng) {
  return exact_covariance_draws(points, d_decorr, rng, 1).front();
}

std::vector<double> scale_fading(std::span<const double> unit_values, std::span<const double> thetas_deg,
                                 std::span<const LinkState> states, const ChannelParams& params) {
  if (unit_values.size() != thetas_deg.size() || unit_values.size() != states.size()) {
    throw InvalidArgument("fading inputs differ in length");
  }
  std::vector<double> out(unit_values.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = shadow_std(thetas_deg[k], states[k], params) * unit_values[k];
  }
  return out;
}

}  // namespace a2g
