#include "a2g/channel.hpp"

#include <cmath>
#include <numbers>

#include "a2g/error.hpp"

namespace a2g {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void check_elevation(double theta_deg) {
  if (!(theta_deg > 0.0 && theta_deg <= 90.0)) throw DomainError("elevation angle must lie in (0, 90] degrees");
}

}  // namespace

void ChannelParams::validate() const {
  if (!(frequency_hz > 0.0)) throw InvalidArgument("frequency must be positive");
  if (!(rho_los >= 0.0) || !(rho_nlos >= 0.0)) throw InvalidArgument("rho must be non-negative");
  if (!std::isfinite(mu_los) || !std::isfinite(mu_nlos)) throw InvalidArgument("mu must be finite");
  if (!(decorr_distance > 0.0)) throw InvalidArgument("decorrelation distance must be positive");
}

LinkGeometry LinkGeometry::between(Point2 ue, const AbsState& abs) {
  LinkGeometry g;
  g.horizontal_distance = distance(ue, abs.position);
  g.elevation_deg = elevation_angle(ue, abs);
  g.slant_distance = std::hypot(g.horizontal_distance, abs.height);
  return g;
}

double elevation_angle(Point2 ue, const AbsState& abs) {
  if (!(abs.height > 0.0)) throw DomainError("ABS height must be positive");
  return std::atan2(abs.height, distance(ue, abs.position)) / kDegToRad;
}

double free_space_loss(double distance_m, double frequency_hz) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * frequency_hz / kSpeedOfLight);
}

double reference_path_loss(double abs_height, double frequency_hz) {
  if (!(abs_height > 0.0) || !(frequency_hz > 0.0)) throw DomainError("height and frequency must be positive");
  return free_space_loss(abs_height, frequency_hz);
}

double excess_path_loss(double theta_deg, LinkState state) {
  check_elevation(theta_deg);
  if (state == LinkState::Los) return -20.0 * std::log10(std::sin(theta_deg * kDegToRad));
  return -16.16 + 12.0436 * std::exp(-(90.0 - theta_deg) / 7.52);
}

double shadow_std(double theta_deg, LinkState state, const ChannelParams& params) {
  check_elevation(theta_deg);
  const bool los = state == LinkState::Los;
  const double rho = los ? params.rho_los : params.rho_nlos;
  const double mu = los ? params.mu_los : params.mu_nlos;
  return rho * std::pow(90.0 - theta_deg, mu);
}

LossBreakdown total_loss(const LinkGeometry& geom, LinkState state, double fading_db, const ChannelParams& params,
                         double abs_height) {
  LossBreakdown out;
  out.reference_db = reference_path_loss(abs_height, params.frequency_hz);
  out.excess_db = excess_path_loss(geom.elevation_deg, state);
  out.fading_db = fading_db;
  out.total_db = out.reference_db + out.excess_db + out.fading_db;
  return out;
}

}  // namespace a2g
