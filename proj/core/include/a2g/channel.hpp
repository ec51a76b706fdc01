#pragma once

#include "a2g/geometry.hpp"

namespace a2g {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Large-scale channel parameters; defaults are the 2.5 GHz urban set.
struct ChannelParams {
  double frequency_hz = 2.5e9;
  double rho_los = 0.0272;
  double rho_nlos = 2.3197;
  double mu_los = 0.7475;
  double mu_nlos = 0.2361;
  double decorr_distance = 11.0;

  void validate() const;
};

/// Ground user (height 0) to ABS link geometry.
struct LinkGeometry {
  double horizontal_distance = 0.0;
  double elevation_deg = 90.0;
  double slant_distance = 0.0;

  static LinkGeometry between(Point2 ue, const AbsState& abs);
};

struct LossBreakdown {
  double reference_db = 0.0;  ///< free-space loss at the ABS height
  double excess_db = 0.0;     ///< elevation-dependent excess
  double fading_db = 0.0;     ///< shadow fading
  double total_db = 0.0;
};

/// Elevation of the ABS seen from a ground user, degrees in (0, 90].
double elevation_angle(Point2 ue, const AbsState& abs);

/// 20 log10(4 pi h f / c).
double reference_path_loss(double abs_height, double frequency_hz);

/// LOS: -20 log10 sin(theta). NLOS: -16.16 + 12.0436 exp(-(90 - theta) / 7.52).
/// Throws DomainError outside (0, 90].
double excess_path_loss(double theta_deg, LinkState state);

/// rho (90 - theta)^mu with the state's (rho, mu).
double shadow_std(double theta_deg, LinkState state, const ChannelParams& params);

LossBreakdown total_loss(const LinkGeometry& geom, LinkState state, double fading_db, const ChannelParams& params,
                         double abs_height);

/// EIRP minus receiver sensitivity.
inline double outage_threshold(double eirp_dbm, double sensitivity_dbm) { return eirp_dbm - sensitivity_dbm; }

/// Strictly above the threshold.
inline bool in_outage(double loss_db, double threshold_db) { return loss_db > threshold_db; }

/// Free-space loss at an arbitrary distance.
double free_space_loss(double distance_m, double frequency_hz);

}  // namespace a2g
