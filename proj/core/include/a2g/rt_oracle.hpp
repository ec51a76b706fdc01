#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "a2g/geometry.hpp"

namespace a2g {

/// Per-sample labels from the brute-force ray caster.
struct RtLabels {
  std::vector<double> sample_arclengths;
  std::vector<LinkState> labels;
  std::size_t sample_count() const { return labels.size(); }
};

/// True when the 3D segment from the ground point to the ABS meets the
/// building prism. Touching a wall or a corner counts.
bool ray_blocked_by(Point2 ue, const AbsState& abs, const Building& building);

/// NLOS iff some building blocks the ray. Checks every building.
/// Throws InvalidQuery when ue lies strictly inside a footprint.
LinkState los_at_point(Point2 ue, const AbsState& abs, std::span<const Building> buildings);

/// M = floor(length * samples_per_meter) + 1 samples, evenly spaced from 0 to
/// the route length inclusive.
RtLabels segment_route_rt(const Route& route, double samples_per_meter, const AbsState& abs,
                          std::span<const Building> buildings);

struct Mismatch {
  std::size_t sample;
  double arclength;
  LinkState gbsp;
  LinkState rt;
};

struct MismatchReport {
  std::size_t compared = 0;  ///< samples outside the boundary band
  std::size_t excluded = 0;  ///< samples within epsilon of a segment boundary
  std::vector<Mismatch> mismatches;

  std::size_t count() const { return mismatches.size(); }
};

/// Samples whose ray-traced label differs from the segment label, ignoring
/// samples within epsilon of a segment boundary.
MismatchReport compare_labels(const LabeledSegments& gbsp, const RtLabels& rt, double epsilon);

}  // namespace a2g
