#pragma once

// Polygon boolean overlay.
//
// All input edges are split at their mutual crossings and at every vertex
// lying within kSnapTolerance of them. Each resulting fragment is classified
// by the coverage on its two sides; fragments with the result interior on
// exactly one side are linked back into rings. Coincident fragments from
// different inputs collapse to one, which makes shared edges (grid layouts,
// clipped wedges on the area border) exact.

#include <span>
#include <vector>

#include "a2g/geometry.hpp"

namespace a2g::overlay {

enum class Op { Union, Intersection, Difference };

/// N-way union. Inputs may overlap arbitrarily; each must be a simple polygon.
/// Throws GeometryError naming the input whose ring degenerates after snapping.
std::vector<Polygon> unite(std::span<const Polygon> polygons);

/// Binary operation between two sets of interior-disjoint polygons.
std::vector<Polygon> combine(std::span<const Polygon> a, std::span<const Polygon> b, Op op);

}  // namespace a2g::overlay

namespace a2g {

Region intersect(const Region& a, const Region& b);
Region subtract(const Region& a, const Region& b);
Region unite(const Region& a, const Region& b);

}  // namespace a2g
