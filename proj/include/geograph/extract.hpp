#pragma once

#include <cstddef>
#include <vector>

#include "geograph/feature.hpp"
#include "geograph/geograph.hpp"
#include "geograph/spatial_index.hpp"

namespace geograph {

enum class ConnectionMode {
  kGeometric,  // some segment pair crosses, touches, or comes within tol
  kEndpoint,   // a part endpoint of one feature lies within tol of the other
};

struct Connection {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  GeoPoint witness;

  friend bool operator==(const Connection&, const Connection&) = default;
};

using ConnectionList = std::vector<Connection>;

// 0 for geometric mode; 1e-9 times the bbox diagonal for endpoint mode.
double default_tolerance(const FeatureCollection& c, ConnectionMode mode);

// Pairs of distinct features that meet under `mode`, ordered by (i, j). The
// witness is the crossing or touching point, the midpoint of a collinear
// overlap, or the midpoint of the closest approach.
ConnectionList find_connections(const FeatureCollection& c, const SpatialIndex& idx,
                                double tol, ConnectionMode mode);

// Point geometry as is; for polylines the point halfway along the longest
// part (lowest part index on ties). Throws Error on null geometry.
GeoPoint representative_point(const Feature& f);

// Node per feature (id = ordinal) carrying its attributes; edge per
// connection with weight 1 and witness_x / witness_y attributes.
GeoGraph features_to_geograph(const FeatureCollection& c, const ConnectionList& conns);

// Exact geometric test used by find_connections, exposed for tests.
struct SegmentContact {
  double distance = 0.0;
  GeoPoint witness;
};
SegmentContact segment_contact(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c,
                               const GeoPoint& d);

}  // namespace geograph
