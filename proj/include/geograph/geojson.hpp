#pragma once

#include <string>
#include <string_view>

#include "geograph/geograph.hpp"

namespace geograph {

// A FeatureCollection with one Point feature per node (id order) followed by
// one two-point LineString per edge ((u, v) order). Node properties: kind
// "node", id, attributes. Edge properties: kind "edge", source, target,
// weight, attributes. Object keys are sorted, so output is byte-stable.
// Coordinates are written as given; no CRS is asserted.
std::string to_geojson(const GeoGraph& g);

// Inverse of to_geojson. Throws ParseError on documents it did not write.
GeoGraph from_geojson(std::string_view text);

}  // namespace geograph
