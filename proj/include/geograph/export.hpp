#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geograph/feature.hpp"
#include "geograph/geograph.hpp"

namespace geograph {

// Classing of a node and/or edge metric into an integer `class` attribute:
// class k means breaks[k-1] <= value < breaks[k] (class 0 below the first
// break, class breaks.size() at or above the last).
struct ExportStyle {
  std::optional<std::string> node_metric;
  std::optional<std::string> edge_metric;
  std::vector<double> breaks;  // strictly ascending
};

int class_of(double value, const std::vector<double>& breaks);

// Adds the `class` attribute. Throws Error when breaks are not strictly
// ascending or the metric is missing or non-numeric somewhere.
GeoGraph apply_style(const GeoGraph& g, const ExportStyle& style);

// Attribute name as stored in a DBF header (first 10 bytes).
std::string dbf_field_name(const std::string& name);

// One 2-point polyline per edge, u -> v, in (u, v) order. Fields: source,
// target, weight, then edge attributes in name order.
FeatureCollection edges_to_features(const GeoGraph& g);

// One point per node in id order. Fields: id, then node attributes in name
// order. Kinds are inferred: integer when every value is integral, real when
// numeric, logical when boolean, text otherwise. Throws Error listing names
// that collide after truncation to 10 characters.
FeatureCollection nodes_to_features(const GeoGraph& g);

}  // namespace geograph
