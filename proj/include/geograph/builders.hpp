#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geograph/adjacency.hpp"
#include "geograph/feature.hpp"
#include "geograph/geograph.hpp"

namespace geograph {

// Absent observation in a time series.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

// Pairs connect when their statistic is strictly greater than `value`.
struct Threshold {
  double value = 0.0;

  explicit Threshold(double v);
  bool passes(double statistic) const { return statistic > value; }
};

class TimeSeriesSet {
 public:
  // All series must share one length T >= 2 and every id needs a location.
  TimeSeriesSet(std::vector<NodeId> ids, std::map<NodeId, GeoPoint> locations,
                std::map<NodeId, std::vector<double>> series, std::string cadence = {});

  const std::vector<NodeId>& ids() const { return ids_; }
  const GeoPoint& location(NodeId id) const { return locations_.at(id); }
  const std::vector<double>& series(NodeId id) const { return series_.at(id); }
  std::size_t length() const { return length_; }
  const std::string& cadence() const { return cadence_; }
  bool has_missing() const;

 private:
  std::vector<NodeId> ids_;
  std::map<NodeId, GeoPoint> locations_;
  std::map<NodeId, std::vector<double>> series_;
  std::size_t length_ = 0;
  std::string cadence_;
};

// Directed person flows between zones; absent pairs are zero.
class ODMatrix {
 public:
  void add_zone(NodeId id, GeoPoint centroid);
  // Throws Error on unknown zones, negative or non-finite flow, or a
  // directed pair that was already given.
  void add_flow(NodeId origin, NodeId destination, double flow);

  const std::map<NodeId, GeoPoint>& zones() const { return zones_; }
  double flow(NodeId origin, NodeId destination) const;

 private:
  std::map<NodeId, GeoPoint> zones_;
  std::map<std::pair<NodeId, NodeId>, double> flows_;
};

// Pearson r over indices where both values are present, clamped to [-1, 1].
// nullopt when fewer than min_overlap shared samples or either side has zero
// variance on them. Throws Error on a length mismatch or min_overlap < 2.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y,
                              std::size_t min_overlap);

struct CorrelationNetwork {
  GeoGraph graph;
  std::vector<NodeId> zero_variance;  // kept as isolated nodes
};

// min_overlap defaults to the full length, or min(10, T) when any sample is
// missing. Edge weight and attribute "r" hold the correlation.
CorrelationNetwork correlation_network(const TimeSeriesSet& ts, Threshold tau,
                                       std::optional<std::size_t> min_overlap = std::nullopt,
                                       unsigned workers = 0);

// Symmetrized flow F = flow(u->v) + flow(v->u); edge when F > tau with
// weight F. Nodes carry the resulting "degree".
GeoGraph flow_network(const ODMatrix& od, Threshold tau);

// Point features with an integer "id" field (any case) plus the adjacency
// over those ids. Nodes keep every point attribute.
GeoGraph graph_from_adjacency(const FeatureCollection& points, const AdjacencyMatrix& m);

}  // namespace geograph
