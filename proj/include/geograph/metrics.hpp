#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geograph/geograph.hpp"

namespace geograph {

// One finite value per node of the graph it was computed on.
struct MetricVector {
  std::string name;
  std::map<NodeId, double> values;
};

MetricVector degree(const GeoGraph& g);

// Local clustering: 2 * triangles(v) / (k (k - 1)); 0 when k < 2.
MetricVector clustering_coefficient(const GeoGraph& g);

struct ShortestPaths {
  std::map<NodeId, std::optional<double>> distance;  // nullopt: unreachable
  std::map<NodeId, double> path_count;               // 0 for unreachable nodes
};

// Hop distances (BFS) or positive-weight distances (Dijkstra) from `source`,
// with the number of distinct shortest paths to every node.
ShortestPaths shortest_paths(const GeoGraph& g, NodeId source, bool weighted);

struct BetweennessOptions {
  bool normalized = false;
  bool weighted = false;
  // 0 = hardware concurrency, capped by GEOGRAPH_THREADS when set.
  unsigned workers = 0;
};

// Brandes accumulation over unordered pairs (each s < t counted once).
// Normalized values divide by (n - 1)(n - 2) / 2 and are all zero for n < 3.
// Output is bitwise identical for any worker count.
MetricVector betweenness(const GeoGraph& g, const BetweennessOptions& options = {});

// Copies g with each vector attached as a real-valued node attribute named
// after the vector. Throws Error if a vector does not cover exactly the
// graph's nodes.
GeoGraph attach_metrics(const GeoGraph& g, const std::vector<MetricVector>& vectors);

}  // namespace geograph
