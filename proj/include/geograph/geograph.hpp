#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "geograph/feature.hpp"
#include "geograph/geometry.hpp"

namespace geograph {

using NodeId = std::int64_t;
using Attributes = std::map<std::string, Value>;

struct Node {
  GeoPoint location;
  Attributes attributes;
};

struct Edge {
  NodeId u = 0;  // u < v
  NodeId v = 0;
  double weight = 1.0;
  Attributes attributes;
};

// Undirected simple graph whose nodes carry a location. Nodes and edges are
// kept in ascending id / (u, v) order so every traversal is deterministic.
class GeoGraph {
 public:
  using EdgeKey = std::pair<NodeId, NodeId>;

  // Adding an existing id replaces its location and attributes.
  void add_node(NodeId id, GeoPoint location, Attributes attrs = {});

  // Unordered: (u, v) and (v, u) address the same edge; re-adding replaces
  // weight and attributes. Throws Error on unknown endpoint, self-loop or
  // non-finite weight.
  void add_edge(NodeId u, NodeId v, double weight = 1.0, Attributes attrs = {});

  void set_node_attribute(NodeId id, const std::string& name, Value value);

  bool has_node(NodeId id) const { return nodes_.contains(id); }
  bool has_edge(NodeId u, NodeId v) const { return edges_.contains(key(u, v)); }
  const Node& node(NodeId id) const;
  const Edge& edge(NodeId u, NodeId v) const;

  const std::map<NodeId, Node>& nodes() const { return nodes_; }
  const std::map<EdgeKey, Edge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  static EdgeKey key(NodeId u, NodeId v) {
    return u < v ? EdgeKey{u, v} : EdgeKey{v, u};
  }

 private:
  std::map<NodeId, Node> nodes_;
  std::map<EdgeKey, Edge> edges_;
};

// Componentwise min/max over node locations. Throws Error on an empty graph.
BBox graph_bbox(const GeoGraph& g);

// Throws Error when an attribute holds a non-finite real.
void validate_attributes(const Attributes& attrs);

}  // namespace geograph
