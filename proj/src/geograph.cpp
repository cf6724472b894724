#include "geograph/geograph.hpp"

#include <cmath>
#include <string>

#include "geograph/error.hpp"

namespace geograph {

void validate_attributes(const Attributes& attrs) {
  for (const auto& [name, value] : attrs) {
    if (const auto* d = std::get_if<double>(&value); d && !std::isfinite(*d)) {
      throw Error("attribute '" + name + "' is not finite");
    }
  }
}

void GeoGraph::add_node(NodeId id, GeoPoint location, Attributes attrs) {
  validate_point(location);
  validate_attributes(attrs);
  nodes_[id] = Node{location, std::move(attrs)};
}

void GeoGraph::add_edge(NodeId u, NodeId v, double weight, Attributes attrs) {
  if (!has_node(u)) throw Error("edge endpoint " + std::to_string(u) + " is not a node");
  if (!has_node(v)) throw Error("edge endpoint " + std::to_string(v) + " is not a node");
  if (u == v) throw Error("self-loop on node " + std::to_string(u) + " rejected");
  if (!std::isfinite(weight)) throw Error("edge weight must be finite");
  validate_attributes(attrs);
  const auto k = key(u, v);
  edges_[k] = Edge{k.first, k.second, weight, std::move(attrs)};
}

void GeoGraph::set_node_attribute(NodeId id, const std::string& name, Value value) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error("unknown node " + std::to_string(id));
  Attributes single{{name, value}};
  validate_attributes(single);
  it->second.attributes[name] = std::move(value);
}

const Node& GeoGraph::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error("unknown node " + std::to_string(id));
  return it->second;
}

const Edge& GeoGraph::edge(NodeId u, NodeId v) const {
  auto it = edges_.find(key(u, v));
  if (it == edges_.end()) {
    throw Error("no edge between " + std::to_string(u) + " and " + std::to_string(v));
  }
  return it->second;
}

BBox graph_bbox(const GeoGraph& g) {
  if (g.node_count() == 0) throw Error("bounding box of an empty graph");
  auto it = g.nodes().begin();
  BBox box = BBox::of(it->second.location);
  for (++it; it != g.nodes().end(); ++it) box.extend(it->second.location);
  return box;
}

}  // namespace geograph
