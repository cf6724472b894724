#include "geograph/geojson.hpp"

#include <json.hpp>

#include "geograph/error.hpp"
#include "strings.hpp"

namespace geograph {

namespace {

using nlohmann::json;

json to_json(const Value& v) {
  struct Visitor {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(std::int64_t i) const { return i; }
    json operator()(double d) const { return d; }
    json operator()(const std::string& s) const { return s; }
    json operator()(bool b) const { return b; }
  };
  return std::visit(Visitor{}, v);
}

Value from_json(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return std::monostate{};
    case json::value_t::boolean: return j.get<bool>();
    case json::value_t::number_integer: return j.get<std::int64_t>();
    case json::value_t::number_unsigned: {
      const auto u = j.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) return static_cast<double>(u);
      return static_cast<std::int64_t>(u);
    }
    case json::value_t::number_float: return j.get<double>();
    case json::value_t::string: return j.get<std::string>();
    default: return j.dump();
  }
}

json point(const GeoPoint& p) { return json::array({p.x, p.y}); }

GeoPoint read_point(const json& coords, const std::string& where) {
  if (!coords.is_array() || coords.size() < 2 || !coords[0].is_number() || !coords[1].is_number()) {
    throw ParseError(where + ": bad coordinates");
  }
  return {coords[0].get<double>(), coords[1].get<double>()};
}

NodeId read_id(const json& props, const char* key, const std::string& where) {
  auto it = props.find(key);
  if (it == props.end() || !it->is_number_integer()) {
    throw ParseError(where + ": property '" + key + "' must be an integer");
  }
  return it->get<NodeId>();
}

}  // namespace

std::string to_geojson(const GeoGraph& g) {
  json features = json::array();
  for (const auto& [id, node] : g.nodes()) {
    json props = json::object();
    for (const auto& [name, value] : node.attributes) {
      if (name == "kind") throw Error("node attribute 'kind' is reserved in GeoJSON output");
      if (name == "id") {
        if (value != Value(id)) throw Error("node " + std::to_string(id) + " has a conflicting 'id' attribute");
        continue;
      }
      props[name] = to_json(value);
    }
    props["kind"] = "node";
    props["id"] = id;
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", point(node.location)}}},
                        {"properties", std::move(props)}});
  }
  for (const auto& [key, e] : g.edges()) {
    json props = json::object();
    for (const auto& [name, value] : e.attributes) {
      if (name == "kind" || name == "source" || name == "target" || name == "weight") {
        throw Error("edge attribute '" + name + "' is reserved in GeoJSON output");
      }
      props[name] = to_json(value);
    }
    props["kind"] = "edge";
    props["source"] = e.u;
    props["target"] = e.v;
    props["weight"] = e.weight;
    json coords = json::array({point(g.node(e.u).location), point(g.node(e.v).location)});
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}},
                        {"properties", std::move(props)}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  return doc.dump() + "\n";
}

GeoGraph from_geojson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw ParseError("expected a GeoJSON FeatureCollection");
  }

  GeoGraph g;
  const auto& features = doc["features"];
  const auto kind_of = [](const json& f) -> std::string {
    if (!f.is_object() || !f.contains("properties") || !f["properties"].is_object()) return {};
    return f["properties"].value("kind", "");
  };
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    if (kind_of(f) != "node") continue;
    const std::string where = "feature " + std::to_string(i);
    const auto& geometry = f.value("geometry", json());
    if (!geometry.is_object() || geometry.value("type", "") != "Point") {
      throw ParseError(where + ": node geometry must be a Point");
    }
    const auto& props = f["properties"];
    const NodeId id = read_id(props, "id", where);
    if (g.has_node(id)) throw ParseError(where + ": duplicate node id " + std::to_string(id));
    Attributes attrs;
    for (const auto& [name, value] : props.items()) {
      if (name != "kind" && name != "id") attrs[name] = from_json(value);
    }
    try {
      g.add_node(id, read_point(geometry.value("coordinates", json()), where), std::move(attrs));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    const auto kind = kind_of(f);
    if (kind == "node") continue;
    const std::string where = "feature " + std::to_string(i);
    if (kind != "edge") throw ParseError(where + ": properties.kind must be 'node' or 'edge'");
    const auto& props = f["properties"];
    const NodeId u = read_id(props, "source", where);
    const NodeId v = read_id(props, "target", where);
    double weight = 1.0;
    if (auto w = props.find("weight"); w != props.end()) {
      if (!w->is_number()) throw ParseError(where + ": weight must be a number");
      weight = w->get<double>();
    }
    Attributes attrs;
    for (const auto& [name, value] : props.items()) {
      if (name != "kind" && name != "source" && name != "target" && name != "weight") {
        attrs[name] = from_json(value);
      }
    }
    try {
      g.add_edge(u, v, weight, std::move(attrs));
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return g;
}

}  // namespace geograph
