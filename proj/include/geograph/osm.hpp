#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geograph/feature.hpp"
#include "geograph/geometry.hpp"

namespace geograph::osm {

using OsmId = std::int64_t;
using Tags = std::map<std::string, std::string>;

struct OsmNode {
  OsmId id = 0;
  GeoPoint location;  // x = lon, y = lat
};

struct OsmWay {
  OsmId id = 0;
  std::vector<OsmId> node_refs;
  Tags tags;

  bool closed() const { return node_refs.size() > 2 && node_refs.front() == node_refs.back(); }
};

struct OsmDocument {
  std::vector<OsmNode> nodes;  // document order
  std::vector<OsmWay> ways;

  // Index into `nodes` by id.
  std::map<OsmId, std::size_t> node_index;

  const OsmNode& node(OsmId id) const;
};

// Reads <node id lat lon> and <way id> with <nd ref>/<tag k v> children
// under an <osm> root; everything else is skipped. Throws ParseError on
// malformed XML, duplicate ids, or ways whose refs do not resolve.
OsmDocument parse_osm(std::string_view xml);
OsmDocument parse_osm_file(const std::string& path);

// Segment of a way between crossroads. `node_refs` includes both ends.
struct WaySegment {
  OsmId way_id = 0;
  OsmId source = 0;
  OsmId target = 0;
  std::vector<OsmId> node_refs;
  PolyLine geometry;
  std::optional<std::string> name;  // normalized
  std::optional<std::string> display_name;  // as tagged, trimmed
  bool closed_loop = false;
};

using WayFilter = std::function<bool(const Tags&)>;

// Default filter: keeps any way with a "highway" tag.
bool has_highway_tag(const Tags& tags);

// Parses a filter expression: comma-separated clauses, a way is kept when
// any clause matches. Clause forms: `*` (everything), `key` (tag present),
// `key=v1|v2` (tag equals one of the values), `key!=v1|v2` (tag present
// and not one of the values).
WayFilter parse_way_filter(std::string_view expr);

// Unicode casefold, trim, and collapse of internal whitespace runs to one
// space. Abbreviations are not expanded.
std::string normalize_name(std::string_view name);

// Splits every retained way at interior nodes that are shared by at least
// two retained ways. Way endpoints are never split points.
std::vector<WaySegment> split_ways_at_crossroads(const OsmDocument& doc,
                                                 const WayFilter& keep = has_highway_tag);

struct StreetConnection {
  std::size_t a = 0;  // feature index, a < b
  std::size_t b = 0;
  std::vector<OsmId> shared_nodes;  // ascending
};

struct StreetNetwork {
  FeatureCollection features;  // polylines, one per street
  std::vector<StreetConnection> connections;  // ordered by (a, b)
  std::vector<std::vector<std::size_t>> members;  // segment indices per feature
};

// Same normalized name -> one multi-part feature (one part per segment).
// Unnamed segments are grouped by shared nodes into connected clusters.
// Features connect when they share an OSM node.
StreetNetwork aggregate_streets(const std::vector<WaySegment>& segments);

}  // namespace geograph::osm
