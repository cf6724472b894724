#include "geograph/osm.hpp"

#include <expat.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <set>

#include "file_io.hpp"
#include "geograph/error.hpp"
#include "strings.hpp"

namespace geograph::osm {

namespace {

// ---- XML -----------------------------------------------------------------

struct ParseState {
  XML_Parser parser = nullptr;
  OsmDocument doc;
  std::set<OsmId> way_ids;
  int depth = 0;
  bool in_way = false;
  std::string error;
  long error_line = 0;

  void fail(std::string msg) {
    if (error.empty()) {
      error = std::move(msg);
      error_line = static_cast<long>(XML_GetCurrentLineNumber(parser));
    }
    XML_StopParser(parser, XML_FALSE);
  }
};

const char* attribute(const XML_Char** attrs, const char* name) {
  for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
    if (std::strcmp(attrs[i], name) == 0) return attrs[i + 1];
  }
  return nullptr;
}

std::optional<OsmId> id_attribute(ParseState& s, const XML_Char** attrs, const char* name,
                                  const char* element) {
  const char* raw = attribute(attrs, name);
  if (raw == nullptr) {
    s.fail(std::string("<") + element + "> without '" + name + "'");
    return std::nullopt;
  }
  auto v = detail::parse_int(raw);
  if (!v) s.fail(std::string("<") + element + "> has bad " + name + " '" + raw + "'");
  return v;
}

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto& s = *static_cast<ParseState*>(user);
  ++s.depth;
  if (s.depth == 1) {
    if (std::strcmp(name, "osm") != 0) s.fail(std::string("root element is <") + name + ">, expected <osm>");
    return;
  }
  if (s.depth == 2 && std::strcmp(name, "node") == 0) {
    const auto id = id_attribute(s, attrs, "id", "node");
    if (!id) return;
    const char* lat = attribute(attrs, "lat");
    const char* lon = attribute(attrs, "lon");
    if (lat == nullptr || lon == nullptr) {
      s.fail("node " + std::to_string(*id) + " lacks lat/lon");
      return;
    }
    const auto y = detail::parse_double(lat);
    const auto x = detail::parse_double(lon);
    if (!x || !y) {
      s.fail("node " + std::to_string(*id) + " has bad lat/lon");
      return;
    }
    try {
      validate_point({*x, *y}, CoordinateMode::kGeographic);
    } catch (const Error& e) {
      s.fail("node " + std::to_string(*id) + ": " + e.what());
      return;
    }
    if (!s.doc.node_index.emplace(*id, s.doc.nodes.size()).second) {
      s.fail("duplicate node id " + std::to_string(*id));
      return;
    }
    s.doc.nodes.push_back({*id, {*x, *y}});
  } else if (s.depth == 2 && std::strcmp(name, "way") == 0) {
    const auto id = id_attribute(s, attrs, "id", "way");
    if (!id) return;
    if (!s.way_ids.insert(*id).second) {
      s.fail("duplicate way id " + std::to_string(*id));
      return;
    }
    s.doc.ways.push_back({*id, {}, {}});
    s.in_way = true;
  } else if (s.depth == 3 && s.in_way && std::strcmp(name, "nd") == 0) {
    if (const auto ref = id_attribute(s, attrs, "ref", "nd")) {
      s.doc.ways.back().node_refs.push_back(*ref);
    }
  } else if (s.depth == 3 && s.in_way && std::strcmp(name, "tag") == 0) {
    const char* k = attribute(attrs, "k");
    const char* v = attribute(attrs, "v");
    if (k == nullptr || v == nullptr) {
      s.fail("<tag> without k/v in way " + std::to_string(s.doc.ways.back().id));
      return;
    }
    s.doc.ways.back().tags[k] = v;
  }
}

void XMLCALL on_end(void* user, const XML_Char* name) {
  auto& s = *static_cast<ParseState*>(user);
  if (s.depth == 2 && std::strcmp(name, "way") == 0) s.in_way = false;
  --s.depth;
}

// ---- aggregation helpers -------------------------------------------------

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

int fixed_width(double v, int decimals) {
  char buf[400];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  return ec == std::errc{} ? static_cast<int>(end - buf) : 255;
}

}  // namespace

const OsmNode& OsmDocument::node(OsmId id) const {
  auto it = node_index.find(id);
  if (it == node_index.end()) throw Error("unknown OSM node " + std::to_string(id));
  return nodes[it->second];
}

OsmDocument parse_osm(std::string_view xml) {
  ParseState state;
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser) throw InternalError("cannot allocate XML parser");
  state.parser = parser.get();
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), on_start, on_end);

  const auto status =
      XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE);
  if (!state.error.empty()) throw ParseError(state.error, state.error_line);
  if (status != XML_STATUS_OK) {
    throw ParseError(std::string("malformed XML: ") +
                         XML_ErrorString(XML_GetErrorCode(parser.get())),
                     static_cast<long>(XML_GetCurrentLineNumber(parser.get())));
  }

  for (const auto& way : state.doc.ways) {
    for (const auto ref : way.node_refs) {
      if (!state.doc.node_index.contains(ref)) {
        throw ParseError("way " + std::to_string(way.id) + " references missing node " +
                         std::to_string(ref));
      }
    }
    if (way.node_refs.size() < 2) {
      throw ParseError("way " + std::to_string(way.id) + " has fewer than 2 node refs");
    }
  }
  return std::move(state.doc);
}

OsmDocument parse_osm_file(const std::string& path) {
  try {
    return parse_osm(detail::read_file_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

bool has_highway_tag(const Tags& tags) { return tags.contains("highway"); }

WayFilter parse_way_filter(std::string_view expr) {
  struct Clause {
    std::string key;
    enum { kAny, kPresent, kIn, kNotIn } op;
    std::vector<std::string> values;
  };
  std::vector<Clause> clauses;
  for (auto raw : detail::split(expr, ',')) {
    const auto text = detail::trim(raw);
    if (text.empty()) throw Error("empty clause in filter '" + std::string(expr) + "'");
    Clause c;
    if (text == "*") {
      c.op = Clause::kAny;
    } else if (auto ne = text.find("!="); ne != std::string_view::npos) {
      c.op = Clause::kNotIn;
      c.key = detail::trim(text.substr(0, ne));
      for (auto v : detail::split(text.substr(ne + 2), '|')) c.values.emplace_back(detail::trim(v));
    } else if (auto eq = text.find('='); eq != std::string_view::npos) {
      c.op = Clause::kIn;
      c.key = detail::trim(text.substr(0, eq));
      for (auto v : detail::split(text.substr(eq + 1), '|')) c.values.emplace_back(detail::trim(v));
    } else {
      c.op = Clause::kPresent;
      c.key = text;
    }
    if (c.op != Clause::kAny && c.key.empty()) {
      throw Error("filter clause '" + std::string(text) + "' has no key");
    }
    clauses.push_back(std::move(c));
  }
  return [clauses = std::move(clauses)](const Tags& tags) {
    for (const auto& c : clauses) {
      if (c.op == Clause::kAny) return true;
      auto it = tags.find(c.key);
      if (it == tags.end()) continue;
      const bool listed = std::find(c.values.begin(), c.values.end(), it->second) != c.values.end();
      if (c.op == Clause::kPresent || (c.op == Clause::kIn && listed) ||
          (c.op == Clause::kNotIn && !listed)) {
        return true;
      }
    }
    return false;
  };
}

std::string normalize_name(std::string_view name) {
  auto folded = icu::UnicodeString::fromUTF8(
                    icu::StringPiece(name.data(), static_cast<std::int32_t>(name.size())))
                    .foldCase(U_FOLD_CASE_DEFAULT);
  icu::UnicodeString collapsed;
  bool pending_space = false;
  for (std::int32_t i = 0; i < folded.length();) {
    const UChar32 cp = folded.char32At(i);
    i += U16_LENGTH(cp);
    if (u_isUWhiteSpace(cp)) {
      pending_space = !collapsed.isEmpty();
      continue;
    }
    if (pending_space) collapsed.append(static_cast<UChar>(' '));
    pending_space = false;
    collapsed.append(cp);
  }
  std::string out;
  collapsed.toUTF8String(out);
  return out;
}

std::vector<WaySegment> split_ways_at_crossroads(const OsmDocument& doc, const WayFilter& keep) {
  std::vector<const OsmWay*> retained;
  for (const auto& way : doc.ways) {
    if (keep(way.tags)) retained.push_back(&way);
  }

  // Number of distinct retained ways each node appears in.
  std::map<OsmId, int> way_count;
  for (const auto* way : retained) {
    std::set<OsmId> distinct(way->node_refs.begin(), way->node_refs.end());
    for (const auto id : distinct) ++way_count[id];
  }

  std::vector<WaySegment> out;
  for (const auto* way : retained) {
    std::vector<OsmId> refs;
    for (const auto ref : way->node_refs) {
      if (refs.empty() || refs.back() != ref) refs.push_back(ref);
    }
    if (refs.size() < 2) continue;  // every ref was the same node
    if (refs.size() > 2 && refs.front() == refs.back()) {
      // Start a ring at its first crossroad so the closing node is no false split.
      const auto cross = std::find_if(refs.begin() + 1, refs.end() - 1,
                                      [&](OsmId id) { return way_count[id] >= 2; });
      if (cross != refs.end() - 1 && way_count[refs.front()] < 2) {
        std::vector<OsmId> rotated(cross, refs.end() - 1);
        rotated.insert(rotated.end(), refs.begin(), cross + 1);
        refs = std::move(rotated);
      }
    }

    std::optional<std::string> name;
    std::optional<std::string> display;
    if (auto it = way->tags.find("name"); it != way->tags.end()) {
      auto normalized = normalize_name(it->second);
      if (!normalized.empty()) {
        name = std::move(normalized);
        display = std::string(detail::trim(it->second));
      }
    }

    std::size_t start = 0;
    for (std::size_t k = 1; k < refs.size(); ++k) {
      const bool last = k + 1 == refs.size();
      if (!last && way_count[refs[k]] < 2) continue;
      std::vector<OsmId> piece(refs.begin() + static_cast<std::ptrdiff_t>(start),
                               refs.begin() + static_cast<std::ptrdiff_t>(k) + 1);
      PolyLine::Part part;
      part.reserve(piece.size());
      for (const auto id : piece) part.push_back(doc.node(id).location);
      out.push_back(WaySegment{way->id, piece.front(), piece.back(), piece,
                               PolyLine(std::vector<PolyLine::Part>{std::move(part)}), name,
                               display, piece.front() == piece.back()});
      start = k;
    }
  }
  return out;
}

StreetNetwork aggregate_streets(const std::vector<WaySegment>& segments) {
  const std::size_t n = segments.size();

  // Unnamed segments cluster through shared nodes.
  DisjointSets unnamed(n);
  {
    std::map<OsmId, std::size_t> first_seen;
    for (std::size_t i = 0; i < n; ++i) {
      if (segments[i].name) continue;
      for (const auto id : segments[i].node_refs) {
        auto [it, inserted] = first_seen.emplace(id, i);
        if (!inserted) unnamed.unite(it->second, i);
      }
    }
  }

  // Group key -> feature index, assigned in order of first segment.
  std::map<std::string, std::size_t> by_name;
  std::map<std::size_t, std::size_t> by_cluster;
  std::vector<std::size_t> feature_of(n);
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t f = members.size();
    if (segments[i].name) {
      f = by_name.emplace(*segments[i].name, members.size()).first->second;
    } else {
      f = by_cluster.emplace(unnamed.find(i), members.size()).first->second;
    }
    if (f == members.size()) members.emplace_back();
    members[f].push_back(i);
    feature_of[i] = f;
  }

  // Attribute columns.
  int name_width = 1;
  int length_width = 1;
  std::vector<double> lengths(members.size(), 0.0);
  for (std::size_t f = 0; f < members.size(); ++f) {
    for (const auto i : members[f]) lengths[f] += length(segments[i].geometry);
    length_width = std::max(length_width, fixed_width(lengths[f], 6));
    const auto& display = segments[members[f].front()].display_name;
    if (display) name_width = std::max(name_width, static_cast<int>(display->size()));
  }
  FieldSchema schema({{"name", FieldKind::kText, std::min(name_width, 254), 0},
                      {"segments", FieldKind::kInteger, 10, 0},
                      {"length", FieldKind::kReal, std::min(length_width, 255), 6}});

  StreetNetwork net{FeatureCollection(schema, GeometryKind::kPolyLine), {}, members};
  for (std::size_t f = 0; f < members.size(); ++f) {
    std::vector<PolyLine::Part> parts;
    for (const auto i : members[f]) {
      for (const auto& part : segments[i].geometry.parts()) parts.push_back(part);
    }
    const auto& display = segments[members[f].front()].display_name;
    net.features.add(Feature{PolyLine(std::move(parts)),
                             {display ? Value(*display) : Value(),
                              static_cast<std::int64_t>(members[f].size()), lengths[f]}});
  }

  // Features sharing an OSM node are connected.
  std::map<OsmId, std::set<std::size_t>> features_at;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto id : segments[i].node_refs) features_at[id].insert(feature_of[i]);
  }
  std::map<std::pair<std::size_t, std::size_t>, std::vector<OsmId>> shared;
  for (const auto& [id, fs] : features_at) {
    for (auto a = fs.begin(); a != fs.end(); ++a) {
      for (auto b = std::next(a); b != fs.end(); ++b) shared[{*a, *b}].push_back(id);
    }
  }
  for (auto& [pair, ids] : shared) {
    net.connections.push_back({pair.first, pair.second, std::move(ids)});
  }
  return net;
}

}  // namespace geograph::osm
