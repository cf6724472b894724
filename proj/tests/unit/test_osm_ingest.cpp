#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "geograph/error.hpp"
#include "geograph/osm.hpp"
#include "osm_fixture.hpp"

using namespace geograph;
using namespace geograph::osm;

namespace {

double total_length(const std::vector<WaySegment>& segs) {
  double s = 0;
  for (const auto& seg : segs) s += length(seg.geometry);
  return s;
}

// The 3 named rows x 3 named columns fixture.
OsmDocument grid3() {
  OsmXml xml;
  add_grid_nodes(xml, 3);
  for (int r = 0; r < 3; ++r) {
    xml.way(10 + r, {grid_node(3, r, 0), grid_node(3, r, 1), grid_node(3, r, 2)},
            {{"highway", "residential"}, {"name", "Row " + std::to_string(r)}});
  }
  for (int c = 0; c < 3; ++c) {
    xml.way(20 + c, {grid_node(3, 0, c), grid_node(3, 1, c), grid_node(3, 2, c)},
            {{"highway", "residential"}, {"name", "Col " + std::to_string(c)}});
  }
  return parse_osm(xml.str());
}

}  // namespace

TEST_CASE("parse_osm: nodes, ways, tags") {
  OsmXml xml;
  xml.node(1, -45.0, -22.5).node(2, -45.001, -22.501).way(7, {1, 2}, {{"highway", "primary"}, {"name", "Rua A"}});
  const auto doc = parse_osm(xml.str());
  REQUIRE(doc.nodes.size() == 2);
  REQUIRE(doc.ways.size() == 1);
  CHECK(doc.ways[0].id == 7);
  CHECK(doc.ways[0].node_refs == std::vector<OsmId>{1, 2});
  CHECK(doc.ways[0].tags.at("name") == "Rua A");
  CHECK(doc.node(1).location == GeoPoint{-45.0, -22.5});
}

TEST_CASE("parse_osm: unknown elements are ignored") {
  OsmXml xml;
  xml.raw("  <bounds minlat=\"0\" minlon=\"0\" maxlat=\"1\" maxlon=\"1\"/>\n")
      .node(1, 0, 0)
      .node(2, 1, 1)
      .way(3, {1, 2})
      .raw("  <relation id=\"9\"><member type=\"way\" ref=\"3\" role=\"\"/></relation>\n");
  CHECK(parse_osm(xml.str()).ways.size() == 1);
}

TEST_CASE("parse_osm: errors") {
  SUBCASE("missing node names way and ref") {
    OsmXml xml;
    xml.node(1, 0, 0).node(3, 0, 1).way(55, {1, 2, 3});
    CHECK_THROWS_WITH_AS(parse_osm(xml.str()), doctest::Contains("way 55 references missing node 2"), ParseError);
  }
  SUBCASE("malformed XML") {
    CHECK_THROWS_AS(parse_osm("<osm><node id=\"1\" lat=\"0\" lon=\"0\"></osm>"), ParseError);
    CHECK_THROWS_AS(parse_osm("<notosm/>"), ParseError);
  }
  SUBCASE("too few refs") {
    OsmXml xml;
    xml.node(1, 0, 0).way(4, {1});
    CHECK_THROWS_WITH_AS(parse_osm(xml.str()), doctest::Contains("fewer than 2"), ParseError);
  }
  SUBCASE("duplicate ids") {
    OsmXml a;
    a.node(1, 0, 0).node(1, 1, 1);
    CHECK_THROWS_AS(parse_osm(a.str()), ParseError);
    OsmXml b;
    b.node(1, 0, 0).node(2, 1, 1).way(5, {1, 2}).way(5, {2, 1});
    CHECK_THROWS_AS(parse_osm(b.str()), ParseError);
  }
  SUBCASE("bad coordinates") {
    OsmXml xml;
    xml.node(1, 0, 95);
    CHECK_THROWS_AS(parse_osm(xml.str()), ParseError);
    CHECK_THROWS_AS(parse_osm("<osm><node id=\"1\" lat=\"x\" lon=\"0\"/></osm>"), ParseError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(parse_osm_file("/nonexistent.osm"), Error); }
}

TEST_CASE("split: two ways crossing at a shared interior node") {
  OsmXml xml;
  xml.node(1, -1, 0).node(2, 0, 0).node(3, 1, 0).node(4, 0, -1).node(5, 0, 1);
  xml.way(10, {1, 2, 3}).way(11, {4, 2, 5});
  const auto doc = parse_osm(xml.str());
  const auto segs = split_ways_at_crossroads(doc);
  REQUIRE(segs.size() == 4);
  for (const auto& s : segs) {
    CHECK(s.geometry.parts()[0].front() == doc.node(s.source).location);
    CHECK(s.geometry.parts()[0].back() == doc.node(s.target).location);
    CHECK((s.source == 2 || s.target == 2));
  }
  CHECK(std::abs(total_length(segs) - 4.0) < 1e-12);
}

TEST_CASE("split: isolated way is kept whole") {
  OsmXml xml;
  xml.node(1, 0, 0).node(2, 0.5, 0.5).node(3, 1, 0).way(10, {1, 2, 3}, {{"highway", "service"}, {"name", " Rua B "}});
  const auto segs = split_ways_at_crossroads(parse_osm(xml.str()));
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].node_refs == std::vector<OsmId>{1, 2, 3});
  CHECK(segs[0].source == 1);
  CHECK(segs[0].target == 3);
  CHECK(segs[0].name == std::optional<std::string>("rua b"));
}

TEST_CASE("split: shared endpoints do not split") {
  OsmXml xml;
  xml.node(1, 0, 0).node(2, 1, 0).node(3, 2, 0).node(4, 1, 1).node(5, 2, 1);
  xml.way(10, {1, 2, 3}).way(11, {3, 4, 5});
  CHECK(split_ways_at_crossroads(parse_osm(xml.str())).size() == 2);
}

TEST_CASE("split: highway filter") {
  OsmXml xml;
  xml.node(1, 0, 0).node(2, 1, 0).node(3, 2, 0).node(4, 1, 1).node(5, 1, -1);
  xml.way(10, {1, 2, 3}, {{"highway", "primary"}});
  xml.way(11, {4, 2, 5}, {{"waterway", "river"}});
  const auto doc = parse_osm(xml.str());
  // The river is not retained, so node 2 is no crossroad.
  CHECK(split_ways_at_crossroads(doc).size() == 1);
  CHECK(split_ways_at_crossroads(doc, parse_way_filter("*")).size() == 4);
  CHECK(split_ways_at_crossroads(doc, parse_way_filter("waterway")).size() == 1);
  CHECK(split_ways_at_crossroads(doc, parse_way_filter("highway=secondary|tertiary")).empty());
  CHECK(split_ways_at_crossroads(doc, parse_way_filter("highway=primary, waterway")).size() == 4);
  CHECK(split_ways_at_crossroads(doc, parse_way_filter("highway!=primary")).empty());
  CHECK_THROWS_AS(parse_way_filter("highway,,name"), Error);
  CHECK_THROWS_AS(parse_way_filter("=x"), Error);
}

TEST_CASE("split: closed ways are flagged and split at crossroads") {
  OsmXml xml;
  xml.node(1, 0, 0).node(2, 1, 0).node(3, 1, 1).node(4, 0, 1).node(5, 2, 0);
  xml.way(10, {1, 2, 3, 4, 1}).way(11, {2, 5});
  const auto segs = split_ways_at_crossroads(parse_osm(xml.str()));
  // The ring starts over at its only crossroad, node 2, and stays one loop.
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].closed_loop);
  CHECK(segs[0].node_refs == std::vector<OsmId>{2, 3, 4, 1, 2});
  CHECK_FALSE(segs[1].closed_loop);

  OsmXml two;
  two.node(1, 0, 0).node(2, 1, 0).node(3, 1, 1).node(4, 0, 1).node(5, 2, 0).node(6, -1, 1);
  two.way(10, {1, 2, 3, 4, 1}).way(11, {2, 5}).way(12, {4, 6});
  const auto split = split_ways_at_crossroads(parse_osm(two.str()));
  REQUIRE(split.size() == 4);
  CHECK(split[0].node_refs == std::vector<OsmId>{2, 3, 4});
  CHECK(split[1].node_refs == std::vector<OsmId>{4, 1, 2});

  OsmXml solo;
  solo.node(1, 0, 0).node(2, 1, 0).node(3, 1, 1).way(10, {1, 2, 3, 1});
  const auto ring = split_ways_at_crossroads(parse_osm(solo.str()));
  REQUIRE(ring.size() == 1);
  CHECK(ring[0].closed_loop);
  CHECK(ring[0].source == ring[0].target);
}

TEST_CASE("split conserves arc length on the grid") {
  const auto doc = grid3();
  double input = 0;
  for (const auto& w : doc.ways) {
    for (std::size_t k = 0; k + 1 < w.node_refs.size(); ++k)
      input += distance(doc.node(w.node_refs[k]).location, doc.node(w.node_refs[k + 1]).location);
  }
  const auto segs = split_ways_at_crossroads(doc);
  CHECK(std::abs(total_length(segs) - input) <= 1e-9 * input);
}

TEST_CASE("name normalization") {
  CHECK(normalize_name("  Rua   Sete\t de  Setembro ") == "rua sete de setembro");
  CHECK(normalize_name("AV. BRASIL") == normalize_name("av. brasil"));
  CHECK(normalize_name("Av. Brasil") != normalize_name("Avenida Brasil"));
  CHECK(normalize_name("\xC3\x81GUA") == normalize_name("\xC3\xA1gua"));     // ÁGUA / água
  CHECK(normalize_name("STRASSE") == normalize_name("stra\xC3\x9F" "e"));   // full case folding
}

TEST_CASE("aggregate: named street and a crossing street") {
  OsmXml xml;
  xml.node(1, 0, 0).node(2, 1, 0).node(3, 2, 0).node(4, 3, 0).node(5, 1, 1);
  xml.way(1, {1, 2}, {{"highway", "primary"}, {"name", "Av. Brasil"}});
  xml.way(2, {2, 3}, {{"highway", "primary"}, {"name", "Av. Brasil"}});
  xml.way(3, {3, 4}, {{"highway", "primary"}, {"name", "av.  brasil"}});
  xml.way(4, {2, 5}, {{"highway", "residential"}, {"name", "Rua 7"}});
  const auto net = aggregate_streets(split_ways_at_crossroads(parse_osm(xml.str())));
  CHECK(net.features.size() == 2);
  REQUIRE(net.connections.size() == 1);
  CHECK(net.connections[0].a == 0);
  CHECK(net.connections[0].b == 1);
  CHECK(net.connections[0].shared_nodes == std::vector<OsmId>{2});
  CHECK(std::get<PolyLine>(net.features[0].geometry).parts().size() == 3);
  const auto name = net.features.schema().find("name");
  REQUIRE(name.has_value());
  CHECK(net.features[0].attributes[*name] == Value(std::string("Av. Brasil")));
}

TEST_CASE("aggregate: disjoint same-named segments merge globally") {
  OsmXml xml;
  xml.node(1, 0, 0).node(2, 1, 0).node(3, 5, 5).node(4, 6, 5);
  xml.way(1, {1, 2}, {{"highway", "residential"}, {"name", "Rua A"}});
  xml.way(2, {3, 4}, {{"highway", "residential"}, {"name", "Rua A"}});
  const auto net = aggregate_streets(split_ways_at_crossroads(parse_osm(xml.str())));
  REQUIRE(net.features.size() == 1);
  CHECK(std::get<PolyLine>(net.features[0].geometry).parts().size() == 2);
  CHECK(net.connections.empty());
}

TEST_CASE("aggregate: unnamed segments group by connectivity") {
  OsmXml xml;
  xml.node(1, 0, 0).node(2, 1, 0).node(3, 2, 0).node(4, 5, 5).node(5, 6, 5);
  xml.way(1, {1, 2}).way(2, {2, 3}).way(3, {4, 5});
  const auto net = aggregate_streets(split_ways_at_crossroads(parse_osm(xml.str())));
  CHECK(net.features.size() == 2);
  CHECK(net.connections.empty());
}

TEST_CASE("aggregate: 3x3 grid gives 6 streets and 9 connections") {
  const auto doc = grid3();
  const auto segs = split_ways_at_crossroads(doc);
  const auto net = aggregate_streets(segs);
  CHECK(net.features.size() == 6);
  CHECK(net.connections.size() == 9);

  // Brute force: features connect iff their member segments share a node id.
  std::vector<std::set<OsmId>> nodes(net.features.size());
  for (std::size_t f = 0; f < net.members.size(); ++f)
    for (auto s : net.members[f]) nodes[f].insert(segs[s].node_refs.begin(), segs[s].node_refs.end());
  std::set<std::pair<std::size_t, std::size_t>> expected;
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      std::vector<OsmId> both;
      std::set_intersection(nodes[a].begin(), nodes[a].end(), nodes[b].begin(), nodes[b].end(),
                            std::back_inserter(both));
      if (!both.empty()) expected.insert({a, b});
    }
  std::set<std::pair<std::size_t, std::size_t>> got;
  for (const auto& c : net.connections) {
    CHECK(c.a < c.b);
    CHECK(!c.shared_nodes.empty());
    got.insert({c.a, c.b});
  }
  CHECK(got == expected);
  CHECK(got.size() == net.connections.size());
}

TEST_CASE("aggregate is idempotent on single-segment re-expansion") {
  const auto doc = grid3();
  const auto segs = split_ways_at_crossroads(doc);
  const auto net = aggregate_streets(segs);
  std::vector<WaySegment> again;
  for (std::size_t f = 0; f < net.members.size(); ++f)
    for (auto s : net.members[f]) again.push_back(segs[s]);
  CHECK(aggregate_streets(again).features.size() == net.features.size());
}
