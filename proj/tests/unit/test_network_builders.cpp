#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "geograph/adjacency.hpp"
#include "geograph/builders.hpp"
#include "geograph/csv.hpp"
#include "geograph/error.hpp"
#include "geograph/export.hpp"
#include "geograph/shapefile.hpp"
#include "oracles.hpp"
#include "random_data.hpp"

using namespace geograph;

namespace {

std::optional<double> r(std::vector<double> x, std::vector<double> y, std::size_t overlap = 2) {
  return pearson(x, y, overlap);
}

TimeSeriesSet make_series(const std::vector<std::vector<double>>& rows) {
  std::vector<NodeId> ids;
  std::map<NodeId, GeoPoint> locs;
  std::map<NodeId, std::vector<double>> series;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const NodeId id = static_cast<NodeId>(i + 1);
    ids.push_back(id);
    locs[id] = {double(i), 0};
    series[id] = rows[i];
  }
  return TimeSeriesSet(ids, locs, series, "10min");
}

FeatureCollection points(const std::vector<std::pair<NodeId, GeoPoint>>& pts, bool with_population = false) {
  std::vector<Field> fields{{"id", FieldKind::kInteger, 10, 0}};
  if (with_population) fields.push_back({"population", FieldKind::kInteger, 10, 0});
  FeatureCollection c{FieldSchema(fields), GeometryKind::kPoint};
  for (const auto& [id, p] : pts) {
    Feature f{p, {Value(id)}};
    if (with_population) f.attributes.push_back(Value(id * 100));
    c.add(std::move(f));
  }
  return c;
}

}  // namespace

TEST_CASE("pearson") {
  CHECK(*r({1, 2, 3}, {2, 4, 6}) == 1.0);
  CHECK(*r({1, 2, 3}, {3, 2, 1}) == -1.0);
  CHECK(*r({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_FALSE(r({1, 1, 1}, {1, 2, 3}).has_value());
  CHECK_FALSE(r({1, 2, kMissing, kMissing}, {1, 2, 3, 4}, 3).has_value());
  CHECK(r({1, 2, kMissing, 4}, {2, 4, 5, 8}, 3).has_value());
  CHECK_THROWS_AS(r({1, 2}, {1, 2, 3}), Error);
  CHECK_THROWS_AS(r({1, 2}, {1, 2}, 1), Error);
}

TEST_CASE("pearson symmetry, affine invariance and agreement with the direct formula") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> scale(0.1, 10), shift(-100, 100);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(20), y(20);
    for (int i = 0; i < 20; ++i) {
      x[i] = n(rng);
      y[i] = 0.5 * x[i] + n(rng);
      if (t % 3 == 0 && i % 7 == 3) x[i] = kMissing;
    }
    const auto a = pearson(x, y, 2);
    const auto b = pearson(y, x, 2);
    REQUIRE(a.has_value());
    CHECK(*a == *b);
    CHECK(std::abs(*a - static_cast<double>(oracle::pearson(x, y))) <= 1e-12);
    const double s = scale(rng), c = shift(rng);
    std::vector<double> z(x);
    for (auto& v : z) v = s * v + c;
    CHECK(std::abs(*pearson(z, y, 2) - *a) <= 1e-12);
    CHECK(*a >= -1.0);
    CHECK(*a <= 1.0);
  }
}

TEST_CASE("threshold") {
  CHECK_THROWS_AS(Threshold(NAN), Error);
  CHECK(Threshold(1.0).passes(1.5));
  CHECK_FALSE(Threshold(1.0).passes(1.0));
}

TEST_CASE("correlation network") {
  SUBCASE("scaled copies give K3") {
    const auto ts = make_series({{1, 2, 4, 3}, {2, 4, 8, 6}, {10, 20, 40, 30}});
    const auto net = correlation_network(ts, Threshold(0.9));
    CHECK(net.graph.edge_count() == 3);
    for (const auto& [k, e] : net.graph.edges()) {
      CHECK(e.weight == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(e.attributes.at("r") == Value(e.weight));
    }
  }
  SUBCASE("tau 1 gives no edges") {
    const auto ts = make_series({{1, 2, 3}, {2, 4, 6}, {3, 6, 9}});
    CHECK(correlation_network(ts, Threshold(1.0)).graph.edge_count() == 0);
  }
  SUBCASE("zero-variance series stay isolated and are reported") {
    const auto ts = make_series({{1, 2, 3}, {5, 5, 5}, {2, 4, 7}});
    const auto net = correlation_network(ts, Threshold(-1.0));
    CHECK(net.zero_variance == std::vector<NodeId>{2});
    CHECK(net.graph.node_count() == 3);
    CHECK(net.graph.edge_count() == 1);
  }
  SUBCASE("tau out of range") {
    const auto ts = make_series({{1, 2, 3}, {2, 4, 6}});
    CHECK_THROWS_AS(correlation_network(ts, Threshold(1.5)), Error);
  }
  SUBCASE("default min overlap") {
    // full length is required when nothing is missing; 10 samples otherwise
    std::vector<double> a(12), b(12);
    for (int i = 0; i < 12; ++i) {
      a[i] = i;
      b[i] = i * i;
    }
    auto short_b = b;
    for (int i = 0; i < 3; ++i) short_b[i] = kMissing;
    CHECK(correlation_network(make_series({a, short_b}), Threshold(0)).graph.edge_count() == 0);
    short_b[0] = 0;
    CHECK(correlation_network(make_series({a, short_b}), Threshold(0)).graph.edge_count() == 1);
    CHECK(correlation_network(make_series({a, short_b}), Threshold(0), 12).graph.edge_count() == 0);
  }
}

TEST_CASE("correlation network: block structure matches the direct formula") {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> n(0, 1);
  const int T = 200;
  std::vector<double> f1(T), f2(T);
  for (int t = 0; t < T; ++t) {
    f1[t] = n(rng);
    f2[t] = n(rng);
  }
  std::vector<std::vector<double>> rows(5, std::vector<double>(T));
  for (int i = 0; i < 5; ++i)
    for (int t = 0; t < T; ++t) rows[i][t] = (i < 3 ? f1[t] : f2[t]) + 0.1 * n(rng);
  const auto ts = make_series(rows);
  const auto net = correlation_network(ts, Threshold(0.5));
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      const double direct = static_cast<double>(oracle::pearson(rows[i], rows[j]));
      CHECK(net.graph.has_edge(i + 1, j + 1) == (direct > 0.5));
      CHECK(net.graph.has_edge(i + 1, j + 1) == ((i < 3) == (j < 3)));
    }
}

TEST_CASE("correlation network edges shrink as tau grows and ignore worker count") {
  std::mt19937_64 rng(45);
  std::normal_distribution<double> n(0, 1);
  std::vector<std::vector<double>> rows(12, std::vector<double>(30));
  for (auto& row : rows)
    for (auto& v : row) v = n(rng);
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (std::size_t t = 0; t < 30; ++t) rows[i][t] += 0.7 * rows[i - 1][t];
  const auto ts = make_series(rows);
  std::size_t previous = SIZE_MAX;
  for (double tau = -1.0; tau <= 1.0; tau += 0.125) {
    const auto a = correlation_network(ts, Threshold(tau), std::nullopt, 1);
    const auto b = correlation_network(ts, Threshold(tau), std::nullopt, 4);
    CHECK(a.graph.edge_count() <= previous);
    previous = a.graph.edge_count();
    REQUIRE(a.graph.edge_count() == b.graph.edge_count());
    for (const auto& [k, e] : a.graph.edges()) CHECK(b.graph.edge(e.u, e.v).weight == e.weight);
  }
}

TEST_CASE("flow network") {
  ODMatrix od;
  od.add_zone(1, {0, 0});
  od.add_zone(2, {1, 0});
  od.add_zone(3, {0, 1});
  SUBCASE("symmetrized sum over threshold") {
    od.add_flow(1, 2, 600);
    od.add_flow(2, 1, 500);
    const auto g = flow_network(od, Threshold(1000));
    REQUIRE(g.edge_count() == 1);
    CHECK(g.edge(1, 2).weight == 1100);
    CHECK(g.node(1).attributes.at("degree") == Value(1.0));
    CHECK(g.node(3).attributes.at("degree") == Value(0.0));
  }
  SUBCASE("boundary is excluded") {
    od.add_flow(1, 2, 1000);
    CHECK(flow_network(od, Threshold(1000)).edge_count() == 0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(od.add_flow(1, 2, -1), Error);
    CHECK_THROWS_AS(od.add_flow(1, 9, 1), Error);
    od.add_flow(1, 2, 5);
    CHECK_THROWS_AS(od.add_flow(1, 2, 5), Error);
    CHECK_THROWS_AS(flow_network(od, Threshold(-1)), Error);
  }
}

TEST_CASE("flow network: 4 zones against exhaustive pair check, transpose invariant") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> flow(0, 1200);
  for (int t = 0; t < 20; ++t) {
    ODMatrix od, transposed;
    std::map<std::pair<int, int>, double> f;
    for (int z = 1; z <= 4; ++z) {
      od.add_zone(z, {double(z), double(z * z)});
      transposed.add_zone(z, {double(z), double(z * z)});
    }
    for (int a = 1; a <= 4; ++a)
      for (int b = 1; b <= 4; ++b) {
        if (a == b) continue;
        f[{a, b}] = flow(rng);
        od.add_flow(a, b, f[{a, b}]);
        transposed.add_flow(b, a, f[{a, b}]);
      }
    const auto g = flow_network(od, Threshold(1000));
    const auto h = flow_network(transposed, Threshold(1000));
    for (int a = 1; a <= 4; ++a)
      for (int b = a + 1; b <= 4; ++b) {
        const double F = f[{a, b}] + f[{b, a}];
        CHECK(g.has_edge(a, b) == (F > 1000));
        CHECK(h.has_edge(a, b) == g.has_edge(a, b));
        if (F > 1000) CHECK(g.edge(a, b).weight == F);
      }
  }
}

TEST_CASE("graph_from_adjacency") {
  const auto pts = points({{10, {0, 0}}, {20, {1, 0}}, {30, {2, 0}}}, true);
  SUBCASE("path") {
    const auto g = graph_from_adjacency(pts, validate_adjacency({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}, {10, 20, 30}));
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge(10, 20));
    CHECK(g.has_edge(20, 30));
    CHECK(g.node(20).attributes.at("population") == Value(std::int64_t{2000}));
  }
  SUBCASE("id binding, not order binding") {
    const auto a = graph_from_adjacency(pts, validate_adjacency({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}, {10, 20, 30}));
    const auto b = graph_from_adjacency(pts, validate_adjacency({{0, 1, 1}, {1, 0, 0}, {1, 0, 0}}, {20, 30, 10}));
    CHECK(a.edges().size() == b.edges().size());
    for (const auto& [k, e] : a.edges()) CHECK(b.has_edge(e.u, e.v));
  }
  SUBCASE("errors") {
    const auto m = validate_adjacency({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}, {10, 20, 30});
    FeatureCollection no_id(FieldSchema({{"name", FieldKind::kText, 5, 0}}), GeometryKind::kPoint);
    no_id.add({GeoPoint{0, 0}, {Value()}});
    CHECK_THROWS_WITH_AS(graph_from_adjacency(no_id, m), doctest::Contains("'id'"), Error);
    CHECK_THROWS_AS(graph_from_adjacency(points({{10, {0, 0}}, {10, {1, 0}}, {30, {2, 0}}}), m), Error);
    CHECK_THROWS_AS(graph_from_adjacency(points({{10, {0, 0}}, {20, {1, 0}}, {40, {2, 0}}}), m), Error);
    CHECK_THROWS_AS(graph_from_adjacency(points({{10, {0, 0}}, {20, {1, 0}}, {30, {2, 0}}, {40, {3, 0}}}), m), Error);
  }
  SUBCASE("case-insensitive id field") {
    FeatureCollection upper(FieldSchema({{"ID", FieldKind::kInteger, 5, 0}}), GeometryKind::kPoint);
    upper.add({GeoPoint{0, 0}, {Value(std::int64_t{1})}});
    upper.add({GeoPoint{1, 0}, {Value(std::int64_t{2})}});
    CHECK(graph_from_adjacency(upper, validate_adjacency({{0, 1}, {1, 0}}, {1, 2})).edge_count() == 1);
  }
}

TEST_CASE("graph_from_adjacency then adjacency_of reproduces the matrix") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t;
    std::vector<std::pair<NodeId, GeoPoint>> pts;
    std::vector<NodeId> ids;
    for (int i = 0; i < n; ++i) {
      pts.push_back({i * 11 + 5, gen::any_point(rng)});
      ids.push_back(i * 11 + 5);
    }
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<std::vector<std::int64_t>> e(n, std::vector<std::int64_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) e[i][j] = e[j][i] = rng() % 3 == 0;
    const auto m = validate_adjacency(e, ids);
    CHECK(adjacency_of(graph_from_adjacency(points(pts), m), ids) == m);
  }
}

TEST_CASE("point attributes survive the DBF round trip into the graph") {
  const auto pts = points({{10, {0.5, 0.25}}, {20, {1, 0}}}, true);
  const auto back = read_shapefile(write_shapefile(pts));
  const auto g = graph_from_adjacency(back, validate_adjacency({{0, 1}, {1, 0}}, {10, 20}));
  CHECK(g.node(10).attributes.at("population") == Value(std::int64_t{1000}));
  CHECK(g.node(10).location == GeoPoint{0.5, 0.25});
}

TEST_CASE("CSV readers") {
  SUBCASE("RFC 4180 parsing") {
    const auto rows = csv::parse("a,\"b,c\",\"d\"\"e\"\r\n\n1,2,3\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].cells == std::vector<std::string>{"a", "b,c", "d\"e"});
    CHECK(rows[1].line == 3);
    CHECK_THROWS_AS(csv::parse("\"open"), ParseError);
  }
  SUBCASE("locations with and without header") {
    const auto a = csv::read_locations("x,id,y\n1.5,7,2\n");
    CHECK(a.ids == std::vector<NodeId>{7});
    CHECK(a.points.at(7) == GeoPoint{1.5, 2});
    const auto b = csv::read_locations("7,1.5,2\n8,0,0\n");
    CHECK(b.ids == std::vector<NodeId>{7, 8});
    CHECK_THROWS_WITH_AS(csv::read_locations("id,x,y\n7,1,2\n7,3,4\n"), doctest::Contains("line 3"), ParseError);
    CHECK_THROWS_AS(csv::read_locations("id,x,y\n7,abc,2\n"), ParseError);
  }
  SUBCASE("time series with missing cells") {
    const auto loc = csv::read_locations("id,x,y\n1,0,0\n2,1,1\n");
    const auto ts = csv::read_time_series("time,1,2\n2020-01-01T00:00,1.5,NA\n2020-01-01T00:10,,2\n0,3,4\n", loc);
    CHECK(ts.length() == 3);
    CHECK(ts.series(1)[0] == 1.5);
    CHECK(is_missing(ts.series(2)[0]));
    CHECK(is_missing(ts.series(1)[1]));
    CHECK(ts.has_missing());
    CHECK_THROWS_AS(csv::read_time_series("time,1,9\n0,1,2\n1,2,3\n", loc), ParseError);
  }
  SUBCASE("OD") {
    const auto zones = csv::read_locations("id,x,y\n1,0,0\n2,1,1\n");
    const auto od = csv::read_od("origin,dest,flow\n1,2,600\n2,1,500\n", zones);
    CHECK(od.flow(1, 2) == 600);
    CHECK(od.flow(2, 2) == 0);
    CHECK_THROWS_WITH_AS(csv::read_od("1,2,5\n1,2,6\n", zones), doctest::Contains("line 2"), ParseError);
  }
  SUBCASE("adjacency with and without ids") {
    const auto plain = csv::read_adjacency("0,1\n1,0\n");
    CHECK_FALSE(plain.ids.has_value());
    CHECK(plain.entries == std::vector<std::vector<std::int64_t>>{{0, 1}, {1, 0}});
    const auto full = csv::read_adjacency(",10,20\n10,0,1\n20,1,0\n");
    CHECK(full.ids == std::vector<NodeId>{10, 20});
    const auto top = csv::read_adjacency("10,20\n0,1\n1,0\n");
    CHECK(top.ids == std::vector<NodeId>{10, 20});
    CHECK_THROWS_AS(csv::read_adjacency("0,1\n1,x\n"), ParseError);
    CHECK_THROWS_AS(csv::read_adjacency(",10,20\n10,0,1\n30,1,0\n"), ParseError);
  }
}
