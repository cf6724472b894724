#include "geograph/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>

#include "file_io.hpp"
#include "geograph/adjacency.hpp"
#include "geograph/builders.hpp"
#include "geograph/csv.hpp"
#include "geograph/error.hpp"
#include "geograph/export.hpp"
#include "geograph/extract.hpp"
#include "geograph/geojson.hpp"
#include "geograph/metrics.hpp"
#include "geograph/osm.hpp"
#include "geograph/shapefile.hpp"
#include "strings.hpp"

namespace geograph {

namespace {

namespace fs = std::filesystem;

double parse_number(const std::string& text, const std::string& flag) {
  const auto v = detail::parse_double(detail::trim(text));
  if (!v || !std::isfinite(*v)) throw Error(flag + " expects a decimal number, got '" + text + "'");
  return *v;
}

std::vector<double> parse_breaks(const std::string& text) {
  std::vector<double> out;
  for (auto part : detail::split(text, ',')) out.push_back(parse_number(std::string(part), "--breaks"));
  return out;
}

template <typename Fn>
auto with_context(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

fs::path suffixed(const fs::path& stem, const std::string& suffix) {
  fs::path p = stem;
  p += suffix;
  return p;
}

void write_graph(const GeoGraph& g, const fs::path& stem, bool shapefiles, bool geojson) {
  if (shapefiles) {
    write_shapefile(nodes_to_features(g), suffixed(stem, "_nodes"));
    write_shapefile(edges_to_features(g), suffixed(stem, "_edges"));
  }
  if (geojson) detail::write_file_atomic(suffixed(stem, ".geojson"), to_geojson(g));
}

// The source features with a leading node_id column.
void write_lines_with_ids(const FeatureCollection& c, const fs::path& path) {
  if (c.schema().find("node_id")) throw Error("input already has a 'node_id' field");
  std::vector<Field> fields{{"node_id", FieldKind::kInteger, 10, 0}};
  fields.insert(fields.end(), c.schema().fields().begin(), c.schema().fields().end());
  FeatureCollection out(FieldSchema(std::move(fields)), c.geometry_kind(), c.mode());
  for (std::size_t i = 0; i < c.size(); ++i) {
    Feature f = c[i];
    f.attributes.insert(f.attributes.begin(), Value(static_cast<std::int64_t>(i)));
    out.add(std::move(f));
  }
  write_shapefile(out, path);
}

FeatureCollection in_mode(const FeatureCollection& c, CoordinateMode mode) {
  if (mode == c.mode()) return c;
  FeatureCollection out(c.schema(), c.geometry_kind(), mode);
  for (const auto& f : c.features()) out.add(f);
  return out;
}

void apply_metric_flags(GeoGraph& g, bool deg, bool clus, bool betw, const BetweennessOptions& opt) {
  if (!deg && !clus && !betw) deg = clus = betw = true;
  std::vector<MetricVector> vectors;
  if (deg) vectors.push_back(degree(g));
  if (clus) vectors.push_back(clustering_coefficient(g));
  if (betw) vectors.push_back(betweenness(g, opt));
  g = attach_metrics(g, vectors);
}

struct StyleFlags {
  std::string node_metric;
  std::string edge_metric;
  std::string breaks;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--node-class", node_metric, "Node attribute to class into 'class'");
    cmd->add_option("--edge-class", edge_metric, "Edge attribute to class into 'class'");
    cmd->add_option("--breaks", breaks, "Ascending class breaks, comma separated");
  }

  GeoGraph apply(const GeoGraph& g) const {
    if (node_metric.empty() && edge_metric.empty()) return g;
    if (breaks.empty()) throw Error("--node-class/--edge-class need --breaks");
    ExportStyle style;
    if (!node_metric.empty()) style.node_metric = node_metric;
    if (!edge_metric.empty()) style.edge_metric = edge_metric;
    style.breaks = parse_breaks(breaks);
    return apply_style(g, style);
  }
};

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convert between GIS layers and (geo)graphs"};
  app.require_subcommand(1);
  std::function<void()> action;

  // extract
  auto* extract = app.add_subcommand("extract", "Polyline shapefile -> graph of touching features");
  std::string ex_in, ex_out, ex_mode = "geometric", ex_tol, ex_cell;
  bool ex_keep = false, ex_geographic = false;
  extract->add_option("--in", ex_in, "Input shapefile stem")->required();
  extract->add_option("--out", ex_out, "Output stem")->required();
  extract->add_option("--tol", ex_tol, "Connection tolerance (default: 0 geometric, 1e-9 x diagonal endpoint)");
  extract->add_option("--mode", ex_mode, "geometric | endpoint");
  extract->add_option("--cell-size", ex_cell, "Spatial index cell size");
  extract->add_flag("--keep-geometry", ex_keep, "Also write the source lines with node ids");
  extract->add_flag("--geographic", ex_geographic, "Validate coordinates as lon/lat");
  extract->callback([&] {
    action = [&] {
      if (ex_mode != "geometric" && ex_mode != "endpoint") {
        throw Error("--mode must be 'geometric' or 'endpoint'");
      }
      const auto mode = ex_mode == "geometric" ? ConnectionMode::kGeometric : ConnectionMode::kEndpoint;
      ReadDiagnostics diag;
      auto features = with_context(ex_in, [&] {
        return in_mode(read_shapefile(fs::path(ex_in), &diag),
                       ex_geographic ? CoordinateMode::kGeographic : CoordinateMode::kPlanar);
      });
      for (const auto& w : diag.warnings) err << "warning: " << ex_in << ": " << w << "\n";
      if (features.geometry_kind() != GeometryKind::kPolyLine) {
        throw Error(ex_in + ": extract needs a polyline shapefile");
      }
      const double tol = ex_tol.empty() ? default_tolerance(features, mode) : parse_number(ex_tol, "--tol");
      ConnectionList conns;
      const bool any_geometry = std::any_of(features.features().begin(), features.features().end(),
                                            [](const Feature& f) { return f.geometry.index() != 0; });
      if (any_geometry) {
        std::optional<double> cell;
        if (!ex_cell.empty()) cell = parse_number(ex_cell, "--cell-size");
        conns = find_connections(features, SpatialIndex::build(features, cell), tol, mode);
      }
      const auto g = features_to_geograph(features, conns);
      write_graph(g, ex_out, true, true);
      if (ex_keep) write_lines_with_ids(features, suffixed(ex_out, "_lines"));
      out << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
    };
  });

  // osm2graph
  auto* osm2graph = app.add_subcommand("osm2graph", "OSM XML -> street graph (one node per street)");
  std::string osm_in, osm_out, osm_filter = "highway";
  osm2graph->add_option("--in", osm_in, "OSM XML file")->required();
  osm2graph->add_option("--out", osm_out, "Output stem")->required();
  osm2graph->add_option("--filter", osm_filter, "Way filter, e.g. 'highway' or 'highway=primary|secondary'");
  osm2graph->callback([&] {
    action = [&] {
      const auto filter = osm::parse_way_filter(osm_filter);
      const auto doc = osm::parse_osm_file(osm_in);
      const auto segments = osm::split_ways_at_crossroads(doc, filter);
      const auto streets = osm::aggregate_streets(segments);
      ConnectionList conns;
      for (const auto& c : streets.connections) {
        conns.push_back({c.a, c.b, doc.node(c.shared_nodes.front()).location});
      }
      const auto g = features_to_geograph(streets.features, conns);
      write_graph(g, osm_out, true, true);
      write_lines_with_ids(streets.features, suffixed(osm_out, "_streets"));
      out << segments.size() << " segments, " << g.node_count() << " streets, " << g.edge_count()
          << " connections\n";
    };
  });

  // geocnet
  auto* geocnet = app.add_subcommand("geocnet", "Point shapefile + adjacency CSV -> edge line shapefile");
  std::string gc_points, gc_adj, gc_out;
  bool gc_geographic = false;
  geocnet->add_option("--points", gc_points, "Point shapefile stem with an integer 'id' field")->required();
  geocnet->add_option("--adj", gc_adj, "Adjacency matrix CSV")->required();
  geocnet->add_option("--out", gc_out, "Output stem")->required();
  geocnet->add_flag("--geographic", gc_geographic, "Validate coordinates as lon/lat");
  geocnet->callback([&] {
    action = [&] {
      auto points = with_context(gc_points, [&] {
        return in_mode(read_shapefile(fs::path(gc_points)),
                       gc_geographic ? CoordinateMode::kGeographic : CoordinateMode::kPlanar);
      });
      const auto matrix = with_context(gc_adj, [&] {
        auto table = csv::read_adjacency(detail::read_file_text(gc_adj));
        std::vector<NodeId> ids;
        if (table.ids) {
          ids = *table.ids;
        } else {
          // Without a header the matrix follows the point order.
          const auto field = points.schema().find("id");
          if (!field) throw Error("points have no 'id' field");
          for (const auto& f : points.features()) {
            const auto* id = std::get_if<std::int64_t>(&f.attributes[*field]);
            if (id == nullptr) throw Error("a point has a null id");
            ids.push_back(*id);
          }
        }
        return validate_adjacency(table.entries, ids);
      });
      auto g = with_context(gc_points, [&] { return graph_from_adjacency(points, matrix); });
      apply_metric_flags(g, true, true, true, {});
      write_graph(g, gc_out, true, true);
      out << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
    };
  });

  // corrnet
  auto* corrnet = app.add_subcommand("corrnet", "Time series -> Pearson correlation network");
  std::string cn_series, cn_locations, cn_out, cn_tau, cn_overlap;
  unsigned cn_threads = 0;
  corrnet->add_option("--series", cn_series, "Time series CSV")->required();
  corrnet->add_option("--locations", cn_locations, "Node locations CSV (id,x,y)")->required();
  corrnet->add_option("--tau", cn_tau, "Correlation threshold (edges need r > tau)")->required();
  corrnet->add_option("--min-overlap", cn_overlap, "Minimum shared samples per pair");
  corrnet->add_option("--threads", cn_threads, "Worker threads (0 = all)");
  corrnet->add_option("--out", cn_out, "Output stem")->required();
  corrnet->callback([&] {
    action = [&] {
      const Threshold tau(parse_number(cn_tau, "--tau"));
      std::optional<std::size_t> overlap;
      if (!cn_overlap.empty()) {
        const auto v = detail::parse_int(detail::trim(cn_overlap));
        if (!v || *v < 2) throw Error("--min-overlap expects an integer >= 2");
        overlap = static_cast<std::size_t>(*v);
      }
      const auto locations =
          with_context(cn_locations, [&] { return csv::read_locations(detail::read_file_text(cn_locations)); });
      const auto series = with_context(
          cn_series, [&] { return csv::read_time_series(detail::read_file_text(cn_series), locations); });
      const auto net = correlation_network(series, tau, overlap, cn_threads);
      if (!net.zero_variance.empty()) {
        err << "warning: zero-variance series kept as isolated nodes:";
        for (const auto id : net.zero_variance) err << " " << id;
        err << "\n";
      }
      write_graph(net.graph, cn_out, true, true);
      out << net.graph.node_count() << " nodes, " << net.graph.edge_count() << " edges\n";
    };
  });

  // flownet
  auto* flownet = app.add_subcommand("flownet", "Origin-destination flows -> thresholded flow network");
  std::string fn_od, fn_zones, fn_out, fn_tau = "1000";
  flownet->add_option("--od", fn_od, "OD CSV (origin,dest,flow)")->required();
  flownet->add_option("--zones", fn_zones, "Zone centroid CSV (id,x,y)")->required();
  flownet->add_option("--tau", fn_tau, "Flow threshold (edges need flow > tau)")->capture_default_str();
  flownet->add_option("--out", fn_out, "Output stem")->required();
  flownet->callback([&] {
    action = [&] {
      const Threshold tau(parse_number(fn_tau, "--tau"));
      const auto zones = with_context(fn_zones, [&] { return csv::read_locations(detail::read_file_text(fn_zones)); });
      const auto od = with_context(fn_od, [&] { return csv::read_od(detail::read_file_text(fn_od), zones); });
      const auto g = flow_network(od, tau);
      write_graph(g, fn_out, true, true);
      out << g.node_count() << " zones, " << g.edge_count() << " edges\n";
    };
  });

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Attach degree / clustering / betweenness to a graph");
  std::string mt_in, mt_out;
  bool mt_deg = false, mt_clus = false, mt_betw = false, mt_norm = false, mt_weighted = false;
  unsigned mt_threads = 0;
  StyleFlags mt_style;
  metrics->add_option("--in", mt_in, "Graph GeoJSON")->required();
  metrics->add_option("--out", mt_out, "Output stem")->required();
  metrics->add_flag("--degree", mt_deg);
  metrics->add_flag("--clustering", mt_clus);
  metrics->add_flag("--betweenness", mt_betw);
  metrics->add_flag("--normalized", mt_norm, "Normalize betweenness by (n-1)(n-2)/2");
  metrics->add_flag("--weighted", mt_weighted, "Use edge weights as lengths");
  metrics->add_option("--threads", mt_threads, "Worker threads (0 = all)");
  mt_style.add_to(metrics);
  metrics->callback([&] {
    action = [&] {
      auto g = with_context(mt_in, [&] { return from_geojson(detail::read_file_text(mt_in)); });
      apply_metric_flags(g, mt_deg, mt_clus, mt_betw, {mt_norm, mt_weighted, mt_threads});
      g = mt_style.apply(g);
      write_graph(g, mt_out, true, true);
      out << g.node_count() << " nodes\n";
    };
  });

  // export
  auto* exporter = app.add_subcommand("export", "Graph GeoJSON -> shapefiles or GeoJSON");
  std::string xp_in, xp_out, xp_format;
  StyleFlags xp_style;
  exporter->add_option("--in", xp_in, "Graph GeoJSON")->required();
  exporter->add_option("--out", xp_out, "Output stem")->required();
  exporter->add_option("--format", xp_format, "shp | geojson")->required();
  xp_style.add_to(exporter);
  exporter->callback([&] {
    action = [&] {
      if (xp_format != "shp" && xp_format != "geojson") throw Error("--format must be 'shp' or 'geojson'");
      auto g = with_context(xp_in, [&] { return from_geojson(detail::read_file_text(xp_in)); });
      g = xp_style.apply(g);
      write_graph(g, xp_out, xp_format == "shp", xp_format == "geojson");
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 1;
  }

  try {
    if (action) action();
    return 0;
  } catch (const Error& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const InternalError& e) {
    err << "internal error: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << one_line(e.what()) << "\n";
    return 2;
  }
}

}  // namespace geograph
