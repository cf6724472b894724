#include "geograph/builders.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "geograph/error.hpp"
#include "geograph/metrics.hpp"
#include "parallel.hpp"

namespace geograph {

Threshold::Threshold(double v) : value(v) {
  if (!std::isfinite(v)) throw Error("threshold must be finite");
}

TimeSeriesSet::TimeSeriesSet(std::vector<NodeId> ids, std::map<NodeId, GeoPoint> locations,
                             std::map<NodeId, std::vector<double>> series, std::string cadence)
    : ids_(std::move(ids)),
      locations_(std::move(locations)),
      series_(std::move(series)),
      cadence_(std::move(cadence)) {
  std::set<NodeId> seen;
  for (const auto id : ids_) {
    if (!seen.insert(id).second) throw Error("duplicate series id " + std::to_string(id));
    auto loc = locations_.find(id);
    if (loc == locations_.end()) throw Error("no location for series " + std::to_string(id));
    validate_point(loc->second);
    auto s = series_.find(id);
    if (s == series_.end()) throw Error("no series for id " + std::to_string(id));
    if (length_ == 0) length_ = s->second.size();
    if (s->second.size() != length_) {
      throw Error("series " + std::to_string(id) + " has length " +
                  std::to_string(s->second.size()) + ", expected " + std::to_string(length_));
    }
    for (const double v : s->second) {
      if (std::isinf(v)) throw Error("series " + std::to_string(id) + " has an infinite value");
    }
  }
  if (!ids_.empty() && length_ < 2) throw Error("time series need at least 2 samples");
}

bool TimeSeriesSet::has_missing() const {
  for (const auto& [id, values] : series_) {
    if (std::any_of(values.begin(), values.end(), is_missing)) return true;
  }
  return false;
}

void ODMatrix::add_zone(NodeId id, GeoPoint centroid) {
  validate_point(centroid);
  if (!zones_.emplace(id, centroid).second) throw Error("duplicate zone " + std::to_string(id));
}

void ODMatrix::add_flow(NodeId origin, NodeId destination, double flow) {
  if (!zones_.contains(origin)) throw Error("unknown origin zone " + std::to_string(origin));
  if (!zones_.contains(destination)) {
    throw Error("unknown destination zone " + std::to_string(destination));
  }
  if (!std::isfinite(flow) || flow < 0.0) {
    throw Error("flow " + std::to_string(origin) + " -> " + std::to_string(destination) +
                " must be finite and non-negative");
  }
  if (!flows_.emplace(std::pair{origin, destination}, flow).second) {
    throw Error("duplicate flow entry " + std::to_string(origin) + " -> " +
                std::to_string(destination));
  }
}

double ODMatrix::flow(NodeId origin, NodeId destination) const {
  auto it = flows_.find({origin, destination});
  return it == flows_.end() ? 0.0 : it->second;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y,
                              std::size_t min_overlap) {
  if (x.size() != y.size()) {
    throw Error("series lengths differ: " + std::to_string(x.size()) + " vs " +
                std::to_string(y.size()));
  }
  if (min_overlap < 2) throw Error("min_overlap must be at least 2");

  std::size_t overlap = 0;
  double sum_x = 0.0;
  double sum_y = 0.0;
  bool x_constant = true;
  bool y_constant = true;
  double first_x = 0.0;
  double first_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (is_missing(x[i]) || is_missing(y[i])) continue;
    if (overlap == 0) {
      first_x = x[i];
      first_y = y[i];
    }
    x_constant = x_constant && x[i] == first_x;
    y_constant = y_constant && y[i] == first_y;
    sum_x += x[i];
    sum_y += y[i];
    ++overlap;
  }
  if (overlap < min_overlap || x_constant || y_constant) return std::nullopt;

  const double mean_x = sum_x / static_cast<double>(overlap);
  const double mean_y = sum_y / static_cast<double>(overlap);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (is_missing(x[i]) || is_missing(y[i])) continue;
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationNetwork correlation_network(const TimeSeriesSet& ts, Threshold tau,
                                       std::optional<std::size_t> min_overlap,
                                       unsigned workers) {
  if (tau.value < -1.0 || tau.value > 1.0) throw Error("correlation threshold must be in [-1, 1]");
  const std::size_t overlap =
      min_overlap.value_or(ts.has_missing() ? std::min<std::size_t>(10, ts.length()) : ts.length());

  CorrelationNetwork out;
  const auto& ids = ts.ids();
  for (const auto id : ids) {
    out.graph.add_node(id, ts.location(id));
    const auto& s = ts.series(id);
    std::optional<double> first;
    bool varies = false;
    for (const double v : s) {
      if (is_missing(v)) continue;
      if (!first) first = v;
      varies = varies || v != *first;
    }
    if (!varies) out.zero_variance.push_back(id);
  }

  std::vector<std::vector<std::pair<std::size_t, double>>> rows(ids.size());
  detail::parallel_for(ids.size(), detail::resolve_workers(workers), [&](std::size_t i) {
    const auto& xi = ts.series(ids[i]);
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const auto r = pearson(xi, ts.series(ids[j]), overlap);
      if (r && tau.passes(*r)) rows[i].emplace_back(j, *r);
    }
  });
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (const auto& [j, r] : rows[i]) out.graph.add_edge(ids[i], ids[j], r, {{"r", r}});
  }
  return out;
}

GeoGraph flow_network(const ODMatrix& od, Threshold tau) {
  if (tau.value < 0.0) throw Error("flow threshold must be non-negative");
  GeoGraph g;
  for (const auto& [id, centroid] : od.zones()) g.add_node(id, centroid);
  for (auto a = od.zones().begin(); a != od.zones().end(); ++a) {
    for (auto b = std::next(a); b != od.zones().end(); ++b) {
      const double forward = od.flow(a->first, b->first);
      const double backward = od.flow(b->first, a->first);
      const double total = forward + backward;
      if (tau.passes(total)) {
        g.add_edge(a->first, b->first, total, {{"flow_uv", forward}, {"flow_vu", backward}});
      }
    }
  }
  return attach_metrics(g, {degree(g)});
}

GeoGraph graph_from_adjacency(const FeatureCollection& points, const AdjacencyMatrix& m) {
  if (points.geometry_kind() != GeometryKind::kPoint) {
    throw Error("node layer must be a point shapefile");
  }
  const auto id_field = points.schema().find("id");
  if (!id_field) throw Error("node layer has no 'id' field");
  if (points.schema()[*id_field].kind != FieldKind::kInteger) {
    throw Error("node layer field '" + points.schema()[*id_field].name + "' is not an integer");
  }

  GeoGraph g;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& f = points[i];
    const auto* id = std::get_if<std::int64_t>(&f.attributes[*id_field]);
    if (id == nullptr) throw Error("point " + std::to_string(i) + " has a null id");
    const auto* location = std::get_if<GeoPoint>(&f.geometry);
    if (location == nullptr) throw Error("point " + std::to_string(*id) + " has no geometry");
    if (g.has_node(*id)) throw Error("duplicate point id " + std::to_string(*id));
    Attributes attrs;
    for (std::size_t k = 0; k < points.schema().size(); ++k) {
      attrs[points.schema()[k].name] = f.attributes[k];
    }
    g.add_node(*id, *location, std::move(attrs));
  }

  for (const auto id : m.ids()) {
    if (!g.has_node(id)) throw Error("matrix id " + std::to_string(id) + " is not a point id");
  }
  if (m.size() != g.node_count()) {
    const std::set<NodeId> in_matrix(m.ids().begin(), m.ids().end());
    for (const auto& [id, node] : g.nodes()) {
      if (!in_matrix.contains(id)) {
        throw Error("point id " + std::to_string(id) + " is missing from the matrix");
      }
    }
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (m.connected(i, j)) g.add_edge(m.ids()[i], m.ids()[j]);
    }
  }
  return g;
}

}  // namespace geograph
