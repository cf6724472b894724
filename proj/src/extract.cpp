#include "geograph/extract.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>

#include "geograph/error.hpp"

namespace geograph {

namespace {

double orient(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// p is known to be collinear with [a, b]; is it within the segment's box?
bool within_box(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
         p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

GeoPoint midpoint(const GeoPoint& p, const GeoPoint& q) {
  return {(p.x + q.x) / 2.0, (p.y + q.y) / 2.0};
}

std::optional<GeoPoint> collinear_overlap(const GeoPoint& a, const GeoPoint& b,
                                          const GeoPoint& c, const GeoPoint& d) {
  const double span_x = std::max({a.x, b.x, c.x, d.x}) - std::min({a.x, b.x, c.x, d.x});
  const double span_y = std::max({a.y, b.y, c.y, d.y}) - std::min({a.y, b.y, c.y, d.y});
  const auto axis = [&](const GeoPoint& p) { return span_x >= span_y ? p.x : p.y; };
  const GeoPoint& ab_lo = axis(a) <= axis(b) ? a : b;
  const GeoPoint& ab_hi = axis(a) <= axis(b) ? b : a;
  const GeoPoint& cd_lo = axis(c) <= axis(d) ? c : d;
  const GeoPoint& cd_hi = axis(c) <= axis(d) ? d : c;
  const GeoPoint& lo = axis(ab_lo) >= axis(cd_lo) ? ab_lo : cd_lo;
  const GeoPoint& hi = axis(ab_hi) <= axis(cd_hi) ? ab_hi : cd_hi;
  if (axis(lo) > axis(hi)) return std::nullopt;
  return midpoint(lo, hi);
}

std::optional<GeoPoint> intersection(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c,
                                     const GeoPoint& d) {
  const double d1 = orient(c, d, a);
  const double d2 = orient(c, d, b);
  const double d3 = orient(a, b, c);
  const double d4 = orient(a, b, d);
  if (d1 == 0.0 && d2 == 0.0 && d3 == 0.0 && d4 == 0.0) return collinear_overlap(a, b, c, d);
  if (sign(d1) * sign(d2) < 0 && sign(d3) * sign(d4) < 0) {
    const double t = d3 / (d3 - d4);  // position along [c, d]
    return GeoPoint{c.x + t * (d.x - c.x), c.y + t * (d.y - c.y)};
  }
  if (d1 == 0.0 && within_box(a, c, d)) return a;
  if (d2 == 0.0 && within_box(b, c, d)) return b;
  if (d3 == 0.0 && within_box(c, a, b)) return c;
  if (d4 == 0.0 && within_box(d, a, b)) return d;
  return std::nullopt;
}

BBox segment_box(const GeoPoint& a, const GeoPoint& b) {
  BBox box = BBox::of(a);
  box.extend(b);
  return box;
}

const PolyLine& line_of(const FeatureCollection& c, std::size_t i) {
  return std::get<PolyLine>(c[i].geometry);
}

// Geometric mode: first contact in (segment of i, segment of j) order.
std::optional<GeoPoint> geometric_contact(const PolyLine& li, const PolyLine& lj, double tol) {
  for (const auto& pi : li.parts()) {
    for (std::size_t si = 0; si + 1 < pi.size(); ++si) {
      const BBox reach = segment_box(pi[si], pi[si + 1]).expanded(tol);
      for (const auto& pj : lj.parts()) {
        for (std::size_t sj = 0; sj + 1 < pj.size(); ++sj) {
          if (!reach.intersects(segment_box(pj[sj], pj[sj + 1]))) continue;
          const auto contact = segment_contact(pi[si], pi[si + 1], pj[sj], pj[sj + 1]);
          if (contact.distance <= tol) return contact.witness;
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<GeoPoint> endpoint_reaches(const PolyLine& from, const PolyLine& to, double tol) {
  for (const auto& part : from.parts()) {
    for (const GeoPoint* end : {&part.front(), &part.back()}) {
      const BBox reach = BBox::of(*end).expanded(tol);
      for (const auto& q : to.parts()) {
        for (std::size_t s = 0; s + 1 < q.size(); ++s) {
          if (!reach.intersects(segment_box(q[s], q[s + 1]))) continue;
          const GeoPoint near = closest_point_on_segment(*end, q[s], q[s + 1]);
          if (distance(*end, near) <= tol) return midpoint(*end, near);
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<GeoPoint> endpoint_contact(const PolyLine& li, const PolyLine& lj, double tol) {
  if (auto w = endpoint_reaches(li, lj, tol)) return w;
  return endpoint_reaches(lj, li, tol);
}

}  // namespace

SegmentContact segment_contact(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c,
                               const GeoPoint& d) {
  if (auto p = intersection(a, b, c, d)) return {0.0, *p};
  SegmentContact best{std::numeric_limits<double>::infinity(), {}};
  const auto consider = [&](const GeoPoint& p, const GeoPoint& s0, const GeoPoint& s1) {
    const GeoPoint q = closest_point_on_segment(p, s0, s1);
    const double dist = distance(p, q);
    if (dist < best.distance) best = {dist, midpoint(p, q)};
  };
  consider(a, c, d);
  consider(b, c, d);
  consider(c, a, b);
  consider(d, a, b);
  return best;
}

double default_tolerance(const FeatureCollection& c, ConnectionMode mode) {
  if (mode == ConnectionMode::kGeometric) return 0.0;
  std::optional<BBox> box;
  for (const auto& f : c.features()) {
    if (const auto* line = std::get_if<PolyLine>(&f.geometry)) {
      box ? box->extend(line->bbox()) : void(box = line->bbox());
    }
  }
  return box ? 1e-9 * std::hypot(box->width(), box->height()) : 0.0;
}

ConnectionList find_connections(const FeatureCollection& c, const SpatialIndex& idx, double tol,
                                ConnectionMode mode) {
  if (!(tol >= 0.0) || !std::isfinite(tol)) {
    throw Error("tolerance must be a finite non-negative number");
  }
  if (c.geometry_kind() != GeometryKind::kPolyLine) {
    throw Error("connection detection needs a polyline collection");
  }

  std::set<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto* line = std::get_if<PolyLine>(&c[i].geometry);
    if (line == nullptr) continue;
    const auto collect = [&](const BBox& box) {
      for (const auto& ref : idx.query(box.expanded(tol))) {
        const std::size_t j = ref.feature;
        if (j != i) candidates.emplace(std::min(i, j), std::max(i, j));
      }
    };
    for (const auto& part : line->parts()) {
      if (mode == ConnectionMode::kEndpoint) {
        collect(BBox::of(part.front()));
        collect(BBox::of(part.back()));
      } else {
        for (std::size_t s = 0; s + 1 < part.size(); ++s) collect(segment_box(part[s], part[s + 1]));
      }
    }
  }

  ConnectionList out;
  for (const auto& [i, j] : candidates) {
    const auto& li = line_of(c, i);
    const auto& lj = line_of(c, j);
    const auto witness = mode == ConnectionMode::kGeometric ? geometric_contact(li, lj, tol)
                                                            : endpoint_contact(li, lj, tol);
    if (witness) out.push_back({i, j, *witness});
  }
  return out;
}

GeoPoint representative_point(const Feature& f) {
  if (const auto* p = std::get_if<GeoPoint>(&f.geometry)) return *p;
  const auto* line = std::get_if<PolyLine>(&f.geometry);
  if (line == nullptr) throw Error("representative point of a null geometry");
  std::size_t best = 0;
  double best_length = -1.0;
  for (std::size_t i = 0; i < line->parts().size(); ++i) {
    const double len = part_length(line->parts()[i]);
    if (len > best_length) {
      best_length = len;
      best = i;
    }
  }
  return point_along(line->parts()[best], best_length / 2.0);
}

GeoGraph features_to_geograph(const FeatureCollection& c, const ConnectionList& conns) {
  GeoGraph g;
  for (std::size_t i = 0; i < c.size(); ++i) {
    Attributes attrs;
    for (std::size_t k = 0; k < c.schema().size(); ++k) {
      attrs[c.schema()[k].name] = c[i].attributes[k];
    }
    try {
      g.add_node(static_cast<NodeId>(i), representative_point(c[i]), std::move(attrs));
    } catch (const Error& e) {
      throw Error("feature " + std::to_string(i) + ": " + e.what());
    }
  }
  for (const auto& conn : conns) {
    if (conn.i >= c.size() || conn.j >= c.size()) {
      throw Error("connection (" + std::to_string(conn.i) + ", " + std::to_string(conn.j) +
                  ") is out of range");
    }
    g.add_edge(static_cast<NodeId>(conn.i), static_cast<NodeId>(conn.j), 1.0,
               {{"witness_x", conn.witness.x}, {"witness_y", conn.witness.y}});
  }
  return g;
}

}  // namespace geograph
