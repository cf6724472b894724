#include "geograph/export.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "geograph/error.hpp"
#include "strings.hpp"

namespace geograph {

namespace {

constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53
constexpr int kMaxTextWidth = 254;
constexpr int kMaxDecimals = 15;

bool integral(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) return true;
  const auto* d = std::get_if<double>(&v);
  return d && std::isfinite(*d) && std::trunc(*d) == *d && std::fabs(*d) <= kMaxExactInteger;
}

std::string fixed(double v, int decimals) {
  char buf[400];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) throw Error("number too large for a DBF field");
  return {buf, end};
}

// Fewest decimals (1..15) at which every value survives the fixed-point
// text exactly; 15 when none does.
int decimals_for(const std::vector<double>& values) {
  for (int d = 1; d < kMaxDecimals; ++d) {
    const bool exact = std::all_of(values.begin(), values.end(), [d](double v) {
      return detail::parse_double(fixed(v, d)) == v;
    });
    if (exact) return d;
  }
  return kMaxDecimals;
}

struct Column {
  std::string source_name;  // attribute key, empty for synthesized columns
  Field field;
};

// Infers one DBF field from the values of a column.
Field infer_field(const std::string& name, const std::vector<const Value*>& values) {
  bool all_integral = true;
  bool all_numeric = true;
  bool all_bool = true;
  bool any = false;
  for (const auto* v : values) {
    if (is_null(*v)) continue;
    any = true;
    all_integral = all_integral && integral(*v);
    all_numeric = all_numeric && as_number(*v).has_value();
    all_bool = all_bool && std::holds_alternative<bool>(*v);
  }
  Field f{dbf_field_name(name), FieldKind::kText, 1, 0};
  if (!any) return f;
  if (all_bool) {
    f.kind = FieldKind::kLogical;
  } else if (all_integral) {
    f.kind = FieldKind::kInteger;
    for (const auto* v : values) {
      if (is_null(*v)) continue;
      const auto n = std::holds_alternative<std::int64_t>(*v)
                         ? std::get<std::int64_t>(*v)
                         : static_cast<std::int64_t>(std::get<double>(*v));
      f.width = std::max(f.width, static_cast<int>(std::to_string(n).size()));
    }
  } else if (all_numeric) {
    f.kind = FieldKind::kReal;
    std::vector<double> numbers;
    for (const auto* v : values) {
      if (!is_null(*v)) numbers.push_back(*as_number(*v));
    }
    f.decimals = decimals_for(numbers);
    for (const double d : numbers) {
      f.width = std::max(f.width, static_cast<int>(fixed(d, f.decimals).size()));
    }
    if (f.width > 255) throw Error("values of '" + name + "' are too wide for a DBF field");
  } else {
    for (const auto* v : values) {
      if (!is_null(*v)) f.width = std::max(f.width, static_cast<int>(to_string(*v).size()));
    }
    if (f.width > kMaxTextWidth) {
      throw Error("text of '" + name + "' exceeds " + std::to_string(kMaxTextWidth) + " bytes");
    }
  }
  return f;
}

Value convert(const Field& field, const Value& v) {
  if (is_null(v)) return v;
  switch (field.kind) {
    case FieldKind::kInteger:
      if (const auto* d = std::get_if<double>(&v)) return static_cast<std::int64_t>(*d);
      return v;
    case FieldKind::kReal: return *as_number(v);
    case FieldKind::kLogical: return v;
    case FieldKind::kText: return to_string(v);
  }
  return v;
}

void check_collisions(const std::vector<std::string>& names) {
  std::map<std::string, std::vector<std::string>> by_stored;
  for (const auto& n : names) by_stored[detail::ascii_lowercase(dbf_field_name(n))].push_back(n);
  std::string report;
  for (const auto& [stored, originals] : by_stored) {
    if (originals.size() < 2) continue;
    if (!report.empty()) report += "; ";
    for (std::size_t i = 0; i < originals.size(); ++i) report += (i ? ", " : "") + originals[i];
    report += " -> '" + stored + "'";
  }
  if (!report.empty()) throw Error("attribute names collide as DBF fields: " + report);
}

bool is_reserved(const std::string& name, std::initializer_list<const char*> reserved) {
  return std::any_of(reserved.begin(), reserved.end(),
                     [&](const char* r) { return detail::iequals(name, r); });
}

}  // namespace

int class_of(double value, const std::vector<double>& breaks) {
  return static_cast<int>(std::upper_bound(breaks.begin(), breaks.end(), value) - breaks.begin());
}

GeoGraph apply_style(const GeoGraph& g, const ExportStyle& style) {
  for (std::size_t i = 1; i < style.breaks.size(); ++i) {
    if (!(style.breaks[i - 1] < style.breaks[i])) throw Error("class breaks must be strictly ascending");
  }
  const auto metric_value = [](const Attributes& attrs, const std::string& metric,
                               const std::string& where) {
    auto it = attrs.find(metric);
    const auto number = it == attrs.end() ? std::nullopt : as_number(it->second);
    if (!number) throw Error(where + " has no numeric '" + metric + "' attribute");
    return *number;
  };

  GeoGraph out;
  for (const auto& [id, node] : g.nodes()) {
    Attributes attrs = node.attributes;
    if (style.node_metric) {
      const double v = metric_value(attrs, *style.node_metric, "node " + std::to_string(id));
      attrs["class"] = static_cast<std::int64_t>(class_of(v, style.breaks));
    }
    out.add_node(id, node.location, std::move(attrs));
  }
  for (const auto& [key, e] : g.edges()) {
    Attributes attrs = e.attributes;
    if (style.edge_metric) {
      const std::string where = "edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) + ")";
      double v = 0.0;
      if (*style.edge_metric == "weight" && !attrs.contains("weight")) {
        v = e.weight;
      } else {
        v = metric_value(attrs, *style.edge_metric, where);
      }
      attrs["class"] = static_cast<std::int64_t>(class_of(v, style.breaks));
    }
    out.add_edge(e.u, e.v, e.weight, std::move(attrs));
  }
  return out;
}

std::string dbf_field_name(const std::string& name) { return name.substr(0, kMaxFieldNameLength); }

FeatureCollection edges_to_features(const GeoGraph& g) {
  std::vector<std::string> names{"source", "target", "weight"};
  std::map<std::string, std::vector<const Value*>> columns;
  for (const auto& [key, e] : g.edges()) {
    for (const auto& [name, value] : e.attributes) {
      if (is_reserved(name, {"source", "target", "weight"})) {
        throw Error("edge attribute '" + name + "' collides with a reserved field");
      }
      columns[name];
    }
  }
  for (const auto& [name, values] : columns) names.push_back(name);
  check_collisions(names);

  static const Value kNull;
  std::vector<Value> sources, targets, weights;
  for (const auto& [key, e] : g.edges()) {
    sources.emplace_back(e.u);
    targets.emplace_back(e.v);
    weights.emplace_back(e.weight);
    for (auto& [name, values] : columns) {
      auto it = e.attributes.find(name);
      values.push_back(it == e.attributes.end() ? &kNull : &it->second);
    }
  }
  const auto pointers = [](const std::vector<Value>& v) {
    std::vector<const Value*> out;
    for (const auto& x : v) out.push_back(&x);
    return out;
  };
  std::vector<Field> fields{infer_field("source", pointers(sources)),
                            infer_field("target", pointers(targets)),
                            infer_field("weight", pointers(weights))};
  // An empty edge set still declares typed endpoint fields.
  fields[0].kind = fields[1].kind = FieldKind::kInteger;
  if (g.edge_count() == 0) fields[2] = {"weight", FieldKind::kReal, 3, 1};
  for (const auto& [name, values] : columns) fields.push_back(infer_field(name, values));

  FeatureCollection out(FieldSchema(fields), GeometryKind::kPolyLine);
  std::size_t row = 0;
  for (const auto& [key, e] : g.edges()) {
    const auto& from = g.node(e.u).location;
    const auto& to = g.node(e.v).location;
    Feature f{PolyLine{from, to}, {}};
    f.attributes.push_back(convert(fields[0], sources[row]));
    f.attributes.push_back(convert(fields[1], targets[row]));
    f.attributes.push_back(convert(fields[2], weights[row]));
    std::size_t k = 3;
    for (const auto& [name, values] : columns) {
      f.attributes.push_back(convert(fields[k], *values[row]));
      ++k;
    }
    out.add(std::move(f));
    ++row;
  }
  return out;
}

FeatureCollection nodes_to_features(const GeoGraph& g) {
  std::map<std::string, std::vector<const Value*>> columns;
  for (const auto& [id, node] : g.nodes()) {
    for (const auto& [name, value] : node.attributes) {
      if (detail::iequals(name, "id")) {
        if (value != Value(id)) {
          throw Error("node " + std::to_string(id) + " has an 'id' attribute that differs from its id");
        }
        continue;
      }
      columns[name];
    }
  }
  std::vector<std::string> names{"id"};
  for (const auto& [name, values] : columns) names.push_back(name);
  check_collisions(names);

  static const Value kNull;
  std::vector<Value> ids;
  for (const auto& [id, node] : g.nodes()) {
    ids.emplace_back(id);
    for (auto& [name, values] : columns) {
      auto it = node.attributes.find(name);
      values.push_back(it == node.attributes.end() ? &kNull : &it->second);
    }
  }
  std::vector<const Value*> id_ptrs;
  for (const auto& v : ids) id_ptrs.push_back(&v);
  std::vector<Field> fields{infer_field("id", id_ptrs)};
  fields[0].kind = FieldKind::kInteger;
  for (const auto& [name, values] : columns) fields.push_back(infer_field(name, values));

  FeatureCollection out(FieldSchema(fields), GeometryKind::kPoint);
  std::size_t row = 0;
  for (const auto& [id, node] : g.nodes()) {
    Feature f{node.location, {ids[row]}};
    std::size_t k = 1;
    for (const auto& [name, values] : columns) {
      f.attributes.push_back(convert(fields[k], *values[row]));
      ++k;
    }
    out.add(std::move(f));
    ++row;
  }
  return out;
}

}  // namespace geograph
