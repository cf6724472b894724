#include "geograph/feature.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "geograph/error.hpp"
#include "strings.hpp"

namespace geograph {

std::optional<double> as_number(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

std::string to_string(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return detail::shortest_double(d); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, v);
}

std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::kInteger: return "integer";
    case FieldKind::kReal: return "real";
    case FieldKind::kText: return "text";
    case FieldKind::kLogical: return "logical";
  }
  return "?";
}

FieldSchema::FieldSchema(std::vector<Field> fields) : fields_(std::move(fields)) {
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    const Field& f = fields_[i];
    if (f.name.empty() || f.name.size() > kMaxFieldNameLength) {
      throw Error("field name '" + f.name + "' must be 1 to 10 characters");
    }
    if (f.width <= 0 || f.width > 255) {
      throw Error("field '" + f.name + "' width must be in [1, 255]");
    }
    if (f.decimals < 0) throw Error("field '" + f.name + "' has negative decimals");
    if (f.decimals != 0 && f.kind != FieldKind::kReal) {
      throw Error("field '" + f.name + "' has decimals but is not real");
    }
    if (f.decimals >= f.width) {
      throw Error("field '" + f.name + "' decimals do not fit the width");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (detail::iequals(fields_[j].name, f.name)) {
        throw Error("duplicate field name '" + f.name + "'");
      }
    }
  }
}

std::optional<std::size_t> FieldSchema::find(std::string_view name) const {
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (detail::iequals(fields_[i].name, name)) return i;
  }
  return std::nullopt;
}

void check_value_kind(const Field& field, const Value& value) {
  if (is_null(value)) return;
  bool ok = false;
  switch (field.kind) {
    case FieldKind::kInteger: ok = std::holds_alternative<std::int64_t>(value); break;
    case FieldKind::kReal: {
      const auto* d = std::get_if<double>(&value);
      ok = d != nullptr && std::isfinite(*d);
      break;
    }
    case FieldKind::kText: ok = std::holds_alternative<std::string>(value); break;
    case FieldKind::kLogical: ok = std::holds_alternative<bool>(value); break;
  }
  if (!ok) {
    throw Error("value " + to_string(value) + " does not match " +
                std::string(to_string(field.kind)) + " field '" + field.name + "'");
  }
}

FeatureCollection::FeatureCollection(FieldSchema schema, GeometryKind kind,
                                     CoordinateMode mode)
    : schema_(std::move(schema)), kind_(kind), mode_(mode) {}

void FeatureCollection::add(Feature f) {
  if (f.attributes.size() != schema_.size()) {
    throw Error("feature has " + std::to_string(f.attributes.size()) +
                " attributes, schema has " + std::to_string(schema_.size()));
  }
  for (std::size_t i = 0; i < schema_.size(); ++i) check_value_kind(schema_[i], f.attributes[i]);

  if (const auto* p = std::get_if<GeoPoint>(&f.geometry)) {
    if (kind_ != GeometryKind::kPoint) throw Error("point geometry in a polyline collection");
    validate_point(*p, mode_);
  } else if (const auto* line = std::get_if<PolyLine>(&f.geometry)) {
    if (kind_ != GeometryKind::kPolyLine) throw Error("polyline geometry in a point collection");
    for (const auto& part : line->parts()) {
      for (const auto& q : part) validate_point(q, mode_);
    }
  }
  features_.push_back(std::move(f));
}

}  // namespace geograph
