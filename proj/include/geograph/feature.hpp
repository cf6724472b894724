#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geograph/geometry.hpp"

namespace geograph {

// Attribute value. monostate is null.
using Value = std::variant<std::monostate, std::int64_t, double, std::string, bool>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

// Numeric view of an integer or real value.
std::optional<double> as_number(const Value& v);

std::string to_string(const Value& v);

enum class FieldKind { kInteger, kReal, kText, kLogical };

std::string_view to_string(FieldKind kind);

inline constexpr std::size_t kMaxFieldNameLength = 10;

struct Field {
  std::string name;
  FieldKind kind = FieldKind::kText;
  int width = 1;
  int decimals = 0;

  friend bool operator==(const Field&, const Field&) = default;
};

// Ordered DBF-compatible field list. Names are unique ignoring ASCII case.
class FieldSchema {
 public:
  FieldSchema() = default;
  explicit FieldSchema(std::vector<Field> fields);

  const std::vector<Field>& fields() const { return fields_; }
  std::size_t size() const { return fields_.size(); }
  bool empty() const { return fields_.empty(); }
  const Field& operator[](std::size_t i) const { return fields_[i]; }

  // Case-insensitive lookup.
  std::optional<std::size_t> find(std::string_view name) const;

  friend bool operator==(const FieldSchema&, const FieldSchema&) = default;

 private:
  std::vector<Field> fields_;
};

// Throws Error when `value` cannot be stored in `field` (kind mismatch).
// Width is checked at serialization time, not here.
void check_value_kind(const Field& field, const Value& value);

using Geometry = std::variant<std::monostate, GeoPoint, PolyLine>;

struct Feature {
  Geometry geometry;
  std::vector<Value> attributes;

  friend bool operator==(const Feature&, const Feature&) = default;
};

enum class GeometryKind { kPoint, kPolyLine };

// A GIS layer: one geometry kind, one schema, ordered features.
class FeatureCollection {
 public:
  FeatureCollection(FieldSchema schema, GeometryKind kind,
                    CoordinateMode mode = CoordinateMode::kPlanar);

  const FieldSchema& schema() const { return schema_; }
  GeometryKind geometry_kind() const { return kind_; }
  CoordinateMode mode() const { return mode_; }
  const std::vector<Feature>& features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  const Feature& operator[](std::size_t i) const { return features_[i]; }

  // Validates geometry kind, coordinates, attribute arity and value kinds.
  void add(Feature f);

  friend bool operator==(const FeatureCollection&, const FeatureCollection&) = default;

 private:
  FieldSchema schema_;
  GeometryKind kind_;
  CoordinateMode mode_;
  std::vector<Feature> features_;
};

}  // namespace geograph
