#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "geograph/feature.hpp"

namespace geograph {

using Bytes = std::vector<std::uint8_t>;

// Shape type codes from the ESRI Shapefile Technical Description.
enum class ShapeType : std::int32_t {
  kNull = 0,
  kPoint = 1,
  kPolyLine = 3,
  kPolygon = 5,
  kMultiPoint = 8,
  kPointZ = 11,
  kPolyLineZ = 13,
  kPointM = 21,
  kPolyLineM = 23,
};

// The three sibling files of a shapefile, held in memory.
struct ShapefileTriplet {
  Bytes shp;
  Bytes shx;
  Bytes dbf;
};

// Non-fatal findings while reading (discarded Z/M values, non-ASCII text).
struct ReadDiagnostics {
  std::vector<std::string> warnings;
};

ShapefileTriplet load_triplet(const std::filesystem::path& stem);

// Writes <stem>.shp/.shx/.dbf; each file goes to a temporary sibling first
// and is renamed into place.
void save_triplet(const ShapefileTriplet& t, const std::filesystem::path& stem);

// Points and polylines (and their Z/M variants, with Z/M dropped) plus null
// shapes. Any other shape type raises UnsupportedShapeType.
FeatureCollection read_shapefile(const ShapefileTriplet& t,
                                 ReadDiagnostics* diagnostics = nullptr);
FeatureCollection read_shapefile(const std::filesystem::path& stem,
                                 ReadDiagnostics* diagnostics = nullptr);

// Throws Error on an empty schema or a value that overflows its field width.
ShapefileTriplet write_shapefile(const FeatureCollection& c);
ShapefileTriplet write_shapefile(const FeatureCollection& c,
                                 const std::filesystem::path& stem);

FieldSchema read_dbf_schema(const Bytes& dbf);

// The DBF text of `value` in `field` exactly as the writer stores it.
std::string format_dbf_value(const Field& field, const Value& value);

// What a value becomes after one pass through a DBF cell: reals rounded to
// the declared decimals, text stripped of trailing blanks, blank text null.
Value dbf_normalized(const Field& field, const Value& value);

}  // namespace geograph
