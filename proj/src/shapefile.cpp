#include "geograph/shapefile.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>

#include "file_io.hpp"
#include "geograph/error.hpp"
#include "strings.hpp"

namespace geograph {

namespace {

constexpr std::int32_t kFileCode = 9994;
constexpr std::int32_t kVersion = 1000;
constexpr std::size_t kHeaderSize = 100;
constexpr std::uint8_t kDbfVersion = 0x03;
constexpr std::uint8_t kDbfHeaderTerminator = 0x0D;
constexpr std::uint8_t kDbfEof = 0x1A;
// Fixed modification date (YY since 1900, MM, DD) so output is reproducible.
constexpr std::uint8_t kDbfDate[3] = {100, 1, 1};

// ---- byte encoding -------------------------------------------------------

class ByteWriter {
 public:
  explicit ByteWriter(Bytes& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void be32(std::int32_t v) {
    const auto u = static_cast<std::uint32_t>(v);
    for (int shift = 24; shift >= 0; shift -= 8) u8(static_cast<std::uint8_t>(u >> shift));
  }
  void le32(std::int32_t v) {
    const auto u = static_cast<std::uint32_t>(v);
    for (int shift = 0; shift < 32; shift += 8) u8(static_cast<std::uint8_t>(u >> shift));
  }
  void le16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void le_double(double d) {
    const auto u = std::bit_cast<std::uint64_t>(d);
    for (int shift = 0; shift < 64; shift += 8) u8(static_cast<std::uint8_t>(u >> shift));
  }
  void zeros(std::size_t n) { out_.insert(out_.end(), n, 0); }
  void text(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

 private:
  Bytes& out_;
};

class ByteReader {
 public:
  ByteReader(const Bytes& data, std::string what) : data_(data), what_(std::move(what)) {}

  void need(std::size_t pos, std::size_t n) const {
    if (pos > data_.size() || data_.size() - pos < n) {
      throw ParseError(what_ + " is truncated at byte " + std::to_string(pos));
    }
  }
  std::uint8_t u8(std::size_t pos) const {
    need(pos, 1);
    return data_[pos];
  }
  std::int32_t be32(std::size_t pos) const {
    need(pos, 4);
    std::uint32_t u = 0;
    for (std::size_t i = 0; i < 4; ++i) u = (u << 8) | data_[pos + i];
    return static_cast<std::int32_t>(u);
  }
  std::int32_t le32(std::size_t pos) const {
    need(pos, 4);
    std::uint32_t u = 0;
    for (std::size_t i = 4; i-- > 0;) u = (u << 8) | data_[pos + i];
    return static_cast<std::int32_t>(u);
  }
  std::uint16_t le16(std::size_t pos) const {
    need(pos, 2);
    return static_cast<std::uint16_t>(data_[pos] | (data_[pos + 1] << 8));
  }
  double le_double(std::size_t pos) const {
    need(pos, 8);
    std::uint64_t u = 0;
    for (std::size_t i = 8; i-- > 0;) u = (u << 8) | data_[pos + i];
    return std::bit_cast<double>(u);
  }
  std::string_view text(std::size_t pos, std::size_t n) const {
    need(pos, n);
    return {reinterpret_cast<const char*>(data_.data() + pos), n};
  }
  std::size_t size() const { return data_.size(); }

 private:
  const Bytes& data_;
  std::string what_;
};

// ---- main file / index ---------------------------------------------------

void write_main_header(ByteWriter& w, std::size_t total_bytes, ShapeType type,
                       const BBox& box) {
  w.be32(kFileCode);
  w.zeros(20);
  w.be32(static_cast<std::int32_t>(total_bytes / 2));
  w.le32(kVersion);
  w.le32(static_cast<std::int32_t>(type));
  w.le_double(box.min_x);
  w.le_double(box.min_y);
  w.le_double(box.max_x);
  w.le_double(box.max_y);
  w.zeros(32);  // Z and M ranges
}

Bytes encode_record(const Geometry& geometry, ShapeType collection_type) {
  Bytes content;
  ByteWriter w(content);
  if (std::holds_alternative<std::monostate>(geometry)) {
    w.le32(static_cast<std::int32_t>(ShapeType::kNull));
  } else if (const auto* p = std::get_if<GeoPoint>(&geometry)) {
    w.le32(static_cast<std::int32_t>(ShapeType::kPoint));
    w.le_double(p->x);
    w.le_double(p->y);
  } else {
    const auto& line = std::get<PolyLine>(geometry);
    w.le32(static_cast<std::int32_t>(collection_type));
    w.le_double(line.bbox().min_x);
    w.le_double(line.bbox().min_y);
    w.le_double(line.bbox().max_x);
    w.le_double(line.bbox().max_y);
    w.le32(static_cast<std::int32_t>(line.parts().size()));
    w.le32(static_cast<std::int32_t>(line.point_count()));
    std::int32_t start = 0;
    for (const auto& part : line.parts()) {
      w.le32(start);
      start += static_cast<std::int32_t>(part.size());
    }
    for (const auto& part : line.parts()) {
      for (const auto& q : part) {
        w.le_double(q.x);
        w.le_double(q.y);
      }
    }
  }
  return content;
}

bool is_point_type(std::int32_t t) {
  return t == static_cast<std::int32_t>(ShapeType::kPoint) ||
         t == static_cast<std::int32_t>(ShapeType::kPointZ) ||
         t == static_cast<std::int32_t>(ShapeType::kPointM);
}

bool is_polyline_type(std::int32_t t) {
  return t == static_cast<std::int32_t>(ShapeType::kPolyLine) ||
         t == static_cast<std::int32_t>(ShapeType::kPolyLineZ) ||
         t == static_cast<std::int32_t>(ShapeType::kPolyLineM);
}

bool has_z_or_m(std::int32_t t) {
  return t == static_cast<std::int32_t>(ShapeType::kPointZ) ||
         t == static_cast<std::int32_t>(ShapeType::kPointM) ||
         t == static_cast<std::int32_t>(ShapeType::kPolyLineZ) ||
         t == static_cast<std::int32_t>(ShapeType::kPolyLineM);
}

struct MainHeader {
  std::int32_t shape_type;
  std::size_t length_bytes;
};

MainHeader read_main_header(const ByteReader& r, const std::string& what) {
  r.need(0, kHeaderSize);
  if (r.be32(0) != kFileCode) {
    throw ParseError(what + ": bad file code " + std::to_string(r.be32(0)) +
                     " (expected 9994)");
  }
  if (r.le32(28) != kVersion) {
    throw ParseError(what + ": bad version " + std::to_string(r.le32(28)) +
                     " (expected 1000)");
  }
  const auto words = r.be32(24);
  if (words < 50) throw ParseError(what + ": bad file length " + std::to_string(words));
  const std::size_t length = static_cast<std::size_t>(words) * 2;
  if (length > r.size()) {
    throw ParseError(what + " is truncated: header declares " + std::to_string(length) +
                     " bytes, found " + std::to_string(r.size()));
  }
  if (length < r.size()) {
    throw ParseError(what + ": header declares " + std::to_string(length) +
                     " bytes but file has " + std::to_string(r.size()));
  }
  return {r.le32(32), length};
}

Geometry decode_record(const ByteReader& r, std::size_t pos, std::size_t content_bytes,
                       std::int32_t header_type, std::size_t record_no,
                       ReadDiagnostics* diagnostics, bool& warned_zm) {
  const auto what = [&](const std::string& msg) {
    return ".shp record " + std::to_string(record_no) + ": " + msg;
  };
  if (content_bytes < 4) throw ParseError(what("content shorter than a shape type"));
  const std::int32_t type = r.le32(pos);
  if (type == static_cast<std::int32_t>(ShapeType::kNull)) return std::monostate{};
  if (type != header_type) {
    throw ParseError(what("shape type " + std::to_string(type) +
                          " conflicts with header shape type " +
                          std::to_string(header_type)));
  }
  if (has_z_or_m(type) && diagnostics && !warned_zm) {
    diagnostics->warnings.push_back("discarding Z/M values of shape type " +
                                    std::to_string(type));
    warned_zm = true;
  }

  if (is_point_type(type)) {
    if (content_bytes < 20) throw ParseError(what("truncated point"));
    return GeoPoint{r.le_double(pos + 4), r.le_double(pos + 12)};
  }

  if (content_bytes < 44) throw ParseError(what("truncated polyline header"));
  const std::int32_t num_parts = r.le32(pos + 36);
  const std::int32_t num_points = r.le32(pos + 40);
  if (num_parts < 1 || num_points < 2) {
    throw ParseError(what("polyline needs at least one part and two points"));
  }
  const std::size_t needed = 44 + 4 * static_cast<std::size_t>(num_parts) +
                             16 * static_cast<std::size_t>(num_points);
  if (content_bytes < needed) throw ParseError(what("truncated polyline"));

  std::vector<std::int32_t> starts(static_cast<std::size_t>(num_parts));
  for (std::int32_t i = 0; i < num_parts; ++i) {
    starts[static_cast<std::size_t>(i)] = r.le32(pos + 44 + 4 * static_cast<std::size_t>(i));
  }
  if (starts.front() != 0) throw ParseError(what("first part does not start at point 0"));
  const std::size_t points_at = pos + 44 + 4 * static_cast<std::size_t>(num_parts);
  std::vector<PolyLine::Part> parts;
  parts.reserve(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const std::int32_t begin = starts[i];
    const std::int32_t end = i + 1 < starts.size() ? starts[i + 1] : num_points;
    if (end - begin < 2) throw ParseError(what("part with fewer than two points"));
    PolyLine::Part part;
    part.reserve(static_cast<std::size_t>(end - begin));
    for (std::int32_t k = begin; k < end; ++k) {
      const std::size_t at = points_at + 16 * static_cast<std::size_t>(k);
      part.push_back({r.le_double(at), r.le_double(at + 8)});
    }
    parts.push_back(std::move(part));
  }
  try {
    return PolyLine(std::move(parts));
  } catch (const Error& e) {
    throw ParseError(what(e.what()));
  }
}

// ---- DBF -----------------------------------------------------------------

char dbf_type_code(const Field& f) {
  switch (f.kind) {
    case FieldKind::kInteger: return 'N';
    case FieldKind::kReal: return f.decimals > 0 ? 'N' : 'F';
    case FieldKind::kText: return 'C';
    case FieldKind::kLogical: return 'L';
  }
  return 'C';
}

struct DbfLayout {
  FieldSchema schema;
  std::uint32_t record_count;
  std::size_t header_length;
  std::size_t record_length;
};

DbfLayout read_dbf_layout(const Bytes& dbf) {
  ByteReader r(dbf, ".dbf");
  r.need(0, 32);
  if (r.u8(0) != kDbfVersion) {
    throw ParseError(".dbf: unsupported version byte " + std::to_string(r.u8(0)));
  }
  const auto record_count = static_cast<std::uint32_t>(r.le32(4));
  const std::size_t header_length = r.le16(8);
  const std::size_t record_length = r.le16(10);

  std::vector<Field> fields;
  std::size_t pos = 32;
  std::size_t widths = 0;
  while (r.u8(pos) != kDbfHeaderTerminator) {
    if (pos + 32 > header_length) {
      throw ParseError(".dbf: header length " + std::to_string(header_length) +
                       " inconsistent with field descriptors");
    }
    auto raw_name = r.text(pos, 11);
    raw_name = raw_name.substr(0, raw_name.find('\0'));
    const std::string name(detail::trim(raw_name));
    const char code = static_cast<char>(r.u8(pos + 11));
    const int width = r.u8(pos + 16);
    const int decimals = r.u8(pos + 17);
    Field f{name, FieldKind::kText, width, 0};
    switch (code) {
      case 'N':
        f.kind = decimals > 0 ? FieldKind::kReal : FieldKind::kInteger;
        f.decimals = decimals;
        break;
      case 'F':
        f.kind = FieldKind::kReal;
        f.decimals = decimals;
        break;
      case 'C': f.kind = FieldKind::kText; break;
      case 'L': f.kind = FieldKind::kLogical; break;
      default:
        throw ParseError(std::string(".dbf: unknown field type code '") + code +
                         "' for field '" + name + "'");
    }
    widths += static_cast<std::size_t>(width);
    fields.push_back(std::move(f));
    pos += 32;
  }
  if (pos + 1 != header_length) {
    throw ParseError(".dbf: header length " + std::to_string(header_length) +
                     " inconsistent with " + std::to_string(fields.size()) + " fields");
  }
  if (widths + 1 != record_length) {
    throw ParseError(".dbf: record length " + std::to_string(record_length) +
                     " does not match field widths " + std::to_string(widths + 1));
  }
  try {
    return {FieldSchema(std::move(fields)), record_count, header_length, record_length};
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string(".dbf: ") + e.what());
  }
}

bool blank_or_stars(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '*' || c == '\0'; });
}

std::string_view strip_text(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.remove_suffix(1);
  return s;
}

Value decode_cell(const Field& f, std::string_view cell, std::size_t record_no,
                  ReadDiagnostics* diagnostics, bool& warned_non_ascii) {
  const auto fail = [&](const std::string& msg) {
    return ParseError(".dbf record " + std::to_string(record_no) + ", field '" + f.name +
                      "': " + msg);
  };
  switch (f.kind) {
    case FieldKind::kInteger: {
      if (blank_or_stars(cell)) return std::monostate{};
      const auto v = detail::parse_int(detail::trim(cell));
      if (!v) throw fail("bad integer '" + std::string(cell) + "'");
      return *v;
    }
    case FieldKind::kReal: {
      if (blank_or_stars(cell)) return std::monostate{};
      const auto v = detail::parse_double(detail::trim(cell));
      if (!v || !std::isfinite(*v)) throw fail("bad number '" + std::string(cell) + "'");
      return *v;
    }
    case FieldKind::kText: {
      const auto text = strip_text(cell);
      if (text.empty()) return std::monostate{};
      if (!warned_non_ascii && diagnostics &&
          std::any_of(text.begin(), text.end(),
                      [](char c) { return static_cast<unsigned char>(c) >= 0x80; })) {
        diagnostics->warnings.push_back("non-ASCII text passed through unchanged in field '" +
                                        f.name + "'");
        warned_non_ascii = true;
      }
      return std::string(text);
    }
    case FieldKind::kLogical: {
      const char c = cell.empty() ? ' ' : cell.front();
      if (c == 'T' || c == 't' || c == 'Y' || c == 'y') return true;
      if (c == 'F' || c == 'f' || c == 'N' || c == 'n') return false;
      if (c == '?' || c == ' ') return std::monostate{};
      throw fail("bad logical '" + std::string(cell) + "'");
    }
  }
  return std::monostate{};
}

std::filesystem::path sibling(const std::filesystem::path& stem, const char* ext) {
  auto p = stem;
  const auto current = detail::ascii_lowercase(p.extension().string());
  if (current == ".shp" || current == ".shx" || current == ".dbf") p.replace_extension();
  p += ext;
  return p;
}

}  // namespace

std::string format_dbf_value(const Field& field, const Value& value) {
  check_value_kind(field, value);
  const auto width = static_cast<std::size_t>(field.width);
  std::string text;
  bool right_justify = true;
  if (is_null(value)) {
    text = field.kind == FieldKind::kLogical ? "?" : "";
  } else {
    switch (field.kind) {
      case FieldKind::kInteger: text = std::to_string(std::get<std::int64_t>(value)); break;
      case FieldKind::kReal: {
        char buf[400];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(value),
                                       std::chars_format::fixed, field.decimals);
        if (ec != std::errc{}) {
          throw Error("value does not fit field '" + field.name + "'");
        }
        text.assign(buf, end);
        break;
      }
      case FieldKind::kText:
        text = std::get<std::string>(value);
        right_justify = false;
        break;
      case FieldKind::kLogical: text = std::get<bool>(value) ? "T" : "F"; break;
    }
  }
  if (text.size() > width) {
    throw Error("value '" + text + "' exceeds width " + std::to_string(width) +
                " of field '" + field.name + "'");
  }
  const std::string pad(width - text.size(), ' ');
  return right_justify ? pad + text : text + pad;
}

Value dbf_normalized(const Field& field, const Value& value) {
  bool warned = true;
  return decode_cell(field, format_dbf_value(field, value), 0, nullptr, warned);
}

FieldSchema read_dbf_schema(const Bytes& dbf) { return read_dbf_layout(dbf).schema; }

ShapefileTriplet write_shapefile(const FeatureCollection& c) {
  if (c.schema().empty()) throw Error("cannot write a shapefile with an empty schema");
  const ShapeType type =
      c.geometry_kind() == GeometryKind::kPoint ? ShapeType::kPoint : ShapeType::kPolyLine;

  std::optional<BBox> box;
  std::vector<Bytes> records;
  records.reserve(c.size());
  for (const auto& f : c.features()) {
    if (const auto* p = std::get_if<GeoPoint>(&f.geometry)) {
      box ? box->extend(*p) : void(box = BBox::of(*p));
    } else if (const auto* line = std::get_if<PolyLine>(&f.geometry)) {
      box ? box->extend(line->bbox()) : void(box = line->bbox());
    }
    records.push_back(encode_record(f.geometry, type));
  }

  std::size_t shp_bytes = kHeaderSize;
  for (const auto& rec : records) shp_bytes += 8 + rec.size();
  const std::size_t shx_bytes = kHeaderSize + 8 * records.size();
  if (shp_bytes / 2 > static_cast<std::size_t>(INT32_MAX)) {
    throw Error("shapefile exceeds the 2 GB format limit");
  }

  ShapefileTriplet out;
  ByteWriter shp(out.shp);
  ByteWriter shx(out.shx);
  write_main_header(shp, shp_bytes, type, box.value_or(BBox{}));
  write_main_header(shx, shx_bytes, type, box.value_or(BBox{}));
  std::size_t offset = kHeaderSize;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto words = static_cast<std::int32_t>(records[i].size() / 2);
    shp.be32(static_cast<std::int32_t>(i + 1));
    shp.be32(words);
    out.shp.insert(out.shp.end(), records[i].begin(), records[i].end());
    shx.be32(static_cast<std::int32_t>(offset / 2));
    shx.be32(words);
    offset += 8 + records[i].size();
  }

  // DBF
  const auto& fields = c.schema().fields();
  std::size_t record_length = 1;
  for (const auto& f : fields) record_length += static_cast<std::size_t>(f.width);
  const std::size_t header_length = 32 + 32 * fields.size() + 1;
  if (record_length > 0xFFFF || header_length > 0xFFFF) {
    throw Error("DBF record or header too long");
  }
  ByteWriter dbf(out.dbf);
  dbf.u8(kDbfVersion);
  for (auto b : kDbfDate) dbf.u8(b);
  dbf.le32(static_cast<std::int32_t>(c.size()));
  dbf.le16(static_cast<std::uint16_t>(header_length));
  dbf.le16(static_cast<std::uint16_t>(record_length));
  dbf.zeros(20);
  for (const auto& f : fields) {
    dbf.text(f.name);
    dbf.zeros(11 - f.name.size());
    dbf.u8(static_cast<std::uint8_t>(dbf_type_code(f)));
    dbf.zeros(4);
    dbf.u8(static_cast<std::uint8_t>(f.width));
    dbf.u8(static_cast<std::uint8_t>(f.decimals));
    dbf.zeros(14);
  }
  dbf.u8(kDbfHeaderTerminator);
  for (const auto& feature : c.features()) {
    dbf.u8(' ');
    for (std::size_t i = 0; i < fields.size(); ++i) {
      dbf.text(format_dbf_value(fields[i], feature.attributes[i]));
    }
  }
  dbf.u8(kDbfEof);
  return out;
}

ShapefileTriplet write_shapefile(const FeatureCollection& c,
                                 const std::filesystem::path& stem) {
  auto t = write_shapefile(c);
  save_triplet(t, stem);
  return t;
}

FeatureCollection read_shapefile(const ShapefileTriplet& t, ReadDiagnostics* diagnostics) {
  ByteReader shp(t.shp, ".shp");
  ByteReader shx(t.shx, ".shx");
  const auto header = read_main_header(shp, ".shp");
  const auto index_header = read_main_header(shx, ".shx");
  if (index_header.shape_type != header.shape_type) {
    throw ParseError(".shx shape type differs from .shp");
  }
  if (!is_point_type(header.shape_type) && !is_polyline_type(header.shape_type)) {
    throw UnsupportedShapeType(header.shape_type);
  }
  if ((index_header.length_bytes - kHeaderSize) % 8 != 0) {
    throw ParseError(".shx length is not a whole number of index records");
  }
  const std::size_t index_count = (index_header.length_bytes - kHeaderSize) / 8;

  const auto layout = read_dbf_layout(t.dbf);
  if (layout.record_count != index_count) {
    throw ParseError(".dbf has " + std::to_string(layout.record_count) +
                     " records but .shx indexes " + std::to_string(index_count));
  }
  ByteReader dbf(t.dbf, ".dbf");
  dbf.need(layout.header_length, layout.record_length * layout.record_count);

  FeatureCollection out(layout.schema, is_point_type(header.shape_type)
                                           ? GeometryKind::kPoint
                                           : GeometryKind::kPolyLine);
  bool warned_zm = false;
  bool warned_non_ascii = false;
  std::size_t pos = kHeaderSize;
  for (std::size_t i = 0; i < index_count; ++i) {
    const std::size_t record_no = i + 1;
    if (pos + 8 > header.length_bytes) {
      throw ParseError(".shp is truncated: record " + std::to_string(record_no) + " missing");
    }
    const auto content_words = shp.be32(pos + 4);
    if (content_words < 2) {
      throw ParseError(".shp record " + std::to_string(record_no) + " has bad content length");
    }
    const std::size_t content_bytes = static_cast<std::size_t>(content_words) * 2;
    if (pos + 8 + content_bytes > header.length_bytes) {
      throw ParseError(".shp record " + std::to_string(record_no) + " is truncated");
    }
    const std::size_t index_at = kHeaderSize + 8 * i;
    if (static_cast<std::size_t>(shx.be32(index_at)) * 2 != pos ||
        shx.be32(index_at + 4) != content_words) {
      throw ParseError(".shx entry " + std::to_string(record_no) +
                       " does not address the matching .shp record");
    }

    Feature feature;
    feature.geometry = decode_record(shp, pos + 8, content_bytes, header.shape_type,
                                     record_no, diagnostics, warned_zm);
    const std::size_t row = layout.header_length + i * layout.record_length;
    std::size_t col = row + 1;
    for (const auto& f : layout.schema.fields()) {
      const auto width = static_cast<std::size_t>(f.width);
      feature.attributes.push_back(
          decode_cell(f, dbf.text(col, width), record_no, diagnostics, warned_non_ascii));
      col += width;
    }
    try {
      out.add(std::move(feature));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError("record " + std::to_string(record_no) + ": " + e.what());
    }
    pos += 8 + content_bytes;
  }
  if (pos != header.length_bytes) {
    throw ParseError(".shp holds more records than .shx indexes");
  }
  return out;
}

ShapefileTriplet load_triplet(const std::filesystem::path& stem) {
  return {detail::read_file_bytes(sibling(stem, ".shp")),
          detail::read_file_bytes(sibling(stem, ".shx")),
          detail::read_file_bytes(sibling(stem, ".dbf"))};
}

void save_triplet(const ShapefileTriplet& t, const std::filesystem::path& stem) {
  const auto as_view = [](const Bytes& b) {
    return std::string_view(reinterpret_cast<const char*>(b.data()), b.size());
  };
  detail::write_file_atomic(sibling(stem, ".shp"), as_view(t.shp));
  detail::write_file_atomic(sibling(stem, ".shx"), as_view(t.shx));
  detail::write_file_atomic(sibling(stem, ".dbf"), as_view(t.dbf));
}

FeatureCollection read_shapefile(const std::filesystem::path& stem,
                                 ReadDiagnostics* diagnostics) {
  return read_shapefile(load_triplet(stem), diagnostics);
}

}  // namespace geograph
