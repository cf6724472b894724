#pragma once

#include <span>
#include <vector>

namespace geograph {

// Metadata only: coordinates are never reprojected.
enum class CoordinateMode { kPlanar, kGeographic };

struct GeoPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct BBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  bool contains(const GeoPoint& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  bool intersects(const BBox& o) const {
    return !(o.min_x > max_x || o.max_x < min_x || o.min_y > max_y ||
             o.max_y < min_y);
  }
  BBox expanded(double d) const {
    return {min_x - d, min_y - d, max_x + d, max_y + d};
  }
  void extend(const GeoPoint& p);
  void extend(const BBox& b);

  static BBox of(const GeoPoint& p) { return {p.x, p.y, p.x, p.y}; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

// Throws Error on NaN/Inf, or on out-of-range lon/lat in geographic mode.
void validate_point(const GeoPoint& p, CoordinateMode mode = CoordinateMode::kPlanar);

double distance(const GeoPoint& a, const GeoPoint& b);

// Multi-part linestring. The bounding box is derived from the parts and kept
// exact; every part holds at least two points.
class PolyLine {
 public:
  using Part = std::vector<GeoPoint>;

  explicit PolyLine(std::vector<Part> parts);
  PolyLine(std::initializer_list<GeoPoint> single_part);

  const std::vector<Part>& parts() const { return parts_; }
  const BBox& bbox() const { return bbox_; }
  std::size_t point_count() const;
  std::size_t segment_count() const;

  friend bool operator==(const PolyLine& a, const PolyLine& b) {
    return a.parts_ == b.parts_;
  }

 private:
  std::vector<Part> parts_;
  BBox bbox_;
};

double part_length(std::span<const GeoPoint> part);
double length(const PolyLine& line);

// Point at `offset` along the part measured from its first vertex; offset is
// clamped to [0, part_length].
GeoPoint point_along(std::span<const GeoPoint> part, double offset);

// Closest-point distance from p to segment [a, b].
double point_segment_distance(const GeoPoint& p, const GeoPoint& a,
                              const GeoPoint& b);
GeoPoint closest_point_on_segment(const GeoPoint& p, const GeoPoint& a,
                                  const GeoPoint& b);

}  // namespace geograph
