#include "geograph/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geograph/error.hpp"

namespace geograph {

void BBox::extend(const GeoPoint& p) {
  min_x = std::min(min_x, p.x);
  min_y = std::min(min_y, p.y);
  max_x = std::max(max_x, p.x);
  max_y = std::max(max_y, p.y);
}

void BBox::extend(const BBox& b) {
  min_x = std::min(min_x, b.min_x);
  min_y = std::min(min_y, b.min_y);
  max_x = std::max(max_x, b.max_x);
  max_y = std::max(max_y, b.max_y);
}

void validate_point(const GeoPoint& p, CoordinateMode mode) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw Error("non-finite coordinate");
  }
  if (mode == CoordinateMode::kGeographic &&
      (p.y < -90.0 || p.y > 90.0 || p.x < -180.0 || p.x > 180.0)) {
    throw Error("geographic coordinate out of range: (" + std::to_string(p.x) +
                ", " + std::to_string(p.y) + ")");
  }
}

double distance(const GeoPoint& a, const GeoPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

PolyLine::PolyLine(std::vector<Part> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw Error("polyline needs at least one part");
  bool first = true;
  for (const auto& part : parts_) {
    if (part.size() < 2) throw Error("polyline part needs at least two points");
    for (const auto& p : part) {
      validate_point(p);
      if (first) {
        bbox_ = BBox::of(p);
        first = false;
      } else {
        bbox_.extend(p);
      }
    }
  }
}

PolyLine::PolyLine(std::initializer_list<GeoPoint> single_part)
    : PolyLine(std::vector<Part>{Part(single_part)}) {}

std::size_t PolyLine::point_count() const {
  std::size_t n = 0;
  for (const auto& part : parts_) n += part.size();
  return n;
}

std::size_t PolyLine::segment_count() const {
  std::size_t n = 0;
  for (const auto& part : parts_) n += part.size() - 1;
  return n;
}

double part_length(std::span<const GeoPoint> part) {
  double total = 0.0;
  for (std::size_t i = 1; i < part.size(); ++i) total += distance(part[i - 1], part[i]);
  return total;
}

double length(const PolyLine& line) {
  double total = 0.0;
  for (const auto& part : line.parts()) total += part_length(part);
  return total;
}

GeoPoint point_along(std::span<const GeoPoint> part, double offset) {
  if (part.empty()) return {};
  if (offset <= 0.0) return part.front();
  double walked = 0.0;
  for (std::size_t i = 1; i < part.size(); ++i) {
    const double seg = distance(part[i - 1], part[i]);
    if (walked + seg >= offset && seg > 0.0) {
      const double t = (offset - walked) / seg;
      if (t >= 1.0) return part[i];
      return {part[i - 1].x + t * (part[i].x - part[i - 1].x),
              part[i - 1].y + t * (part[i].y - part[i - 1].y)};
    }
    walked += seg;
  }
  return part.back();
}

GeoPoint closest_point_on_segment(const GeoPoint& p, const GeoPoint& a,
                                  const GeoPoint& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return a;
  const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return {a.x + t * dx, a.y + t * dy};
}

double point_segment_distance(const GeoPoint& p, const GeoPoint& a,
                              const GeoPoint& b) {
  return distance(p, closest_point_on_segment(p, a, b));
}

}  // namespace geograph
