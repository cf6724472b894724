#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geograph/feature.hpp"

namespace geograph {

struct SegmentRef {
  std::uint32_t feature = 0;
  std::uint32_t part = 0;
  std::uint32_t segment = 0;  // segment k joins points k and k+1 of the part

  friend auto operator<=>(const SegmentRef&, const SegmentRef&) = default;
};

// Uniform grid over the bounding box of a polyline collection. Each segment
// is registered in every cell its own bounding box overlaps, so a query never
// misses a segment whose bounding box meets the query box.
class SpatialIndex {
 public:
  // nullopt picks max(width, height) / ceil(sqrt(segments)).
  // An explicit size must be positive and finite.
  // Throws Error on an empty or non-polyline collection.
  static SpatialIndex build(const FeatureCollection& c,
                            std::optional<double> cell_size = std::nullopt);

  // Sorted, duplicate-free candidates whose segment box may meet `box`.
  std::vector<SegmentRef> query(const BBox& box) const;

  double cell_size() const { return cell_size_; }
  std::size_t columns() const { return columns_; }
  std::size_t rows() const { return rows_; }
  const BBox& extent() const { return extent_; }
  const std::vector<SegmentRef>& cell(std::size_t column, std::size_t row) const {
    return cells_[row * columns_ + column];
  }
  // Grid cell holding coordinate (x, y), clamped to the grid.
  std::pair<std::size_t, std::size_t> cell_of(double x, double y) const;

 private:
  BBox extent_;
  double cell_size_ = 1.0;
  std::size_t columns_ = 1;
  std::size_t rows_ = 1;
  std::vector<std::vector<SegmentRef>> cells_;
};

}  // namespace geograph
