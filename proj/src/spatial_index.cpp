#include "geograph/spatial_index.hpp"

#include <algorithm>
#include <cmath>

#include "geograph/error.hpp"

namespace geograph {

namespace {

// Grids larger than this get coarser cells; coarser cells keep the superset
// guarantee, they only return more candidates.
constexpr double kMaxCells = 1 << 22;

std::size_t clamp_index(double v, std::size_t count) {
  if (!(v > 0.0)) return 0;
  const double hi = static_cast<double>(count - 1);
  return v >= hi ? count - 1 : static_cast<std::size_t>(v);
}

}  // namespace

SpatialIndex SpatialIndex::build(const FeatureCollection& c, std::optional<double> cell_size) {
  if (c.geometry_kind() != GeometryKind::kPolyLine) {
    throw Error("spatial index needs a polyline collection");
  }
  if (cell_size && !(std::isfinite(*cell_size) && *cell_size > 0.0)) {
    throw Error("cell size must be a positive number");
  }
  SpatialIndex idx;
  std::size_t segments = 0;
  bool have_box = false;
  for (const auto& f : c.features()) {
    if (const auto* line = std::get_if<PolyLine>(&f.geometry)) {
      segments += line->segment_count();
      if (have_box) {
        idx.extent_.extend(line->bbox());
      } else {
        idx.extent_ = line->bbox();
        have_box = true;
      }
    }
  }
  if (!have_box) throw Error("spatial index over an empty collection");

  const double span = std::max(idx.extent_.width(), idx.extent_.height());
  if (span > 0.0) {
    double size = cell_size ? *cell_size : span / std::ceil(std::sqrt(static_cast<double>(segments)));
    size = std::max(size, span * 1e-9);
    const auto cells_along = [&](double extent) { return std::max(1.0, std::ceil(extent / size)); };
    while (cells_along(idx.extent_.width()) * cells_along(idx.extent_.height()) > kMaxCells) {
      size *= 2.0;
    }
    idx.cell_size_ = size;
    idx.columns_ = static_cast<std::size_t>(cells_along(idx.extent_.width()));
    idx.rows_ = static_cast<std::size_t>(cells_along(idx.extent_.height()));
  }
  idx.cells_.resize(idx.columns_ * idx.rows_);

  for (std::size_t fi = 0; fi < c.size(); ++fi) {
    const auto* line = std::get_if<PolyLine>(&c[fi].geometry);
    if (line == nullptr) continue;
    for (std::size_t pi = 0; pi < line->parts().size(); ++pi) {
      const auto& part = line->parts()[pi];
      for (std::size_t si = 0; si + 1 < part.size(); ++si) {
        BBox box = BBox::of(part[si]);
        box.extend(part[si + 1]);
        const auto [c0, r0] = idx.cell_of(box.min_x, box.min_y);
        const auto [c1, r1] = idx.cell_of(box.max_x, box.max_y);
        const SegmentRef ref{static_cast<std::uint32_t>(fi), static_cast<std::uint32_t>(pi),
                             static_cast<std::uint32_t>(si)};
        for (std::size_t r = r0; r <= r1; ++r) {
          for (std::size_t col = c0; col <= c1; ++col) idx.cells_[r * idx.columns_ + col].push_back(ref);
        }
      }
    }
  }
  return idx;
}

std::pair<std::size_t, std::size_t> SpatialIndex::cell_of(double x, double y) const {
  return {clamp_index(std::floor((x - extent_.min_x) / cell_size_), columns_),
          clamp_index(std::floor((y - extent_.min_y) / cell_size_), rows_)};
}

std::vector<SegmentRef> SpatialIndex::query(const BBox& box) const {
  std::vector<SegmentRef> out;
  if (!extent_.intersects(box)) return out;
  const auto [c0, r0] = cell_of(box.min_x, box.min_y);
  const auto [c1, r1] = cell_of(box.max_x, box.max_y);
  for (std::size_t r = r0; r <= r1; ++r) {
    for (std::size_t col = c0; col <= c1; ++col) {
      const auto& bucket = cells_[r * columns_ + col];
      out.insert(out.end(), bucket.begin(), bucket.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace geograph
