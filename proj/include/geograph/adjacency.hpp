#pragma once

#include <cstdint>
#include <vector>

#include "geograph/geograph.hpp"

namespace geograph {

// Square symmetric 0/1 matrix with zero diagonal; row/column i belongs to
// node ids()[i]. Only constructible through validate_adjacency.
class AdjacencyMatrix {
 public:
  std::size_t size() const { return ids_.size(); }
  const std::vector<NodeId>& ids() const { return ids_; }
  bool connected(std::size_t i, std::size_t j) const {
    return entries_[i * ids_.size() + j] != 0;
  }

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  friend AdjacencyMatrix validate_adjacency(
      const std::vector<std::vector<std::int64_t>>& entries,
      const std::vector<NodeId>& ids);

  std::vector<NodeId> ids_;
  std::vector<std::uint8_t> entries_;
};

// Scans row-major and reports the first violated cell: non-square input,
// entry outside {0, 1}, nonzero diagonal, asymmetry (reported at the lower
// triangle cell), then duplicate ids.
AdjacencyMatrix validate_adjacency(
    const std::vector<std::vector<std::int64_t>>& entries,
    const std::vector<NodeId>& ids);

// Adjacency of g over `ids` (which must all be nodes of g).
AdjacencyMatrix adjacency_of(const GeoGraph& g, const std::vector<NodeId>& ids);

}  // namespace geograph
