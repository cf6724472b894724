#include "geograph/adjacency.hpp"

#include <set>
#include <string>

#include "geograph/error.hpp"

namespace geograph {

namespace {

std::string cell(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

AdjacencyMatrix validate_adjacency(const std::vector<std::vector<std::int64_t>>& entries,
                                   const std::vector<NodeId>& ids) {
  const std::size_t n = entries.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (entries[i].size() != n) {
      throw Error("adjacency matrix is not square: row " + std::to_string(i) + " has " +
                  std::to_string(entries[i].size()) + " entries, expected " +
                  std::to_string(n));
    }
  }
  if (ids.size() != n) {
    throw Error("adjacency matrix has " + std::to_string(n) + " rows but " +
                std::to_string(ids.size()) + " ids");
  }

  AdjacencyMatrix m;
  m.entries_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto value = entries[i][j];
      if (value != 0 && value != 1) {
        throw Error("adjacency entry at " + cell(i, j) + " is " + std::to_string(value) +
                    ", expected 0 or 1");
      }
      if (i == j && value != 0) throw Error("nonzero diagonal at " + cell(i, j));
      if (j < i && value != entries[j][i]) {
        throw Error("asymmetry at " + cell(i, j) + " vs " + cell(j, i));
      }
      m.entries_[i * n + j] = static_cast<std::uint8_t>(value);
    }
  }

  std::set<NodeId> seen;
  for (const auto id : ids) {
    if (!seen.insert(id).second) throw Error("duplicate id " + std::to_string(id));
  }
  m.ids_ = ids;
  return m;
}

AdjacencyMatrix adjacency_of(const GeoGraph& g, const std::vector<NodeId>& ids) {
  std::vector<std::vector<std::int64_t>> entries(ids.size(),
                                                 std::vector<std::int64_t>(ids.size(), 0));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!g.has_node(ids[i])) throw Error("id " + std::to_string(ids[i]) + " is not a node");
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (i != j && g.has_edge(ids[i], ids[j])) entries[i][j] = 1;
    }
  }
  return validate_adjacency(entries, ids);
}

}  // namespace geograph
