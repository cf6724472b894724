#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geograph/builders.hpp"

namespace geograph::csv {

struct Row {
  long line = 0;  // 1-based source line
  std::vector<std::string> cells;
};

// RFC 4180 style: comma separated, double-quoted cells may hold commas,
// quotes ("") and newlines. Blank lines are skipped.
std::vector<Row> parse(std::string_view text);

// Node locations: columns id,x,y. A header row is optional; when present the
// columns are matched by name.
struct Locations {
  std::vector<NodeId> ids;  // file order
  std::map<NodeId, GeoPoint> points;
};
Locations read_locations(std::string_view text);

// Header row: a label for the time column, then one node id per column.
// Each further row: timestamp (ISO-8601 or step number), then one value per
// node. Empty cells and "NA" are missing.
TimeSeriesSet read_time_series(std::string_view series_text, const Locations& locations);

// Rows origin,dest,flow (header optional), one directed pair per row.
ODMatrix read_od(std::string_view text, const Locations& zones);

// 0/1 body with an optional header row and/or header column of ids. The
// layout is inferred from the shape: (n+1) x n means a header row, n x (n+1)
// a header column, and a square table whose first cell is not 0/1 carries
// both.
struct AdjacencyTable {
  std::vector<std::vector<std::int64_t>> entries;
  std::optional<std::vector<NodeId>> ids;
};
AdjacencyTable read_adjacency(std::string_view text);

}  // namespace geograph::csv
