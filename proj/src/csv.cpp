#include "geograph/csv.hpp"

#include <algorithm>
#include <set>

#include "geograph/error.hpp"
#include "strings.hpp"

namespace geograph::csv {

namespace {

std::int64_t int_cell(const Row& row, std::size_t col, const char* what) {
  const auto v = detail::parse_int(detail::trim(row.cells[col]));
  if (!v) throw ParseError(std::string("bad ") + what + " '" + row.cells[col] + "'", row.line);
  return *v;
}

double real_cell(const Row& row, std::size_t col, const char* what) {
  const auto v = detail::parse_double(detail::trim(row.cells[col]));
  if (!v || !std::isfinite(*v)) {
    throw ParseError(std::string("bad ") + what + " '" + row.cells[col] + "'", row.line);
  }
  return *v;
}

bool numeric(std::string_view cell) { return detail::parse_double(detail::trim(cell)).has_value(); }

// Column positions for the named columns, or positional when the first row
// is data rather than a header.
std::vector<std::size_t> column_layout(const std::vector<Row>& rows,
                                       const std::vector<std::string>& names, bool& has_header) {
  std::vector<std::size_t> cols(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) cols[i] = i;
  has_header = !rows.empty() && !std::all_of(rows.front().cells.begin(), rows.front().cells.end(),
                                             [](const std::string& c) { return numeric(c); });
  if (!has_header) return cols;
  const auto& header = rows.front();
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = std::find_if(header.cells.begin(), header.cells.end(), [&](const std::string& c) {
      return detail::iequals(detail::trim(c), names[i]);
    });
    if (it == header.cells.end()) {
      throw ParseError("header lacks column '" + names[i] + "'", header.line);
    }
    cols[i] = static_cast<std::size_t>(it - header.cells.begin());
  }
  return cols;
}

void require_cells(const Row& row, std::size_t n) {
  if (row.cells.size() < n) {
    throw ParseError("expected at least " + std::to_string(n) + " columns, found " +
                         std::to_string(row.cells.size()),
                     row.line);
  }
}

}  // namespace

std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  std::string cell;
  long line = 1;
  row.line = 1;
  bool quoted = false;
  bool cell_started = false;

  const auto end_row = [&] {
    row.cells.push_back(std::move(cell));
    cell.clear();
    const bool blank = row.cells.size() == 1 && detail::trim(row.cells[0]).empty();
    if (!blank) rows.push_back(std::move(row));
    row = Row{};
    cell_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (cell_started && !detail::trim(cell).empty()) {
          throw ParseError("quote inside an unquoted cell", line);
        }
        cell.clear();
        quoted = true;
        cell_started = true;
        break;
      case ',':
        row.cells.push_back(std::move(cell));
        cell.clear();
        cell_started = false;
        break;
      case '\r': break;
      case '\n':
        end_row();
        ++line;
        row.line = line;
        break;
      default:
        cell += c;
        cell_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted cell", line);
  if (cell_started || !row.cells.empty() || !cell.empty()) end_row();
  return rows;
}

Locations read_locations(std::string_view text) {
  const auto rows = parse(text);
  bool has_header = false;
  const auto cols = column_layout(rows, {"id", "x", "y"}, has_header);
  const std::size_t needed = *std::max_element(cols.begin(), cols.end()) + 1;
  Locations out;
  for (std::size_t r = has_header ? 1 : 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    require_cells(row, needed);
    const NodeId id = int_cell(row, cols[0], "id");
    const GeoPoint p{real_cell(row, cols[1], "x"), real_cell(row, cols[2], "y")};
    if (!out.points.emplace(id, p).second) {
      throw ParseError("duplicate id " + std::to_string(id), row.line);
    }
    out.ids.push_back(id);
  }
  return out;
}

TimeSeriesSet read_time_series(std::string_view series_text, const Locations& locations) {
  const auto rows = parse(series_text);
  if (rows.empty()) throw ParseError("time series file is empty");
  const auto& header = rows.front();
  if (header.cells.size() < 2) throw ParseError("header has no node columns", header.line);

  std::vector<NodeId> ids;
  for (std::size_t c = 1; c < header.cells.size(); ++c) {
    ids.push_back(int_cell(header, c, "node id"));
  }
  std::map<NodeId, std::vector<double>> series;
  for (const auto id : ids) {
    if (series.contains(id)) throw ParseError("duplicate node id " + std::to_string(id), header.line);
    if (!locations.points.contains(id)) {
      throw ParseError("node " + std::to_string(id) + " has no location", header.line);
    }
    series[id];
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != header.cells.size()) {
      throw ParseError("expected " + std::to_string(header.cells.size()) + " columns, found " +
                           std::to_string(row.cells.size()),
                       row.line);
    }
    for (std::size_t c = 1; c < row.cells.size(); ++c) {
      const auto cell = detail::trim(row.cells[c]);
      double v = kMissing;
      if (!cell.empty() && cell != "NA") v = real_cell(row, c, "value");
      series[ids[c - 1]].push_back(v);
    }
  }
  std::map<NodeId, GeoPoint> located;
  for (const auto id : ids) located[id] = locations.points.at(id);
  try {
    return TimeSeriesSet(ids, std::move(located), std::move(series));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

ODMatrix read_od(std::string_view text, const Locations& zones) {
  ODMatrix od;
  for (const auto id : zones.ids) od.add_zone(id, zones.points.at(id));
  const auto rows = parse(text);
  bool has_header = false;
  const auto cols = column_layout(rows, {"origin", "dest", "flow"}, has_header);
  const std::size_t needed = *std::max_element(cols.begin(), cols.end()) + 1;
  for (std::size_t r = has_header ? 1 : 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    require_cells(row, needed);
    try {
      od.add_flow(int_cell(row, cols[0], "origin"), int_cell(row, cols[1], "dest"),
                  real_cell(row, cols[2], "flow"));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), row.line);
    }
  }
  return od;
}

AdjacencyTable read_adjacency(std::string_view text) {
  const auto rows = parse(text);
  AdjacencyTable out;
  if (rows.empty()) return out;
  const std::size_t n_rows = rows.size();
  const std::size_t n_cols = rows.front().cells.size();
  for (const auto& row : rows) {
    if (row.cells.size() != n_cols) {
      throw ParseError("expected " + std::to_string(n_cols) + " columns, found " +
                           std::to_string(row.cells.size()),
                       row.line);
    }
  }
  const auto first = detail::trim(rows.front().cells.front());
  bool header_row = false;
  bool header_col = false;
  if (n_rows == n_cols + 1) {
    header_row = true;
  } else if (n_cols == n_rows + 1) {
    header_col = true;
  } else if (n_rows == n_cols && first != "0" && first != "1") {
    header_row = header_col = true;
  } else if (n_rows != n_cols) {
    throw ParseError("adjacency table of " + std::to_string(n_rows) + " x " +
                     std::to_string(n_cols) + " cells is not square");
  }

  const std::size_t r0 = header_row ? 1 : 0;
  const std::size_t c0 = header_col ? 1 : 0;
  std::optional<std::vector<NodeId>> row_ids;
  std::optional<std::vector<NodeId>> col_ids;
  if (header_row) {
    col_ids.emplace();
    for (std::size_t c = c0; c < n_cols; ++c) col_ids->push_back(int_cell(rows[0], c, "id"));
  }
  if (header_col) {
    row_ids.emplace();
    for (std::size_t r = r0; r < n_rows; ++r) row_ids->push_back(int_cell(rows[r], 0, "id"));
  }
  if (row_ids && col_ids && *row_ids != *col_ids) {
    throw ParseError("row ids and column ids differ", rows.front().line);
  }
  out.ids = col_ids ? col_ids : row_ids;

  for (std::size_t r = r0; r < n_rows; ++r) {
    std::vector<std::int64_t> values;
    for (std::size_t c = c0; c < n_cols; ++c) {
      const auto cell = detail::trim(rows[r].cells[c]);
      if (cell != "0" && cell != "1") {
        throw ParseError("adjacency cell '" + std::string(cell) + "' is not 0 or 1", rows[r].line);
      }
      values.push_back(cell == "1" ? 1 : 0);
    }
    out.entries.push_back(std::move(values));
  }
  return out;
}

}  // namespace geograph::csv
