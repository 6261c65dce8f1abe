#include "mtp/csv.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "mtp/errors.hpp"

namespace mtp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Locale-independent numeric parse: decimal point only, scientific notation
// accepted, anything else rejected.
double parse_number(const std::string& cell, long row, const std::string& column) {
  const std::string t = trim(cell);
  if (t.empty())
    throw DataError("row " + std::to_string(row) + ": missing value in column '" + column + "'");
  double value = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw DataError("row " + std::to_string(row) + ": non-numeric value '" + t + "' in column '" + column + "'");
  return value;
}

struct Header {
  std::unordered_map<std::string, int> index;

  int require(const std::string& name) const {
    auto it = index.find(name);
    if (it == index.end()) throw DataError("missing column '" + name + "'");
    return it->second;
  }
};

struct RawRow {
  long line_no;
  std::vector<std::string> cells;
};

} // namespace

Panel ingest_csv_text(const std::string& text, const std::string& origin, const ColumnMapping& mapping,
                      Layout layout) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty file");

  Header header;
  {
    const auto cells = split_line(line);
    for (std::size_t i = 0; i < cells.size(); ++i) header.index[trim(cells[i])] = static_cast<int>(i);
  }
  const int id_col = header.require(mapping.id);
  const int a_col = header.require(mapping.treatment);
  const int y_col = header.require(mapping.outcome);
  const bool longitudinal = layout == Layout::longitudinal || layout == Layout::pt_longitudinal;
  const int t_col = longitudinal ? header.require(mapping.time) : -1;
  const bool wants_y0 = layout == Layout::pt_point || layout == Layout::pt_longitudinal;
  if (wants_y0 && mapping.baseline_outcome.empty())
    throw ConfigError("parallel-trends layouts need a baseline_outcome column mapping");
  const int y0_col = wants_y0 ? header.require(mapping.baseline_outcome) : -1;
  std::vector<int> cov_cols;
  for (const auto& name : mapping.covariates) cov_cols.push_back(header.require(name));
  const std::size_t ncols = header.index.size();

  std::vector<RawRow> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    RawRow r;
    r.line_no = line_no;
    r.cells = split_line(line);
    if (r.cells.size() != ncols)
      throw DataError("row " + std::to_string(line_no) + ": has " + std::to_string(r.cells.size()) +
                      " cells, header has " + std::to_string(ncols));
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw DataError(origin + ": no data rows");

  Panel panel;
  panel.layout = layout;

  if (!longitudinal) {
    const int n = static_cast<int>(rows.size());
    panel.steps.resize(1);
    panel.steps[0].covariates.assign(cov_cols.size(), std::vector<double>(n));
    panel.steps[0].treatment.resize(n);
    panel.outcomes.resize(2);
    panel.outcomes[1].resize(n);
    if (wants_y0) panel.outcomes[0].resize(n);
    for (int i = 0; i < n; ++i) {
      const RawRow& r = rows[i];
      panel.unit_ids.push_back(trim(r.cells[id_col]));
      for (std::size_t c = 0; c < cov_cols.size(); ++c)
        panel.steps[0].covariates[c][i] = parse_number(r.cells[cov_cols[c]], r.line_no, mapping.covariates[c]);
      panel.steps[0].treatment[i] = parse_number(r.cells[a_col], r.line_no, mapping.treatment);
      panel.outcomes[1][i] = parse_number(r.cells[y_col], r.line_no, mapping.outcome);
      if (wants_y0) panel.outcomes[0][i] = parse_number(r.cells[y0_col], r.line_no, mapping.baseline_outcome);
    }
    panel.validate();
    return panel;
  }

  // long format: group rows by unit in first-appearance order
  std::vector<std::string> unit_order;
  std::map<std::string, std::map<long, const RawRow*>> by_unit; // id -> time -> row
  long horizon = -1;
  for (const RawRow& r : rows) {
    const std::string id = trim(r.cells[id_col]);
    const std::string tcell = trim(r.cells[t_col]);
    long t = 0;
    auto [ptr, ec] = std::from_chars(tcell.data(), tcell.data() + tcell.size(), t);
    if (ec != std::errc() || ptr != tcell.data() + tcell.size() || t < 0)
      throw DataError("row " + std::to_string(r.line_no) + ": bad time value '" + tcell + "'");
    auto it = by_unit.find(id);
    if (it == by_unit.end()) {
      unit_order.push_back(id);
      it = by_unit.emplace(id, std::map<long, const RawRow*>{}).first;
    }
    if (!it->second.emplace(t, &r).second)
      throw DataError("row " + std::to_string(r.line_no) + ": duplicate (id, time) = ('" + id + "', " +
                      std::to_string(t) + ")");
    horizon = std::max(horizon, t + 1);
  }

  const int T = static_cast<int>(horizon);
  const int n = static_cast<int>(unit_order.size());
  panel.steps.resize(T);
  for (int t = 0; t < T; ++t) {
    panel.steps[t].covariates.assign(cov_cols.size(), std::vector<double>(n));
    panel.steps[t].treatment.resize(n);
  }
  panel.outcomes.resize(T + 1);
  panel.outcomes[T].resize(n);
  if (layout == Layout::pt_longitudinal) {
    for (int k = 0; k < T; ++k) panel.outcomes[k].resize(n);
  }

  for (int i = 0; i < n; ++i) {
    const auto& times = by_unit[unit_order[i]];
    panel.unit_ids.push_back(unit_order[i]);
    for (int t = 0; t < T; ++t) {
      auto it = times.find(t);
      if (it == times.end())
        throw DataError("unit '" + unit_order[i] + "' is missing time " + std::to_string(t));
      const RawRow& r = *it->second;
      for (std::size_t c = 0; c < cov_cols.size(); ++c)
        panel.steps[t].covariates[c][i] = parse_number(r.cells[cov_cols[c]], r.line_no, mapping.covariates[c]);
      panel.steps[t].treatment[i] = parse_number(r.cells[a_col], r.line_no, mapping.treatment);
      // Y on row t is the outcome measured at the end of period t, i.e. Y_{t+1}
      const double y = parse_number(r.cells[y_col], r.line_no, mapping.outcome);
      if (t == T - 1)
        panel.outcomes[T][i] = y;
      else if (layout == Layout::pt_longitudinal)
        panel.outcomes[t + 1][i] = y;
      if (layout == Layout::pt_longitudinal && t == 0)
        panel.outcomes[0][i] = parse_number(r.cells[y0_col], r.line_no, mapping.baseline_outcome);
    }
  }
  panel.validate();
  return panel;
}

Panel ingest_csv(const std::string& path, const ColumnMapping& mapping, Layout layout) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ingest_csv_text(buf.str(), path, mapping, layout);
}

} // namespace mtp
