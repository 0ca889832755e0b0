// Copyright 2026 The osrepair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "osr/relation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace osr {

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // 1-based source line of each row
};

// RFC-4180 parser: quoted fields may contain commas, newlines, and doubled
// quotes. Accepts both LF and CRLF records.
CsvTable parse_csv_text(const std::string& text, const std::string& origin) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool record_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    record_started = true;
  };
  auto end_record = [&] {
    if (!record_started && field.empty()) return;  // skip blank lines
    end_field();
    if (table.header.empty()) {
      table.header = record;
    } else {
      table.rows.push_back(record);
      table.row_lines.push_back(record_line);
    }
    record.clear();
    record_started = false;
    record_line = line + 1;
  };

  for (std::size_t p = 0; p < text.size(); ++p) {
    char c = text[p];
    if (in_quotes) {
      if (c == '"') {
        if (p + 1 < text.size() && text[p + 1] == '"') {
          field.push_back('"');
          ++p;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        record_started = true;
        break;
    }
  }
  if (in_quotes) throw DataError(origin + ": unterminated quoted field");
  if (record_started || !field.empty()) end_record();
  if (table.header.empty()) throw DataError(origin + ": empty input");
  return table;
}

bool parse_real(std::string_view s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  if (begin == end) return false;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return false;
  out = v;
  return true;
}

std::map<std::string, AttrKind> read_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open sidecar file: " + path);
  std::map<std::string, AttrKind> kinds;
  std::string row;
  std::size_t line = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty() || row[0] == '#') continue;
    auto colon = row.find(':');
    if (colon == std::string::npos)
      throw DataError(path + ": missing ':' at line " + std::to_string(line));
    std::string name = row.substr(0, colon);
    std::string kind = row.substr(colon + 1);
    if (kind == "numeric") {
      kinds[name] = AttrKind::kNumeric;
    } else if (kind == "categorical") {
      kinds[name] = AttrKind::kCategorical;
    } else {
      throw DataError(path + ": unknown kind '" + kind + "' at line " +
                      std::to_string(line));
    }
  }
  return kinds;
}

std::string csv_escape(const std::string& s) {
  bool needs_quotes = s.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int Instance::attr_index(std::string_view name) const {
  for (int j = 0; j < attr_count(); ++j)
    if (schema[j].name == name) return j;
  return -1;
}

Instance make_instance(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& raw_rows,
                       const LoadOptions& options) {
  const int m = static_cast<int>(header.size());
  const int n = static_cast<int>(raw_rows.size());
  std::vector<std::vector<std::string>> rows = raw_rows;

  // Missing-value policy: empty cells are either rejected or replaced by the
  // column's most frequent non-empty value (ties: lexicographically smallest).
  for (int j = 0; j < m; ++j) {
    bool any_missing = false;
    for (int i = 0; i < n; ++i)
      if (rows[i][j].empty()) any_missing = true;
    if (!any_missing) continue;
    if (options.missing == MissingPolicy::kError)
      throw DataError("missing value in column '" + header[j] +
                      "' (use mode substitution to fill)");
    std::map<std::string, int> counts;
    for (int i = 0; i < n; ++i)
      if (!rows[i][j].empty()) counts[rows[i][j]]++;
    if (counts.empty())
      throw DataError("column '" + header[j] + "' is entirely missing");
    std::string mode;
    int best = -1;
    for (const auto& [val, c] : counts)
      if (c > best) { mode = val; best = c; }
    for (int i = 0; i < n; ++i)
      if (rows[i][j].empty()) rows[i][j] = mode;
  }

  std::map<std::string, AttrKind> hinted;
  if (!options.sidecar_path.empty()) hinted = read_sidecar(options.sidecar_path);

  Instance inst;
  inst.schema.resize(m);
  for (int j = 0; j < m; ++j) {
    AttributeMeta& meta = inst.schema[j];
    meta.name = header[j];
    auto hint = hinted.find(meta.name);
    if (hint != hinted.end()) {
      meta.kind = hint->second;
    } else {
      bool all_numeric = true;
      double unused;
      for (int i = 0; i < n && all_numeric; ++i)
        if (!parse_real(rows[i][j], unused)) all_numeric = false;
      meta.kind = (n > 0 && all_numeric) ? AttrKind::kNumeric
                                         : AttrKind::kCategorical;
    }
  }

  inst.tuples.resize(n);
  for (int i = 0; i < n; ++i) {
    inst.tuples[i].id = i;
    inst.tuples[i].values.reserve(m);
    for (int j = 0; j < m; ++j) {
      AttributeMeta& meta = inst.schema[j];
      if (meta.kind == AttrKind::kNumeric) {
        double v;
        if (!parse_real(rows[i][j], v))
          throw DataError("column '" + meta.name +
                          "' declared numeric but cell '" + rows[i][j] +
                          "' does not parse (row " + std::to_string(i) + ")");
        if (i == 0 || v < meta.observed_min) meta.observed_min = v;
        if (i == 0 || v > meta.observed_max) meta.observed_max = v;
        inst.tuples[i].values.emplace_back(v);
      } else {
        meta.max_len = std::max(meta.max_len, rows[i][j].size());
        inst.tuples[i].values.emplace_back(rows[i][j]);
      }
    }
  }
  return inst;
}

Instance load_csv(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  CsvTable table = parse_csv_text(buf.str(), path);

  const std::size_t m = table.header.size();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != m)
      throw DataError(path + ": ragged row at line " +
                      std::to_string(table.row_lines[r]) + " (" +
                      std::to_string(table.rows[r].size()) + " cells, expected " +
                      std::to_string(m) + ")");
  }
  return make_instance(table.header, table.rows, options);
}

void write_csv(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open file for writing: " + path);
  for (int j = 0; j < inst.attr_count(); ++j) {
    if (j) out << ',';
    out << csv_escape(inst.schema[j].name);
  }
  out << '\n';
  for (const TupleRecord& t : inst.tuples) {
    for (int j = 0; j < inst.attr_count(); ++j) {
      if (j) out << ',';
      if (inst.schema[j].kind == AttrKind::kNumeric)
        out << format_real(std::get<double>(t.values[j]));
      else
        out << csv_escape(std::get<std::string>(t.values[j]));
    }
    out << '\n';
  }
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  const std::size_t na = a.size(), nb = b.size();
  if (na == 0) return nb;
  if (nb == 0) return na;
  // Single-row DP; `diag` carries the top-left cell across the inner loop.
  std::vector<std::size_t> row(nb + 1);
  for (std::size_t x = 0; x <= nb; ++x) row[x] = x;
  for (std::size_t y = 1; y <= na; ++y) {
    std::size_t diag = row[0];
    row[0] = y;
    for (std::size_t x = 1; x <= nb; ++x) {
      std::size_t old = row[x];
      std::size_t sub = diag + (a[y - 1] == b[x - 1] ? 0 : 1);
      row[x] = std::min({sub, row[x - 1] + 1, row[x] + 1});
      diag = old;
    }
  }
  return row[nb];
}

double value_distance(const Instance& inst, int i, int l, int j) {
  const AttributeMeta& meta = inst.schema[j];
  if (meta.kind == AttrKind::kNumeric) {
    double range = meta.observed_max - meta.observed_min;
    if (range <= 0.0) return 0.0;
    return std::abs(inst.num_at(i, j) - inst.num_at(l, j)) / range;
  }
  const std::string& a = inst.text_at(i, j);
  const std::string& b = inst.text_at(l, j);
  std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

DistanceVector distance_vector(const Instance& inst, int i, int l, int j) {
  DistanceVector v;
  v.entries.reserve(inst.attr_count());
  v.entries.push_back(1.0);
  for (int a = 0; a < inst.attr_count(); ++a) {
    if (a == j) continue;
    v.entries.push_back(value_distance(inst, i, l, a));
  }
  return v;
}

double tuple_distance(const Instance& inst, int i, int l) {
  double sum = 0.0;
  for (int j = 0; j < inst.attr_count(); ++j) sum += value_distance(inst, i, l, j);
  return sum;
}

}  // namespace osr
