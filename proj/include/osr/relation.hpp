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

#ifndef OSR_RELATION_HPP_
#define OSR_RELATION_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace osr {

// Raised on unreadable/malformed input files (CSV, sidecars, truth lists).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AttrKind { kNumeric, kCategorical };

struct AttributeMeta {
  std::string name;
  AttrKind kind = AttrKind::kCategorical;
  // Populated for numeric attributes.
  double observed_min = 0.0;
  double observed_max = 0.0;
  // Longest string length seen in the column (categorical attributes).
  std::size_t max_len = 0;
};

// A cell holds a parsed real for numeric columns, raw text otherwise.
using Value = std::variant<double, std::string>;

struct TupleRecord {
  int id = 0;
  std::vector<Value> values;
};

// Immutable after load; all distance operations below are pure and safe to
// call concurrently.
struct Instance {
  std::vector<AttributeMeta> schema;
  std::vector<TupleRecord> tuples;

  int attr_count() const { return static_cast<int>(schema.size()); }
  int size() const { return static_cast<int>(tuples.size()); }

  const Value& at(int tid, int attr) const { return tuples[tid].values[attr]; }
  double num_at(int tid, int attr) const { return std::get<double>(at(tid, attr)); }
  const std::string& text_at(int tid, int attr) const {
    return std::get<std::string>(at(tid, attr));
  }

  // Index of the attribute named `name`, -1 if absent.
  int attr_index(std::string_view name) const;
};

// Row vector [1, d_il1, ..., d_il,j-1, d_il,j+1, ..., d_ilm]; always m entries.
struct DistanceVector {
  std::vector<double> entries;
};

enum class MissingPolicy {
  kError,          // any empty cell is a load error
  kSubstituteMode  // empty cells replaced by the column's most frequent value
};

struct LoadOptions {
  std::string sidecar_path;  // optional `name:numeric|categorical` lines
  MissingPolicy missing = MissingPolicy::kError;
};

// Loads an RFC-4180-style CSV whose first row is the header. Column kinds are
// inferred (numeric iff every non-empty cell parses as a finite real) unless a
// sidecar overrides them.
Instance load_csv(const std::string& path, const LoadOptions& options = {});

// Builds an Instance from pre-split rows; `rows` excludes the header.
Instance make_instance(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows,
                       const LoadOptions& options = {});

void write_csv(const Instance& inst, const std::string& path);

// Classic DP edit distance (unit insert/delete/replace costs).
std::size_t levenshtein(std::string_view a, std::string_view b);

// Normalized per-attribute distance in [0,1]: min-max scaled absolute
// difference for numeric columns, length-normalized edit distance otherwise.
double value_distance(const Instance& inst, int i, int l, int j);

DistanceVector distance_vector(const Instance& inst, int i, int l, int j);

// Sum of value_distance over all attributes.
double tuple_distance(const Instance& inst, int i, int l);

}  // namespace osr

#endif  // OSR_RELATION_HPP_
