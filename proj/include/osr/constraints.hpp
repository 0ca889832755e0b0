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

#ifndef OSR_CONSTRAINTS_HPP_
#define OSR_CONSTRAINTS_HPP_

#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "osr/relation.hpp"

namespace osr {

// Raised on malformed denial-constraint text; `position` is a 0-based offset
// into the offending line.
class ConstraintParseError : public std::runtime_error {
 public:
  ConstraintParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " at position " + std::to_string(position)),
        position(position),
        message(message) {}
  std::size_t position;
  std::string message;  // without the position suffix
};

enum class PredicateOp { kGt, kGe, kLt, kLe, kEq, kNe };

// Binary predicate t1[left_attr] op t2[right_attr] over an ordered tuple pair.
struct Predicate {
  int left_attr = 0;
  PredicateOp op = PredicateOp::kEq;
  int right_attr = 0;

  bool operator==(const Predicate&) const = default;
};

// A denial constraint !(P1 & P2 & ...): violated by an ordered pair exactly
// when every predicate holds.
struct DenialConstraint {
  std::vector<Predicate> predicates;
  std::string source_text;

  bool operator==(const DenialConstraint& other) const {
    return predicates == other.predicates;
  }
};

struct ConflictGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;   // unordered pairs stored (i, l), i < l
  std::vector<std::vector<int>> adjacency;  // per tuple, ascending neighbor ids
  std::vector<int> conflict_set;            // I_C, ascending
  std::vector<char> in_conflict;            // size n

  bool adjacent(int a, int b) const;
  int degree(int t) const { return static_cast<int>(adjacency[t].size()); }
};

// Parses `!( t1.Attr OP t2.Attr & ... )` with OP in {==, !=, >, >=, <, <=}.
// Order operators are rejected on categorical attributes, and both sides of a
// predicate must share a kind.
DenialConstraint parse_dc(const std::string& text,
                          const std::vector<AttributeMeta>& schema);

// One constraint per non-empty line; `#` starts a comment line.
std::vector<DenialConstraint> parse_dc_file(const std::string& path,
                                            const std::vector<AttributeMeta>& schema);

// Canonical text form; re-parsing it yields an equal constraint.
std::string to_string(const DenialConstraint& dc,
                      const std::vector<AttributeMeta>& schema);

// True iff every predicate holds with t1 := tuple i, t2 := tuple l.
bool violates(const DenialConstraint& dc, const Instance& inst, int i, int l);

// Pairwise violation scan; constraints with at least one equality predicate
// go through hash blocking on the equality keys instead of the full O(n^2)
// sweep. Both orders (i,l) and (l,i) are checked.
ConflictGraph detect_conflicts(const Instance& inst,
                               const std::vector<DenialConstraint>& dcs);

// Definition check: survivors are violation-free and every removed tuple
// conflicts with at least one survivor.
bool is_minimal_removal_set(const Instance& inst,
                            const std::vector<DenialConstraint>& dcs,
                            const std::set<int>& removed);
bool is_minimal_removal_set(const ConflictGraph& graph, const std::set<int>& removed);

// Grows a clique from `seed` by scanning `candidates` in ascending id order,
// admitting each tuple adjacent to every current member. The result is maximal
// with respect to `candidates`.
std::vector<int> greedy_maximal_clique(const ConflictGraph& graph, int seed,
                                       const std::vector<int>& candidates);

}  // namespace osr

#endif  // OSR_CONSTRAINTS_HPP_
