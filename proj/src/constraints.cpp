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

#include "osr/constraints.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <unordered_map>

namespace osr {

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!eat(c)) throw ConstraintParseError(std::string("expected ") + what, pos);
  }
  bool eat_word(const char* w) {
    skip_ws();
    std::size_t len = std::strlen(w);
    if (text.compare(pos, len, w) == 0) {
      pos += len;
      return true;
    }
    return false;
  }
};

const char* op_text(PredicateOp op) {
  switch (op) {
    case PredicateOp::kGt: return ">";
    case PredicateOp::kGe: return ">=";
    case PredicateOp::kLt: return "<";
    case PredicateOp::kLe: return "<=";
    case PredicateOp::kEq: return "==";
    case PredicateOp::kNe: return "!=";
  }
  return "?";
}

bool is_order_op(PredicateOp op) {
  return op == PredicateOp::kGt || op == PredicateOp::kGe ||
         op == PredicateOp::kLt || op == PredicateOp::kLe;
}

int parse_attr_ref(Cursor& cur, const char* role,
                   const std::vector<AttributeMeta>& schema) {
  cur.skip_ws();
  std::size_t start = cur.pos;
  if (!cur.eat_word(role))
    throw ConstraintParseError(std::string("expected ") + role + ".", start);
  if (!cur.eat('.'))
    throw ConstraintParseError(std::string("expected '.' after ") + role, cur.pos);
  std::size_t name_start = cur.pos;
  while (cur.pos < cur.text.size()) {
    char c = cur.text[cur.pos];
    if (c == ' ' || c == '\t' || c == '&' || c == ')' || c == '=' || c == '!' ||
        c == '<' || c == '>')
      break;
    ++cur.pos;
  }
  if (cur.pos == name_start)
    throw ConstraintParseError("expected attribute name", name_start);
  std::string name = cur.text.substr(name_start, cur.pos - name_start);
  for (int j = 0; j < static_cast<int>(schema.size()); ++j)
    if (schema[j].name == name) return j;
  throw ConstraintParseError("unknown attribute '" + name + "'", name_start);
}

PredicateOp parse_op(Cursor& cur) {
  cur.skip_ws();
  std::size_t start = cur.pos;
  if (cur.eat_word(">=")) return PredicateOp::kGe;
  if (cur.eat_word("<=")) return PredicateOp::kLe;
  if (cur.eat_word("==")) return PredicateOp::kEq;
  if (cur.eat_word("!=")) return PredicateOp::kNe;
  if (cur.eat_word(">")) return PredicateOp::kGt;
  if (cur.eat_word("<")) return PredicateOp::kLt;
  throw ConstraintParseError("expected operator (==, !=, >, >=, <, <=)", start);
}

bool predicate_holds(const Predicate& p, const Instance& inst, int i, int l) {
  const AttrKind kind = inst.schema[p.left_attr].kind;
  if (kind == AttrKind::kNumeric) {
    double a = inst.num_at(i, p.left_attr);
    double b = inst.num_at(l, p.right_attr);
    switch (p.op) {
      case PredicateOp::kGt: return a > b;
      case PredicateOp::kGe: return a >= b;
      case PredicateOp::kLt: return a < b;
      case PredicateOp::kLe: return a <= b;
      case PredicateOp::kEq: return a == b;
      case PredicateOp::kNe: return a != b;
    }
  }
  const std::string& a = inst.text_at(i, p.left_attr);
  const std::string& b = inst.text_at(l, p.right_attr);
  return p.op == PredicateOp::kEq ? a == b : a != b;
}

// Blocking key for the equality predicates of one constraint. Numeric cells
// key on their bit pattern with -0.0 normalized to 0.0.
void append_key(std::string& key, const Instance& inst, int tid, int attr) {
  if (inst.schema[attr].kind == AttrKind::kNumeric) {
    double v = inst.num_at(tid, attr);
    if (v == 0.0) v = 0.0;  // collapse -0.0
    char buf[sizeof(double)];
    std::memcpy(buf, &v, sizeof(double));
    key.push_back('\1');
    key.append(buf, sizeof(double));
  } else {
    const std::string& s = inst.text_at(tid, attr);
    key.push_back('\2');
    key.append(std::to_string(s.size()));
    key.push_back(':');
    key.append(s);
  }
}

void add_edges_for_dc(const DenialConstraint& dc, const Instance& inst,
                      std::set<std::pair<int, int>>& edges) {
  const int n = inst.size();
  std::vector<const Predicate*> eq_preds;
  for (const Predicate& p : dc.predicates)
    if (p.op == PredicateOp::kEq) eq_preds.push_back(&p);

  if (eq_preds.empty()) {
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l)
        if (i != l && violates(dc, inst, i, l))
          edges.insert({std::min(i, l), std::max(i, l)});
    return;
  }

  // Group candidates by the right-hand side of each equality predicate, then
  // probe with the left-hand key. Exact: remaining predicates are re-checked.
  std::unordered_map<std::string, std::vector<int>> buckets;
  buckets.reserve(static_cast<std::size_t>(n) * 2);
  for (int l = 0; l < n; ++l) {
    std::string key;
    for (const Predicate* p : eq_preds) append_key(key, inst, l, p->right_attr);
    buckets[std::move(key)].push_back(l);
  }
  for (int i = 0; i < n; ++i) {
    std::string key;
    for (const Predicate* p : eq_preds) append_key(key, inst, i, p->left_attr);
    auto it = buckets.find(key);
    if (it == buckets.end()) continue;
    for (int l : it->second)
      if (i != l && violates(dc, inst, i, l))
        edges.insert({std::min(i, l), std::max(i, l)});
  }
}

}  // namespace

bool ConflictGraph::adjacent(int a, int b) const {
  const std::vector<int>& nb = adjacency[a];
  return std::binary_search(nb.begin(), nb.end(), b);
}

DenialConstraint parse_dc(const std::string& text,
                          const std::vector<AttributeMeta>& schema) {
  Cursor cur{text};
  cur.expect('!', "'!'");
  cur.expect('(', "'('");
  DenialConstraint dc;
  dc.source_text = text;
  while (true) {
    Predicate p;
    std::size_t pred_start = cur.pos;
    p.left_attr = parse_attr_ref(cur, "t1", schema);
    p.op = parse_op(cur);
    p.right_attr = parse_attr_ref(cur, "t2", schema);
    if (schema[p.left_attr].kind != schema[p.right_attr].kind)
      throw ConstraintParseError("attribute kinds differ in predicate", pred_start);
    if (is_order_op(p.op) && schema[p.left_attr].kind == AttrKind::kCategorical)
      throw ConstraintParseError("order operator on categorical attribute",
                                 pred_start);
    dc.predicates.push_back(p);
    if (cur.eat('&')) continue;
    cur.expect(')', "')' or '&'");
    break;
  }
  cur.skip_ws();
  if (cur.pos != text.size())
    throw ConstraintParseError("trailing input after ')'", cur.pos);
  return dc;
}

std::vector<DenialConstraint> parse_dc_file(
    const std::string& path, const std::vector<AttributeMeta>& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open constraint file: " + path);
  std::vector<DenialConstraint> dcs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.empty() || trimmed[0] == '#') continue;
    try {
      dcs.push_back(parse_dc(trimmed, schema));
    } catch (const ConstraintParseError& e) {
      throw ConstraintParseError(
          path + ":" + std::to_string(lineno) + ": " + e.message, e.position);
    }
  }
  return dcs;
}

std::string to_string(const DenialConstraint& dc,
                      const std::vector<AttributeMeta>& schema) {
  std::string out = "!(";
  for (std::size_t p = 0; p < dc.predicates.size(); ++p) {
    if (p) out += " & ";
    const Predicate& pred = dc.predicates[p];
    out += "t1." + schema[pred.left_attr].name + " " + op_text(pred.op) +
           " t2." + schema[pred.right_attr].name;
  }
  out += ")";
  return out;
}

bool violates(const DenialConstraint& dc, const Instance& inst, int i, int l) {
  for (const Predicate& p : dc.predicates)
    if (!predicate_holds(p, inst, i, l)) return false;
  return true;
}

ConflictGraph detect_conflicts(const Instance& inst,
                               const std::vector<DenialConstraint>& dcs) {
  std::set<std::pair<int, int>> edges;
  for (const DenialConstraint& dc : dcs) add_edges_for_dc(dc, inst, edges);

  ConflictGraph graph;
  graph.n = inst.size();
  graph.adjacency.resize(graph.n);
  graph.in_conflict.assign(graph.n, 0);
  graph.edges.assign(edges.begin(), edges.end());
  for (auto [i, l] : graph.edges) {
    graph.adjacency[i].push_back(l);
    graph.adjacency[l].push_back(i);
    graph.in_conflict[i] = 1;
    graph.in_conflict[l] = 1;
  }
  for (std::vector<int>& nb : graph.adjacency) std::sort(nb.begin(), nb.end());
  for (int t = 0; t < graph.n; ++t)
    if (graph.in_conflict[t]) graph.conflict_set.push_back(t);
  return graph;
}

bool is_minimal_removal_set(const ConflictGraph& graph, const std::set<int>& removed) {
  for (auto [i, l] : graph.edges)
    if (!removed.count(i) && !removed.count(l)) return false;
  for (int t : removed) {
    if (t < 0 || t >= graph.n) return false;
    bool has_surviving_conflict = false;
    for (int nb : graph.adjacency[t])
      if (!removed.count(nb)) {
        has_surviving_conflict = true;
        break;
      }
    if (!has_surviving_conflict) return false;
  }
  return true;
}

bool is_minimal_removal_set(const Instance& inst,
                            const std::vector<DenialConstraint>& dcs,
                            const std::set<int>& removed) {
  return is_minimal_removal_set(detect_conflicts(inst, dcs), removed);
}

std::vector<int> greedy_maximal_clique(const ConflictGraph& graph, int seed,
                                       const std::vector<int>& candidates) {
  std::vector<int> clique{seed};
  std::vector<int> ordered = candidates;
  std::sort(ordered.begin(), ordered.end());
  for (int c : ordered) {
    if (c == seed) continue;
    bool adjacent_to_all = true;
    for (int member : clique)
      if (!graph.adjacent(c, member)) {
        adjacent_to_all = false;
        break;
      }
    if (adjacent_to_all) clique.push_back(c);
  }
  std::sort(clique.begin(), clique.end());
  return clique;
}

}  // namespace osr
