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

#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "doctest.h"
#include "testutil.hpp"

namespace {

std::string temp_path(const std::string& name) {
  return std::string("osr_test_") + name;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Reference quadratic-table edit distance, kept independent of the
// single-row implementation under test.
std::size_t edit_distance_oracle(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

}  // namespace

TEST_CASE("csv load infers kinds and ranges") {
  std::string path = temp_path("basic.csv");
  write_file(path, "a,b\n1,x\n2,y\n");
  osr::Instance inst = osr::load_csv(path);
  REQUIRE(inst.attr_count() == 2);
  REQUIRE(inst.size() == 2);
  CHECK(inst.schema[0].kind == osr::AttrKind::kNumeric);
  CHECK(inst.schema[1].kind == osr::AttrKind::kCategorical);
  CHECK(inst.num_at(0, 0) == 1.0);
  CHECK(inst.text_at(1, 1) == "y");
  std::remove(path.c_str());
}

TEST_CASE("csv load reports ragged rows with line numbers") {
  std::string path = temp_path("ragged.csv");
  write_file(path, "a,b\n1,x\n2,y,z\n");
  CHECK_THROWS_WITH_AS(osr::load_csv(path),
                       doctest::Contains("ragged row at line 3"), osr::DataError);
  std::remove(path.c_str());
}

TEST_CASE("observed range covers the column") {
  osr::Instance inst = osrtest::make_instance_from({"v"}, {{"0"}, {"200"}, {"63"}});
  CHECK(inst.schema[0].observed_min == 0.0);
  CHECK(inst.schema[0].observed_max == 200.0);
}

TEST_CASE("quoted fields and embedded separators survive a round trip") {
  std::string path = temp_path("quoted.csv");
  write_file(path, "name,score\n\"a,b\",1\n\"say \"\"hi\"\"\",2\n");
  osr::Instance inst = osr::load_csv(path);
  CHECK(inst.text_at(0, 0) == "a,b");
  CHECK(inst.text_at(1, 0) == "say \"hi\"");
  std::remove(path.c_str());
}

TEST_CASE("missing cells are rejected unless mode substitution is on") {
  std::string path = temp_path("missing.csv");
  write_file(path, "a,b\n1,x\n2,\n3,x\n");
  CHECK_THROWS_AS(osr::load_csv(path), osr::DataError);
  osr::LoadOptions options;
  options.missing = osr::MissingPolicy::kSubstituteMode;
  osr::Instance inst = osr::load_csv(path, options);
  CHECK(inst.text_at(1, 1) == "x");  // column mode
  std::remove(path.c_str());
}

TEST_CASE("typing sidecar overrides inference") {
  std::string data = temp_path("sidecar.csv");
  std::string sidecar = temp_path("sidecar.types");
  write_file(data, "code,v\n1,5\n2,6\n");
  write_file(sidecar, "code:categorical\n");
  osr::LoadOptions options;
  options.sidecar_path = sidecar;
  osr::Instance inst = osr::load_csv(data, options);
  CHECK(inst.schema[0].kind == osr::AttrKind::kCategorical);
  CHECK(inst.schema[1].kind == osr::AttrKind::kNumeric);
  CHECK(inst.text_at(0, 0) == "1");
  std::remove(data.c_str());
  std::remove(sidecar.c_str());
}

TEST_CASE("numeric column with a stray token is an error when declared") {
  std::string data = temp_path("declared.csv");
  std::string sidecar = temp_path("declared.types");
  write_file(data, "v\n1\noops\n");
  write_file(sidecar, "v:numeric\n");
  osr::LoadOptions options;
  options.sidecar_path = sidecar;
  CHECK_THROWS_AS(osr::load_csv(data, options), osr::DataError);
  std::remove(data.c_str());
  std::remove(sidecar.c_str());
}

TEST_CASE("levenshtein agrees with the table oracle") {
  CHECK(osr::levenshtein("cat", "cart") == 1);
  CHECK(osr::levenshtein("", "abc") == 3);
  CHECK(osr::levenshtein("kitten", "sitting") == 3);
  std::mt19937_64 rng(7);
  const std::string alphabet = "abcde";
  for (int trial = 0; trial < 200; ++trial) {
    std::string a, b;
    std::size_t la = rng() % 9, lb = rng() % 9;
    for (std::size_t p = 0; p < la; ++p) a += alphabet[rng() % alphabet.size()];
    for (std::size_t p = 0; p < lb; ++p) b += alphabet[rng() % alphabet.size()];
    CHECK(osr::levenshtein(a, b) == edit_distance_oracle(a, b));
  }
}

TEST_CASE("value distance on numeric and categorical cells") {
  osr::Instance inst = osrtest::make_instance_from(
      {"n", "s"}, {{"50", "cat"}, {"150", "cart"}, {"0", "x"}, {"200", "x"}});
  CHECK(osr::value_distance(inst, 0, 0, 0) == 0.0);
  CHECK(osr::value_distance(inst, 0, 1, 0) == doctest::Approx(0.5));
  CHECK(osr::value_distance(inst, 0, 1, 1) == doctest::Approx(0.25));

  // Two empty strings compare at distance zero (continuous extension); such
  // cells can only exist on hand-built instances.
  osr::Instance direct;
  direct.schema = {{"s", osr::AttrKind::kCategorical, 0, 0, 0}};
  direct.tuples = {{0, {std::string()}}, {1, {std::string()}}};
  CHECK(osr::value_distance(direct, 0, 1, 0) == 0.0);
}

TEST_CASE("zero-range numeric column gives zero distance") {
  osr::Instance inst = osrtest::make_instance_from({"n"}, {{"7"}, {"7"}, {"7"}});
  CHECK(osr::value_distance(inst, 0, 2, 0) == 0.0);
}

TEST_CASE("distance vector layout") {
  osr::Instance inst = osrtest::make_instance_from(
      {"a", "b"}, {{"0", "10"}, {"4", "30"}});
  // m=2, modeling attribute 0: [1, d on the other attribute].
  osr::DistanceVector v = osr::distance_vector(inst, 0, 1, 0);
  REQUIRE(v.entries.size() == 2);
  CHECK(v.entries[0] == 1.0);
  CHECK(v.entries[1] == doctest::Approx(1.0));
  osr::DistanceVector self = osr::distance_vector(inst, 1, 1, 0);
  CHECK(self.entries[0] == 1.0);
  CHECK(self.entries[1] == 0.0);
}

TEST_CASE("distance vector keeps the paper's component order") {
  // Five attributes, modeling the fifth: [1, d1, d2, d3, d4].
  osr::Instance inst = osrtest::make_instance_from(
      {"a", "b", "c", "d", "e"},
      {{"0", "0", "0", "0", "0"},
       {"352", "421", "37", "25", "999"},
       {"1000", "1000", "1000", "1000", "1000"}});
  osr::DistanceVector v = osr::distance_vector(inst, 0, 1, 4);
  REQUIRE(v.entries.size() == 5);
  CHECK(v.entries[0] == 1.0);
  CHECK(v.entries[1] == doctest::Approx(0.352));
  CHECK(v.entries[2] == doctest::Approx(0.421));
  CHECK(v.entries[3] == doctest::Approx(0.037));
  CHECK(v.entries[4] == doctest::Approx(0.025));
}

TEST_CASE("tuple distance sums attribute distances") {
  osr::Instance inst = osrtest::make_instance_from(
      {"a", "b"}, {{"0", "0"}, {"2", "3"}, {"10", "10"}});
  CHECK(osr::tuple_distance(inst, 0, 0) == 0.0);
  CHECK(osr::tuple_distance(inst, 0, 1) == doctest::Approx(0.2 + 0.3));
}

TEST_CASE("distances are symmetric and bounded on random instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    osrtest::Case c = osrtest::random_case(rng(), 12, 0, 12);
    const osr::Instance& inst = c.inst;
    for (int i = 0; i < inst.size(); ++i)
      for (int l = 0; l < inst.size(); ++l)
        for (int j = 0; j < inst.attr_count(); ++j) {
          double d = osr::value_distance(inst, i, l, j);
          CHECK(d >= 0.0);
          CHECK(d <= 1.0);
          CHECK(d == osr::value_distance(inst, l, i, j));
        }
  }
}

TEST_CASE("triangle inequality for numeric-only tuple distance") {
  std::mt19937_64 rng(13);
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 12; ++i)
    rows.push_back({std::to_string(rng() % 100), std::to_string(rng() % 50)});
  osr::Instance inst = osrtest::make_instance_from({"a", "b"}, rows);
  for (int a = 0; a < inst.size(); ++a)
    for (int b = 0; b < inst.size(); ++b)
      for (int c = 0; c < inst.size(); ++c)
        CHECK(osr::tuple_distance(inst, a, c) <=
              osr::tuple_distance(inst, a, b) + osr::tuple_distance(inst, b, c) +
                  1e-12);
}

TEST_CASE("emitted csv reloads with identical distances") {
  osr::Instance inst = osrtest::electricity12();
  std::string path = temp_path("roundtrip.csv");
  osr::write_csv(inst, path);
  osr::Instance reloaded = osr::load_csv(path);
  REQUIRE(reloaded.size() == inst.size());
  REQUIRE(reloaded.attr_count() == inst.attr_count());
  for (int i = 0; i < inst.size(); ++i)
    for (int l = 0; l < inst.size(); ++l)
      for (int j = 0; j < inst.attr_count(); ++j)
        CHECK(osr::value_distance(inst, i, l, j) ==
              osr::value_distance(reloaded, i, l, j));
  std::remove(path.c_str());
}
