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

#include "osr/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "testutil.hpp"

namespace {

const std::string kFixtures = OSR_FIXTURE_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

osr::cli::RunConfig fast_config(const std::string& method = "clique") {
  osr::cli::RunConfig config;
  config.method = method;
  config.k = 2;
  config.kappa = 4;
  return config;
}

}  // namespace

TEST_CASE("outlier formula") {
  CHECK(osr::cli::outlier_value(200.0, 1.0) == doctest::Approx(400.0));
  CHECK(osr::cli::outlier_value(10.0, 3.0) == doctest::Approx(40.0));
}

TEST_CASE("evaluation metrics") {
  using osr::cli::evaluate_removal;
  osr::cli::EvalReport perfect = evaluate_removal({1, 2}, {1, 2}, 10);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  osr::cli::EvalReport half = evaluate_removal({0, 1}, {0, 2}, 10);
  CHECK(half.precision == doctest::Approx(0.5));
  CHECK(half.recall == doctest::Approx(0.5));
  CHECK(half.f1 == doctest::Approx(0.5));

  osr::cli::EvalReport empty = evaluate_removal({}, {0, 2}, 10);
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
  CHECK(empty.f1 == 0.0);

  CHECK_THROWS_AS(evaluate_removal({12}, {0}, 10), osr::DataError);
  CHECK_THROWS_AS(evaluate_removal({0}, {12}, 10), osr::DataError);
}

TEST_CASE("error injection is deterministic and counts corruptions") {
  osr::Instance clean = osr::load_csv(kFixtures + "/clean.csv");
  osr::Instance dirty_a, dirty_b;
  std::set<int> truth_a, truth_b;
  std::vector<osr::cli::ErrorKind> kinds{
      osr::cli::ErrorKind::kTypo, osr::cli::ErrorKind::kDuplicate,
      osr::cli::ErrorKind::kBogus, osr::cli::ErrorKind::kOutlier};
  osr::cli::inject_errors(clean, 0.3, kinds, 99, dirty_a, truth_a);
  osr::cli::inject_errors(clean, 0.3, kinds, 99, dirty_b, truth_b);
  CHECK(truth_a == truth_b);
  CHECK(truth_a.size() == 3);  // ceil(0.3 * 10)
  for (int id : truth_a) {
    bool changed = false;
    for (int j = 0; j < clean.attr_count(); ++j)
      if (clean.tuples[id].values[j] != dirty_a.tuples[id].values[j]) changed = true;
    CHECK(changed);
  }
  std::string pa = "osr_cli_inject_a.csv", pb = "osr_cli_inject_b.csv";
  osr::write_csv(dirty_a, pa);
  osr::write_csv(dirty_b, pb);
  CHECK(slurp(pa) == slurp(pb));
  std::remove(pa.c_str());
  std::remove(pb.c_str());

  CHECK_THROWS_AS(osr::cli::inject_errors(clean, 0.0, kinds, 1, dirty_a, truth_a),
                  osr::DataError);
  CHECK_THROWS_AS(osr::cli::inject_errors(clean, 1.0, kinds, 1, dirty_a, truth_a),
                  osr::DataError);
}

TEST_CASE("repair command: conflict-free data removes nothing, exit 0") {
  std::string out = "osr_cli_clean_report.json";
  int code = osr::cli::cmd_repair(kFixtures + "/clean.csv",
                                  kFixtures + "/clean.dcs", fast_config(), out);
  CHECK(code == osr::cli::kExitOk);
  std::string report = slurp(out);
  CHECK(report.find("\"removed\": []") != std::string::npos);
  std::remove(out.c_str());
}

TEST_CASE("repair command: constraint parse failures exit 2") {
  std::string bad = "osr_cli_bad.dcs";
  write_file(bad, "!(t1.Nope == t2.Key)\n");
  int code = osr::cli::cmd_repair(kFixtures + "/clean.csv", bad, fast_config(),
                                  "osr_cli_unused.json");
  CHECK(code == osr::cli::kExitConstraintParse);
  std::remove(bad.c_str());
  std::remove("osr_cli_unused.json");
}

TEST_CASE("repair command: solver limits exit 3") {
  setenv("OSR_LP_ITERATION_LIMIT", "0", 1);
  int code = osr::cli::cmd_repair(kFixtures + "/electricity.csv",
                                  kFixtures + "/electricity.dcs", fast_config(),
                                  "osr_cli_limited.json");
  unsetenv("OSR_LP_ITERATION_LIMIT");
  CHECK(code == osr::cli::kExitSolverFailure);
  std::remove("osr_cli_limited.json");
}

TEST_CASE("probabilistic reports are byte-identical per seed") {
  osr::cli::RunConfig config = fast_config("prob");
  config.seed = 77;
  std::string a = "osr_cli_prob_a.json", b = "osr_cli_prob_b.json";
  REQUIRE(osr::cli::cmd_repair(kFixtures + "/electricity.csv",
                               kFixtures + "/electricity.dcs", config, a) == 0);
  REQUIRE(osr::cli::cmd_repair(kFixtures + "/electricity.csv",
                               kFixtures + "/electricity.dcs", config, b) == 0);
  CHECK(slurp(a) == slurp(b));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("exact and clique agree through the command surface") {
  std::string exact_out = "osr_cli_exact.json", clique_out = "osr_cli_clique.json";
  REQUIRE(osr::cli::cmd_repair(kFixtures + "/chain_clique.csv",
                               kFixtures + "/chain_clique.dcs",
                               fast_config("exact"), exact_out) == 0);
  REQUIRE(osr::cli::cmd_repair(kFixtures + "/chain_clique.csv",
                               kFixtures + "/chain_clique.dcs",
                               fast_config("clique"), clique_out) == 0);
  auto objective_of = [](const std::string& text) {
    auto pos = text.find("\"objective\": ");
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + 13));
  };
  CHECK(objective_of(slurp(exact_out)) ==
        doctest::Approx(objective_of(slurp(clique_out))).epsilon(1e-9));
  std::remove(exact_out.c_str());
  std::remove(clique_out.c_str());
}

TEST_CASE("evaluate command reads reports and truth files") {
  std::string report = "osr_cli_eval_report.json";
  std::string truth = "osr_cli_eval_truth.txt";
  std::string out = "osr_cli_eval_out.json";
  osr::cli::RunConfig config = fast_config("prob");
  REQUIRE(osr::cli::cmd_repair(kFixtures + "/electricity.csv",
                               kFixtures + "/electricity.dcs", config, report) == 0);
  write_file(truth, "# dirty ids\n4\n9\n11\n14\n");
  CHECK(osr::cli::cmd_evaluate(report, truth, out) == 0);
  std::string text = slurp(out);
  CHECK(text.find("\"precision\":") != std::string::npos);
  CHECK(text.find("\"f1\":") != std::string::npos);
  std::remove(report.c_str());
  std::remove(truth.c_str());
  std::remove(out.c_str());
}

TEST_CASE("sweep produces one row per value") {
  std::string truth = "osr_cli_sweep_truth.txt";
  std::string out = "osr_cli_sweep.csv";
  write_file(truth, "4\n9\n11\n");
  osr::cli::RunConfig config = fast_config("prob");
  CHECK(osr::cli::cmd_sweep(kFixtures + "/electricity.csv",
                            kFixtures + "/electricity.dcs", truth, config, "gamma",
                            {"0.1", "2", "50"}, out) == 0);
  std::string text = slurp(out);
  int lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == 4);  // header + 3 rows
  CHECK(text.find("gamma,0.1,prob,") != std::string::npos);
  std::remove(truth.c_str());
  std::remove(out.c_str());
}

TEST_CASE("config round-trips through its file form") {
  osr::cli::RunConfig config = fast_config("exact");
  config.gamma = 1.5;
  config.G = 3.25;
  config.model_kind = "ridge";
  config.model_pool = 7;
  config.seed = 123;
  std::string path = "osr_cli_config.json";
  osr::cli::save_config(config, path);
  osr::cli::RunConfig loaded = osr::cli::load_config(path);
  CHECK(loaded.gamma == config.gamma);
  CHECK(loaded.kappa == config.kappa);
  CHECK(loaded.k == config.k);
  CHECK(loaded.G == config.G);
  CHECK(loaded.model_kind == config.model_kind);
  CHECK(loaded.model_pool == config.model_pool);
  CHECK(loaded.seed == config.seed);
  CHECK(loaded.method == config.method);

  // Auto G and "all" models survive the trip as well.
  osr::cli::RunConfig defaults;
  osr::cli::save_config(defaults, path);
  osr::cli::RunConfig loaded_defaults = osr::cli::load_config(path);
  CHECK(loaded_defaults.G < 0.0);
  CHECK(loaded_defaults.model_pool < 0);
  std::remove(path.c_str());
}

TEST_CASE("emitted removal sets re-validate as minimal") {
  std::string out = "osr_cli_revalidate.json";
  for (const char* method : {"exact", "clique", "prob"}) {
    REQUIRE(osr::cli::cmd_repair(kFixtures + "/electricity.csv",
                                 kFixtures + "/electricity.dcs",
                                 fast_config(method), out) == 0);
    std::ifstream in(out);
    nlohmann::json report = nlohmann::json::parse(in);
    std::set<int> removed;
    for (int id : report["removed"].get<std::vector<int>>()) removed.insert(id);

    osr::Instance inst = osr::load_csv(kFixtures + "/electricity.csv");
    std::vector<osr::DenialConstraint> dcs =
        osr::parse_dc_file(kFixtures + "/electricity.dcs", inst.schema);
    CHECK(osr::is_minimal_removal_set(inst, dcs, removed));
  }
  std::remove(out.c_str());
}

TEST_CASE("diagnostic dumps are flag gated") {
  osr::cli::RunConfig config = fast_config("prob");
  config.dump_losses = "osr_cli_losses.csv";
  config.dump_lp = "osr_cli_model.lp";
  REQUIRE(osr::cli::cmd_repair(kFixtures + "/electricity.csv",
                               kFixtures + "/electricity.dcs", config,
                               "osr_cli_dump_report.json") == 0);
  std::string losses = slurp(config.dump_losses);
  CHECK(losses.find("id,raw_loss,u,gamma,tuple_value,providers") != std::string::npos);
  std::string lp = slurp(config.dump_lp);
  CHECK(lp.find("Maximize") != std::string::npos);
  std::remove(config.dump_losses.c_str());
  std::remove(config.dump_lp.c_str());
  std::remove("osr_cli_dump_report.json");
}

TEST_CASE("detect command lists the running example's conflicts") {
  std::string out = "osr_cli_detect.json";
  CHECK(osr::cli::cmd_detect(kFixtures + "/electricity.csv",
                             kFixtures + "/electricity.dcs", fast_config(), out) == 0);
  std::string text = slurp(out);
  CHECK(text.find("\"conflict_set\": [") != std::string::npos);
  CHECK(text.find("4") != std::string::npos);
  std::remove(out.c_str());
}
