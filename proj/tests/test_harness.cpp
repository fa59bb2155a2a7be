#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rimeopt/harness.hpp"

using namespace rimeopt;
using namespace rimeopt::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("rimeopt_test_" + tag);
  fs::remove_all(dir);
  return dir;
}

CampaignConfig tiny_config(const fs::path& out) {
  CampaignConfig cfg;
  cfg.suite_kind = suite::SuiteKind::cec2017_like;
  cfg.functions = {1, 4};
  cfg.dims = {10};
  cfg.variants = {"RIME", "MRIME-CD"};
  cfg.runs = 3;
  cfg.np = 8;
  cfg.fes_multiplier = 60.0;  // 600 evaluations per run
  cfg.base_seed = 5;
  cfg.output_dir = out;
  return cfg;
}

}  // namespace

TEST_CASE("config round trip from JSON") {
  const std::string text = R"({
    "schema_version": 1,
    "suite": "cec2022-like",
    "functions": [1, 2],
    "dims": [10, 20],
    "variants": ["RIME", "RIME-G"],
    "runs": 5,
    "np": 12,
    "fes_multiplier": 200,
    "base_seed": 99,
    "instance_seed": 3,
    "output_dir": "somewhere",
    "stats_alpha": 0.1,
    "workers": 4,
    "params": {"w": 7, "nvol_threshold": 0.05, "weight_mode": "verbatim"}
  })";
  const CampaignConfig cfg = CampaignConfig::from_json_text(text);
  CHECK(cfg.suite_kind == suite::SuiteKind::cec2022_like);
  CHECK(cfg.functions == std::vector<int>{1, 2});
  CHECK(cfg.dims == std::vector<int>{10, 20});
  CHECK(cfg.runs == 5);
  CHECK(cfg.np == 12);
  CHECK(cfg.base_seed == 99);
  CHECK(cfg.params.rime.w == 7);
  CHECK(cfg.params.nvol_threshold == 0.05);
  CHECK(cfg.params.weight_mode == linalg::WeightMode::verbatim);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config validation rejects bad input") {
  CHECK_THROWS_AS(CampaignConfig::from_json_text("{"), ConfigError);
  CHECK_THROWS_AS(CampaignConfig::from_json_text(R"({"schema_version": 2})"), ConfigError);

  CampaignConfig cfg;
  cfg.variants = {"RIME-UNKNOWN"};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  CampaignConfig bad_fn;
  bad_fn.functions = {99};
  CHECK_THROWS_AS(bad_fn.validate(), ConfigError);

  CampaignConfig bad_alpha;
  bad_alpha.stats_alpha = 1.5;
  CHECK_THROWS_AS(bad_alpha.validate(), ConfigError);

  CampaignConfig bad_candidate;
  bad_candidate.candidate = "EOSMA";
  CHECK_THROWS_AS(bad_candidate.validate(), ConfigError);
}

TEST_CASE("seed derivation is stable and collision-averse") {
  const auto s1 = derive_seed(42, "RIME", "inst", 0);
  CHECK(s1 == derive_seed(42, "RIME", "inst", 0));
  CHECK(s1 != derive_seed(42, "RIME", "inst", 1));
  CHECK(s1 != derive_seed(42, "MRIME-CD", "inst", 0));
  CHECK(s1 != derive_seed(42, "RIME", "other", 0));
  CHECK(s1 != derive_seed(43, "RIME", "inst", 0));
}

TEST_CASE("campaign writes the expected artifacts") {
  const fs::path out = fresh_dir("artifacts");
  const CampaignConfig cfg = tiny_config(out);
  const CampaignResult result = run_campaign(cfg);

  CHECK(result.failed_runs == 0);
  CHECK(result.matrix.algorithms == cfg.variants);
  CHECK(result.matrix.problems.size() == 2);
  for (const auto& row : result.matrix.cells) {
    for (const auto& cell : row) {
      CHECK(cell.size() == 3);
    }
  }

  CHECK(fs::exists(out / "instances.json"));
  CHECK(fs::exists(out / "results.csv"));
  CHECK(fs::exists(out / "summary.csv"));
  CHECK(fs::exists(out / "timings.csv"));
  CHECK(fs::exists(out / "report_mean_rank.csv"));
  CHECK(fs::exists(out / "report_friedman.csv"));
  CHECK(fs::exists(out / "report_wel.csv"));
  CHECK(fs::exists(out / "report_kruskal.csv"));

  // One convergence CSV per (variant, instance, run).
  int csv_count = 0;
  for (const auto& entry : fs::recursive_directory_iterator(out / "runs")) {
    if (entry.is_regular_file()) {
      ++csv_count;
      const std::string content = slurp(entry.path());
      CHECK(content.rfind("evals,best_fitness\n", 0) == 0);
    }
  }
  CHECK(csv_count == 2 * 2 * 3);

  fs::remove_all(out);
}

TEST_CASE("campaign reruns are byte-identical apart from timings") {
  const fs::path out_a = fresh_dir("determinism_a");
  const fs::path out_b = fresh_dir("determinism_b");
  CampaignConfig cfg = tiny_config(out_a);
  run_campaign(cfg);
  cfg.output_dir = out_b;
  run_campaign(cfg);

  for (const char* name : {"instances.json", "results.csv", "summary.csv",
                           "report_mean_rank.csv", "report_friedman.csv", "report_wel.csv",
                           "report_kruskal.csv"}) {
    CHECK(slurp(out_a / name) == slurp(out_b / name));
  }
  fs::remove_all(out_a);
  fs::remove_all(out_b);
}

TEST_CASE("parallel and serial execution produce the same results") {
  const fs::path out_serial = fresh_dir("serial");
  const fs::path out_par = fresh_dir("parallel");
  CampaignConfig cfg = tiny_config(out_serial);
  cfg.workers = 1;
  const CampaignResult serial = run_campaign(cfg);
  cfg.output_dir = out_par;
  cfg.workers = 4;
  const CampaignResult parallel = run_campaign(cfg);

  CHECK(serial.matrix.cells == parallel.matrix.cells);
  CHECK(slurp(out_serial / "results.csv") == slurp(out_par / "results.csv"));
  fs::remove_all(out_serial);
  fs::remove_all(out_par);
}

TEST_CASE("unwritable output fails before any run") {
  const fs::path blocker = fresh_dir("blocker");
  fs::create_directories(blocker);
  std::ofstream(blocker / "file").put('x');
  CampaignConfig cfg = tiny_config(blocker / "file" / "nested");  // under a file
  CHECK_THROWS_AS(run_campaign(cfg), IoError);
  fs::remove_all(blocker);
}

TEST_CASE("results round-trip through load_results into reports") {
  const fs::path out = fresh_dir("roundtrip");
  const CampaignConfig cfg = tiny_config(out);
  const CampaignResult result = run_campaign(cfg);

  const stats::ResultMatrix loaded = load_results(out);
  CHECK(loaded.algorithms == result.matrix.algorithms);
  CHECK(loaded.problems == result.matrix.problems);
  CHECK(loaded.cells == result.matrix.cells);
  fs::remove_all(out);
}

TEST_CASE("incomplete results are reported with the missing cell") {
  const fs::path out = fresh_dir("incomplete");
  fs::create_directories(out);
  {
    std::ofstream res(out / "results.csv");
    res << "variant,instance,run,seed,final_best,status\n";
    res << "RIME,instA,0,1,5.0,ok\n";
    res << "RIME,instB,0,2,6.0,ok\n";
    res << "MRIME-CD,instA,0,3,4.0,ok\n";  // instB missing for MRIME-CD
  }
  const stats::ResultMatrix matrix = load_results(out);
  CampaignConfig cfg;
  cfg.variants = matrix.algorithms;
  try {
    write_reports(matrix, cfg, out);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("MRIME-CD") != std::string::npos);
    CHECK(what.find("instB") != std::string::npos);
  }
  fs::remove_all(out);
}

TEST_CASE("single-variant campaign skips Friedman with a notice") {
  const fs::path out = fresh_dir("single");
  CampaignConfig cfg = tiny_config(out);
  cfg.variants = {"RIME"};
  cfg.functions = {1};
  cfg.runs = 2;
  run_campaign(cfg);
  CHECK(slurp(out / "report_friedman.csv").find("skipped") != std::string::npos);
  const std::string ranks = slurp(out / "report_mean_rank.csv");
  CHECK(ranks.find("RIME,1") != std::string::npos);
  fs::remove_all(out);
}
