#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rimeopt/harness.hpp"
#include "rimeopt/mrime.hpp"
#include "rimeopt/suite.hpp"

using namespace rimeopt;

int main(int argc, char** argv) {
  CLI::App app{"RIME / MRIME-CD optimization toolkit"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Execute a campaign described by a JSON config");
  std::string config_path;
  int workers_override = -1;
  std::int64_t seed_override = -1;
  run->add_option("--config", config_path, "Campaign config file")->required();
  run->add_option("--workers", workers_override, "Override worker count");
  run->add_option("--seed", seed_override, "Override base seed");

  // report
  auto* report = app.add_subcommand("report", "Regenerate stats reports from results.csv");
  std::string input_dir;
  double alpha = 0.05;
  std::string candidate;
  report->add_option("--input", input_dir, "Campaign output directory")->required();
  report->add_option("--alpha", alpha, "Significance level");
  report->add_option("--candidate", candidate, "w/e/l candidate algorithm");

  // list-functions
  auto* listf = app.add_subcommand("list-functions", "List benchmark functions of a suite");
  std::string suite_opt = "cec2017-like";
  listf->add_option("--suite", suite_opt, "cec2017-like or cec2022-like");

  // list-variants
  app.add_subcommand("list-variants", "List algorithm variants");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      harness::CampaignConfig cfg = harness::CampaignConfig::from_json_file(config_path);
      if (workers_override > 0) cfg.workers = workers_override;
      if (seed_override >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed_override);
      const harness::CampaignResult result = harness::run_campaign(cfg);
      std::cout << "campaign complete: " << result.matrix.algorithms.size() << " variants x "
                << result.matrix.problems.size() << " instances -> " << result.output_dir
                << "\n";
      if (result.failed_runs > 0) {
        std::cout << "warning: " << result.failed_runs << " run(s) failed\n";
        return 2;
      }
    } else if (report->parsed()) {
      const stats::ResultMatrix matrix = harness::load_results(input_dir);
      harness::CampaignConfig cfg;
      cfg.stats_alpha = alpha;
      cfg.variants = matrix.algorithms;
      if (!candidate.empty()) cfg.candidate = candidate;
      harness::write_reports(matrix, cfg, input_dir);
      std::cout << "reports written to " << input_dir << "\n";
    } else if (listf->parsed()) {
      const suite::SuiteKind kind = suite::suite_from_name(suite_opt);
      for (int fid = 1; fid <= suite::function_count(kind); ++fid) {
        const suite::BenchmarkInstance inst = suite::make_instance(kind, fid, 10, 1);
        std::cout << "F" << fid << "\t" << suite::function_class(kind, fid) << "\tbias="
                  << inst.bias << "\n";
      }
    } else {  // list-variants
      for (const mrime::Variant& v : mrime::canonical_variants()) {
        std::cout << v.name << "\tGCLS=" << (v.flags.gcls ? "Y" : "N")
                  << " ABS=" << (v.flags.abs ? "Y" : "N")
                  << " SPDM=" << (v.flags.spdm ? "Y" : "N") << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
