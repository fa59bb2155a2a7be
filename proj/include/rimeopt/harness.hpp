#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rimeopt/core.hpp"
#include "rimeopt/mrime.hpp"
#include "rimeopt/stats.hpp"
#include "rimeopt/suite.hpp"

namespace rimeopt::harness {

/// Campaign description: suite x dims x variants x runs, plus algorithm and
/// statistics knobs. Loaded from a JSON file with a schema_version field.
struct CampaignConfig {
  int schema_version = 1;
  suite::SuiteKind suite_kind = suite::SuiteKind::cec2017_like;
  /// Function ids; empty means the whole suite.
  std::vector<int> functions;
  std::vector<int> dims{10};
  std::vector<std::string> variants{"RIME", "MRIME-CD"};
  int runs = 21;
  int np = 30;
  /// Evaluations per run = fes_multiplier * dim.
  double fes_multiplier = 1000.0;
  std::uint64_t base_seed = 42;
  /// Seed for instance construction (shift/rotation data).
  std::uint64_t instance_seed = 1;
  std::filesystem::path output_dir = "campaign_out";
  double stats_alpha = 0.05;
  int workers = 1;
  /// w/e/l candidate; empty selects MRIME-CD when present, else the first
  /// variant.
  std::string candidate;
  mrime::MrimeParams params;

  static CampaignConfig from_json_file(const std::filesystem::path& path);
  static CampaignConfig from_json_text(const std::string& text);

  void validate() const;
  std::vector<int> resolved_functions() const;
  std::string resolved_candidate() const;
};

/// Deterministic per-run seed: a stable hash of (base_seed, variant,
/// instance id, run index), so adding variants or instances never perturbs
/// existing runs' streams.
std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& variant,
                          const std::string& instance_id, int run_index);

struct CampaignResult {
  stats::ResultMatrix matrix;
  std::filesystem::path output_dir;
  int failed_runs = 0;
};

/// Execute the whole campaign (fanning runs out over config.workers threads)
/// and persist, under output_dir:
///   instances.json              one manifest line per instance
///   runs/<variant>/<instance>/run_<k>.csv   convergence history per run
///   results.csv                 final best per (variant, instance, run)
///   summary.csv                 best/mean/std/rank per cell
///   timings.csv                 wall times (the only rerun-unstable file)
/// and the stats report files (see write_reports).
CampaignResult run_campaign(const CampaignConfig& config);

/// Emit the report files into dir: report_mean_rank.csv, report_friedman.csv,
/// report_wel.csv, report_kruskal.csv.
void write_reports(const stats::ResultMatrix& matrix, const CampaignConfig& config,
                   const std::filesystem::path& dir);

/// Rebuild the result matrix from a campaign's results.csv.
stats::ResultMatrix load_results(const std::filesystem::path& dir);

}  // namespace rimeopt::harness
