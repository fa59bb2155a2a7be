#include "rimeopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace rimeopt::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_full(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string fmt_sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(6) << v;
  return os.str();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  return out;
}

linalg::WeightMode weight_mode_from(const std::string& name) {
  if (name == "corrected") return linalg::WeightMode::corrected;
  if (name == "verbatim") return linalg::WeightMode::verbatim;
  throw ConfigError("unknown weight_mode: " + name);
}

rime::PunctureNorm puncture_norm_from(const std::string& name) {
  if (name == "unit") return rime::PunctureNorm::unit;
  if (name == "minmax") return rime::PunctureNorm::min_max;
  throw ConfigError("unknown puncture_norm: " + name);
}

}  // namespace

CampaignConfig CampaignConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  CampaignConfig cfg;
  cfg.schema_version = j.at("schema_version").get<int>();
  if (cfg.schema_version != 1) {
    throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version));
  }
  if (j.contains("suite")) cfg.suite_kind = suite::suite_from_name(j["suite"].get<std::string>());
  if (j.contains("functions")) cfg.functions = j["functions"].get<std::vector<int>>();
  if (j.contains("dims")) cfg.dims = j["dims"].get<std::vector<int>>();
  if (j.contains("variants")) cfg.variants = j["variants"].get<std::vector<std::string>>();
  if (j.contains("runs")) cfg.runs = j["runs"].get<int>();
  if (j.contains("np")) cfg.np = j["np"].get<int>();
  if (j.contains("fes_multiplier")) cfg.fes_multiplier = j["fes_multiplier"].get<double>();
  if (j.contains("base_seed")) cfg.base_seed = j["base_seed"].get<std::uint64_t>();
  if (j.contains("instance_seed")) cfg.instance_seed = j["instance_seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("stats_alpha")) cfg.stats_alpha = j["stats_alpha"].get<double>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (j.contains("candidate")) cfg.candidate = j["candidate"].get<std::string>();
  if (j.contains("params")) {
    const json& p = j["params"];
    if (p.contains("w")) cfg.params.rime.w = p["w"].get<int>();
    if (p.contains("archive_capacity")) {
      cfg.params.archive_capacity = p["archive_capacity"].get<std::size_t>();
    }
    if (p.contains("group_size")) cfg.params.group_size = p["group_size"].get<std::size_t>();
    if (p.contains("nvol_threshold")) {
      cfg.params.nvol_threshold = p["nvol_threshold"].get<double>();
    }
    if (p.contains("count_factor")) cfg.params.count_factor = p["count_factor"].get<double>();
    if (p.contains("weight_mode")) {
      cfg.params.weight_mode = weight_mode_from(p["weight_mode"].get<std::string>());
    }
    if (p.contains("puncture_norm")) {
      cfg.params.rime.puncture_norm = puncture_norm_from(p["puncture_norm"].get<std::string>());
    }
  }
  return cfg;
}

CampaignConfig CampaignConfig::from_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read config " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

void CampaignConfig::validate() const {
  if (runs < 1) throw ConfigError("config: runs must be >= 1");
  if (np < 2) throw ConfigError("config: np must be >= 2");
  if (fes_multiplier <= 0.0) throw ConfigError("config: fes_multiplier must be positive");
  if (dims.empty()) throw ConfigError("config: dims is empty");
  if (variants.empty()) throw ConfigError("config: variants is empty");
  if (workers < 1) throw ConfigError("config: workers must be >= 1");
  if (!(stats_alpha > 0.0 && stats_alpha < 1.0)) {
    throw ConfigError("config: stats_alpha must be in (0,1)");
  }
  for (const std::string& v : variants) {
    mrime::make_variant(v);  // throws for unknown names
  }
  for (int fid : resolved_functions()) {
    if (fid < 1 || fid > suite::function_count(suite_kind)) {
      throw ConfigError("config: function id out of range: " + std::to_string(fid));
    }
  }
  if (!candidate.empty()) {
    bool found = false;
    for (const std::string& v : variants) found = found || v == candidate;
    if (!found) throw ConfigError("config: candidate not among variants");
  }
}

std::vector<int> CampaignConfig::resolved_functions() const {
  if (!functions.empty()) return functions;
  std::vector<int> all(static_cast<std::size_t>(suite::function_count(suite_kind)));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i) + 1;
  return all;
}

std::string CampaignConfig::resolved_candidate() const {
  if (!candidate.empty()) return candidate;
  for (const std::string& v : variants) {
    if (v == "MRIME-CD") return v;
  }
  return variants.front();
}

std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& variant,
                          const std::string& instance_id, int run_index) {
  std::uint64_t h = splitmix64(base_seed);
  const std::string key = variant + "|" + instance_id;
  for (unsigned char c : key) {
    h = splitmix64(h ^ c);
  }
  return splitmix64(h ^ static_cast<std::uint64_t>(run_index));
}

namespace {

struct Task {
  std::size_t variant_idx;
  std::size_t instance_idx;
  int run_idx;
};

struct TaskResult {
  RunRecord record;
  bool failed = false;
  std::string error;
};

void verify_run_invariants(const RunRecord& record, std::uint64_t fes_max) {
  // Budget exactness and best-so-far monotonicity hold for every persisted
  // run; violations indicate an implementation bug, not a user error.
  std::uint64_t prev_evals = 0;
  double prev_best = std::numeric_limits<double>::infinity();
  for (const auto& [evals, best] : record.history) {
    if (evals > fes_max) throw NumericError("run exceeded its evaluation budget");
    if (evals <= prev_evals && prev_evals != 0) {
      throw NumericError("run history evals not strictly increasing");
    }
    if (best > prev_best) throw NumericError("best-so-far increased within a run");
    prev_evals = evals;
    prev_best = best;
  }
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& config) {
  config.validate();

  // Materialize instances: dims outer, functions inner.
  std::vector<suite::BenchmarkInstance> instances;
  for (int dim : config.dims) {
    for (int fid : config.resolved_functions()) {
      instances.push_back(
          suite::make_instance(config.suite_kind, fid, dim, config.instance_seed));
    }
  }

  // Fail on unwritable output before any run starts.
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec || !fs::is_directory(config.output_dir)) {
    throw IoError("cannot create output directory " + config.output_dir.string());
  }
  {
    auto manifest = open_out(config.output_dir / "instances.json");
    for (const auto& inst : instances) {
      manifest << inst.manifest() << "\n";
    }
  }
  for (std::size_t v = 0; v < config.variants.size(); ++v) {
    for (const auto& inst : instances) {
      fs::create_directories(config.output_dir / "runs" / config.variants[v] / inst.id, ec);
      if (ec) throw IoError("cannot create run directory");
    }
  }

  std::vector<Task> tasks;
  for (std::size_t v = 0; v < config.variants.size(); ++v) {
    for (std::size_t i = 0; i < instances.size(); ++i) {
      for (int r = 0; r < config.runs; ++r) {
        tasks.push_back({v, i, r});
      }
    }
  }
  std::vector<TaskResult> results(tasks.size());

  auto execute = [&](const Task& task, TaskResult& out) {
    const suite::BenchmarkInstance& inst = instances[task.instance_idx];
    const mrime::Variant variant = mrime::make_variant(config.variants[task.variant_idx]);
    mrime::MrimeParams params = config.params;
    params.rime.np = config.np;
    params.rime.fes_max =
        static_cast<std::uint64_t>(std::llround(config.fes_multiplier * inst.dim));
    const std::uint64_t seed =
        derive_seed(config.base_seed, variant.name, inst.id, task.run_idx);
    const Objective objective = [&inst](const Vec& x) { return inst.evaluate(x); };

    const auto t0 = std::chrono::steady_clock::now();
    try {
      out.record = variant.run(objective, inst.space(), params, seed);
    } catch (const std::exception& e) {
      out.failed = true;
      out.error = e.what();
      return;
    }
    out.record.wall_time_s = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    out.record.variant = variant.name;
    out.record.instance_id = inst.id;
    verify_run_invariants(out.record, params.rime.fes_max);

    // Convergence CSV, one file per run, owned by this worker alone.
    std::ostringstream name;
    name << "run_" << std::setw(3) << std::setfill('0') << task.run_idx << ".csv";
    auto csv = open_out(config.output_dir / "runs" / variant.name / inst.id / name.str());
    csv << "evals,best_fitness\n";
    for (const auto& [evals, best] : out.record.history) {
      csv << evals << "," << fmt_full(best) << "\n";
    }
  };

  if (config.workers <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      execute(tasks[t], results[t]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int nworkers = std::min<int>(config.workers, static_cast<int>(tasks.size()));
    pool.reserve(static_cast<std::size_t>(nworkers));
    for (int wkr = 0; wkr < nworkers; ++wkr) {
      pool.emplace_back([&] {
        for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1)) {
          execute(tasks[t], results[t]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Deterministic reduction in task order.
  CampaignResult campaign;
  campaign.output_dir = config.output_dir;
  campaign.matrix.algorithms = config.variants;
  for (const auto& inst : instances) campaign.matrix.problems.push_back(inst.id);
  campaign.matrix.cells.assign(
      config.variants.size(),
      std::vector<std::vector<double>>(instances.size()));

  {
    auto res = open_out(config.output_dir / "results.csv");
    auto timing = open_out(config.output_dir / "timings.csv");
    res << "variant,instance,run,seed,final_best,status\n";
    timing << "variant,instance,run,wall_time_s\n";
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      const Task& task = tasks[t];
      const TaskResult& r = results[t];
      const std::string& variant = config.variants[task.variant_idx];
      const std::string& inst_id = instances[task.instance_idx].id;
      const std::uint64_t seed = derive_seed(config.base_seed, variant, inst_id, task.run_idx);
      if (r.failed) {
        ++campaign.failed_runs;
        res << variant << "," << inst_id << "," << task.run_idx << "," << seed
            << ",nan,failed\n";
      } else {
        campaign.matrix.cells[task.variant_idx][task.instance_idx].push_back(
            r.record.final_best);
        res << variant << "," << inst_id << "," << task.run_idx << "," << seed << ","
            << fmt_full(r.record.final_best) << ",ok\n";
        timing << variant << "," << inst_id << "," << task.run_idx << ","
               << fmt_sci(r.record.wall_time_s) << "\n";
      }
    }
  }

  // Summary: best/mean/std per cell plus per-instance mean rank.
  {
    auto summary = open_out(config.output_dir / "summary.csv");
    summary << "instance,variant,best,mean,std,rank\n";
    for (std::size_t i = 0; i < instances.size(); ++i) {
      std::vector<double> means(config.variants.size(),
                                std::numeric_limits<double>::quiet_NaN());
      bool complete = true;
      for (std::size_t v = 0; v < config.variants.size(); ++v) {
        const auto& cell = campaign.matrix.cells[v][i];
        if (cell.empty()) {
          complete = false;
        } else {
          means[v] = std::accumulate(cell.begin(), cell.end(), 0.0) / cell.size();
        }
      }
      const std::vector<double> ranks =
          complete ? stats::average_ranks(means)
                   : std::vector<double>(config.variants.size(),
                                         std::numeric_limits<double>::quiet_NaN());
      for (std::size_t v = 0; v < config.variants.size(); ++v) {
        const auto& cell = campaign.matrix.cells[v][i];
        if (cell.empty()) {
          summary << instances[i].id << "," << config.variants[v] << ",nan,nan,nan,nan\n";
          continue;
        }
        const double mean = means[v];
        double var = 0.0;
        for (double f : cell) var += (f - mean) * (f - mean);
        var /= static_cast<double>(cell.size());
        const double best = *std::min_element(cell.begin(), cell.end());
        summary << instances[i].id << "," << config.variants[v] << "," << fmt_sci(best) << ","
                << fmt_sci(mean) << "," << fmt_sci(std::sqrt(var)) << "," << ranks[v] << "\n";
      }
    }
  }

  write_reports(campaign.matrix, config, config.output_dir);
  return campaign;
}

void write_reports(const stats::ResultMatrix& matrix, const CampaignConfig& config,
                   const fs::path& dir) {
  matrix.validate();

  {
    auto out = open_out(dir / "report_mean_rank.csv");
    out << "algorithm,mean_rank\n";
    const std::vector<double> ranks = stats::mean_rank_table(matrix);
    for (std::size_t a = 0; a < matrix.algorithms.size(); ++a) {
      out << matrix.algorithms[a] << "," << ranks[a] << "\n";
    }
  }
  {
    auto out = open_out(dir / "report_friedman.csv");
    if (matrix.algorithms.size() < 2) {
      out << "notice,single algorithm - Friedman test skipped\n";
    } else {
      const stats::FriedmanResult fr = stats::friedman_test(matrix);
      out << "chi2,p\n" << fmt_full(fr.chi2) << "," << fmt_full(fr.p) << "\n";
    }
  }
  {
    auto out = open_out(dir / "report_wel.csv");
    out << "candidate,opponent,win,equal,loss\n";
    const std::string candidate = config.resolved_candidate();
    for (const auto& [opponent, counts] : stats::wel_table(matrix, candidate,
                                                           config.stats_alpha)) {
      out << candidate << "," << opponent << "," << counts.win << "," << counts.equal << ","
          << counts.loss << "\n";
    }
  }
  {
    auto out = open_out(dir / "report_kruskal.csv");
    out << "instance,h,p\n";
    if (matrix.algorithms.size() >= 2) {
      for (std::size_t p = 0; p < matrix.problems.size(); ++p) {
        std::vector<std::vector<double>> groups;
        groups.reserve(matrix.algorithms.size());
        for (std::size_t a = 0; a < matrix.algorithms.size(); ++a) {
          groups.push_back(matrix.cells[a][p]);
        }
        const stats::KruskalResult kr = stats::kruskal_wallis(groups);
        out << matrix.problems[p] << "," << fmt_full(kr.h) << "," << fmt_full(kr.p) << "\n";
      }
    }
  }
}

stats::ResultMatrix load_results(const fs::path& dir) {
  std::ifstream in(dir / "results.csv");
  if (!in) {
    throw IoError("cannot read " + (dir / "results.csv").string());
  }
  stats::ResultMatrix matrix;
  std::vector<std::vector<std::vector<double>>>& cells = matrix.cells;

  auto index_of = [](std::vector<std::string>& names, const std::string& name) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return i;
    }
    names.push_back(name);
    return names.size() - 1;
  };

  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string variant, instance, run, seed, final_best, status;
    std::getline(row, variant, ',');
    std::getline(row, instance, ',');
    std::getline(row, run, ',');
    std::getline(row, seed, ',');
    std::getline(row, final_best, ',');
    std::getline(row, status, ',');
    if (status != "ok") continue;
    const std::size_t a = index_of(matrix.algorithms, variant);
    const std::size_t p = index_of(matrix.problems, instance);
    if (cells.size() <= a) cells.resize(a + 1);
    if (cells[a].size() <= p) {
      for (auto& rowcells : cells) rowcells.resize(matrix.problems.size());
    }
    cells[a][p].push_back(std::stod(final_best));
  }
  for (auto& rowcells : cells) rowcells.resize(matrix.problems.size());
  return matrix;
}

}  // namespace rimeopt::harness
