// Command-line front end for the detection and reachability pipeline:
//   wadet calibrate --config cfg.json --out run/
//   wadet detect    --config cfg.json --out run/ [--benchmark b.csv]
//   wadet reachset  --config cfg.json --out run/ [--benchmark b.csv]
//                   [--noise-benchmark w.csv]
//   wadet wdist A.csv B.csv [--q 1]

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wadet/csv.hpp"
#include "wadet/harness.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust sensor-attack detection toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "run";
  std::optional<std::uint64_t> seed_override;
  std::string benchmark_path;
  std::string noise_benchmark_path;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "experiment config JSON");
    if (needs_config) opt->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed_override, "override the config seed");
  };

  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "collect benchmarks and compute the alarm threshold");
  add_common(calibrate, true);

  CLI::App* detect =
      app.add_subcommand("detect", "run the online detector over a trace");
  add_common(detect, true);
  detect->add_option("--benchmark", benchmark_path,
                     "benchmark CSV (default <out>/benchmark.csv)");

  CLI::App* reachset = app.add_subcommand(
      "reachset", "bound the reachable set under stealthy attacks");
  add_common(reachset, true);
  reachset->add_option("--benchmark", benchmark_path,
                       "benchmark CSV (default <out>/benchmark.csv)");
  reachset->add_option("--noise-benchmark", noise_benchmark_path,
                       "noise benchmark CSV (default <out>/noise_benchmark.csv)");

  std::string wdist_a, wdist_b;
  double wdist_q = 1.0;
  CLI::App* wdist = app.add_subcommand(
      "wdist", "transport distance between two sample CSVs");
  wdist->add_option("fileA", wdist_a, "first sample CSV")->required();
  wdist->add_option("fileB", wdist_b, "second sample CSV")->required();
  wdist->add_option("--q", wdist_q, "transport order (>= 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (wdist->parsed()) {
      std::cout << wadet::format_double(wadet::cmd_wdist(wdist_a, wdist_b, wdist_q))
                << "\n";
      return 0;
    }

    wadet::ExperimentConfig cfg = wadet::ExperimentConfig::load(config_path);
    if (seed_override) cfg.seed = *seed_override;
    const fs::path out(out_dir);
    const fs::path bench =
        benchmark_path.empty() ? out / "benchmark.csv" : fs::path(benchmark_path);
    const fs::path noise_bench = noise_benchmark_path.empty()
                                     ? out / "noise_benchmark.csv"
                                     : fs::path(noise_benchmark_path);

    if (calibrate->parsed()) {
      const auto res = wadet::cmd_calibrate(cfg, out);
      std::cout << "alpha = " << wadet::format_double(res.plan.alpha) << "\n"
                << "benchmark: " << res.benchmark_csv.string() << "\n";
    } else if (detect->parsed()) {
      const auto res = wadet::cmd_detect(cfg, bench, out);
      if (res.warming_up)
        std::cout << "no records: run shorter than the detection window\n";
      else
        std::cout << "records = " << res.record_count
                  << ", alarms = " << res.alarm_count
                  << ", rate = " << wadet::format_double(res.alarm_rate) << "\n";
    } else if (reachset->parsed()) {
      const auto res = wadet::cmd_reachset(cfg, bench, noise_bench, out);
      std::cout << "a = " << wadet::format_double(res.best.a)
                << ", objective = " << wadet::format_double(res.best.objective)
                << ", clamped violations = " << res.clamped_violations << "/"
                << res.clamped_trials << ", raw containment = "
                << wadet::format_double(res.raw_containment) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
