#include "wadet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "wadet/attack.hpp"
#include "wadet/csv.hpp"
#include "wadet/transport.hpp"

namespace wadet {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    std::uint64_t seed, std::vector<std::string> files) {
  std::sort(files.begin(), files.end());
  write_json(out_dir / "manifest.json",
             {{"command", command}, {"seed", seed}, {"files", files}});
}

void write_effective_config(const ExperimentConfig& cfg, const fs::path& dir) {
  write_json(dir / "effective_config.json", cfg.to_json());
}

ThresholdPlan plan_from_config(const ExperimentConfig& cfg) {
  return threshold(cfg.profile, cfg.detection.benchmark_samples,
                   cfg.detection.window, cfg.detection.beta,
                   cfg.detection.delta);
}

RadiusResult noise_radius_from_config(const ExperimentConfig& cfg) {
  return epsilon_radius(cfg.profile.with_dimension(cfg.plant.n),
                        static_cast<double>(cfg.reach.noise_benchmark_samples),
                        cfg.detection.beta);
}

EmpiricalDistribution load_samples(const fs::path& path, int expected_dim,
                                   const char* what) {
  const Eigen::MatrixXd samples = read_samples_csv(path);
  if (samples.rows() != expected_dim)
    throw std::runtime_error(std::string(what) + " at " + path.string() +
                             " has dimension " + std::to_string(samples.rows()) +
                             ", expected " + std::to_string(expected_dim));
  return EmpiricalDistribution::from_samples(samples);
}

}  // namespace

json ellipsoid_to_json(const Ellipsoid& e) {
  json q = json::array();
  for (Eigen::Index r = 0; r < e.shape().rows(); ++r)
    for (Eigen::Index c = 0; c < e.shape().cols(); ++c)
      q.push_back(e.shape()(r, c));
  return {{"dim", e.dim()}, {"Q", q}, {"level", e.level()}};
}

Ellipsoid ellipsoid_from_json(const json& j) {
  const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
  Eigen::MatrixXd shape(dim, dim);
  const auto& q = j.at("Q");
  if (static_cast<Eigen::Index>(q.size()) != dim * dim)
    throw std::runtime_error("ellipsoid JSON has wrong Q size");
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c)
      shape(r, c) = q[static_cast<std::size_t>(r * dim + c)].get<double>();
  return Ellipsoid(shape, j.at("level").get<double>());
}

CalibrationOutputs cmd_calibrate(const ExperimentConfig& cfg,
                                 const fs::path& out_dir) {
  fs::create_directories(out_dir);

  RngStream bench_rng(cfg.seed, "benchmark");
  const Eigen::MatrixXd residuals = collect_benchmark(
      cfg.plant, cfg.w_spec, cfg.v_spec, cfg.detection.burn_in,
      cfg.detection.benchmark_samples, cfg.detection.gap, bench_rng);

  RngStream noise_rng(cfg.seed, "noise-benchmark");
  const Eigen::MatrixXd noise_samples =
      sample_matrix(cfg.w_spec, cfg.reach.noise_benchmark_samples, noise_rng);

  CalibrationOutputs out;
  out.plan = plan_from_config(cfg);
  out.noise_radius = noise_radius_from_config(cfg);
  out.benchmark_csv = out_dir / "benchmark.csv";
  out.noise_benchmark_csv = out_dir / "noise_benchmark.csv";
  write_samples_csv(out.benchmark_csv, residuals);
  write_samples_csv(out.noise_benchmark_csv, noise_samples);

  const json report = {
      {"N", out.plan.benchmark_count},
      {"T", out.plan.window_count},
      {"beta", out.plan.beta},
      {"delta", out.plan.delta},
      {"eps_benchmark", out.plan.eps_benchmark},
      {"branch_benchmark", to_string(out.plan.branch_benchmark)},
      {"eps_detector", out.plan.eps_detector},
      {"branch_detector", to_string(out.plan.branch_detector)},
      {"alpha", out.plan.alpha},
      {"eps_noise_benchmark", out.noise_radius.epsilon},
      {"branch_noise_benchmark", to_string(out.noise_radius.branch)},
  };
  write_json(out_dir / "calibration.json", report);

  std::string block;
  block += "eps_benchmark = " + format_double(out.plan.eps_benchmark) + "\n";
  block += "branch_benchmark = " +
           std::string(to_string(out.plan.branch_benchmark)) + "\n";
  block += "eps_detector = " + format_double(out.plan.eps_detector) + "\n";
  block += "branch_detector = " +
           std::string(to_string(out.plan.branch_detector)) + "\n";
  block += "alpha = " + format_double(out.plan.alpha) + "\n";
  block +=
      "eps_noise_benchmark = " + format_double(out.noise_radius.epsilon) + "\n";
  block += "branch_noise_benchmark = " +
           std::string(to_string(out.noise_radius.branch)) + "\n";
  write_text(out_dir / "calibration.txt", block);

  write_effective_config(cfg, out_dir);
  write_manifest(out_dir, "calibrate", cfg.seed,
                 {"benchmark.csv", "noise_benchmark.csv", "calibration.json",
                  "calibration.txt", "effective_config.json"});
  return out;
}

DetectionOutputs cmd_detect(const ExperimentConfig& cfg,
                            const fs::path& benchmark_csv,
                            const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const auto benchmark = std::make_shared<const EmpiricalDistribution>(
      load_samples(benchmark_csv, cfg.plant.p, "benchmark"));

  DetectionOutputs out;
  out.plan = plan_from_config(cfg);

  RngStream sim_rng(cfg.seed, "detection");
  RngStream attack_rng(cfg.seed, "attack");
  const AttackPolicy policy = cfg.attack.make_policy(benchmark);
  const DetectionRun run = run_detection(
      cfg.plant, cfg.w_spec, cfg.v_spec, *benchmark, policy,
      cfg.detection.steps, cfg.detection.window, out.plan.alpha, cfg.profile.q,
      sim_rng, attack_rng);

  out.record_count = static_cast<long>(run.records.size());
  out.alarm_count = run.alarm_count();
  out.alarm_rate = run.alarm_rate();
  out.warming_up = run.records.empty();
  if (!run.records.empty()) out.verdict = classify_trace(run.records);

  {
    std::string csv = "t,z,alarm\n";
    for (const AlarmRecord& rec : run.records) {
      csv += std::to_string(rec.t) + "," + format_double(rec.z) + "," +
             (rec.alarm ? "1" : "0") + "\n";
    }
    write_text(out_dir / "trace.csv", csv);
  }
  {
    std::string csv = "t";
    for (int i = 1; i <= cfg.plant.p; ++i) csv += ",r_" + std::to_string(i);
    csv += "\n";
    for (long t = 0; t < run.steps; ++t) {
      csv += std::to_string(t);
      for (int i = 0; i < cfg.plant.p; ++i)
        csv += "," + format_double(run.residuals(i, t));
      csv += "\n";
    }
    write_text(out_dir / "residuals.csv", csv);
  }
  {
    std::string csv = "t";
    for (int i = 1; i <= cfg.plant.p; ++i) csv += ",gbar_" + std::to_string(i);
    csv += "\n";
    for (long t = 0; t < run.steps; ++t) {
      csv += std::to_string(t);
      for (int i = 0; i < cfg.plant.p; ++i)
        csv += "," + format_double(run.gamma_bars(i, t));
      csv += "\n";
    }
    write_text(out_dir / "gamma_bar.csv", csv);
  }

  json summary = {{"steps", cfg.detection.steps},
                  {"window", cfg.detection.window},
                  {"alpha", out.plan.alpha},
                  {"records", out.record_count},
                  {"alarms", out.alarm_count},
                  {"alarm_rate", out.alarm_rate},
                  {"warming_up", out.warming_up}};
  if (out.warming_up) {
    summary["notice"] =
        "run shorter than the detection window; detector never left warm-up";
  } else {
    summary["verdict"] = to_string(out.verdict.kind);
    summary["stealthy_steps"] = out.verdict.stealthy_steps;
  }
  write_json(out_dir / "summary.json", summary);

  write_effective_config(cfg, out_dir);
  write_manifest(out_dir, "detect", cfg.seed,
                 {"trace.csv", "residuals.csv", "gamma_bar.csv", "summary.json",
                  "effective_config.json"});
  return out;
}

namespace {

// Empirical reachable cloud driven by the raw noise distribution and the
// benchmark-resampling attack (no support truncation, no clamping); used to
// report how much of the unrestricted behavior the certified bound captures.
Eigen::MatrixXd raw_input_cloud(const ExperimentConfig& cfg,
                                const EmpiricalDistribution& benchmark,
                                double jitter, long horizon, long trials,
                                RngStream& rng) {
  const Eigen::MatrixXd H = cfg.plant.attacked_H();
  const Eigen::MatrixXd G = cfg.plant.input_G();
  Eigen::MatrixXd cloud(cfg.plant.n, trials);
  Eigen::VectorXd sigma(cfg.plant.n + cfg.plant.p);
  for (long trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(2 * cfg.plant.n);
    for (long t = 0; t < horizon; ++t) {
      const Eigen::VectorXd w = cfg.w_spec.sample(rng);
      const Eigen::VectorXd gbar =
          benchmark.sample(static_cast<Eigen::Index>(rng.uniform_index(
              static_cast<std::size_t>(benchmark.count())))) +
          sample_in_ball(cfg.plant.p, jitter, rng);
      sigma << w, gbar;
      xi = H * xi + G * sigma;
    }
    cloud.col(trial) = xi.head(cfg.plant.n);
  }
  return cloud;
}

}  // namespace

ReachsetOutputs cmd_reachset(const ExperimentConfig& cfg,
                             const fs::path& benchmark_csv,
                             const fs::path& noise_benchmark_csv,
                             const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const EmpiricalDistribution benchmark =
      load_samples(benchmark_csv, cfg.plant.p, "benchmark");
  const EmpiricalDistribution noise_benchmark =
      load_samples(noise_benchmark_csv, cfg.plant.n, "noise benchmark");

  const ThresholdPlan plan = plan_from_config(cfg);
  const RadiusResult noise_radius = noise_radius_from_config(cfg);

  const SupportRegion support_gamma =
      SupportRegion::inflated(benchmark, plan.alpha, cfg.reach.s);
  const SupportRegion support_w =
      SupportRegion::inflated(noise_benchmark, noise_radius.epsilon, cfg.reach.s);

  const Ellipsoid cover_gamma = cover_support(support_gamma);
  const Ellipsoid cover_w = cover_support(support_w);

  const Eigen::MatrixXd H = cfg.plant.attacked_H();
  const Eigen::MatrixXd G = cfg.plant.input_G();

  ReachsetOutputs out;
  json cells = json::array();
  double best_metric = 0.0;
  for (const double a : cfg.reach.a_grid) {
    SdpSolution sol =
        solve_reach_sdp(H, G, cover_w, cover_gamma, a, cfg.reach.a1_fractions);
    json cell = {{"a", a}, {"feasible", sol.feasible}};
    if (sol.feasible) {
      cell["a1"] = sol.a1;
      cell["a2"] = sol.a2;
      cell["objective"] = sol.objective;
      cell["feasibility_margin"] = sol.feasibility_margin;
      // Pick the a whose infinite-horizon projected ellipsoid has the
      // smallest volume: (n/2) log(level) - (1/2) log det(shape).
      const ReachBound bound =
          reach_ellipsoid(sol, Eigen::VectorXd::Zero(2 * cfg.plant.n),
                          std::nullopt);
      const double metric =
          0.5 * (cfg.plant.n * std::log(bound.level) -
                 std::log(bound.projected.shape().determinant()));
      cell["projected_log_volume"] = metric;
      if (!out.best.feasible || metric < best_metric) {
        out.best = sol;
        best_metric = metric;
      }
    } else {
      cell["note"] = sol.note;
    }
    cells.push_back(cell);
  }

  json sdp_report = {{"cells", cells}};
  if (!out.best.feasible) {
    sdp_report["feasible"] = false;
    sdp_report["error"] =
        "no contraction rate in the configured grid admits a certificate";
    write_json(out_dir / "sdp.json", sdp_report);
    write_manifest(out_dir, "reachset", cfg.seed, {"sdp.json"});
    throw std::runtime_error(
        "reachset: SDP infeasible for the entire a grid (rho(H)^2 = " +
        format_double(std::pow(spectral_radius(H), 2)) + ")");
  }

  const Eigen::VectorXd xi0 = Eigen::VectorXd::Zero(2 * cfg.plant.n);
  out.bound_horizon = reach_ellipsoid(out.best, xi0, cfg.reach.horizon);
  out.bound_infinite = reach_ellipsoid(out.best, xi0, std::nullopt);

  RngStream mc_rng(cfg.seed, "monte-carlo");
  const Eigen::MatrixXd cloud = monte_carlo_reach(
      cfg.plant, support_w, support_gamma, &cover_w, &cover_gamma, xi0,
      cfg.reach.horizon, cfg.reach.trials, mc_rng);
  out.clamped_trials = cfg.reach.trials;
  for (Eigen::Index k = 0; k < cloud.cols(); ++k)
    if (!out.bound_horizon.projected.contains(cloud.col(k), 1e-8))
      ++out.clamped_violations;

  const double raw_jitter =
      cfg.attack.kind == AttackPolicy::Kind::stealthy_resample
          ? cfg.attack.jitter
          : 0.0;
  RngStream raw_rng(cfg.seed, "monte-carlo-raw");
  const Eigen::MatrixXd raw_cloud =
      raw_input_cloud(cfg, benchmark, raw_jitter, cfg.reach.horizon,
                      cfg.reach.trials, raw_rng);
  out.raw_trials = cfg.reach.trials;
  for (Eigen::Index k = 0; k < raw_cloud.cols(); ++k)
    if (out.bound_horizon.projected.contains(raw_cloud.col(k), 1e-8))
      ++out.raw_inside;
  out.raw_containment = static_cast<double>(out.raw_inside) /
                        static_cast<double>(out.raw_trials);

  // Artifacts.
  sdp_report["feasible"] = true;
  {
    json q = json::array();
    for (Eigen::Index r = 0; r < out.best.Q.rows(); ++r)
      for (Eigen::Index c = 0; c < out.best.Q.cols(); ++c)
        q.push_back(out.best.Q(r, c));
    sdp_report["best"] = {{"a", out.best.a},
                          {"a1", out.best.a1},
                          {"a2", out.best.a2},
                          {"objective", out.best.objective},
                          {"feasibility_margin", out.best.feasibility_margin},
                          {"Q", q}};
  }
  write_json(out_dir / "sdp.json", sdp_report);
  write_json(out_dir / "cover_w.json", ellipsoid_to_json(cover_w));
  write_json(out_dir / "cover_gamma.json", ellipsoid_to_json(cover_gamma));
  write_json(out_dir / "reach_xi.json", ellipsoid_to_json(out.bound_horizon.full));
  write_json(out_dir / "reach_x.json",
             ellipsoid_to_json(out.bound_horizon.projected));
  write_json(out_dir / "reach_xi_infinite.json",
             ellipsoid_to_json(out.bound_infinite.full));
  write_json(out_dir / "reach_x_infinite.json",
             ellipsoid_to_json(out.bound_infinite.projected));

  {
    std::string csv;
    for (int i = 1; i <= cfg.plant.n; ++i)
      csv += (i == 1 ? "x_" : ",x_") + std::to_string(i);
    csv += "\n";
    for (Eigen::Index k = 0; k < cloud.cols(); ++k) {
      for (int i = 0; i < cfg.plant.n; ++i)
        csv += (i == 0 ? "" : ",") + format_double(cloud(i, k));
      csv += "\n";
    }
    write_text(out_dir / "cloud.csv", csv);
  }

  write_json(out_dir / "containment.json",
             {{"horizon", cfg.reach.horizon},
              {"clamped_trials", out.clamped_trials},
              {"clamped_violations", out.clamped_violations},
              {"raw_trials", out.raw_trials},
              {"raw_inside", out.raw_inside},
              {"raw_containment", out.raw_containment}});

  write_effective_config(cfg, out_dir);
  write_manifest(out_dir, "reachset", cfg.seed,
                 {"sdp.json", "cover_w.json", "cover_gamma.json",
                  "reach_xi.json", "reach_x.json", "reach_xi_infinite.json",
                  "reach_x_infinite.json", "cloud.csv", "containment.json",
                  "effective_config.json"});
  return out;
}

double cmd_wdist(const fs::path& file_a, const fs::path& file_b, double q) {
  const Eigen::MatrixXd a = read_samples_csv(file_a);
  const Eigen::MatrixXd b = read_samples_csv(file_b);
  if (a.rows() != b.rows())
    throw std::runtime_error("wdist: sample dimensions differ");
  return wasserstein_distance(EmpiricalDistribution::from_samples(a),
                              EmpiricalDistribution::from_samples(b), q);
}

}  // namespace wadet
