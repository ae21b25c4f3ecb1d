#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wadet/calibration.hpp"
#include "wadet/config.hpp"
#include "wadet/detector.hpp"
#include "wadet/reach.hpp"

namespace wadet {

/// Batch subcommands behind the CLI. Every command writes its artifacts plus
/// a manifest under `out_dir` and is byte-deterministic for a fixed seed.

struct CalibrationOutputs {
  ThresholdPlan plan;
  RadiusResult noise_radius;  // concentration radius of the w benchmark
  std::filesystem::path benchmark_csv;
  std::filesystem::path noise_benchmark_csv;
};

/// Collects the residual and noise benchmarks, computes the detection radii
/// and threshold, and persists benchmark CSVs plus a calibration report.
CalibrationOutputs cmd_calibrate(const ExperimentConfig& cfg,
                                 const std::filesystem::path& out_dir);

struct DetectionOutputs {
  ThresholdPlan plan;
  double alarm_rate = 0.0;
  long record_count = 0;
  long alarm_count = 0;
  bool warming_up = false;  // steps <= T: no records were emitted
  TraceVerdict verdict;     // meaningful when records exist
};

/// Runs the online detector against a stored benchmark and writes the
/// per-step trace (t, z, alarm), the residual stream, the gamma_bar audit
/// stream, and a summary.
DetectionOutputs cmd_detect(const ExperimentConfig& cfg,
                            const std::filesystem::path& benchmark_csv,
                            const std::filesystem::path& out_dir);

struct ReachsetOutputs {
  SdpSolution best;
  ReachBound bound_horizon;
  ReachBound bound_infinite;
  long clamped_trials = 0;
  long clamped_violations = 0;  // cloud points outside the projected bound
  long raw_trials = 0;
  long raw_inside = 0;  // raw-noise cloud points inside the projected bound
  double raw_containment = 0.0;
};

/// Builds the capped-Voronoi supports for the attack and noise benchmarks,
/// covers them with ellipsoids, solves the determinant-maximization
/// certificate over the a grid, and validates the resulting reach bound with
/// Monte Carlo clouds.
ReachsetOutputs cmd_reachset(const ExperimentConfig& cfg,
                             const std::filesystem::path& benchmark_csv,
                             const std::filesystem::path& noise_benchmark_csv,
                             const std::filesystem::path& out_dir);

/// Transport distance between two sample CSVs.
double cmd_wdist(const std::filesystem::path& file_a,
                 const std::filesystem::path& file_b, double q);

nlohmann::json ellipsoid_to_json(const Ellipsoid& e);
Ellipsoid ellipsoid_from_json(const nlohmann::json& j);

}  // namespace wadet
