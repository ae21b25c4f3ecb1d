#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wadet/attack.hpp"
#include "wadet/calibration.hpp"
#include "wadet/lti.hpp"
#include "wadet/noise.hpp"

namespace wadet {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DetectionOptions {
  Eigen::Index benchmark_samples = 1000;  // N
  Eigen::Index window = 100;              // T
  double beta = 0.01;
  double delta = 0.05;
  long burn_in = 1000;
  long gap = 10;
  long steps = 10000;
};

struct ReachOptions {
  std::vector<double> a_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> a1_fractions = {0.1, 0.2, 0.3, 0.4, 0.5,
                                      0.6, 0.7, 0.8, 0.9};
  double s = 2.0;
  long trials = 10000;
  long horizon = 50;
  Eigen::Index noise_benchmark_samples = 1000;
};

struct AttackConfig {
  AttackPolicy::Kind kind = AttackPolicy::Kind::none;
  Eigen::VectorXd value;  // additive_fixed
  NoiseSpec spec;         // additive_noise
  double jitter = 0.0;    // stealthy_resample
  long start = 0;
  std::optional<long> end;

  /// Builds the runtime policy; stealthy attacks resample the benchmark.
  AttackPolicy make_policy(
      std::shared_ptr<const EmpiricalDistribution> benchmark) const;
};

/// Whole-experiment configuration. Loading is strict: unknown keys are
/// rejected and every component invariant is checked up front.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  LinearPlant plant;
  NoiseSpec w_spec;
  NoiseSpec v_spec;
  ConcentrationProfile profile;
  DetectionOptions detection;
  AttackConfig attack;
  ReachOptions reach;

  static ExperimentConfig load(const std::filesystem::path& path);
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

}  // namespace wadet
