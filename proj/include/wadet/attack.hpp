#pragma once

#include <Eigen/Dense>
#include <limits>
#include <memory>

#include "wadet/empirical.hpp"
#include "wadet/lti.hpp"
#include "wadet/noise.hpp"
#include "wadet/rng.hpp"

namespace wadet {

/// Sensor-attack signal generator. Active on steps t with start <= t < end.
///
/// * none            - gamma = 0 always.
/// * additive_fixed  - gamma = value while active.
/// * additive_noise  - gamma drawn from a noise spec while active.
/// * stealthy_resample - gamma = -C e(t) - v(t) + gamma_bar, with gamma_bar a
///   uniformly resampled benchmark point plus an independent uniform in-ball
///   jitter. The resulting residual equals gamma_bar exactly, so the residual
///   stream is a (jittered) bootstrap of the benchmark. Reading e(t) and v(t)
///   models an attacker with full system knowledge.
struct AttackPolicy {
  enum class Kind { none, additive_fixed, additive_noise, stealthy_resample };

  Kind kind = Kind::none;
  long start = 0;
  long end = std::numeric_limits<long>::max();
  Eigen::VectorXd value;                                // additive_fixed
  NoiseSpec noise;                                      // additive_noise
  std::shared_ptr<const EmpiricalDistribution> source;  // stealthy_resample
  double jitter = 0.0;                                  // stealthy_resample

  static AttackPolicy none();
  static AttackPolicy additive_fixed(Eigen::VectorXd value, long start = 0,
                                     long end = std::numeric_limits<long>::max());
  static AttackPolicy additive_noise(NoiseSpec spec, long start = 0,
                                     long end = std::numeric_limits<long>::max());
  static AttackPolicy stealthy_resample(
      std::shared_ptr<const EmpiricalDistribution> source, double jitter,
      long start = 0, long end = std::numeric_limits<long>::max());

  bool active(long t) const { return kind != Kind::none && t >= start && t < end; }
};

struct GammaDraw {
  Eigen::VectorXd gamma;      // additive term injected into y(t)
  Eigen::VectorXd gamma_bar;  // residual the step will produce: C e + v + gamma
};

/// Evaluates the policy at step t given the simulator internals.
GammaDraw gamma_at(const AttackPolicy& policy, const LinearPlant& plant,
                   const AugmentedState& state, long t,
                   const Eigen::VectorXd& v, RngStream& rng);

struct StealthMargin {
  double distance = 0.0;
  bool within = false;
};

/// Distance between an empirical proxy of the attacker's gamma_bar
/// distribution and the benchmark, compared against the benchmark radius. An
/// attacker keeping this within eps_benchmark stays below the alarm threshold
/// with high probability.
StealthMargin stealth_margin(const EmpiricalDistribution& proxy,
                             const EmpiricalDistribution& benchmark, double q,
                             double eps_benchmark);

/// Uniform draw from the ball of the given radius (dimension-generic).
Eigen::VectorXd sample_in_ball(int dim, double radius, RngStream& rng);

}  // namespace wadet
