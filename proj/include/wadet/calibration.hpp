#pragma once

#include <Eigen/Dense>

namespace wadet {

/// Tail parameters of the measure-concentration bound. `a` is the tail
/// exponent of the light-tail condition (must exceed the transport order q),
/// c1 and c2 the distribution-dependent constants, and p the dimension of the
/// samples the bound is applied to. The constants are configuration inputs;
/// no estimation is attempted here.
struct ConcentrationProfile {
  double q = 1.0;
  double a = 2.0;
  double c1 = 1.0;
  double c2 = 1.0;
  int p = 1;

  static ConcentrationProfile make(double q, double a, double c1, double c2,
                                   int p);
  ConcentrationProfile with_dimension(int dim) const;
};

enum class RadiusBranch {
  small_sample,    // n below the log(c1/beta)/c2 crossover
  power,           // p != 2q closed form
  transcendental,  // p == 2q, solved by bisection
};

const char* to_string(RadiusBranch branch);

struct RadiusResult {
  double epsilon = 0.0;
  RadiusBranch branch = RadiusBranch::power;
};

/// High-confidence radius: with probability >= 1 - beta the Wasserstein
/// distance between the empirical distribution on n_samples draws and its
/// generator is at most epsilon. Natural logarithm throughout. For p == 2q
/// the radius solves eps / log(2 + 1/eps) = sqrt(k/n), whose left side is
/// strictly increasing, by bisection to relative tolerance 1e-12.
RadiusResult epsilon_radius(const ConcentrationProfile& profile,
                            double n_samples, double beta);

/// Alarm threshold alpha = eps_benchmark + eps_detector, where the detector
/// radius reuses the same bound with T samples at confidence
/// (delta - beta) / (1 - beta). Guarantees per-step false-alarm rate <= delta.
struct ThresholdPlan {
  Eigen::Index benchmark_count = 0;  // N
  Eigen::Index window_count = 0;     // T
  double beta = 0.0;
  double delta = 0.0;
  double eps_benchmark = 0.0;
  double eps_detector = 0.0;
  double alpha = 0.0;
  RadiusBranch branch_benchmark = RadiusBranch::power;
  RadiusBranch branch_detector = RadiusBranch::power;
};

ThresholdPlan threshold(const ConcentrationProfile& profile, Eigen::Index N,
                        Eigen::Index T, double beta, double delta);

}  // namespace wadet
