#pragma once

#include <Eigen/Dense>
#include <utility>

#include "wadet/noise.hpp"
#include "wadet/rng.hpp"

namespace wadet {

/// Closed-loop plant description:
///   x(t+1) = A x(t) + B u(t) + w(t),  y(t) = C x(t) + v(t) + gamma(t),
/// with observer gain L, estimated-state feedback u = K x_hat, and the
/// augmented coordinates xi = (x, e) where e = x - x_hat.
struct LinearPlant {
  Eigen::MatrixXd A;  // n x n
  Eigen::MatrixXd B;  // n x m
  Eigen::MatrixXd C;  // p x n
  Eigen::MatrixXd L;  // n x p observer gain
  Eigen::MatrixXd K;  // m x n feedback gain
  int n = 0, m = 0, p = 0;

  /// Validates dimensions and requires both A - L C and A + B K to be Schur
  /// stable (spectral radius < 1).
  static LinearPlant make(Eigen::MatrixXd A, Eigen::MatrixXd B,
                          Eigen::MatrixXd C, Eigen::MatrixXd L,
                          Eigen::MatrixXd K);

  /// Augmented transition under normal operation:
  ///   xi+ = F xi + G (w, v + gamma).
  Eigen::MatrixXd closed_loop_F() const;
  /// Augmented transition once the attack cancels the observer feedback:
  ///   xi+ = H xi + G (w, gamma_bar).
  Eigen::MatrixXd attacked_H() const;
  /// Shared input matrix G = [[I, 0], [I, -L]].
  Eigen::MatrixXd input_G() const;
};

double spectral_radius(const Eigen::MatrixXd& M);

struct AugmentedState {
  Eigen::VectorXd x;  // true state
  Eigen::VectorXd e;  // estimation error x - x_hat

  static AugmentedState zero(const LinearPlant& plant);
  static AugmentedState from_xi(const Eigen::VectorXd& xi);

  Eigen::VectorXd xi() const;
  Eigen::VectorXd x_hat() const { return x - e; }
};

/// Values observed at one simulation step, before the state update.
struct StepRecord {
  long t = 0;
  Eigen::VectorXd x, x_hat;
  Eigen::VectorXd y, y_hat;
  Eigen::VectorXd r;      // residual y - y_hat
  Eigen::VectorXd gamma;  // additive sensor term applied at this step
};

/// Advances one step through the physical recursion (plant + observer +
/// feedback). Equivalent to xi+ = F xi + G (w, v + gamma).
std::pair<AugmentedState, StepRecord> step(const LinearPlant& plant,
                                           const AugmentedState& state, long t,
                                           const Eigen::VectorXd& w,
                                           const Eigen::VectorXd& v,
                                           const Eigen::VectorXd& gamma);

/// Same transition computed through the augmented matrices; used to
/// cross-check `step`.
AugmentedState step_augmented(const LinearPlant& plant,
                              const AugmentedState& state,
                              const Eigen::VectorXd& w,
                              const Eigen::VectorXd& v,
                              const Eigen::VectorXd& gamma);

/// Advances one step under an attack of the residual-substitution form
/// gamma = -C e - v + gamma_bar, which leaves r = gamma_bar exactly and
/// removes the output injection from the error dynamics. The record's gamma
/// field stores gamma_bar (the part of the attack visible in the residual).
std::pair<AugmentedState, StepRecord> step_attacked(
    const LinearPlant& plant, const AugmentedState& state, long t,
    const Eigen::VectorXd& w, const Eigen::VectorXd& gamma_bar);

/// Simulates the attack-free closed loop from xi(0) = 0, discards `burn_in`
/// steps, then keeps every `gap`-th residual until `count` samples are held.
/// Returns p x count (one sample per column).
Eigen::MatrixXd collect_benchmark(const LinearPlant& plant,
                                  const NoiseSpec& w_spec,
                                  const NoiseSpec& v_spec, long burn_in,
                                  Eigen::Index count, long gap, RngStream& rng);

}  // namespace wadet
