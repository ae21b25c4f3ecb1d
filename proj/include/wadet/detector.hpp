#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "wadet/attack.hpp"
#include "wadet/empirical.hpp"
#include "wadet/lti.hpp"

namespace wadet {

struct AlarmRecord {
  long t = 0;
  double z = 0.0;  // Wasserstein distance between benchmark and window
  bool alarm = false;
  double alpha = 0.0;
};

enum class TraceKind { stealthy_all, m_step_stealthy, active_all, mixed };

const char* to_string(TraceKind kind);

struct TraceVerdict {
  TraceKind kind = TraceKind::stealthy_all;
  long stealthy_steps = 0;  // M for m_step_stealthy
  long alarm_count = 0;
  long step_count = 0;
};

/// One evaluation of the online detector: z = d_Wq(benchmark, window),
/// alarm iff z > alpha (strictly; a tie at alpha does not alarm). Returns
/// nullopt while the window is still warming up.
std::optional<AlarmRecord> detect_step(const EmpiricalDistribution& benchmark,
                                       const SlidingWindow& window,
                                       double alpha, double q, long t);

struct DetectionRun {
  std::vector<AlarmRecord> records;  // one per step t >= T
  Eigen::MatrixXd residuals;         // p x steps, full stream
  Eigen::MatrixXd gamma_bars;        // p x steps, residual-equivalent attack audit
  long steps = 0;
  long window_size = 0;

  long alarm_count() const;
  /// Alarms divided by emitted records.
  double alarm_rate() const;
};

/// Runs the closed loop for `steps` steps under the given attack policy,
/// maintaining a T-step window and evaluating the detector at every step
/// t >= T. Deterministic for fixed streams.
DetectionRun run_detection(const LinearPlant& plant, const NoiseSpec& w_spec,
                           const NoiseSpec& v_spec,
                           const EmpiricalDistribution& benchmark,
                           const AttackPolicy& attack, long steps,
                           Eigen::Index window_size, double alpha, double q,
                           RngStream& sim_rng, RngStream& attack_rng);

/// Summarizes an alarm sequence: no alarms -> stealthy_all; all alarms ->
/// active_all; first alarm after k clean records -> m_step_stealthy with
/// M = k; an immediate alarm that does not persist -> mixed.
TraceVerdict classify_trace(const std::vector<AlarmRecord>& records);

}  // namespace wadet
