#include "wadet/detector.hpp"

#include <stdexcept>

#include "wadet/transport.hpp"

namespace wadet {

const char* to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::stealthy_all:
      return "stealthy_all";
    case TraceKind::m_step_stealthy:
      return "m_step_stealthy";
    case TraceKind::active_all:
      return "active_all";
    case TraceKind::mixed:
      return "mixed";
  }
  return "?";
}

std::optional<AlarmRecord> detect_step(const EmpiricalDistribution& benchmark,
                                       const SlidingWindow& window,
                                       double alpha, double q, long t) {
  if (!window.full()) return std::nullopt;  // warming up
  AlarmRecord rec;
  rec.t = t;
  rec.alpha = alpha;
  rec.z = wasserstein_distance(benchmark, window.distribution(), q);
  rec.alarm = rec.z > alpha;
  return rec;
}

long DetectionRun::alarm_count() const {
  long count = 0;
  for (const AlarmRecord& r : records) count += r.alarm ? 1 : 0;
  return count;
}

double DetectionRun::alarm_rate() const {
  if (records.empty()) return 0.0;
  return static_cast<double>(alarm_count()) /
         static_cast<double>(records.size());
}

DetectionRun run_detection(const LinearPlant& plant, const NoiseSpec& w_spec,
                           const NoiseSpec& v_spec,
                           const EmpiricalDistribution& benchmark,
                           const AttackPolicy& attack, long steps,
                           Eigen::Index window_size, double alpha, double q,
                           RngStream& sim_rng, RngStream& attack_rng) {
  if (steps < 1) throw std::invalid_argument("run_detection: steps must be >= 1");
  if (benchmark.dim() != plant.p)
    throw std::invalid_argument("run_detection: benchmark dimension mismatch");

  DetectionRun run;
  run.steps = steps;
  run.window_size = static_cast<long>(window_size);
  run.residuals.resize(plant.p, steps);
  run.gamma_bars.resize(plant.p, steps);
  run.records.reserve(static_cast<std::size_t>(
      std::max<long>(0, steps - static_cast<long>(window_size))));

  SlidingWindow window(plant.p, window_size);
  AugmentedState state = AugmentedState::zero(plant);
  for (long t = 0; t < steps; ++t) {
    const Eigen::VectorXd w = w_spec.sample(sim_rng);
    const Eigen::VectorXd v = v_spec.sample(sim_rng);
    const GammaDraw draw = gamma_at(attack, plant, state, t, v, attack_rng);
    auto [next, rec] = step(plant, state, t, w, v, draw.gamma);
    state = std::move(next);

    run.residuals.col(t) = rec.r;
    run.gamma_bars.col(t) = draw.gamma_bar;
    window.push(rec.r);
    if (t >= run.window_size) {
      auto alarm = detect_step(benchmark, window, alpha, q, t);
      run.records.push_back(*alarm);
    }
  }
  return run;
}

TraceVerdict classify_trace(const std::vector<AlarmRecord>& records) {
  if (records.empty())
    throw std::invalid_argument("classify_trace: empty record list");

  TraceVerdict v;
  v.step_count = static_cast<long>(records.size());
  long first_alarm = -1;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].alarm) {
      ++v.alarm_count;
      if (first_alarm < 0) first_alarm = static_cast<long>(i);
    }
  }

  if (v.alarm_count == 0) {
    v.kind = TraceKind::stealthy_all;
    v.stealthy_steps = v.step_count;
  } else if (v.alarm_count == v.step_count) {
    v.kind = TraceKind::active_all;
  } else if (first_alarm > 0) {
    v.kind = TraceKind::m_step_stealthy;
    v.stealthy_steps = first_alarm;  // clean records before the first alarm
  } else {
    v.kind = TraceKind::mixed;
  }
  return v;
}

}  // namespace wadet
