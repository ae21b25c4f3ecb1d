#include <doctest.h>

#include <Eigen/Dense>

#include "test_support.hpp"
#include "wadet/detector.hpp"

using namespace wadet;
using wadet::testing::demo_plant;
using wadet::testing::demo_profile;
using wadet::testing::demo_v_spec;
using wadet::testing::demo_w_spec;

namespace {

EmpiricalDistribution constant_dist(double value, Eigen::Index count) {
  return EmpiricalDistribution::from_samples(
      Eigen::MatrixXd::Constant(1, count, value));
}

std::vector<AlarmRecord> fake_trace(const std::vector<bool>& alarms) {
  std::vector<AlarmRecord> records;
  for (std::size_t i = 0; i < alarms.size(); ++i)
    records.push_back({static_cast<long>(i), alarms[i] ? 1.0 : 0.0,
                       alarms[i], 0.5});
  return records;
}

}  // namespace

TEST_CASE("window drawn from the benchmark itself scores zero") {
  // Benchmark = the same T samples repeated; window = those T samples.
  Eigen::MatrixXd base(1, 4);
  base << -1.0, 0.0, 0.5, 2.0;
  Eigen::MatrixXd repeated(1, 12);
  repeated << base, base, base;
  const auto benchmark = EmpiricalDistribution::from_samples(repeated);

  SlidingWindow window(1, 4);
  for (Eigen::Index i = 0; i < 4; ++i) window.push(base.col(i));

  const auto rec = detect_step(benchmark, window, 0.01, 1.0, 4);
  REQUIRE(rec.has_value());
  CHECK(rec->z == 0.0);
  CHECK_FALSE(rec->alarm);
}

TEST_CASE("an offset window beyond alpha alarms") {
  const double alpha = 0.37;
  const auto benchmark = constant_dist(0.0, 10);
  SlidingWindow window(1, 5);
  for (int i = 0; i < 5; ++i)
    window.push(Eigen::VectorXd::Constant(1, alpha + 1.0));
  const auto rec = detect_step(benchmark, window, alpha, 1.0, 5);
  REQUIRE(rec.has_value());
  CHECK(rec->z == doctest::Approx(alpha + 1.0).epsilon(1e-12));
  CHECK(rec->alarm);

  // A tie at exactly alpha does not alarm.
  SlidingWindow tie(1, 5);
  for (int i = 0; i < 5; ++i) tie.push(Eigen::VectorXd::Constant(1, alpha));
  const auto tie_rec = detect_step(benchmark, tie, alpha, 1.0, 5);
  REQUIRE(tie_rec.has_value());
  CHECK_FALSE(tie_rec->alarm);
}

TEST_CASE("detector stays quiet while warming up") {
  const auto benchmark = constant_dist(0.0, 3);
  SlidingWindow window(1, 4);
  window.push(Eigen::VectorXd::Constant(1, 9.0));
  CHECK_FALSE(detect_step(benchmark, window, 0.1, 1.0, 0).has_value());
}

TEST_CASE("detect_step is a pure function of its inputs") {
  const auto benchmark = constant_dist(0.25, 6);
  SlidingWindow window(1, 3);
  for (int i = 0; i < 3; ++i) window.push(Eigen::VectorXd::Constant(1, 0.1 * i));
  const auto a = detect_step(benchmark, window, 0.2, 1.0, 7);
  const auto b = detect_step(benchmark, window, 0.2, 1.0, 7);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->z == b->z);
  CHECK(a->alarm == b->alarm);
}

TEST_CASE("noiseless run against a zero benchmark never alarms") {
  const LinearPlant plant = demo_plant();
  const auto benchmark = constant_dist(0.0, 20);
  RngStream sim(3, "det-zero");
  RngStream att(3, "det-zero-attack");
  const DetectionRun run = run_detection(
      plant, NoiseSpec::zeros(2), NoiseSpec::zeros(1), benchmark,
      AttackPolicy::none(), 50, 5, 0.01, 1.0, sim, att);
  CHECK(run.records.size() == 45);
  for (const auto& rec : run.records) {
    CHECK(rec.z == 0.0);
    CHECK_FALSE(rec.alarm);
  }
  CHECK(run.alarm_rate() == 0.0);
}

TEST_CASE("a huge constant offset alarms at every evaluated step") {
  const LinearPlant plant = demo_plant();
  RngStream bench_rng(5, "det-bench");
  const auto benchmark = EmpiricalDistribution::from_samples(collect_benchmark(
      plant, demo_w_spec(), demo_v_spec(), 200, 200, 5, bench_rng));
  const double alpha =
      threshold(demo_profile(), 200, 50, 0.01, 0.05).alpha;

  RngStream sim(6, "det-offset");
  RngStream att(6, "det-offset-attack");
  const DetectionRun run = run_detection(
      plant, demo_w_spec(), demo_v_spec(), benchmark,
      AttackPolicy::additive_fixed(Eigen::VectorXd::Constant(1, 1000.0)), 120,
      50, alpha, 1.0, sim, att);
  CHECK(run.records.size() == 70);
  for (const auto& rec : run.records) CHECK(rec.alarm);
  CHECK(classify_trace(run.records).kind == TraceKind::active_all);
}

TEST_CASE("raising alpha never increases the alarm count") {
  const LinearPlant plant = demo_plant();
  RngStream bench_rng(7, "det-mono-bench");
  const auto benchmark = EmpiricalDistribution::from_samples(collect_benchmark(
      plant, demo_w_spec(), demo_v_spec(), 200, 150, 3, bench_rng));

  long prev = std::numeric_limits<long>::max();
  for (const double alpha : {0.01, 0.05, 0.1, 0.2, 0.5}) {
    RngStream sim(8, "det-mono");
    RngStream att(8, "det-mono-attack");
    const DetectionRun run = run_detection(
        plant, demo_w_spec(), demo_v_spec(), benchmark, AttackPolicy::none(),
        400, 40, alpha, 1.0, sim, att);
    CHECK(run.alarm_count() <= prev);
    prev = run.alarm_count();
  }
}

TEST_CASE("identical seeds reproduce a detection run exactly") {
  const LinearPlant plant = demo_plant();
  RngStream bench_rng(9, "det-seed-bench");
  const auto benchmark = EmpiricalDistribution::from_samples(collect_benchmark(
      plant, demo_w_spec(), demo_v_spec(), 100, 80, 2, bench_rng));
  auto make_run = [&] {
    RngStream sim(10, "det-seed");
    RngStream att(10, "det-seed-attack");
    return run_detection(plant, demo_w_spec(), demo_v_spec(), benchmark,
                         AttackPolicy::none(), 200, 20, 0.2, 1.0, sim, att);
  };
  const DetectionRun r1 = make_run();
  const DetectionRun r2 = make_run();
  CHECK(r1.residuals == r2.residuals);
  REQUIRE(r1.records.size() == r2.records.size());
  for (std::size_t i = 0; i < r1.records.size(); ++i)
    CHECK(r1.records[i].z == r2.records[i].z);
}

TEST_CASE("trace classification") {
  CHECK(classify_trace(fake_trace({false, false, false})).kind ==
        TraceKind::stealthy_all);
  CHECK(classify_trace(fake_trace({true, true})).kind == TraceKind::active_all);

  const auto verdict = classify_trace(fake_trace({false, false, true, false}));
  CHECK(verdict.kind == TraceKind::m_step_stealthy);
  CHECK(verdict.stealthy_steps == 2);  // first alarm at index 2
  CHECK(verdict.alarm_count == 1);

  CHECK(classify_trace(fake_trace({true, false, true})).kind ==
        TraceKind::mixed);
  CHECK_THROWS_AS(classify_trace({}), std::invalid_argument);
}
