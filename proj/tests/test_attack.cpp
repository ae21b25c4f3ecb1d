#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <set>

#include "test_support.hpp"
#include "wadet/attack.hpp"
#include "wadet/detector.hpp"
#include "wadet/transport.hpp"

using namespace wadet;
using wadet::testing::demo_plant;
using wadet::testing::demo_v_spec;
using wadet::testing::demo_w_spec;

namespace {

std::shared_ptr<const EmpiricalDistribution> small_benchmark() {
  Eigen::MatrixXd samples(1, 5);
  samples << -0.4, -0.1, 0.0, 0.2, 0.3;
  return std::make_shared<const EmpiricalDistribution>(
      EmpiricalDistribution::from_samples(samples));
}

}  // namespace

TEST_CASE("no attack means gamma is exactly zero") {
  const LinearPlant plant = demo_plant();
  RngStream rng(1, "attack-none");
  AugmentedState state{Eigen::VectorXd::Constant(2, 0.7),
                       Eigen::VectorXd::Constant(2, -0.3)};
  const auto draw = gamma_at(AttackPolicy::none(), plant, state, 5,
                             Eigen::VectorXd::Constant(1, 0.1), rng);
  CHECK(draw.gamma.isZero(0.0));
  // gamma_bar audits the residual the step will produce: C e + v.
  CHECK(draw.gamma_bar(0) ==
        doctest::Approx((plant.C * state.e)(0) + 0.1).epsilon(1e-15));
}

TEST_CASE("additive window honors start and end") {
  const LinearPlant plant = demo_plant();
  RngStream rng(2, "attack-window");
  const AugmentedState state = AugmentedState::zero(plant);
  const Eigen::VectorXd v = Eigen::VectorXd::Zero(1);
  const auto policy =
      AttackPolicy::additive_fixed(Eigen::VectorXd::Constant(1, 2.5), 10, 20);
  CHECK(gamma_at(policy, plant, state, 9, v, rng).gamma.isZero(0.0));
  CHECK(gamma_at(policy, plant, state, 10, v, rng).gamma(0) == 2.5);
  CHECK(gamma_at(policy, plant, state, 19, v, rng).gamma(0) == 2.5);
  CHECK(gamma_at(policy, plant, state, 20, v, rng).gamma.isZero(0.0));
}

TEST_CASE("in-ball samples respect the radius") {
  RngStream rng(3, "ball");
  for (int dim : {1, 2, 5}) {
    double max_norm = 0.0;
    for (int i = 0; i < 2000; ++i)
      max_norm = std::max(max_norm, sample_in_ball(dim, 0.7, rng).norm());
    CHECK(max_norm <= 0.7 + 1e-12);
    CHECK(max_norm > 0.5);  // draws do fill the ball
  }
  CHECK(sample_in_ball(3, 0.0, rng).isZero(0.0));
}

TEST_CASE("zero-jitter resampling replays benchmark atoms verbatim") {
  const LinearPlant plant = demo_plant();
  const auto benchmark = small_benchmark();
  const auto policy = AttackPolicy::stealthy_resample(benchmark, 0.0);
  RngStream rng(4, "attack-replay");

  std::set<double> atoms;
  for (Eigen::Index i = 0; i < benchmark->count(); ++i)
    atoms.insert(benchmark->sample(i)(0));

  AugmentedState state{Eigen::VectorXd::Constant(2, 0.3),
                       Eigen::VectorXd::Constant(2, -0.2)};
  for (long t = 0; t < 50; ++t) {
    const auto draw = gamma_at(policy, plant, state, t,
                               Eigen::VectorXd::Constant(1, 0.05), rng);
    CHECK(atoms.count(draw.gamma_bar(0)) == 1);
  }
}

TEST_CASE("stealthy residual stream equals the generated gamma_bar") {
  const LinearPlant plant = demo_plant();
  const auto benchmark = small_benchmark();
  RngStream sim(5, "attack-run");
  RngStream att(5, "attack-run-attack");
  const DetectionRun run = run_detection(
      plant, demo_w_spec(), demo_v_spec(), *benchmark,
      AttackPolicy::stealthy_resample(benchmark, 0.01), 200, 10, 1.0, 1.0, sim,
      att);
  CHECK((run.residuals - run.gamma_bars).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("stealth margin: identity, shift, and the within flag") {
  const auto benchmark = small_benchmark();
  const double eps_b = 0.05;

  const auto same = stealth_margin(*benchmark, *benchmark, 1.0, eps_b);
  CHECK(same.distance == 0.0);
  CHECK(same.within);

  // Shifting a 1-D distribution moves the W1 distance by exactly the shift.
  for (const double shift : {2.0 * eps_b, -0.07, 0.3}) {
    const auto moved = EmpiricalDistribution::from_samples(
        benchmark->samples().array() + shift);
    const auto margin = stealth_margin(moved, *benchmark, 1.0, eps_b);
    CHECK(std::abs(margin.distance - std::abs(shift)) <= 1e-10);
    CHECK(margin.within == (std::abs(shift) <= eps_b));
  }
}

TEST_CASE("policy construction validates its inputs") {
  CHECK_THROWS_AS(
      AttackPolicy::additive_fixed(Eigen::VectorXd::Constant(1, 1.0), 5, 4),
      std::invalid_argument);
  CHECK_THROWS_AS(AttackPolicy::stealthy_resample(nullptr, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(AttackPolicy::stealthy_resample(small_benchmark(), -0.1),
                  std::invalid_argument);
}
