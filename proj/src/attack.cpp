#include "wadet/attack.hpp"

#include <cmath>
#include <stdexcept>

#include "wadet/transport.hpp"

namespace wadet {

AttackPolicy AttackPolicy::none() { return {}; }

AttackPolicy AttackPolicy::additive_fixed(Eigen::VectorXd value, long start,
                                          long end) {
  if (start > end) throw std::invalid_argument("attack window start > end");
  AttackPolicy p;
  p.kind = Kind::additive_fixed;
  p.value = std::move(value);
  p.start = start;
  p.end = end;
  return p;
}

AttackPolicy AttackPolicy::additive_noise(NoiseSpec spec, long start, long end) {
  if (start > end) throw std::invalid_argument("attack window start > end");
  AttackPolicy p;
  p.kind = Kind::additive_noise;
  p.noise = std::move(spec);
  p.start = start;
  p.end = end;
  return p;
}

AttackPolicy AttackPolicy::stealthy_resample(
    std::shared_ptr<const EmpiricalDistribution> source, double jitter,
    long start, long end) {
  if (start > end) throw std::invalid_argument("attack window start > end");
  if (!source) throw std::invalid_argument("stealthy attack needs a source");
  if (jitter < 0.0) throw std::invalid_argument("jitter must be >= 0");
  AttackPolicy p;
  p.kind = Kind::stealthy_resample;
  p.source = std::move(source);
  p.jitter = jitter;
  p.start = start;
  p.end = end;
  return p;
}

Eigen::VectorXd sample_in_ball(int dim, double radius, RngStream& rng) {
  if (radius == 0.0) return Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd dir(dim);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) dir[i] = rng.gaussian();
    norm2 = dir.squaredNorm();
  } while (norm2 == 0.0);
  const double r =
      radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
  return dir * (r / std::sqrt(norm2));
}

GammaDraw gamma_at(const AttackPolicy& policy, const LinearPlant& plant,
                   const AugmentedState& state, long t,
                   const Eigen::VectorXd& v, RngStream& rng) {
  const Eigen::VectorXd natural = plant.C * state.e + v;
  GammaDraw draw;
  draw.gamma = Eigen::VectorXd::Zero(plant.p);

  if (policy.active(t)) {
    switch (policy.kind) {
      case AttackPolicy::Kind::additive_fixed:
        if (policy.value.size() != plant.p)
          throw std::invalid_argument("attack vector dimension mismatch");
        draw.gamma = policy.value;
        break;
      case AttackPolicy::Kind::additive_noise:
        if (policy.noise.dim() != plant.p)
          throw std::invalid_argument("attack noise dimension mismatch");
        draw.gamma = policy.noise.sample(rng);
        break;
      case AttackPolicy::Kind::stealthy_resample: {
        const auto& src = *policy.source;
        if (src.dim() != plant.p)
          throw std::invalid_argument("stealthy source dimension mismatch");
        Eigen::VectorXd bar =
            src.sample(static_cast<Eigen::Index>(
                rng.uniform_index(static_cast<std::size_t>(src.count())))) +
            sample_in_ball(plant.p, policy.jitter, rng);
        draw.gamma = -natural + bar;
        break;
      }
      case AttackPolicy::Kind::none:
        break;
    }
  }
  draw.gamma_bar = natural + draw.gamma;
  return draw;
}

StealthMargin stealth_margin(const EmpiricalDistribution& proxy,
                             const EmpiricalDistribution& benchmark, double q,
                             double eps_benchmark) {
  StealthMargin m;
  m.distance = wasserstein_distance(proxy, benchmark, q);
  m.within = m.distance <= eps_benchmark;
  return m;
}

}  // namespace wadet
