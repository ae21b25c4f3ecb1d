#include "wadet/calibration.hpp"

#include <cmath>
#include <stdexcept>

namespace wadet {

ConcentrationProfile ConcentrationProfile::make(double q, double a, double c1,
                                                double c2, int p) {
  if (!(q >= 1.0)) throw std::invalid_argument("profile: q must be >= 1");
  if (!(a > q)) throw std::invalid_argument("profile: need tail exponent a > q");
  if (!(c1 > 0.0) || !(c2 > 0.0))
    throw std::invalid_argument("profile: c1, c2 must be positive");
  if (p < 1) throw std::invalid_argument("profile: p must be >= 1");
  return {q, a, c1, c2, p};
}

ConcentrationProfile ConcentrationProfile::with_dimension(int dim) const {
  return make(q, a, c1, c2, dim);
}

const char* to_string(RadiusBranch branch) {
  switch (branch) {
    case RadiusBranch::small_sample:
      return "small_sample";
    case RadiusBranch::power:
      return "power";
    case RadiusBranch::transcendental:
      return "transcendental";
  }
  return "?";
}

namespace {

// Left side of the p == 2q equation; strictly increasing on (0, inf).
double transcendental_lhs(double eps) { return eps / std::log(2.0 + 1.0 / eps); }

double solve_transcendental(double rhs) {
  double lo = 1e-12, hi = 1e6;
  if (!(transcendental_lhs(lo) <= rhs && transcendental_lhs(hi) >= rhs))
    throw std::runtime_error("radius bisection bracket failed");
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (transcendental_lhs(mid) < rhs)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RadiusResult epsilon_radius(const ConcentrationProfile& profile,
                            double n_samples, double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("epsilon_radius: beta must lie in (0, 1)");
  if (!(n_samples >= 1.0))
    throw std::invalid_argument("epsilon_radius: need n_samples >= 1");

  const double k = std::log(profile.c1 / beta) / profile.c2;
  if (n_samples < k) {
    return {std::pow(k / n_samples, profile.q / profile.a),
            RadiusBranch::small_sample};
  }
  if (static_cast<double>(profile.p) != 2.0 * profile.q) {
    const double expo =
        1.0 / std::max(2.0, static_cast<double>(profile.p) / profile.q);
    return {std::pow(k / n_samples, expo), RadiusBranch::power};
  }
  return {solve_transcendental(std::sqrt(k / n_samples)),
          RadiusBranch::transcendental};
}

ThresholdPlan threshold(const ConcentrationProfile& profile, Eigen::Index N,
                        Eigen::Index T, double beta, double delta) {
  if (!(beta > 0.0 && beta < 1.0) || !(delta < 1.0))
    throw std::invalid_argument("threshold: need 0 < beta < delta < 1");
  if (!(delta > beta))
    throw std::invalid_argument("threshold: need delta > beta");

  ThresholdPlan plan;
  plan.benchmark_count = N;
  plan.window_count = T;
  plan.beta = beta;
  plan.delta = delta;

  const RadiusResult rb =
      epsilon_radius(profile, static_cast<double>(N), beta);
  const RadiusResult rd = epsilon_radius(profile, static_cast<double>(T),
                                         (delta - beta) / (1.0 - beta));
  plan.eps_benchmark = rb.epsilon;
  plan.branch_benchmark = rb.branch;
  plan.eps_detector = rd.epsilon;
  plan.branch_detector = rd.branch;
  plan.alpha = plan.eps_benchmark + plan.eps_detector;
  return plan;
}

}  // namespace wadet
