#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wadet/ellipsoid.hpp"
#include "wadet/empirical.hpp"
#include "wadet/lti.hpp"
#include "wadet/rng.hpp"

namespace wadet {

/// Union of Voronoi cells of the sites, each capped by a ball of the given
/// radius: U_i ( V_i  cap  B_radius(site_i) ). Membership never builds cell
/// geometry: x belongs to the cell of its nearest site (ties resolved to the
/// lowest index), so it is in the region iff that nearest distance is within
/// the radius.
class SupportRegion {
 public:
  SupportRegion(EmpiricalDistribution sites, double radius,
                double inflation = 1.0);

  /// Region for sites with base radius eps inflated by factor s (holds at
  /// least 1 - 1/s^q of the mass of any distribution whose transport distance
  /// to the site distribution is <= eps).
  static SupportRegion inflated(EmpiricalDistribution sites, double eps,
                                double s);

  const EmpiricalDistribution& sites() const { return sites_; }
  double radius() const { return radius_; }
  double inflation() const { return inflation_; }
  int dim() const { return sites_.dim(); }

  Eigen::Index nearest_site(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x) const;

  /// Bootstrap site + uniform in-ball jitter; resamples on the (rare) draw
  /// outside the region, falling back to the site point after 1000 attempts.
  Eigen::VectorXd sample(RngStream& rng) const;

 private:
  EmpiricalDistribution sites_;
  double radius_;
  double inflation_;
};

/// Fraction of proxy samples inside the region.
double support_mass_fraction(const EmpiricalDistribution& proxy,
                             const SupportRegion& region);

/// Empirical estimate of the unconstrained Voronoi transport value
/// L = E[ min_i || x - site_i ||^q ], a lower bound of the q-th power of the
/// transport distance between the proxy and the uniform site distribution.
double voronoi_lower_bound(const EmpiricalDistribution& proxy,
                           const EmpiricalDistribution& sites, double q);

/// Origin-centered ellipsoid provably containing the region: the minimum
/// volume enclosing ellipsoid of the sites fixes the shape, and the level is
/// enlarged so every ball around a site fits:
///   ( sqrt(s' Q s) + radius * sqrt(lambda_max(Q)) )^2 <= level.
/// Rank-deficient site sets are inflated along the missing directions by the
/// radius before the MVEE (with a tiny positive floor so the result is always
/// a valid ellipsoid).
Ellipsoid cover_support(const SupportRegion& region, double mvee_tol = 1e-7);

/// Invariance certificate for xi+ = H xi + G (w, gbar) with ellipsoid-bounded
/// inputs. The block matrix
///   [ aQ   H'Q   0 ]
///   [ QH    Q   QG ]
///   [ 0    G'Q   W ],   W = diag((1-a1) Qw, (1-a2) Qg),
/// is required to be positive semidefinite; det Q is maximized so the
/// certified set is as tight as the certificate allows.
struct SdpSolution {
  bool feasible = false;
  Eigen::MatrixXd Q;  // 2n x 2n, positive definite when feasible
  double a = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double objective = 0.0;           // -log det Q
  double feasibility_margin = 0.0;  // min eigenvalue of the block LMI
  std::string note;                 // infeasibility reason, when any
};

/// Determinant maximization for a fixed input-weight matrix W, by a log-det
/// barrier with damped Newton steps. Post-hoc eigenvalue verification of the
/// returned certificate is the caller's source of truth.
SdpSolution solve_fixed_split(const Eigen::MatrixXd& H, const Eigen::MatrixXd& G,
                              const Eigen::MatrixXd& W, double a);

/// Sweeps the split a1 + a2 = a over a1 = f * a for each fraction f, solving
/// the fixed-split problem and keeping the best objective. Covers are
/// normalized to level 1 internally.
SdpSolution solve_reach_sdp(const Eigen::MatrixXd& H, const Eigen::MatrixXd& G,
                            const Ellipsoid& cover_w,
                            const Ellipsoid& cover_gamma, double a,
                            std::span<const double> a1_fractions);

struct ReachBound {
  Ellipsoid full;       // over xi = (x, e)
  Ellipsoid projected;  // over x, Schur complement shape, same level
  double level = 0.0;
};

/// Level-set bound after `horizon` steps (nullopt = infinite horizon):
///   xi' Q xi <= a^M xi0' Q xi0 + (2 - a)(1 - a^M) / (1 - a).
ReachBound reach_ellipsoid(const SdpSolution& sol, const Eigen::VectorXd& xi0,
                           std::optional<long> horizon);

/// Simulates the attacked dynamics for `horizon` steps per trial with w and
/// gamma_bar drawn from the support regions, optionally clamped onto the
/// covering ellipsoids, and returns the final states x (one per column).
Eigen::MatrixXd monte_carlo_reach(const LinearPlant& plant,
                                  const SupportRegion& support_w,
                                  const SupportRegion& support_gamma,
                                  const Ellipsoid* clamp_w,
                                  const Ellipsoid* clamp_gamma,
                                  const Eigen::VectorXd& xi0, long horizon,
                                  long trials, RngStream& rng);

}  // namespace wadet
