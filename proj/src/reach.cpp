#include "wadet/reach.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wadet/attack.hpp"

namespace wadet {

SupportRegion::SupportRegion(EmpiricalDistribution sites, double radius,
                             double inflation)
    : sites_(std::move(sites)), radius_(radius), inflation_(inflation) {
  if (!(radius > 0.0) && radius != 0.0)
    throw std::invalid_argument("support radius must be >= 0");
}

SupportRegion SupportRegion::inflated(EmpiricalDistribution sites, double eps,
                                      double s) {
  if (!(eps >= 0.0) || !(s > 0.0))
    throw std::invalid_argument("support inflation needs eps >= 0, s > 0");
  return SupportRegion(std::move(sites), s * eps, s);
}

Eigen::Index SupportRegion::nearest_site(const Eigen::VectorXd& x) const {
  if (x.size() != sites_.dim())
    throw std::invalid_argument("support membership dimension mismatch");
  Eigen::Index best = 0;
  double best_d2 = (x - sites_.samples().col(0)).squaredNorm();
  for (Eigen::Index i = 1; i < sites_.count(); ++i) {
    const double d2 = (x - sites_.samples().col(i)).squaredNorm();
    if (d2 < best_d2) {  // strict: ties keep the lowest index
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

bool SupportRegion::contains(const Eigen::VectorXd& x) const {
  const Eigen::Index i = nearest_site(x);
  return (x - sites_.samples().col(i)).norm() <= radius_;
}

Eigen::VectorXd SupportRegion::sample(RngStream& rng) const {
  const Eigen::Index site = static_cast<Eigen::Index>(
      rng.uniform_index(static_cast<std::size_t>(sites_.count())));
  const Eigen::VectorXd center = sites_.samples().col(site);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Eigen::VectorXd x = center + sample_in_ball(dim(), radius_, rng);
    // A point within `radius` of any site is within it of its nearest site,
    // so an in-ball draw can only fall outside through rounding.
    if ((x - center).norm() <= radius_ || contains(x)) return x;
  }
  return center;  // always inside
}

double support_mass_fraction(const EmpiricalDistribution& proxy,
                             const SupportRegion& region) {
  Eigen::Index inside = 0;
  for (Eigen::Index k = 0; k < proxy.count(); ++k)
    if (region.contains(proxy.samples().col(k))) ++inside;
  return static_cast<double>(inside) / static_cast<double>(proxy.count());
}

double voronoi_lower_bound(const EmpiricalDistribution& proxy,
                           const EmpiricalDistribution& sites, double q) {
  if (proxy.dim() != sites.dim())
    throw std::invalid_argument("voronoi_lower_bound dimension mismatch");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < proxy.count(); ++k) {
    double best2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < sites.count(); ++i)
      best2 = std::min(
          best2, (proxy.samples().col(k) - sites.samples().col(i)).squaredNorm());
    acc += std::pow(std::sqrt(best2), q);
  }
  return acc / static_cast<double>(proxy.count());
}

Ellipsoid cover_support(const SupportRegion& region, double mvee_tol) {
  const Eigen::MatrixXd& sites = region.sites().samples();
  const Eigen::Index d = sites.rows();
  const Eigen::Index m = sites.cols();

  double max_norm = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    max_norm = std::max(max_norm, sites.col(i).norm());
  // Zero radii get a tiny positive floor so the cover remains a valid
  // (normalizable) ellipsoid.
  const double radius = std::max(region.radius(), 1e-9 * (1.0 + max_norm));
  // Synthetic points along missing directions need enough width for the
  // shape matrix to stay numerically invertible.
  const double inflation = std::max(radius, 1e-3 * (1.0 + max_norm));

  // Inflate missing affine directions by the radius before the MVEE.
  const Eigen::VectorXd mean = sites.rowwise().mean();
  Eigen::MatrixXd centered = sites.colwise() - mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullU);
  const double sigma_max =
      svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  std::vector<Eigen::Index> deficient;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double sigma = k < svd.singularValues().size()
                             ? svd.singularValues()(k)
                             : 0.0;
    if (sigma <= 1e-9 * std::max(1.0, sigma_max)) deficient.push_back(k);
  }

  Eigen::MatrixXd points(d, m + 2 * static_cast<Eigen::Index>(deficient.size()));
  points.leftCols(m) = sites;
  Eigen::Index col = m;
  for (const Eigen::Index k : deficient) {
    const Eigen::VectorXd dir = svd.matrixU().col(k);
    points.col(col++) = mean + inflation * dir;
    points.col(col++) = mean - inflation * dir;
  }

  const MveeResult mvee = minimum_volume_ellipsoid(points, mvee_tol);
  const Eigen::MatrixXd& Q = mvee.shape;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q);
  const double sqrt_lambda_max = std::sqrt(eig.eigenvalues().maxCoeff());

  double level = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double site_dist = std::sqrt(sites.col(i).dot(Q * sites.col(i)));
    const double need = site_dist + radius * sqrt_lambda_max;
    level = std::max(level, need * need);
  }
  return Ellipsoid(Q, level);
}

// ---------------------------------------------------------------------------
// Determinant maximization under the invariance LMI.
// ---------------------------------------------------------------------------

namespace {

struct SymBasis {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> ij;

  explicit SymBasis(Eigen::Index dim) {
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = i; j < dim; ++j) ij.emplace_back(i, j);
  }
  std::size_t size() const { return ij.size(); }

  Eigen::MatrixXd matrix(std::size_t k, Eigen::Index dim) const {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(dim, dim);
    const auto [i, j] = ij[k];
    E(i, j) = 1.0;
    E(j, i) = 1.0;
    return E;
  }
};

Eigen::MatrixXd assemble_lmi(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& H,
                             const Eigen::MatrixXd& G, const Eigen::MatrixXd& W,
                             double a) {
  const Eigen::Index dn = Q.rows();
  const Eigen::Index dw = W.rows();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * dn + dw, 2 * dn + dw);
  S.block(0, 0, dn, dn) = a * Q;
  S.block(0, dn, dn, dn) = H.transpose() * Q;
  S.block(dn, 0, dn, dn) = Q * H;
  S.block(dn, dn, dn, dn) = Q;
  S.block(dn, 2 * dn, dn, dw) = Q * G;
  S.block(2 * dn, dn, dw, dn) = G.transpose() * Q;
  S.block(2 * dn, 2 * dn, dw, dw) = W;
  return S;
}

// log det via Cholesky; empty optional when not positive definite.
std::optional<double> logdet_pd(const Eigen::MatrixXd& M) {
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) return std::nullopt;
  double ld = 0.0;
  const auto& L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    if (!(L(i, i) > 0.0)) return std::nullopt;
    ld += std::log(L(i, i));
  }
  return 2.0 * ld;
}

}  // namespace

SdpSolution solve_fixed_split(const Eigen::MatrixXd& H, const Eigen::MatrixXd& G,
                              const Eigen::MatrixXd& W, double a) {
  const Eigen::Index dn = H.rows();
  if (H.cols() != dn || G.rows() != dn || W.rows() != W.cols() ||
      W.rows() != G.cols())
    throw std::invalid_argument("solve_fixed_split: inconsistent dimensions");
  if (!(a >= 0.0 && a < 1.0))
    throw std::invalid_argument("solve_fixed_split: a must lie in [0, 1)");

  SdpSolution sol;
  sol.a = a;

  const double rho = spectral_radius(H);
  if (rho * rho >= a) {
    sol.note = "contraction rate a <= rho(H)^2; no certificate exists";
    return sol;
  }

  // Strictly feasible start: P solves P = I + H' P H / a, so a P - H' P H =
  // a I; scaling Q = t P down makes the input coupling harmless.
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(dn, dn);
  for (int it = 0; it < 100000; ++it) {
    const Eigen::MatrixXd next =
        Eigen::MatrixXd::Identity(dn, dn) + H.transpose() * P * H / a;
    const double diff = (next - P).norm();
    P = next;
    if (P.norm() > 1e14) {
      sol.note = "Lyapunov series diverged";
      return sol;
    }
    if (diff <= 1e-14 * P.norm()) break;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> peig(P);
  double t = 1.0 / peig.eigenvalues().maxCoeff();
  Eigen::MatrixXd Q = t * P;
  bool started = false;
  for (int halving = 0; halving < 400; ++halving) {
    if (logdet_pd(assemble_lmi(Q, H, G, W, a)).has_value()) {
      started = true;
      break;
    }
    t *= 0.5;
    Q = t * P;
  }
  if (!started) {
    sol.note = "no strictly feasible starting point found";
    return sol;
  }

  const SymBasis basis(dn);
  const std::size_t nv = basis.size();
  std::vector<Eigen::MatrixXd> E(nv), LE(nv);
  const Eigen::MatrixXd Wzero = Eigen::MatrixXd::Zero(W.rows(), W.cols());
  for (std::size_t k = 0; k < nv; ++k) {
    E[k] = basis.matrix(k, dn);
    LE[k] = assemble_lmi(E[k], H, G, Wzero, a);
  }

  auto barrier_value = [&](const Eigen::MatrixXd& Qc,
                           double mu) -> std::optional<double> {
    const auto ldq = logdet_pd(Qc);
    if (!ldq) return std::nullopt;
    const auto lds = logdet_pd(assemble_lmi(Qc, H, G, W, a));
    if (!lds) return std::nullopt;
    return -*ldq - mu * *lds;
  };

  for (double mu = 1.0; mu > 1e-10; mu *= 0.5) {
    for (int newton = 0; newton < 60; ++newton) {
      const Eigen::MatrixXd S = assemble_lmi(Q, H, G, W, a);
      const Eigen::MatrixXd Qinv = Q.llt().solve(
          Eigen::MatrixXd::Identity(dn, dn));
      const Eigen::MatrixXd Sinv = S.llt().solve(
          Eigen::MatrixXd::Identity(S.rows(), S.cols()));

      Eigen::VectorXd grad(nv);
      std::vector<Eigen::MatrixXd> QiEQi(nv), SiL(nv);
      for (std::size_t k = 0; k < nv; ++k) {
        QiEQi[k] = Qinv * E[k] * Qinv;
        SiL[k] = Sinv * LE[k];
        grad[static_cast<Eigen::Index>(k)] =
            -(Qinv.cwiseProduct(E[k])).sum() - mu * SiL[k].trace();
      }

      Eigen::MatrixXd hess(nv, nv);
      for (std::size_t k = 0; k < nv; ++k)
        for (std::size_t l = k; l < nv; ++l) {
          const double hq = (QiEQi[k].cwiseProduct(E[l])).sum();
          const double hs = (SiL[k].cwiseProduct(SiL[l].transpose())).sum();
          hess(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) =
              hq + mu * hs;
          hess(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) =
              hess(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
        }

      const Eigen::VectorXd delta = hess.ldlt().solve(-grad);
      const double decrement = -grad.dot(delta);
      if (!(decrement > 1e-11)) break;

      Eigen::MatrixXd dQ = Eigen::MatrixXd::Zero(dn, dn);
      for (std::size_t k = 0; k < nv; ++k)
        dQ += delta[static_cast<Eigen::Index>(k)] * E[k];

      const double f0 = *barrier_value(Q, mu);
      double step = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const auto f1 = barrier_value(Q + step * dQ, mu);
        if (f1 && *f1 <= f0 - 1e-4 * step * decrement) {
          Q += step * dQ;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
  }

  sol.feasible = true;
  sol.Q = 0.5 * (Q + Q.transpose());
  sol.objective = -*logdet_pd(sol.Q);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> seig(
      assemble_lmi(sol.Q, H, G, W, a));
  sol.feasibility_margin = seig.eigenvalues().minCoeff();
  return sol;
}

SdpSolution solve_reach_sdp(const Eigen::MatrixXd& H, const Eigen::MatrixXd& G,
                            const Ellipsoid& cover_w,
                            const Ellipsoid& cover_gamma, double a,
                            std::span<const double> a1_fractions) {
  if (a1_fractions.empty())
    throw std::invalid_argument("solve_reach_sdp: empty a1 grid");
  const Eigen::MatrixXd Qw = cover_w.normalized().shape();
  const Eigen::MatrixXd Qg = cover_gamma.normalized().shape();
  const Eigen::Index dw = Qw.rows();
  const Eigen::Index dg = Qg.rows();

  SdpSolution best;
  best.a = a;
  std::string notes;
  for (const double f : a1_fractions) {
    if (!(f > 0.0 && f < 1.0))
      throw std::invalid_argument("a1 fractions must lie in (0, 1)");
    const double a1 = f * a;
    const double a2 = a - a1;  // split taken with equality: larger a1 or a2
                               // only shrinks W and tightens the certificate
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(dw + dg, dw + dg);
    W.topLeftCorner(dw, dw) = (1.0 - a1) * Qw;
    W.bottomRightCorner(dg, dg) = (1.0 - a2) * Qg;

    SdpSolution cell = solve_fixed_split(H, G, W, a);
    cell.a1 = a1;
    cell.a2 = a2;
    if (!cell.feasible) {
      notes = cell.note;
      continue;
    }
    if (!best.feasible || cell.objective < best.objective) best = cell;
  }
  if (!best.feasible && best.note.empty()) best.note = notes;
  return best;
}

ReachBound reach_ellipsoid(const SdpSolution& sol, const Eigen::VectorXd& xi0,
                           std::optional<long> horizon) {
  if (!sol.feasible)
    throw std::invalid_argument("reach_ellipsoid: infeasible certificate");
  const Eigen::Index dn = sol.Q.rows();
  const Eigen::Index n = dn / 2;
  if (xi0.size() != dn)
    throw std::invalid_argument("reach_ellipsoid: xi0 dimension mismatch");

  const double a = sol.a;
  double level;
  if (horizon.has_value()) {
    if (*horizon < 0)
      throw std::invalid_argument("reach_ellipsoid: horizon must be >= 0");
    const double aM = std::pow(a, static_cast<double>(*horizon));
    level = aM * xi0.dot(sol.Q * xi0) + (2.0 - a) * (1.0 - aM) / (1.0 - a);
  } else {
    level = (2.0 - a) / (1.0 - a);
  }

  const Eigen::MatrixXd Qxx = sol.Q.topLeftCorner(n, n);
  const Eigen::MatrixXd Qxe = sol.Q.topRightCorner(n, n);
  const Eigen::MatrixXd Qee = sol.Q.bottomRightCorner(n, n);
  Eigen::MatrixXd schur =
      Qxx - Qxe * Qee.llt().solve(Qxe.transpose());
  schur = 0.5 * (schur + schur.transpose());

  return ReachBound{Ellipsoid(sol.Q, level), Ellipsoid(schur, level), level};
}

Eigen::MatrixXd monte_carlo_reach(const LinearPlant& plant,
                                  const SupportRegion& support_w,
                                  const SupportRegion& support_gamma,
                                  const Ellipsoid* clamp_w,
                                  const Ellipsoid* clamp_gamma,
                                  const Eigen::VectorXd& xi0, long horizon,
                                  long trials, RngStream& rng) {
  if (trials < 1)
    throw std::invalid_argument("monte_carlo_reach: trials must be >= 1");
  if (support_w.dim() != plant.n || support_gamma.dim() != plant.p)
    throw std::invalid_argument("monte_carlo_reach: support dimension mismatch");

  const Eigen::MatrixXd H = plant.attacked_H();
  const Eigen::MatrixXd G = plant.input_G();

  Eigen::MatrixXd cloud(plant.n, trials);
  Eigen::VectorXd sigma(plant.n + plant.p);
  for (long trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd xi = xi0;
    for (long t = 0; t < horizon; ++t) {
      Eigen::VectorXd w = support_w.sample(rng);
      Eigen::VectorXd g = support_gamma.sample(rng);
      if (clamp_w) w = clamp_w->clamp(w);
      if (clamp_gamma) g = clamp_gamma->clamp(g);
      sigma << w, g;
      xi = H * xi + G * sigma;
    }
    cloud.col(trial) = xi.head(plant.n);
  }
  return cloud;
}

}  // namespace wadet
