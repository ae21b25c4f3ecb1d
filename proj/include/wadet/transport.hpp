#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wadet/empirical.hpp"

namespace wadet {

/// Ground norm of the transport cost ||x - y||^q. All choices coincide in
/// one dimension; the Euclidean norm is the default everywhere.
enum class CostNorm { euclidean, manhattan, chebyshev };

double ground_norm(const Eigen::VectorXd& diff, CostNorm norm);

/// Mass allocation lambda for the discrete optimal transport problem between
/// two uniform-weight sample sets. Feasible plans satisfy
///   sum_j lambda[i][j] = 1/n_src,  sum_i lambda[i][j] = 1/n_dst,  lambda >= 0,
/// and a basic optimum has at most n_src + n_dst - 1 positive entries.
struct TransportPlan {
  struct Entry {
    Eigen::Index src;
    Eigen::Index dst;
    double mass;
  };

  Eigen::Index n_src = 0;
  Eigen::Index n_dst = 0;
  std::vector<Entry> entries;  // strictly positive masses only
  double cost = 0.0;           // optimal objective = distance^q

  Eigen::MatrixXd dense() const;
};

struct TransportSolution {
  double distance = 0.0;  // cost^(1/q)
  TransportPlan plan;
  // Tree duals of the final basis: u[i] + v[j] <= cost(i, j) everywhere with
  // equality on basic cells, so sum u/n_src + sum v/n_dst equals the cost.
  std::vector<double> source_potential;
  std::vector<double> target_potential;
};

/// Exact q-Wasserstein distance between two uniform discrete distributions,
/// solved as a transportation linear program (network simplex on the dense
/// bipartite graph). Cost is the ground norm raised to the power q >= 1.
TransportSolution wasserstein(const EmpiricalDistribution& src,
                              const EmpiricalDistribution& dst, double q,
                              CostNorm norm = CostNorm::euclidean);

/// Distance only. Dispatches to an O((N+T) log(N+T)) sorted-merge evaluation
/// when the dimension is 1 (where the monotone coupling is optimal for any
/// convex cost), and to the LP otherwise.
double wasserstein_distance(const EmpiricalDistribution& src,
                            const EmpiricalDistribution& dst, double q,
                            CostNorm norm = CostNorm::euclidean);

/// Independent 1-D check: refines both sorted sample lists onto the common
/// grid of n_src * n_dst equal-mass cells and accumulates |x - y|^q cell by
/// cell. Exact for uniform discrete marginals. Requires dim == 1.
double wasserstein_1d_oracle(const EmpiricalDistribution& src,
                             const EmpiricalDistribution& dst, double q);

/// Brute-force check for equal-size sets (N = T <= 8): uniform-to-uniform
/// transport is an assignment problem, minimized over all permutations.
double assignment_oracle(const EmpiricalDistribution& src,
                         const EmpiricalDistribution& dst, double q,
                         CostNorm norm = CostNorm::euclidean);

}  // namespace wadet
