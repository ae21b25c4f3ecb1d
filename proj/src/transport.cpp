#include "wadet/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace wadet {

double ground_norm(const Eigen::VectorXd& diff, CostNorm norm) {
  switch (norm) {
    case CostNorm::euclidean:
      return diff.norm();
    case CostNorm::manhattan:
      return diff.lpNorm<1>();
    case CostNorm::chebyshev:
      return diff.lpNorm<Eigen::Infinity>();
  }
  return diff.norm();
}

namespace {

void check_pair(const EmpiricalDistribution& src,
                const EmpiricalDistribution& dst, double q) {
  if (src.dim() != dst.dim())
    throw std::invalid_argument("transport: sample dimension mismatch");
  if (!(q >= 1.0)) throw std::invalid_argument("transport: q must be >= 1");
}

double pow_q(double base, double q) {
  if (q == 1.0) return base;
  if (q == 2.0) return base * base;
  return std::pow(base, q);
}

double root_q(double value, double q) {
  if (q == 1.0) return value;
  return std::pow(value, 1.0 / q);
}

// ---------------------------------------------------------------------------
// Transportation simplex.
//
// Sources carry integer supply T (the number of sinks) and sinks integer
// demand N, so every basic flow stays integral and the plan masses are exact
// multiples of 1/(N*T). The initial basis is a northwest-corner staircase
// taken in lexicographically sorted sample order; in one dimension that
// staircase is already the optimal monotone coupling, so the simplex mostly
// verifies optimality there. Pivoting uses block pricing with a most-negative
// rule and falls back to Bland's rule (first eligible cell, lowest-index
// leaving arc) after a long run of degenerate pivots, which guarantees
// termination.
// ---------------------------------------------------------------------------
class TransportationSimplex {
 public:
  TransportationSimplex(const Eigen::MatrixXd& src, const Eigen::MatrixXd& dst,
                        double q, CostNorm norm)
      : n_(src.cols()), t_(dst.cols()) {
    if (n_ * t_ > 50'000'000)
      throw std::invalid_argument("transport instance too large for the LP");

    cost_.resize(static_cast<std::size_t>(n_ * t_));
    max_cost_ = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i)
      for (Eigen::Index j = 0; j < t_; ++j) {
        const double c = pow_q(ground_norm(src.col(i) - dst.col(j), norm), q);
        cost_[cell(i, j)] = c;
        max_cost_ = std::max(max_cost_, c);
      }

    src_order_ = sorted_order(src);
    dst_order_ = sorted_order(dst);

    const Eigen::Index nodes = n_ + t_;
    parent_.assign(static_cast<std::size_t>(nodes), -1);
    parent_edge_.assign(static_cast<std::size_t>(nodes), -1);
    depth_.assign(static_cast<std::size_t>(nodes), 0);
    dual_.assign(static_cast<std::size_t>(nodes), 0.0);
    adjacency_.assign(static_cast<std::size_t>(nodes), {});
    bfs_order_.reserve(static_cast<std::size_t>(nodes));
  }

  void solve() {
    build_initial_basis();
    rebuild_tree();

    // Dual values accumulate rounding along tree paths; keep the pricing
    // tolerance above that noise floor so we do not chase phantom pivots.
    const double tol =
        1e-14 * (1.0 + max_cost_) * static_cast<double>(n_ + t_ + 2);

    const Eigen::Index total_cells = n_ * t_;
    const Eigen::Index block =
        std::max<Eigen::Index>(64, total_cells / 16 + 1);
    Eigen::Index cursor = 0;
    long degenerate_streak = 0;
    bool bland = false;
    const long pivot_cap = 2'000'000;

    for (long pivots = 0;; ++pivots) {
      if (pivots > pivot_cap)
        throw std::runtime_error("transportation simplex failed to converge");

      Eigen::Index enter = -1;
      if (!bland) {
        double best = -tol;
        Eigen::Index scanned = 0;
        while (scanned < total_cells) {
          const Eigen::Index stop =
              std::min(block, total_cells - scanned);
          for (Eigen::Index s = 0; s < stop; ++s) {
            const Eigen::Index c = cursor + s >= total_cells
                                       ? cursor + s - total_cells
                                       : cursor + s;
            const double rc = reduced_cost(c);
            if (rc < best) {
              best = rc;
              enter = c;
            }
          }
          scanned += stop;
          cursor = (cursor + stop) % total_cells;
          if (enter >= 0) break;
        }
      } else {
        for (Eigen::Index c = 0; c < total_cells; ++c) {
          if (reduced_cost(c) < -tol) {
            enter = c;
            break;
          }
        }
      }
      if (enter < 0) break;  // optimal

      const std::int64_t theta = pivot(enter);
      if (theta == 0) {
        if (++degenerate_streak > 256) bland = true;
      } else {
        degenerate_streak = 0;
      }
      rebuild_tree();
    }
  }

  TransportSolution extract(double q) const {
    TransportSolution sol;
    sol.plan.n_src = n_;
    sol.plan.n_dst = t_;
    const double total = static_cast<double>(n_) * static_cast<double>(t_);
    double cost = 0.0;
    for (const Edge& e : edges_) {
      if (!e.alive || e.flow == 0) continue;
      const double mass = static_cast<double>(e.flow) / total;
      sol.plan.entries.push_back({e.src, e.dst, mass});
      cost += mass * cost_[cell(e.src, e.dst)];
    }
    std::sort(sol.plan.entries.begin(), sol.plan.entries.end(),
              [this](const auto& a, const auto& b) {
                return cell(a.src, a.dst) < cell(b.src, b.dst);
              });
    sol.plan.cost = cost;
    sol.distance = root_q(cost, q);
    sol.source_potential.assign(dual_.begin(), dual_.begin() + n_);
    sol.target_potential.assign(dual_.begin() + n_, dual_.end());
    return sol;
  }

 private:
  struct Edge {
    Eigen::Index src;
    Eigen::Index dst;
    std::int64_t flow = 0;
    bool alive = false;
  };

  std::size_t cell(Eigen::Index i, Eigen::Index j) const {
    return static_cast<std::size_t>(i * t_ + j);
  }

  static std::vector<Eigen::Index> sorted_order(const Eigen::MatrixXd& pts) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(pts.cols()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&pts](Eigen::Index a, Eigen::Index b) {
                for (Eigen::Index r = 0; r < pts.rows(); ++r) {
                  if (pts(r, a) < pts(r, b)) return true;
                  if (pts(r, a) > pts(r, b)) return false;
                }
                return a < b;
              });
    return order;
  }

  void add_edge(Eigen::Index i, Eigen::Index j, std::int64_t flow) {
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({i, j, flow, true});
    adjacency_[static_cast<std::size_t>(i)].push_back(id);
    adjacency_[static_cast<std::size_t>(n_ + j)].push_back(id);
  }

  void remove_edge(int id) {
    edges_[static_cast<std::size_t>(id)].alive = false;
    auto drop = [&](Eigen::Index node) {
      auto& list = adjacency_[static_cast<std::size_t>(node)];
      list.erase(std::find(list.begin(), list.end(), id));
    };
    drop(edges_[static_cast<std::size_t>(id)].src);
    drop(n_ + edges_[static_cast<std::size_t>(id)].dst);
  }

  // Northwest-corner staircase over the sorted orders. Exactly n + t - 1
  // basic cells, inserting zero-flow cells on simultaneous exhaustion.
  void build_initial_basis() {
    std::size_t a = 0, b = 0;
    std::int64_t rem_supply = t_;  // per-source supply
    std::int64_t rem_demand = n_;  // per-sink demand
    while (true) {
      const std::int64_t f = std::min(rem_supply, rem_demand);
      add_edge(src_order_[a], dst_order_[b], f);
      rem_supply -= f;
      rem_demand -= f;
      if (a + 1 == static_cast<std::size_t>(n_) &&
          b + 1 == static_cast<std::size_t>(t_))
        break;
      if (rem_supply == 0 && a + 1 < static_cast<std::size_t>(n_)) {
        ++a;
        rem_supply = t_;
      } else {
        ++b;
        rem_demand = n_;
      }
    }
  }

  // Parents, depths and duals from scratch; O(n + t) per pivot.
  void rebuild_tree() {
    const Eigen::Index nodes = n_ + t_;
    std::fill(parent_.begin(), parent_.end(), Eigen::Index{-1});
    std::fill(parent_edge_.begin(), parent_edge_.end(), -1);
    bfs_order_.clear();
    bfs_order_.push_back(0);
    parent_[0] = 0;
    depth_[0] = 0;
    dual_[0] = 0.0;
    for (std::size_t k = 0; k < bfs_order_.size(); ++k) {
      const Eigen::Index node = bfs_order_[k];
      for (int id : adjacency_[static_cast<std::size_t>(node)]) {
        const Edge& e = edges_[static_cast<std::size_t>(id)];
        const Eigen::Index other =
            (node < n_) ? n_ + e.dst : e.src;
        if (parent_[static_cast<std::size_t>(other)] >= 0) continue;
        parent_[static_cast<std::size_t>(other)] = node;
        parent_edge_[static_cast<std::size_t>(other)] = id;
        depth_[static_cast<std::size_t>(other)] =
            depth_[static_cast<std::size_t>(node)] + 1;
        // Basic cells price to zero: u_i + v_j = c_ij.
        dual_[static_cast<std::size_t>(other)] =
            cost_[cell(e.src, e.dst)] - dual_[static_cast<std::size_t>(node)];
        bfs_order_.push_back(other);
      }
    }
    if (static_cast<Eigen::Index>(bfs_order_.size()) != nodes)
      throw std::logic_error("transport basis lost spanning-tree structure");
  }

  double reduced_cost(Eigen::Index linear_cell) const {
    const Eigen::Index i = linear_cell / t_;
    const Eigen::Index j = linear_cell % t_;
    return cost_[static_cast<std::size_t>(linear_cell)] -
           dual_[static_cast<std::size_t>(i)] -
           dual_[static_cast<std::size_t>(n_ + j)];
  }

  // Pushes flow around the unique tree cycle closed by the entering cell and
  // drops the limiting arc. Returns the amount pushed (0 on degenerate
  // pivots, which still exchange basis arcs).
  std::int64_t pivot(Eigen::Index enter_cell) {
    const Eigen::Index ei = enter_cell / t_;
    const Eigen::Index ej = enter_cell % t_;
    Eigen::Index a = ei;
    Eigen::Index b = n_ + ej;

    struct CycleArc {
      int edge;
      int sign;  // +1 gains flow, -1 loses flow when pushing theta
    };
    std::vector<CycleArc> cycle;

    // Climb both endpoints to their common ancestor. Walking up from the
    // entering source, a crossed arc loses flow when its child endpoint is a
    // source; walking up from the entering sink, when its child is a sink.
    auto climb = [&](Eigen::Index& node, bool from_sink) {
      const int id = parent_edge_[static_cast<std::size_t>(node)];
      const bool child_is_source = node < n_;
      const int sign = from_sink ? (child_is_source ? +1 : -1)
                                 : (child_is_source ? -1 : +1);
      cycle.push_back({id, sign});
      node = parent_[static_cast<std::size_t>(node)];
    };

    while (depth_[static_cast<std::size_t>(a)] >
           depth_[static_cast<std::size_t>(b)])
      climb(a, false);
    while (depth_[static_cast<std::size_t>(b)] >
           depth_[static_cast<std::size_t>(a)])
      climb(b, true);
    while (a != b) {
      climb(a, false);
      climb(b, true);
    }

    std::int64_t theta = std::numeric_limits<std::int64_t>::max();
    int leave = -1;
    std::size_t leave_cell_index = 0;
    for (const CycleArc& arc : cycle) {
      if (arc.sign != -1) continue;
      const Edge& e = edges_[static_cast<std::size_t>(arc.edge)];
      const std::size_t ci = cell(e.src, e.dst);
      if (e.flow < theta || (e.flow == theta && ci < leave_cell_index)) {
        theta = e.flow;
        leave = arc.edge;
        leave_cell_index = ci;
      }
    }
    if (leave < 0) throw std::logic_error("transport pivot found no leaving arc");

    for (const CycleArc& arc : cycle)
      edges_[static_cast<std::size_t>(arc.edge)].flow += arc.sign * theta;
    remove_edge(leave);
    add_edge(ei, ej, theta);
    return theta;
  }

  Eigen::Index n_;
  Eigen::Index t_;
  std::vector<double> cost_;  // row-major n x t
  double max_cost_ = 0.0;
  std::vector<Eigen::Index> src_order_;
  std::vector<Eigen::Index> dst_order_;

  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<Eigen::Index> parent_;
  std::vector<int> parent_edge_;
  std::vector<Eigen::Index> depth_;
  std::vector<double> dual_;
  std::vector<Eigen::Index> bfs_order_;
};

std::vector<double> sorted_values(const EmpiricalDistribution& d) {
  std::vector<double> v(d.samples().data(),
                        d.samples().data() + d.count());
  std::sort(v.begin(), v.end());
  return v;
}

// Sorted-merge evaluation of the 1-D distance: walk both sorted lists with
// integer mass units of 1/(N*T) and pair off quantile segments.
double wasserstein_1d_fast(const EmpiricalDistribution& src,
                           const EmpiricalDistribution& dst, double q) {
  const std::vector<double> a = sorted_values(src);
  const std::vector<double> b = sorted_values(dst);
  const std::int64_t na = static_cast<std::int64_t>(a.size());
  const std::int64_t nb = static_cast<std::int64_t>(b.size());

  double acc = 0.0;
  std::size_t i = 0, j = 0;
  std::int64_t rem_a = nb, rem_b = na;  // units per atom
  while (i < a.size() && j < b.size()) {
    const std::int64_t d = std::min(rem_a, rem_b);
    acc += static_cast<double>(d) * pow_q(std::abs(a[i] - b[j]), q);
    rem_a -= d;
    rem_b -= d;
    if (rem_a == 0) {
      ++i;
      rem_a = nb;
    }
    if (rem_b == 0) {
      ++j;
      rem_b = na;
    }
  }
  return root_q(acc / (static_cast<double>(na) * static_cast<double>(nb)), q);
}

}  // namespace

Eigen::MatrixXd TransportPlan::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_src, n_dst);
  for (const Entry& e : entries) m(e.src, e.dst) += e.mass;
  return m;
}

TransportSolution wasserstein(const EmpiricalDistribution& src,
                              const EmpiricalDistribution& dst, double q,
                              CostNorm norm) {
  check_pair(src, dst, q);
  TransportationSimplex simplex(src.samples(), dst.samples(), q, norm);
  simplex.solve();
  return simplex.extract(q);
}

double wasserstein_distance(const EmpiricalDistribution& src,
                            const EmpiricalDistribution& dst, double q,
                            CostNorm norm) {
  check_pair(src, dst, q);
  if (src.dim() == 1) return wasserstein_1d_fast(src, dst, q);
  return wasserstein(src, dst, q, norm).distance;
}

double wasserstein_1d_oracle(const EmpiricalDistribution& src,
                             const EmpiricalDistribution& dst, double q) {
  check_pair(src, dst, q);
  if (src.dim() != 1)
    throw std::invalid_argument("1-D oracle requires dimension 1");
  const std::vector<double> a = sorted_values(src);
  const std::vector<double> b = sorted_values(dst);
  const std::int64_t n = static_cast<std::int64_t>(a.size());
  const std::int64_t t = static_cast<std::int64_t>(b.size());
  if (n * t > 200'000'000)
    throw std::invalid_argument("1-D oracle instance too large");

  double acc = 0.0;
  for (std::int64_t k = 0; k < n * t; ++k) {
    const double x = a[static_cast<std::size_t>(k / t)];
    const double y = b[static_cast<std::size_t>(k / n)];
    acc += pow_q(std::abs(x - y), q);
  }
  return root_q(acc / static_cast<double>(n * t), q);
}

double assignment_oracle(const EmpiricalDistribution& src,
                         const EmpiricalDistribution& dst, double q,
                         CostNorm norm) {
  check_pair(src, dst, q);
  const Eigen::Index n = src.count();
  if (n != dst.count())
    throw std::invalid_argument("assignment oracle requires equal sizes");
  if (n > 8) throw std::invalid_argument("assignment oracle requires N <= 8");

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      total += pow_q(
          ground_norm(src.samples().col(i) -
                          dst.samples().col(perm[static_cast<std::size_t>(i)]),
                      norm),
          q);
    best = std::min(best, total / static_cast<double>(n));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return root_q(best, q);
}

}  // namespace wadet
