#include "wadet/ellipsoid.hpp"

#include <cmath>
#include <stdexcept>

namespace wadet {

Ellipsoid::Ellipsoid(Eigen::MatrixXd shape, double level)
    : shape_(std::move(shape)), level_(level) {
  if (shape_.rows() != shape_.cols())
    throw std::invalid_argument("ellipsoid shape must be square");
  const double scale = std::max(1.0, shape_.cwiseAbs().maxCoeff());
  if ((shape_ - shape_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("ellipsoid shape must be symmetric");
  shape_ = 0.5 * (shape_ + shape_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shape_);
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("ellipsoid shape must be positive definite");
  if (level_ < 0.0) throw std::invalid_argument("ellipsoid level must be >= 0");
}

Ellipsoid Ellipsoid::normalized() const {
  if (level_ <= 0.0)
    throw std::logic_error("cannot normalize a zero-level ellipsoid");
  return Ellipsoid(shape_ / level_, 1.0);
}

Eigen::VectorXd Ellipsoid::clamp(const Eigen::VectorXd& x) const {
  const double qv = quad(x);
  if (qv <= level_) return x;
  if (level_ <= 0.0) return Eigen::VectorXd::Zero(x.size());
  return x * std::sqrt(level_ / qv);
}

MveeResult minimum_volume_ellipsoid(const Eigen::MatrixXd& points, double tol,
                                    int max_iterations) {
  const Eigen::Index d = points.rows();
  const Eigen::Index m = points.cols();
  if (m < d + 1)
    throw std::invalid_argument("MVEE needs at least d + 1 points");

  // Lifted points q_i = (p_i, 1).
  Eigen::MatrixXd lifted(d + 1, m);
  lifted.topRows(d) = points;
  lifted.row(d).setOnes();

  Eigen::VectorXd u = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  const double dim1 = static_cast<double>(d + 1);

  auto recompute_inverse = [&](const Eigen::VectorXd& weights) {
    const Eigen::MatrixXd X =
        lifted * weights.asDiagonal() * lifted.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(X);
    if (!lu.isInvertible())
      throw std::runtime_error("MVEE: degenerate point set (inflate first)");
    return lu.inverse().eval();
  };

  Eigen::MatrixXd Xinv = recompute_inverse(u);
  double gap = 0.0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    // M_i = q_i' X^-1 q_i for all points.
    const Eigen::VectorXd M =
        (lifted.array() * (Xinv * lifted).array()).colwise().sum();

    Eigen::Index j_plus = 0;
    const double kappa_plus = M.maxCoeff(&j_plus);
    Eigen::Index j_minus = -1;
    double kappa_minus = kappa_plus;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (u[i] > 0.0 && M[i] < kappa_minus) {
        kappa_minus = M[i];
        j_minus = i;
      }
    }

    const double err_plus = kappa_plus / dim1 - 1.0;
    const double err_minus = 1.0 - kappa_minus / dim1;
    gap = err_plus;
    if (err_plus <= tol && err_minus <= tol) break;

    Eigen::Index j;
    double lambda;
    bool drop_step = false;
    if (err_plus >= err_minus || j_minus < 0) {
      j = j_plus;
      lambda = (kappa_plus - dim1) / (dim1 * (kappa_plus - 1.0));
    } else {
      // Away step: shed weight from the point with the smallest M. The
      // unconstrained optimum is negative only for kappa > 1; otherwise the
      // best admissible move is dropping the point entirely.
      j = j_minus;
      const double drop = -u[j] / (1.0 - u[j] + 1e-300);
      lambda = drop;
      drop_step = true;
      if (kappa_minus > 1.0) {
        const double optimal =
            (kappa_minus - dim1) / (dim1 * (kappa_minus - 1.0));
        if (optimal > drop) {
          lambda = optimal;
          drop_step = false;
        }
      }
    }
    if (std::abs(lambda) < 1e-17) break;  // stalled at numerical precision

    // Rank-one update of X^-1 for X_new = (1-l) X + l q q'.
    const Eigen::VectorXd q = lifted.col(j);
    const Eigen::VectorXd Xq = Xinv * q;
    const double qXq = q.dot(Xq);
    const double gamma = lambda / (1.0 - lambda);
    const double denom = 1.0 + gamma * qXq;
    Xinv = (Xinv - (gamma / denom) * (Xq * Xq.transpose())) / (1.0 - lambda);

    u *= (1.0 - lambda);
    u[j] += lambda;
    if (drop_step) u[j] = 0.0;  // clear rounding residue so it stays dropped
    u = u.cwiseMax(0.0);

    if ((it + 1) % 1024 == 0) Xinv = recompute_inverse(u);  // refresh drift
  }

  if (gap > 10.0 * tol)
    throw std::runtime_error("MVEE did not reach the requested tolerance");

  MveeResult result;
  result.center = points * u;
  const Eigen::MatrixXd E = points * u.asDiagonal() * points.transpose() -
                            result.center * result.center.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(E);
  if (!lu.isInvertible())
    throw std::runtime_error("MVEE: singular shape (inflate first)");
  Eigen::MatrixXd shape = lu.inverse() / static_cast<double>(d);
  result.shape = 0.5 * (shape + shape.transpose());
  result.gap = gap;
  result.iterations = it;
  return result;
}

}  // namespace wadet
