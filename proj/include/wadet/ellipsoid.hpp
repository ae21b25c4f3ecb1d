#pragma once

#include <Eigen/Dense>

namespace wadet {

/// Origin-centered ellipsoid { x : x' Q x <= level } with Q symmetric
/// positive definite. A zero level describes the degenerate set {0}.
class Ellipsoid {
 public:
  /// Placeholder: the degenerate set {0} on the line.
  Ellipsoid() : shape_(Eigen::MatrixXd::Identity(1, 1)), level_(0.0) {}
  Ellipsoid(Eigen::MatrixXd shape, double level);

  int dim() const { return static_cast<int>(shape_.rows()); }
  const Eigen::MatrixXd& shape() const { return shape_; }
  double level() const { return level_; }

  double quad(const Eigen::VectorXd& x) const { return x.dot(shape_ * x); }
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const {
    return quad(x) <= level_ + tol;
  }

  /// Folds the level into the shape matrix: { x : x' (Q/level) x <= 1 }.
  Ellipsoid normalized() const;

  /// If x lies outside, scales it back onto the boundary.
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd shape_;
  double level_;
};

struct MveeResult {
  Eigen::VectorXd center;
  Eigen::MatrixXd shape;  // (x - c)' shape (x - c) <= 1 contains all points
  double gap = 0.0;       // duality gap of the optimality certificate
  int iterations = 0;
};

/// Minimum-volume enclosing ellipsoid of a point set (one point per column),
/// by Khachiyan barycentric ascent with away steps. Requires the points to
/// span the space affinely; callers handle degenerate sets by inflating
/// first. On return every point satisfies the ellipsoid inequality within
/// a (1 + (d+1) * tol / d) factor.
MveeResult minimum_volume_ellipsoid(const Eigen::MatrixXd& points,
                                    double tol = 1e-7,
                                    int max_iterations = 500000);

}  // namespace wadet
