#pragma once

#include <Eigen/Dense>
#include <vector>

namespace wadet {

/// Uniform-weight discrete distribution over a finite sample set. Each of the
/// `count()` columns carries mass 1/count(); duplicates are kept as-is so
/// repeated points accumulate mass.
class EmpiricalDistribution {
 public:
  /// One sample per column. Throws on an empty set.
  static EmpiricalDistribution from_samples(Eigen::MatrixXd samples);
  static EmpiricalDistribution from_samples(
      const std::vector<Eigen::VectorXd>& samples);

  int dim() const { return static_cast<int>(samples_.rows()); }
  Eigen::Index count() const { return samples_.cols(); }
  double weight() const { return 1.0 / static_cast<double>(count()); }

  const Eigen::MatrixXd& samples() const { return samples_; }
  Eigen::VectorXd sample(Eigen::Index i) const { return samples_.col(i); }

  Eigen::VectorXd mean() const { return samples_.rowwise().mean(); }
  /// Second moment about the origin, (1/count) * sum x x'.
  Eigen::MatrixXd second_moment() const;

 private:
  explicit EmpiricalDistribution(Eigen::MatrixXd samples)
      : samples_(std::move(samples)) {}

  Eigen::MatrixXd samples_;
};

/// Circular buffer of the last `capacity` residuals; its distribution view is
/// what the online detector compares against the benchmark.
class SlidingWindow {
 public:
  SlidingWindow(int dim, Eigen::Index capacity);

  void push(const Eigen::VectorXd& r);

  Eigen::Index capacity() const { return buffer_.cols(); }
  Eigen::Index count() const { return count_; }
  bool full() const { return count_ == capacity(); }
  int dim() const { return static_cast<int>(buffer_.rows()); }

  /// Distribution over the currently held samples (order-irrelevant).
  /// Requires count() >= 1.
  EmpiricalDistribution distribution() const;

 private:
  Eigen::MatrixXd buffer_;
  Eigen::Index head_ = 0;  // next slot to overwrite
  Eigen::Index count_ = 0;
};

}  // namespace wadet
