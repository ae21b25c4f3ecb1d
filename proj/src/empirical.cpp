#include "wadet/empirical.hpp"

#include <stdexcept>

namespace wadet {

EmpiricalDistribution EmpiricalDistribution::from_samples(
    Eigen::MatrixXd samples) {
  if (samples.cols() < 1)
    throw std::invalid_argument("empirical distribution needs >= 1 sample");
  if (samples.rows() < 1)
    throw std::invalid_argument("samples must have dimension >= 1");
  return EmpiricalDistribution(std::move(samples));
}

EmpiricalDistribution EmpiricalDistribution::from_samples(
    const std::vector<Eigen::VectorXd>& samples) {
  if (samples.empty())
    throw std::invalid_argument("empirical distribution needs >= 1 sample");
  Eigen::MatrixXd m(samples.front().size(),
                    static_cast<Eigen::Index>(samples.size()));
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    if (samples[static_cast<std::size_t>(i)].size() != m.rows())
      throw std::invalid_argument("samples must share one dimension");
    m.col(i) = samples[static_cast<std::size_t>(i)];
  }
  return EmpiricalDistribution(std::move(m));
}

Eigen::MatrixXd EmpiricalDistribution::second_moment() const {
  return samples_ * samples_.transpose() / static_cast<double>(count());
}

SlidingWindow::SlidingWindow(int dim, Eigen::Index capacity)
    : buffer_(dim, capacity) {
  if (dim < 1 || capacity < 1)
    throw std::invalid_argument("window needs positive dim and capacity");
}

void SlidingWindow::push(const Eigen::VectorXd& r) {
  if (r.size() != buffer_.rows())
    throw std::invalid_argument("window push dimension mismatch");
  buffer_.col(head_) = r;
  head_ = (head_ + 1) % capacity();
  if (count_ < capacity()) ++count_;
}

EmpiricalDistribution SlidingWindow::distribution() const {
  if (count_ == 0) throw std::logic_error("window is empty");
  if (full()) return EmpiricalDistribution::from_samples(buffer_);
  return EmpiricalDistribution::from_samples(buffer_.leftCols(count_));
}

}  // namespace wadet
