#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wadet/rng.hpp"

namespace wadet {

/// One primitive random term. A coordinate of a noise vector is generated as
/// the independent sum of such terms, e.g. gaussian(-0.25, 0.02) + uniform(0, 0.5).
/// The gaussian's second parameter is a variance, not a standard deviation.
struct NoisePrimitive {
  enum class Kind { gaussian, uniform, point_mass };

  Kind kind = Kind::point_mass;
  double a = 0.0;  // gaussian: mean, uniform: lo, point_mass: value
  double b = 0.0;  // gaussian: variance, uniform: hi

  static NoisePrimitive gaussian(double mean, double variance);
  static NoisePrimitive uniform(double lo, double hi);
  static NoisePrimitive point_mass(double value);

  double mean() const;
  double sample(RngStream& rng) const;
};

/// Per-coordinate noise generator: coordinate i is distributed as the sum of
/// the independent primitives in terms[i].
struct NoiseSpec {
  std::vector<std::vector<NoisePrimitive>> terms;

  int dim() const { return static_cast<int>(terms.size()); }
  Eigen::VectorXd mean() const;
  Eigen::VectorXd sample(RngStream& rng) const;

  static NoiseSpec zeros(int dim);
};

/// Draws `count` independent samples, one per column.
Eigen::MatrixXd sample_matrix(const NoiseSpec& spec, Eigen::Index count,
                              RngStream& rng);

}  // namespace wadet
