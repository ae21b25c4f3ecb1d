#include "wadet/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace wadet {

NoisePrimitive NoisePrimitive::gaussian(double mean, double variance) {
  if (variance < 0.0) throw std::invalid_argument("gaussian variance must be >= 0");
  return {Kind::gaussian, mean, variance};
}

NoisePrimitive NoisePrimitive::uniform(double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("uniform bounds must satisfy lo <= hi");
  return {Kind::uniform, lo, hi};
}

NoisePrimitive NoisePrimitive::point_mass(double value) {
  return {Kind::point_mass, value, 0.0};
}

double NoisePrimitive::mean() const {
  switch (kind) {
    case Kind::gaussian:
      return a;
    case Kind::uniform:
      return 0.5 * (a + b);
    case Kind::point_mass:
      return a;
  }
  return 0.0;
}

double NoisePrimitive::sample(RngStream& rng) const {
  switch (kind) {
    case Kind::gaussian:
      return rng.gaussian(a, std::sqrt(b));
    case Kind::uniform:
      return rng.uniform(a, b);
    case Kind::point_mass:
      return a;
  }
  return 0.0;
}

Eigen::VectorXd NoiseSpec::mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dim());
  for (int i = 0; i < dim(); ++i)
    for (const auto& prim : terms[static_cast<std::size_t>(i)]) m[i] += prim.mean();
  return m;
}

Eigen::VectorXd NoiseSpec::sample(RngStream& rng) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim());
  for (int i = 0; i < dim(); ++i)
    for (const auto& prim : terms[static_cast<std::size_t>(i)]) v[i] += prim.sample(rng);
  return v;
}

NoiseSpec NoiseSpec::zeros(int dim) {
  NoiseSpec spec;
  spec.terms.assign(static_cast<std::size_t>(dim), {NoisePrimitive::point_mass(0.0)});
  return spec;
}

Eigen::MatrixXd sample_matrix(const NoiseSpec& spec, Eigen::Index count,
                              RngStream& rng) {
  Eigen::MatrixXd out(spec.dim(), count);
  for (Eigen::Index k = 0; k < count; ++k) out.col(k) = spec.sample(rng);
  return out;
}

}  // namespace wadet
