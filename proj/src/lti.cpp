#include "wadet/lti.hpp"

#include <sstream>
#include <stdexcept>

namespace wadet {

double spectral_radius(const Eigen::MatrixXd& M) {
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

LinearPlant LinearPlant::make(Eigen::MatrixXd A, Eigen::MatrixXd B,
                              Eigen::MatrixXd C, Eigen::MatrixXd L,
                              Eigen::MatrixXd K) {
  LinearPlant plant;
  plant.n = static_cast<int>(A.rows());
  plant.m = static_cast<int>(B.cols());
  plant.p = static_cast<int>(C.rows());
  require(plant.n >= 1 && plant.m >= 1 && plant.p >= 1,
          "plant dimensions must be positive");
  require(A.cols() == plant.n, "A must be square");
  require(B.rows() == plant.n, "B must be n x m");
  require(C.cols() == plant.n, "C must be p x n");
  require(L.rows() == plant.n && L.cols() == plant.p, "L must be n x p");
  require(K.rows() == plant.m && K.cols() == plant.n, "K must be m x n");

  const double rho_observer = spectral_radius(A - L * C);
  const double rho_feedback = spectral_radius(A + B * K);
  if (rho_observer >= 1.0 || rho_feedback >= 1.0) {
    std::ostringstream msg;
    msg << "closed loop is not Schur stable: rho(A-LC)=" << rho_observer
        << ", rho(A+BK)=" << rho_feedback;
    throw std::invalid_argument(msg.str());
  }

  plant.A = std::move(A);
  plant.B = std::move(B);
  plant.C = std::move(C);
  plant.L = std::move(L);
  plant.K = std::move(K);
  return plant;
}

Eigen::MatrixXd LinearPlant::closed_loop_F() const {
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  F.topLeftCorner(n, n) = A + B * K;
  F.topRightCorner(n, n) = -B * K;
  F.bottomRightCorner(n, n) = A - L * C;
  return F;
}

Eigen::MatrixXd LinearPlant::attacked_H() const {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  H.topLeftCorner(n, n) = A + B * K;
  H.topRightCorner(n, n) = -B * K;
  H.bottomRightCorner(n, n) = A;
  return H;
}

Eigen::MatrixXd LinearPlant::input_G() const {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * n, n + p);
  G.topLeftCorner(n, n).setIdentity();
  G.bottomLeftCorner(n, n).setIdentity();
  G.bottomRightCorner(n, p) = -L;
  return G;
}

AugmentedState AugmentedState::zero(const LinearPlant& plant) {
  return {Eigen::VectorXd::Zero(plant.n), Eigen::VectorXd::Zero(plant.n)};
}

AugmentedState AugmentedState::from_xi(const Eigen::VectorXd& xi) {
  const Eigen::Index n = xi.size() / 2;
  if (xi.size() != 2 * n) throw std::invalid_argument("xi must have even size");
  return {xi.head(n), xi.tail(n)};
}

Eigen::VectorXd AugmentedState::xi() const {
  Eigen::VectorXd out(x.size() + e.size());
  out << x, e;
  return out;
}

namespace {

void check_step_dims(const LinearPlant& plant, const AugmentedState& state,
                     const Eigen::VectorXd& w, const Eigen::VectorXd& out_vec,
                     const Eigen::VectorXd& out_vec2) {
  require(state.x.size() == plant.n && state.e.size() == plant.n,
          "state dimension mismatch");
  require(w.size() == plant.n, "w dimension mismatch");
  require(out_vec.size() == plant.p && out_vec2.size() == plant.p,
          "output-sized vector dimension mismatch");
}

}  // namespace

std::pair<AugmentedState, StepRecord> step(const LinearPlant& plant,
                                           const AugmentedState& state, long t,
                                           const Eigen::VectorXd& w,
                                           const Eigen::VectorXd& v,
                                           const Eigen::VectorXd& gamma) {
  check_step_dims(plant, state, w, v, gamma);

  StepRecord rec;
  rec.t = t;
  rec.x = state.x;
  rec.x_hat = state.x_hat();
  rec.y = plant.C * state.x + v + gamma;
  rec.y_hat = plant.C * rec.x_hat;
  rec.r = rec.y - rec.y_hat;
  rec.gamma = gamma;

  const Eigen::VectorXd u = plant.K * rec.x_hat;
  AugmentedState next;
  next.x = plant.A * state.x + plant.B * u + w;
  const Eigen::VectorXd x_hat_next =
      plant.A * rec.x_hat + plant.B * u + plant.L * rec.r;
  next.e = next.x - x_hat_next;
  return {std::move(next), std::move(rec)};
}

AugmentedState step_augmented(const LinearPlant& plant,
                              const AugmentedState& state,
                              const Eigen::VectorXd& w,
                              const Eigen::VectorXd& v,
                              const Eigen::VectorXd& gamma) {
  check_step_dims(plant, state, w, v, gamma);
  Eigen::VectorXd sigma(plant.n + plant.p);
  sigma << w, v + gamma;
  return AugmentedState::from_xi(plant.closed_loop_F() * state.xi() +
                                 plant.input_G() * sigma);
}

std::pair<AugmentedState, StepRecord> step_attacked(
    const LinearPlant& plant, const AugmentedState& state, long t,
    const Eigen::VectorXd& w, const Eigen::VectorXd& gamma_bar) {
  check_step_dims(plant, state, w, gamma_bar, gamma_bar);

  StepRecord rec;
  rec.t = t;
  rec.x = state.x;
  rec.x_hat = state.x_hat();
  rec.y_hat = plant.C * rec.x_hat;
  rec.y = rec.y_hat + gamma_bar;  // C e + v cancel exactly under this attack
  rec.r = gamma_bar;
  rec.gamma = gamma_bar;

  Eigen::VectorXd sigma(plant.n + plant.p);
  sigma << w, gamma_bar;
  AugmentedState next = AugmentedState::from_xi(
      plant.attacked_H() * state.xi() + plant.input_G() * sigma);
  return {std::move(next), std::move(rec)};
}

Eigen::MatrixXd collect_benchmark(const LinearPlant& plant,
                                  const NoiseSpec& w_spec,
                                  const NoiseSpec& v_spec, long burn_in,
                                  Eigen::Index count, long gap,
                                  RngStream& rng) {
  require(burn_in >= 0, "burn_in must be >= 0");
  require(count >= 1, "benchmark sample count must be >= 1");
  require(gap >= 1, "gap must be >= 1");
  require(w_spec.dim() == plant.n, "w noise spec dimension mismatch");
  require(v_spec.dim() == plant.p, "v noise spec dimension mismatch");

  const Eigen::VectorXd gamma0 = Eigen::VectorXd::Zero(plant.p);
  AugmentedState state = AugmentedState::zero(plant);
  long t = 0;
  auto advance = [&] {
    auto [next, rec] = step(plant, state, t++, w_spec.sample(rng),
                            v_spec.sample(rng), gamma0);
    state = std::move(next);
    return rec.r;
  };

  for (long i = 0; i < burn_in; ++i) advance();

  Eigen::MatrixXd samples(plant.p, count);
  for (Eigen::Index k = 0; k < count; ++k) {
    Eigen::VectorXd r;
    for (long i = 0; i < gap; ++i) r = advance();
    samples.col(k) = r;
  }
  return samples;
}

}  // namespace wadet
