#pragma once

// Simulation of the limit U of sqrt(mn / ((m-1)T)) (X^{mn} - X^n):
//
//   U_t = (1/sqrt 2) Z_t sum_{i,j=1..q} int_0^t H^{ij}_s dB^{ij}_s,
//   H^{ij}_s = Z_s^{-1} grad(phi_j)(X_s) phi_i(X_s),
//   Z_t = I + sum_{j=0..q} int_0^t grad(phi_j)(X_s) dY^j_s Z_s,
//
// where Y^0_s = s, Y^j = W^j and B is a q^2-dimensional Brownian motion
// independent of W. X, Z and the B-integral share one Euler grid; Z_s^{-1} is
// applied by an LU solve at every step.

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "mlmc/errors.hpp"
#include "mlmc/model.hpp"
#include "mlmc/path_engine.hpp"
#include "mlmc/rng.hpp"

namespace mlmc {

/// Z is declared singular when its reciprocal condition number drops below
/// this value.
inline constexpr double kMinReciprocalCondition = 1e-12;

template <typename Scalar>
struct LimitDraw {
  VectorX<Scalar> x_terminal;
  VectorX<Scalar> u_terminal;
};

template <typename Scalar>
struct LimitWorkspace {
  VectorX<Scalar> drift, dw, transported, solved, accumulator;
  MatrixX<Scalar> diffusion, drift_jacobian, jacobian, z, dz, db;
  Eigen::PartialPivLU<MatrixX<Scalar>> lu;

  explicit LimitWorkspace(const SdeModel<Scalar>& model)
      : drift(model.dim_state),
        dw(model.dim_noise),
        transported(model.dim_state),
        solved(model.dim_state),
        accumulator(model.dim_state),
        diffusion(model.dim_state, model.dim_noise),
        drift_jacobian(model.dim_state, model.dim_state),
        jacobian(model.dim_state, model.dim_state),
        z(model.dim_state, model.dim_state),
        dz(model.dim_state, model.dim_state),
        db(model.dim_noise, model.dim_noise),
        lu(model.dim_state) {}
};

/// Stream for the independent Brownian motion B paired with `w_key`.
inline RngStreamKey limit_b_key(RngStreamKey w_key, unsigned variant = 0) {
  w_key.substream = make_substream(StreamTag::kLimitB, variant);
  return w_key;
}

/// One joint draw of (X_T, U_T) with W from `w_key` and B from `b_key`.
///
/// Throws DegenerateTransportError if Z_s becomes numerically singular and
/// DivergedPathError if any state is non-finite.
template <typename Scalar>
LimitDraw<Scalar> simulate_limit_draw(const SdeModel<Scalar>& model,
                                      std::int64_t n_steps,
                                      const RngStreamKey& w_key,
                                      const RngStreamKey& b_key,
                                      LimitWorkspace<Scalar>& ws) {
  if (n_steps < 2) {
    throw std::invalid_argument("limit draw needs at least two grid steps");
  }
  const Eigen::Index d = model.dim_state;
  const Eigen::Index q = model.dim_noise;
  const Scalar dt = model.horizon / static_cast<Scalar>(n_steps);
  const Scalar sqrt_dt = std::sqrt(dt);
  GaussianStream w_normals(w_key);
  GaussianStream b_normals(b_key);

  VectorX<Scalar> x = model.initial;
  ws.z.setIdentity();
  ws.accumulator.setZero();
  for (std::int64_t k = 0; k < n_steps; ++k) {
    w_normals.fill(ws.dw, sqrt_dt);
    b_normals.fill(ws.db, sqrt_dt);
    model.drift(x, ws.drift);
    model.diffusion(x, ws.diffusion);
    model.drift_jacobian(x, ws.drift_jacobian);

    // v = sum_{i,j} grad(phi_j) phi_i dB^{ij} = sum_j grad(phi_j) (sigma dB_{.j})
    // dZ = grad(b) Z dt + sum_j grad(phi_j) Z dW^j
    ws.transported.setZero();
    ws.dz.noalias() = dt * ws.drift_jacobian * ws.z;
    for (Eigen::Index j = 0; j < q; ++j) {
      model.diffusion_jacobian(x, j, ws.jacobian);
      ws.solved.noalias() = ws.diffusion * ws.db.col(j);
      ws.transported.noalias() += ws.jacobian * ws.solved;
      ws.dz.noalias() += ws.dw(j) * ws.jacobian * ws.z;
    }

    if (d == 1) {
      const Scalar z = ws.z(0, 0);
      if (!(std::abs(z) > Scalar(0))) {
        throw DegenerateTransportError(k, 0.0);
      }
      ws.accumulator(0) += ws.transported(0) / z;
    } else {
      ws.lu.compute(ws.z);
      const double rcond = static_cast<double>(ws.lu.rcond());
      if (!(rcond >= kMinReciprocalCondition)) {
        throw DegenerateTransportError(k, rcond);
      }
      ws.solved = ws.lu.solve(ws.transported);
      ws.accumulator += ws.solved;
    }

    ws.z += ws.dz;
    x += dt * ws.drift;
    x.noalias() += ws.diffusion * ws.dw;
    if (!x.allFinite() || !ws.z.allFinite()) {
      throw DivergedPathError(k + 1);
    }
  }
  LimitDraw<Scalar> draw;
  draw.x_terminal = std::move(x);
  draw.u_terminal = (ws.z * ws.accumulator) / std::sqrt(Scalar(2));
  return draw;
}

template <typename Scalar>
LimitDraw<Scalar> simulate_limit_draw(const SdeModel<Scalar>& model,
                                      std::int64_t n_steps,
                                      const RngStreamKey& key) {
  LimitWorkspace<Scalar> ws(model);
  return simulate_limit_draw(model, n_steps, key, limit_b_key(key), ws);
}

struct LimitSimConfig {
  std::int64_t n_steps = 1024;
  std::int64_t samples = 100000;
  std::uint64_t master_seed = 0;
  unsigned threads = 0;
};

/// R draws of grad f(X_T) . U_T. Draw k uses W from
/// (seed, path k, StreamTag::kLimitW) and B from the paired kLimitB stream.
/// If X_T lands within 1e-12 (1 + |X_T|) of the payoff's kink set the draw
/// is repeated on the next stream variant.
std::vector<double> limit_samples(const SdeModeld& model, const Payoffd& payoff,
                                  const LimitSimConfig& config);

struct LimitVariance {
  double sigma2 = 0.0;
  double std_error = 0.0;
  double mean = 0.0;
  std::int64_t samples = 0;
};

/// Sample variance of grad f(X_T) . U_T with the standard error of that
/// variance estimate.
LimitVariance estimate_limit_variance(const SdeModeld& model,
                                      const Payoffd& payoff,
                                      const LimitSimConfig& config);

/// Summary of a sample set (variance with its standard error).
LimitVariance summarize_limit_samples(const std::vector<double>& samples);

/// R draws of sqrt(m^level / ((m-1)T)) (f(fine) - f(coarse)).
std::vector<double> two_level_error_samples(const SdeModeld& model,
                                            const Payoffd& payoff, int level,
                                            int m, std::int64_t samples,
                                            std::uint64_t seed,
                                            unsigned threads = 0);

}  // namespace mlmc
