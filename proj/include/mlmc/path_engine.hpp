#pragma once

// Euler-Maruyama integration on keyed Brownian increments, including the
// fine/coarse pair simulated on one Brownian path that makes up an MLMC level.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>

#include "mlmc/errors.hpp"
#include "mlmc/model.hpp"
#include "mlmc/rng.hpp"

namespace mlmc {

/// eta_n(t) = floor(t / delta) delta with delta = T / n_steps.
///
/// Points within a few ulps of a grid node are snapped to it, so
/// eta(0.3, 10, 1) is 0.3 rather than 0.2.
inline double eta(double t, std::int64_t n_steps, double horizon) {
  if (n_steps < 1) {
    throw std::invalid_argument("eta needs at least one step");
  }
  if (!(t >= 0.0) || t > horizon) {
    throw std::invalid_argument("eta: t must lie in [0, T]");
  }
  const double position = t * static_cast<double>(n_steps) / horizon;
  double k = std::floor(position);
  const double nearest = std::round(position);
  if (std::abs(position - nearest) <= 1e-12 * std::max(1.0, position)) {
    k = nearest;
  }
  return std::min(t, k * horizon / static_cast<double>(n_steps));
}

/// m^level as an integer; throws when it does not fit comfortably.
inline std::int64_t integer_power(std::int64_t base, int exponent) {
  if (base < 1 || exponent < 0) {
    throw std::invalid_argument("integer_power needs base >= 1, exponent >= 0");
  }
  std::int64_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (out > (std::int64_t{1} << 52) / base) {
      throw std::overflow_error("step count overflows");
    }
    out *= base;
  }
  return out;
}

/// Scratch storage for one worker.
template <typename Scalar>
struct EulerWorkspace {
  VectorX<Scalar> drift;
  MatrixX<Scalar> diffusion;
  VectorX<Scalar> increment;
  VectorX<Scalar> coarse_increment;

  explicit EulerWorkspace(const SdeModel<Scalar>& model)
      : drift(model.dim_state),
        diffusion(model.dim_state, model.dim_noise),
        increment(model.dim_noise),
        coarse_increment(model.dim_noise) {}
};

/// One step X += b(X) dt + sigma(X) dW, evaluated at the left point.
template <typename Scalar, typename Increment>
void euler_step(const SdeModel<Scalar>& model, Scalar dt,
                const Eigen::MatrixBase<Increment>& dw, VectorX<Scalar>& x,
                EulerWorkspace<Scalar>& ws) {
  model.drift(x, ws.drift);
  model.diffusion(x, ws.diffusion);
  x += dt * ws.drift;
  x.noalias() += ws.diffusion * dw;
}

/// Euler terminal value for explicitly supplied increments.
///
/// `increments` is q x n_steps; column k is W_{t_{k+1}} - W_{t_k}. Throws
/// DivergedPathError carrying the (1-based) step at which the state became
/// non-finite.
template <typename Scalar>
VectorX<Scalar> euler_terminal(const SdeModel<Scalar>& model,
                               std::int64_t n_steps,
                               const Eigen::Ref<const MatrixX<Scalar>>& increments) {
  if (n_steps < 1) {
    throw std::invalid_argument("euler_terminal needs at least one step");
  }
  if (increments.rows() != model.dim_noise || increments.cols() != n_steps) {
    throw std::invalid_argument("increments must be q x n_steps");
  }
  EulerWorkspace<Scalar> ws(model);
  const Scalar dt = model.horizon / static_cast<Scalar>(n_steps);
  VectorX<Scalar> x = model.initial;
  for (std::int64_t k = 0; k < n_steps; ++k) {
    euler_step(model, dt, increments.col(k), x, ws);
    if (!x.allFinite()) {
      throw DivergedPathError(k + 1);
    }
  }
  return x;
}

template <typename Scalar>
struct EulerTerminal {
  VectorX<Scalar> terminal;
  std::int64_t cost = 0;
};

/// Uncoupled Euler path with `n_steps` steps of width T / n_steps, driven by
/// the keyed stream.
template <typename Scalar>
EulerTerminal<Scalar> simulate_single(const SdeModel<Scalar>& model,
                                      std::int64_t n_steps,
                                      const RngStreamKey& key,
                                      EulerWorkspace<Scalar>& ws) {
  if (n_steps < 1) {
    throw std::invalid_argument("simulate_single needs at least one step");
  }
  const Scalar dt = model.horizon / static_cast<Scalar>(n_steps);
  const Scalar sqrt_dt = std::sqrt(dt);
  GaussianStream normals(key);
  EulerTerminal<Scalar> out{model.initial, n_steps};
  for (std::int64_t k = 0; k < n_steps; ++k) {
    normals.fill(ws.increment, sqrt_dt);
    euler_step(model, dt, ws.increment, out.terminal, ws);
    if (!out.terminal.allFinite()) {
      throw DivergedPathError(k + 1);
    }
  }
  return out;
}

template <typename Scalar>
EulerTerminal<Scalar> simulate_single(const SdeModel<Scalar>& model,
                                      std::int64_t n_steps,
                                      const RngStreamKey& key) {
  EulerWorkspace<Scalar> ws(model);
  return simulate_single(model, n_steps, key, ws);
}

template <typename Scalar>
struct CoupledTerminal {
  VectorX<Scalar> fine;
  VectorX<Scalar> coarse;
  int level = 0;
  /// Euler steps consumed: m^level + m^(level-1).
  std::int64_t cost = 0;
};

/// Full record of a coupled simulation (opt-in; O(m^level) memory).
template <typename Scalar>
struct CoupledPathRecord {
  MatrixX<Scalar> fine_increments;    // q x m^level
  MatrixX<Scalar> coarse_increments;  // q x m^(level-1)
  MatrixX<Scalar> fine_states;        // d x (m^level + 1)
  MatrixX<Scalar> coarse_states;      // d x (m^(level-1) + 1)
};

/// Fine (step T/m^level) and coarse (step T/m^(level-1)) Euler schemes on the
/// same Brownian path.
///
/// The fine increments are drawn from the keyed stream in time order; each
/// coarse increment is the sum of the m fine increments it spans. Memory is
/// O(d) unless `record` is given.
template <typename Scalar>
CoupledTerminal<Scalar> simulate_coupled(const SdeModel<Scalar>& model,
                                         int level, int m,
                                         const RngStreamKey& key,
                                         EulerWorkspace<Scalar>& ws,
                                         CoupledPathRecord<Scalar>* record =
                                             nullptr) {
  if (level < 1) {
    throw std::invalid_argument("coupled simulation needs level >= 1");
  }
  if (m < 2) {
    throw std::invalid_argument("refinement factor m must be >= 2");
  }
  const std::int64_t coarse_steps = integer_power(m, level - 1);
  const std::int64_t fine_steps = coarse_steps * m;
  const Scalar fine_dt = model.horizon / static_cast<Scalar>(fine_steps);
  const Scalar coarse_dt = model.horizon / static_cast<Scalar>(coarse_steps);
  const Scalar sqrt_fine_dt = std::sqrt(fine_dt);

  if (record != nullptr) {
    record->fine_increments.resize(model.dim_noise, fine_steps);
    record->coarse_increments.resize(model.dim_noise, coarse_steps);
    record->fine_states.resize(model.dim_state, fine_steps + 1);
    record->coarse_states.resize(model.dim_state, coarse_steps + 1);
    record->fine_states.col(0) = model.initial;
    record->coarse_states.col(0) = model.initial;
  }

  GaussianStream normals(key);
  CoupledTerminal<Scalar> out{model.initial, model.initial, level,
                              fine_steps + coarse_steps};
  std::int64_t fine_index = 0;
  for (std::int64_t c = 0; c < coarse_steps; ++c) {
    ws.coarse_increment.setZero();
    for (int r = 0; r < m; ++r, ++fine_index) {
      normals.fill(ws.increment, sqrt_fine_dt);
      ws.coarse_increment += ws.increment;
      euler_step(model, fine_dt, ws.increment, out.fine, ws);
      if (!out.fine.allFinite()) {
        throw DivergedPathError(fine_index + 1);
      }
      if (record != nullptr) {
        record->fine_increments.col(fine_index) = ws.increment;
        record->fine_states.col(fine_index + 1) = out.fine;
      }
    }
    euler_step(model, coarse_dt, ws.coarse_increment, out.coarse, ws);
    if (!out.coarse.allFinite()) {
      throw DivergedPathError(c + 1);
    }
    if (record != nullptr) {
      record->coarse_increments.col(c) = ws.coarse_increment;
      record->coarse_states.col(c + 1) = out.coarse;
    }
  }
  return out;
}

template <typename Scalar>
CoupledTerminal<Scalar> simulate_coupled(const SdeModel<Scalar>& model,
                                         int level, int m,
                                         const RngStreamKey& key) {
  EulerWorkspace<Scalar> ws(model);
  return simulate_coupled(model, level, m, key, ws);
}

}  // namespace mlmc
