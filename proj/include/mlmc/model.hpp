#pragma once

// Autonomous diffusions dX = b(X) dt + sigma(X) dW and payoffs f(X_T).
//
// Coefficients are plain callables that write into caller-owned storage, so
// the Euler loop runs without heap traffic. All callables must be safe to
// invoke concurrently; the library treats them as pure functions.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mlmc {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct SdeModel {
  using Vector = VectorX<Scalar>;
  using Matrix = MatrixX<Scalar>;
  using ConstVectorRef = Eigen::Ref<const Vector>;
  using VectorRef = Eigen::Ref<Vector>;
  using MatrixRef = Eigen::Ref<Matrix>;

  std::string name;
  Eigen::Index dim_state = 0;
  Eigen::Index dim_noise = 0;
  Vector initial;
  Scalar horizon = Scalar(1);

  /// out (d) = b(x)
  std::function<void(const ConstVectorRef&, VectorRef)> drift;
  /// out (d x q) = sigma(x); column j is phi_{j+1}
  std::function<void(const ConstVectorRef&, MatrixRef)> diffusion;
  /// out (d x d) = grad b(x)
  std::function<void(const ConstVectorRef&, MatrixRef)> drift_jacobian;
  /// out (d x d) = grad phi_{j+1}(x), (out)_{ik} = d sigma_{ij} / d x_k
  std::function<void(const ConstVectorRef&, Eigen::Index, MatrixRef)>
      diffusion_jacobian;
};

template <typename Scalar>
struct Payoff {
  using Vector = VectorX<Scalar>;
  using ConstVectorRef = Eigen::Ref<const Vector>;
  using VectorRef = Eigen::Ref<Vector>;

  std::string name;
  std::function<Scalar(const ConstVectorRef&)> value;
  /// Gradient of `value`; only required off a null set.
  std::function<void(const ConstVectorRef&, VectorRef)> gradient;
  /// Polynomial growth |f(x)-f(y)| <= C (1 + |x|^p + |y|^p) |x - y|.
  Scalar growth_exponent = Scalar(0);
  Scalar growth_constant = Scalar(1);
  std::optional<Scalar> lipschitz_hint;
  /// Distance to the declared set where `gradient` is undefined. Empty for
  /// payoffs that are differentiable everywhere.
  std::function<Scalar(const ConstVectorRef&)> kink_distance;
};

/// Closed-form values for a model/payoff pair. Absent fields mean "verify by
/// simulation only".
struct AnalyticReference {
  std::optional<double> exact_expectation;
  std::optional<double> exact_limit_variance;
  std::optional<double> weak_error_constant;
};

using SdeModeld = SdeModel<double>;
using Payoffd = Payoff<double>;

// ---------------------------------------------------------------------------
// Convenience evaluation (allocating; not for inner loops).

template <typename Scalar>
VectorX<Scalar> evaluate_drift(const SdeModel<Scalar>& model,
                               const VectorX<Scalar>& x) {
  VectorX<Scalar> out(model.dim_state);
  model.drift(x, out);
  return out;
}

template <typename Scalar>
MatrixX<Scalar> evaluate_diffusion(const SdeModel<Scalar>& model,
                                   const VectorX<Scalar>& x) {
  MatrixX<Scalar> out(model.dim_state, model.dim_noise);
  model.diffusion(x, out);
  return out;
}

template <typename Scalar>
MatrixX<Scalar> evaluate_drift_jacobian(const SdeModel<Scalar>& model,
                                        const VectorX<Scalar>& x) {
  MatrixX<Scalar> out(model.dim_state, model.dim_state);
  model.drift_jacobian(x, out);
  return out;
}

template <typename Scalar>
std::vector<MatrixX<Scalar>> evaluate_diffusion_jacobians(
    const SdeModel<Scalar>& model, const VectorX<Scalar>& x) {
  std::vector<MatrixX<Scalar>> out(
      model.dim_noise, MatrixX<Scalar>(model.dim_state, model.dim_state));
  for (Eigen::Index j = 0; j < model.dim_noise; ++j) {
    model.diffusion_jacobian(x, j, out[j]);
  }
  return out;
}

/// Checks dimensions, presence of every callable and finiteness at the
/// initial state. Throws std::invalid_argument.
template <typename Scalar>
void validate_model(const SdeModel<Scalar>& model) {
  if (model.dim_state < 1 || model.dim_noise < 1) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (model.initial.size() != model.dim_state) {
    throw std::invalid_argument("initial state has wrong dimension");
  }
  if (!(model.horizon > Scalar(0))) {
    throw std::invalid_argument("horizon must be positive");
  }
  if (!model.drift || !model.diffusion || !model.drift_jacobian ||
      !model.diffusion_jacobian) {
    throw std::invalid_argument("model is missing a coefficient callable");
  }
  if (!model.initial.allFinite() ||
      !evaluate_drift(model, model.initial).allFinite() ||
      !evaluate_diffusion(model, model.initial).allFinite()) {
    throw std::invalid_argument("model coefficients are not finite at x0");
  }
}

template <typename Scalar>
void validate_payoff(const Payoff<Scalar>& payoff) {
  if (!payoff.value || !payoff.gradient) {
    throw std::invalid_argument("payoff is missing value or gradient");
  }
  if (payoff.growth_exponent < Scalar(0) ||
      !(payoff.growth_constant > Scalar(0))) {
    throw std::invalid_argument("payoff growth metadata must be nonnegative");
  }
}

// ---------------------------------------------------------------------------
// Built-in models and payoffs.

namespace detail {
template <typename Scalar>
void require_positive(Scalar v, const char* what) {
  if (!(v > Scalar(0)) || !std::isfinite(static_cast<double>(v))) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
}
}  // namespace detail

/// One-dimensional geometric Brownian motion dX = mu X dt + vol X dW.
///
/// `vol = 0` is accepted and yields the deterministic model used as the
/// zero-diffusion edge case.
template <typename Scalar = double>
SdeModel<Scalar> make_gbm(Scalar x0, Scalar mu, Scalar vol, Scalar horizon) {
  detail::require_positive(x0, "x0");
  detail::require_positive(horizon, "horizon");
  if (!(vol >= Scalar(0)) || !std::isfinite(static_cast<double>(mu)) ||
      !std::isfinite(static_cast<double>(vol))) {
    throw std::invalid_argument("vol must be nonnegative and finite");
  }
  using Model = SdeModel<Scalar>;
  Model model;
  model.name = "gbm";
  model.dim_state = 1;
  model.dim_noise = 1;
  model.initial = VectorX<Scalar>::Constant(1, x0);
  model.horizon = horizon;
  model.drift = [mu](const typename Model::ConstVectorRef& x,
                     typename Model::VectorRef out) { out(0) = mu * x(0); };
  model.diffusion = [vol](const typename Model::ConstVectorRef& x,
                          typename Model::MatrixRef out) {
    out(0, 0) = vol * x(0);
  };
  model.drift_jacobian = [mu](const typename Model::ConstVectorRef&,
                              typename Model::MatrixRef out) {
    out(0, 0) = mu;
  };
  model.diffusion_jacobian = [vol](const typename Model::ConstVectorRef&,
                                   Eigen::Index,
                                   typename Model::MatrixRef out) {
    out(0, 0) = vol;
  };
  return model;
}

/// Linear system dX = A X dt + sum_j B_j X dW^j.
template <typename Scalar = double>
SdeModel<Scalar> make_linear_sde(const MatrixX<Scalar>& a,
                                 const std::vector<MatrixX<Scalar>>& b,
                                 const VectorX<Scalar>& x0, Scalar horizon) {
  detail::require_positive(horizon, "horizon");
  const Eigen::Index d = x0.size();
  if (d < 1 || a.rows() != d || a.cols() != d || b.empty()) {
    throw std::invalid_argument("linear SDE has inconsistent dimensions");
  }
  for (const auto& bj : b) {
    if (bj.rows() != d || bj.cols() != d) {
      throw std::invalid_argument("linear SDE has inconsistent dimensions");
    }
  }
  using Model = SdeModel<Scalar>;
  Model model;
  model.name = "linear";
  model.dim_state = d;
  model.dim_noise = static_cast<Eigen::Index>(b.size());
  model.initial = x0;
  model.horizon = horizon;
  model.drift = [a](const typename Model::ConstVectorRef& x,
                    typename Model::VectorRef out) { out.noalias() = a * x; };
  model.diffusion = [b](const typename Model::ConstVectorRef& x,
                        typename Model::MatrixRef out) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out.col(static_cast<Eigen::Index>(j)).noalias() = b[j] * x;
    }
  };
  model.drift_jacobian = [a](const typename Model::ConstVectorRef&,
                             typename Model::MatrixRef out) { out = a; };
  model.diffusion_jacobian = [b](const typename Model::ConstVectorRef&,
                                 Eigen::Index j,
                                 typename Model::MatrixRef out) {
    out = b[static_cast<std::size_t>(j)];
  };
  return model;
}

/// f(x) = x_coord.
template <typename Scalar = double>
Payoff<Scalar> identity_payoff(Eigen::Index dim = 1, Eigen::Index coord = 0) {
  if (coord < 0 || coord >= dim) {
    throw std::invalid_argument("identity payoff coordinate out of range");
  }
  using P = Payoff<Scalar>;
  P payoff;
  payoff.name = "identity";
  payoff.value = [coord](const typename P::ConstVectorRef& x) {
    return x(coord);
  };
  payoff.gradient = [coord](const typename P::ConstVectorRef&,
                            typename P::VectorRef out) {
    out.setZero();
    out(coord) = Scalar(1);
  };
  payoff.growth_exponent = Scalar(0);
  payoff.growth_constant = Scalar(1);
  payoff.lipschitz_hint = Scalar(1);
  return payoff;
}

/// f(x) = (x_0 - K)^+, kink at x_0 = K.
template <typename Scalar = double>
Payoff<Scalar> call_payoff(Scalar strike) {
  if (!(strike >= Scalar(0))) {
    throw std::invalid_argument("strike must be nonnegative");
  }
  using P = Payoff<Scalar>;
  P payoff;
  payoff.name = "call";
  payoff.value = [strike](const typename P::ConstVectorRef& x) {
    return x(0) > strike ? x(0) - strike : Scalar(0);
  };
  payoff.gradient = [strike](const typename P::ConstVectorRef& x,
                             typename P::VectorRef out) {
    out.setZero();
    out(0) = x(0) > strike ? Scalar(1) : Scalar(0);
  };
  payoff.growth_exponent = Scalar(0);
  payoff.growth_constant = Scalar(1);
  payoff.lipschitz_hint = Scalar(1);
  payoff.kink_distance = [strike](const typename P::ConstVectorRef& x) {
    return std::abs(x(0) - strike);
  };
  return payoff;
}

// ---------------------------------------------------------------------------
// Analytic references.

/// GBM with f(x) = x: E X_T = x0 e^{mu T} and
/// Var(grad f(X_T) . U_T) = (vol^4 T / 2) x0^2 e^{(2 mu + vol^2) T}.
///
/// For GBM the first variation is Z_t = X_t / x0 and H_s = vol^2 x0, so
/// U_T = (vol^2 / sqrt 2) X_T B_T with B independent of W.
AnalyticReference gbm_identity_reference(double x0, double mu, double vol,
                                         double horizon);

/// Undiscounted call E (X_T - K)^+ for GBM with drift `rate`. The limit
/// variance has no closed form here and is left empty.
AnalyticReference black_scholes_call_reference(double x0, double rate,
                                               double vol, double horizon,
                                               double strike);

// ---------------------------------------------------------------------------
// Sampling checks of the declared derivative and growth metadata.

/// Largest relative discrepancy between the supplied Jacobians (drift and
/// every diffusion column) and central differences at the given states,
/// |J - J_fd| / max(1, |J|) entrywise. Step is 1e-6 (1 + |x_k|).
double jacobian_fd_discrepancy(const SdeModeld& model,
                               std::span<const Eigen::VectorXd> states);

/// Same check for a payoff gradient. States within two FD steps of the
/// declared kink set are skipped.
double gradient_fd_discrepancy(const Payoffd& payoff,
                               std::span<const Eigen::VectorXd> states);

/// max over pairs of |f(x)-f(y)| / ((1 + |x|^p + |y|^p) |x - y|). The declared
/// growth bound holds on the sample iff this is <= growth_constant.
double growth_ratio(const Payoffd& payoff,
                    std::span<const Eigen::VectorXd> xs,
                    std::span<const Eigen::VectorXd> ys);

}  // namespace mlmc
