#include "mlmc/model.hpp"

#include <algorithm>
#include <cmath>

#include "mlmc/normal.hpp"

namespace mlmc {

AnalyticReference gbm_identity_reference(double x0, double mu, double vol,
                                         double horizon) {
  // Parameter validation shares the model constructor's rules.
  (void)make_gbm(x0, mu, vol, horizon);
  AnalyticReference ref;
  ref.exact_expectation = x0 * std::exp(mu * horizon);
  ref.exact_limit_variance = std::pow(vol, 4) * horizon / 2.0 * x0 * x0 *
                             std::exp((2.0 * mu + vol * vol) * horizon);
  // E X^n_T = x0 (1 + mu T / n)^n = x0 e^{mu T} (1 - mu^2 T^2 / (2n) + ...).
  ref.weak_error_constant =
      -x0 * std::exp(mu * horizon) * mu * mu * horizon * horizon / 2.0;
  return ref;
}

AnalyticReference black_scholes_call_reference(double x0, double rate,
                                               double vol, double horizon,
                                               double strike) {
  if (!(x0 > 0.0) || !(vol > 0.0) || !(horizon > 0.0) || !(strike >= 0.0)) {
    throw std::invalid_argument(
        "call reference needs positive x0, vol, horizon and strike >= 0");
  }
  AnalyticReference ref;
  const double forward = x0 * std::exp(rate * horizon);
  if (strike == 0.0) {
    ref.exact_expectation = forward;
    return ref;
  }
  const double sd = vol * std::sqrt(horizon);
  const double d1 = (std::log(forward / strike) + 0.5 * sd * sd) / sd;
  const double d2 = d1 - sd;
  ref.exact_expectation = forward * normal_cdf(d1) - strike * normal_cdf(d2);
  return ref;
}

namespace {

double fd_step(double xk) { return 1e-6 * (1.0 + std::abs(xk)); }

double relative_gap(const Eigen::MatrixXd& exact, const Eigen::MatrixXd& fd) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < exact.size(); ++i) {
    const double scale = std::max(1.0, std::abs(exact(i)));
    worst = std::max(worst, std::abs(exact(i) - fd(i)) / scale);
  }
  return worst;
}

}  // namespace

double jacobian_fd_discrepancy(const SdeModeld& model,
                               std::span<const Eigen::VectorXd> states) {
  const Eigen::Index d = model.dim_state;
  const Eigen::Index q = model.dim_noise;
  double worst = 0.0;
  for (const auto& x : states) {
    Eigen::MatrixXd drift_fd(d, d);
    std::vector<Eigen::MatrixXd> diff_fd(q, Eigen::MatrixXd(d, d));
    for (Eigen::Index k = 0; k < d; ++k) {
      const double h = fd_step(x(k));
      Eigen::VectorXd up = x, down = x;
      up(k) += h;
      down(k) -= h;
      drift_fd.col(k) =
          (evaluate_drift(model, up) - evaluate_drift(model, down)) / (2 * h);
      const Eigen::MatrixXd sig_up = evaluate_diffusion(model, up);
      const Eigen::MatrixXd sig_down = evaluate_diffusion(model, down);
      for (Eigen::Index j = 0; j < q; ++j) {
        diff_fd[j].col(k) = (sig_up.col(j) - sig_down.col(j)) / (2 * h);
      }
    }
    worst = std::max(worst,
                     relative_gap(evaluate_drift_jacobian(model, x), drift_fd));
    const auto jacobians = evaluate_diffusion_jacobians(model, x);
    for (Eigen::Index j = 0; j < q; ++j) {
      worst = std::max(worst, relative_gap(jacobians[j], diff_fd[j]));
    }
  }
  return worst;
}

double gradient_fd_discrepancy(const Payoffd& payoff,
                               std::span<const Eigen::VectorXd> states) {
  double worst = 0.0;
  for (const auto& x : states) {
    const Eigen::Index d = x.size();
    if (payoff.kink_distance && payoff.kink_distance(x) < 2 * fd_step(x.norm())) {
      continue;
    }
    Eigen::VectorXd grad(d), fd(d);
    payoff.gradient(x, grad);
    for (Eigen::Index k = 0; k < d; ++k) {
      const double h = fd_step(x(k));
      Eigen::VectorXd up = x, down = x;
      up(k) += h;
      down(k) -= h;
      fd(k) = (payoff.value(up) - payoff.value(down)) / (2 * h);
    }
    worst = std::max(worst, relative_gap(grad, fd));
  }
  return worst;
}

double growth_ratio(const Payoffd& payoff, std::span<const Eigen::VectorXd> xs,
                    std::span<const Eigen::VectorXd> ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("growth check needs paired samples");
  }
  const double p = payoff.growth_exponent;
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dist = (xs[i] - ys[i]).norm();
    if (dist == 0.0) {
      continue;
    }
    const double envelope =
        (1.0 + std::pow(xs[i].norm(), p) + std::pow(ys[i].norm(), p)) * dist;
    worst = std::max(worst,
                     std::abs(payoff.value(xs[i]) - payoff.value(ys[i])) /
                         envelope);
  }
  return worst;
}

}  // namespace mlmc
