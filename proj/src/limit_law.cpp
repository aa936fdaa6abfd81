#include "mlmc/limit_law.hpp"

#include <cmath>

#include "mlmc/parallel.hpp"
#include "mlmc/statistics.hpp"

namespace mlmc {

namespace {

// Variants 0..kMaxRedraws-1 of the W/B substreams are available per path.
constexpr unsigned kMaxRedraws = 4096;

bool on_kink(const Payoffd& payoff, const Eigen::VectorXd& x) {
  return payoff.kink_distance &&
         payoff.kink_distance(x) < 1e-12 * (1.0 + x.norm());
}

}  // namespace

std::vector<double> limit_samples(const SdeModeld& model, const Payoffd& payoff,
                                  const LimitSimConfig& config) {
  validate_model(model);
  validate_payoff(payoff);
  if (config.n_steps < 2 || config.samples < 2) {
    throw std::invalid_argument("limit simulation needs n_steps >= 2, samples >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(config.samples));
  parallel_for(out.size(), config.threads,
               [&](std::size_t begin, std::size_t end) {
                 LimitWorkspace<double> ws(model);
                 Eigen::VectorXd grad(model.dim_state);
                 for (std::size_t k = begin; k < end; ++k) {
                   for (unsigned variant = 0;; ++variant) {
                     if (variant == kMaxRedraws) {
                       throw std::runtime_error(
                           "limit draw keeps landing on the payoff kink set");
                     }
                     RngStreamKey w_key{config.master_seed, 0, k, 0,
                                        make_substream(StreamTag::kLimitW, variant)};
                     const auto draw = simulate_limit_draw(
                         model, config.n_steps, w_key,
                         limit_b_key(w_key, variant), ws);
                     if (on_kink(payoff, draw.x_terminal)) {
                       continue;
                     }
                     payoff.gradient(draw.x_terminal, grad);
                     out[k] = grad.dot(draw.u_terminal);
                     break;
                   }
                 }
               });
  return out;
}

LimitVariance summarize_limit_samples(const std::vector<double>& samples) {
  const SampleMoments moments = sample_moments(samples);
  LimitVariance result;
  result.sigma2 = moments.variance;
  result.std_error = variance_standard_error(moments);
  result.mean = moments.mean;
  result.samples = moments.count;
  return result;
}

LimitVariance estimate_limit_variance(const SdeModeld& model,
                                      const Payoffd& payoff,
                                      const LimitSimConfig& config) {
  return summarize_limit_samples(limit_samples(model, payoff, config));
}

std::vector<double> two_level_error_samples(const SdeModeld& model,
                                            const Payoffd& payoff, int level,
                                            int m, std::int64_t samples,
                                            std::uint64_t seed,
                                            unsigned threads) {
  validate_model(model);
  validate_payoff(payoff);
  if (level < 1 || m < 2 || samples < 1) {
    throw std::invalid_argument("two-level samples need level >= 1, m >= 2");
  }
  const double scale =
      std::sqrt(static_cast<double>(integer_power(m, level)) /
                ((m - 1) * model.horizon));
  std::vector<double> out(static_cast<std::size_t>(samples));
  parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    EulerWorkspace<double> ws(model);
    RngStreamKey key{seed, static_cast<std::uint32_t>(level), 0, 0,
                     make_substream(StreamTag::kTwoLevel)};
    for (std::size_t k = begin; k < end; ++k) {
      key.path_index = k;
      try {
        const auto pair = simulate_coupled(model, level, m, key, ws);
        out[k] = scale * (payoff.value(pair.fine) - payoff.value(pair.coarse));
      } catch (const DivergedPathError& e) {
        throw e.with_context(level, k);
      }
    }
  });
  return out;
}

}  // namespace mlmc
