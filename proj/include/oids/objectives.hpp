#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "oids/model.hpp"
#include "oids/posterior.hpp"

namespace oids {

// Below this, max_a gain(a) means the posterior carries no information and
// ratio-based policies hand over to the greedy fallback.
inline constexpr double kZeroInformation = 1e-12;

enum class GainMetric { hellinger, squared_loss };

// Hellinger for bounded families, squared loss for gaussian.
GainMetric default_metric(Family family);

struct RoundObjectives {
  std::vector<double> loss_bar;   // surrogate loss per action
  double opt_bar = 0.0;           // surrogate optimal loss
  std::vector<double> delta_bar;  // surrogate regret per action, >= 0
  std::vector<double> gain_bar;   // surrogate information gain per action
  GainMetric metric = GainMetric::hellinger;

  double max_gain() const;
};

RoundObjectives compute_objectives(const OptimisticPosterior& post, std::size_t x, GainMetric metric);

// sum_theta Q(theta) H^2(p(theta,x,a), pbar(a)) for every a.
std::vector<double> surrogate_gain(const OptimisticPosterior& post, std::size_t x);
// sum_theta Q(theta) (l(theta,x,a) - lbar(a))^2 for every a.
std::vector<double> gaussian_surrogate_gain(const OptimisticPosterior& post, std::size_t x);
// sum_theta Q(theta) KL(p(theta,x,a) || pbar(a)) for every a.
std::vector<double> bayes_info_gain(const OptimisticPosterior& post, std::size_t x);

double dot(std::span<const double> pi, std::span<const double> values);

// (pi . delta)^2 / (pi . gain). Zero when the numerator vanishes; nullopt
// ("no information") when the denominator is at most kZeroInformation.
std::optional<double> information_ratio(std::span<const double> delta_bar,
                                        std::span<const double> gain_bar,
                                        std::span<const double> pi);

// pi . delta - mu * pi . gain
double adec(std::span<const double> delta_bar, std::span<const double> gain_bar,
            std::span<const double> pi, double mu);

// Per-(theta, a) regret and divergence from a reference model at one
// context; the input of the worst-case DEC and of E2D.
struct DecTable {
  std::size_t num_params = 0;
  std::size_t num_actions = 0;
  std::vector<double> regret;      // theta-major
  std::vector<double> divergence;  // theta-major

  double regret_at(std::size_t theta, std::size_t a) const { return regret[theta * num_actions + a]; }
  double divergence_at(std::size_t theta, std::size_t a) const {
    return divergence[theta * num_actions + a];
  }
};

// Divergence is H^2(p(theta,x,a), reference[a]); for the gaussian family it
// is the squared distance between the mean of theta and the reference mean.
DecTable make_dec_table(const ModelClass& model, std::size_t x,
                        std::span<const LossDistribution> reference);

// max_theta sum_a pi(a) (regret - gamma * divergence)
double worst_case_dec(const DecTable& table, std::span<const double> pi, double gamma);
double worst_case_dec(const ModelClass& model, std::size_t x, std::span<const double> pi,
                      double gamma, std::span<const LossDistribution> reference);

// The only component allowed to look at the true parameter. Used for regret
// accounting and diagnostics.
class TruthOracle {
 public:
  explicit TruthOracle(const Environment& env) : env_(&env) {}

  std::size_t true_param() const { return env_->true_param; }

  // l(theta0,x,a) - l*(theta0,x)
  double action_regret(std::size_t x, std::size_t a) const;
  double policy_regret(std::size_t x, std::span<const double> pi) const;

  // sum_theta Q(theta) D(p(theta0,x,a), p(theta,x,a)) for every a, with D the
  // squared Hellinger distance or the squared difference of means.
  std::vector<double> true_gain(const OptimisticPosterior& post, std::size_t x,
                                GainMetric metric) const;

  // {UE, OG} = {sum_a pi(a) (l(theta0,x,a) - lbar(a)), lbar* - l*(theta0,x)}
  std::pair<double, double> ue_og(const OptimisticPosterior& post, std::size_t x,
                                  std::span<const double> pi) const;

 private:
  const Environment* env_;
};

}  // namespace oids
