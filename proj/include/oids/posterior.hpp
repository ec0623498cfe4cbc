#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "json.hpp"
#include "oids/distribution.hpp"
#include "oids/model.hpp"

namespace oids {

struct Observation {
  std::size_t context = 0;
  std::size_t action = 0;
  double loss = 0.0;
};

// Exponential-weights distribution over the parameters of a model class,
// held in log space. Each update multiplies the weight of theta by
// p(L | theta, x, a)^eta * exp(-lambda * optimal_loss(theta, x)) and
// renormalizes. With eta = 1 and lambda = 0 this is the plain Bayes
// posterior.
//
// Values are immutable; update() returns a new posterior.
class OptimisticPosterior {
 public:
  // Uniform prior.
  OptimisticPosterior(std::shared_ptr<const ModelClass> model, double eta, double lambda);
  OptimisticPosterior(std::shared_ptr<const ModelClass> model, double eta, double lambda,
                      std::span<const double> prior);

  OptimisticPosterior update(std::size_t x, std::size_t a, double loss) const;
  OptimisticPosterior update(const Observation& obs) const { return update(obs.context, obs.action, obs.loss); }

  const ModelClass& model() const { return *model_; }
  const std::shared_ptr<const ModelClass>& model_ptr() const { return model_; }
  double eta() const { return eta_; }
  double lambda() const { return lambda_; }

  // Normalized so that log-sum-exp is 0; eliminated parameters hold -inf.
  std::span<const double> log_weights() const { return log_weights_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t theta) const { return weights_[theta]; }

  std::size_t support_size() const;
  // Shannon entropy in nats.
  double entropy() const;

  // Posterior predictive mixture of the loss laws of (x, a). Not available
  // for the gaussian family.
  LossDistribution predictive(std::size_t x, std::size_t a) const;
  // Posterior-weighted loss of (x, a) and posterior-weighted optimal loss.
  double surrogate_loss(std::size_t x, std::size_t a) const;
  double surrogate_optimal_loss(std::size_t x) const;

  // {param id: weight}
  nlohmann::json snapshot() const;

 private:
  OptimisticPosterior(std::shared_ptr<const ModelClass> model, double eta, double lambda,
                      std::vector<double> log_weights, int);

  std::shared_ptr<const ModelClass> model_;
  double eta_;
  double lambda_;
  std::vector<double> log_weights_;
  std::vector<double> weights_;
};

// Normalizes `log_weights` in place (log-sum-exp becomes 0) and returns the
// log normalizer. Returns -inf and leaves the input untouched when every
// entry is -inf.
double normalize_log_weights(std::vector<double>& log_weights);

// Both sides of the telescoping identity behind the optimistic posterior:
//   direct     = (1/lambda) log sum_theta Q1(theta) prod_t p_t(theta)^eta e^{-lambda l*_t(theta)}
//   telescoped = sum_t (1/lambda) log sum_theta Q_t(theta) p_t(theta)^eta e^{-lambda l*_t(theta)}
// where Q_t is the posterior after t-1 updates. Diagnostic only; lambda must
// be positive.
struct PotentialValues {
  double direct = 0.0;
  double telescoped = 0.0;
};
PotentialValues potential_phi(const OptimisticPosterior& prior, std::span<const Observation> trace,
                              double eta, double lambda);

}  // namespace oids
