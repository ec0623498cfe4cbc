#include "oids/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace oids {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(p^eta) with the convention that a zero likelihood stays -inf.
double tempered_log_likelihood(const LossDistribution& law, double loss, double eta) {
  const double lp = log_density(law, loss);
  return lp == kNegInf ? kNegInf : eta * lp;
}

}  // namespace

ModelInconsistency::ModelInconsistency(std::size_t context, std::size_t action, double loss)
    : std::runtime_error("observation impossible under every parameter: context " +
                         std::to_string(context) + ", action " + std::to_string(action) +
                         ", loss " + std::to_string(loss)),
      context_(context),
      action_(action),
      loss_(loss) {}

double normalize_log_weights(std::vector<double>& log_weights) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (top == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double lw : log_weights) sum += std::exp(lw - top);
  const double log_norm = top + std::log(sum);
  for (double& lw : log_weights) lw -= log_norm;
  return log_norm;
}

OptimisticPosterior::OptimisticPosterior(std::shared_ptr<const ModelClass> model, double eta,
                                         double lambda)
    : OptimisticPosterior(model, eta, lambda,
                          std::vector<double>(model ? model->num_params() : 0, 0.0), 0) {}

OptimisticPosterior::OptimisticPosterior(std::shared_ptr<const ModelClass> model, double eta,
                                         double lambda, std::span<const double> prior)
    : OptimisticPosterior(model, eta, lambda, [&] {
        std::vector<double> lw(prior.size());
        for (std::size_t i = 0; i < prior.size(); ++i) {
          if (!(prior[i] >= 0.0)) throw InvalidInput("prior weights must be nonnegative");
          lw[i] = prior[i] > 0.0 ? std::log(prior[i]) : kNegInf;
        }
        return lw;
      }(), 0) {}

OptimisticPosterior::OptimisticPosterior(std::shared_ptr<const ModelClass> model, double eta,
                                         double lambda, std::vector<double> log_weights, int)
    : model_(std::move(model)), eta_(eta), lambda_(lambda), log_weights_(std::move(log_weights)) {
  if (!model_) throw InvalidInput("posterior needs a model class");
  if (!(eta_ > 0.0)) throw InvalidInput("eta must be positive");
  if (!(lambda_ >= 0.0)) throw InvalidInput("lambda must be nonnegative");
  if (log_weights_.size() != model_->num_params()) {
    throw InvalidInput("prior must have one weight per parameter");
  }
  if (normalize_log_weights(log_weights_) == kNegInf) throw InvalidInput("prior has no mass");
  weights_.resize(log_weights_.size());
  for (std::size_t i = 0; i < log_weights_.size(); ++i) weights_[i] = std::exp(log_weights_[i]);
}

OptimisticPosterior OptimisticPosterior::update(std::size_t x, std::size_t a, double loss) const {
  std::vector<double> next(log_weights_.size());
  for (std::size_t theta = 0; theta < next.size(); ++theta) {
    if (log_weights_[theta] == kNegInf) {
      next[theta] = kNegInf;
      continue;
    }
    const double ll = tempered_log_likelihood(model_->loss_distribution(theta, x, a), loss, eta_);
    next[theta] = ll == kNegInf ? kNegInf
                                : log_weights_[theta] + ll - lambda_ * model_->optimal_loss(theta, x);
  }
  if (std::all_of(next.begin(), next.end(), [](double v) { return v == kNegInf; })) {
    throw ModelInconsistency(x, a, loss);
  }
  return OptimisticPosterior(model_, eta_, lambda_, std::move(next), 0);
}

std::size_t OptimisticPosterior::support_size() const {
  return static_cast<std::size_t>(
      std::count_if(weights_.begin(), weights_.end(), [](double w) { return w > 0.0; }));
}

double OptimisticPosterior::entropy() const {
  double h = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] > 0.0) h -= weights_[i] * log_weights_[i];
  }
  return h;
}

LossDistribution OptimisticPosterior::predictive(std::size_t x, std::size_t a) const {
  if (model_->family() == Family::gaussian) {
    throw InvalidInput(
        "no predictive mixture for the gaussian family; use surrogate_loss and squared-loss gains");
  }
  std::vector<const LossDistribution*> laws;
  std::vector<double> w;
  for (std::size_t theta = 0; theta < weights_.size(); ++theta) {
    if (weights_[theta] == 0.0) continue;
    laws.push_back(&model_->loss_distribution(theta, x, a));
    w.push_back(weights_[theta]);
  }
  return mixture(std::span<const LossDistribution* const>(laws), w);
}

double OptimisticPosterior::surrogate_loss(std::size_t x, std::size_t a) const {
  double s = 0.0;
  for (std::size_t theta = 0; theta < weights_.size(); ++theta) {
    s += weights_[theta] * model_->loss(theta, x, a);
  }
  return s;
}

double OptimisticPosterior::surrogate_optimal_loss(std::size_t x) const {
  double s = 0.0;
  for (std::size_t theta = 0; theta < weights_.size(); ++theta) {
    s += weights_[theta] * model_->optimal_loss(theta, x);
  }
  return s;
}

nlohmann::json OptimisticPosterior::snapshot() const {
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t theta = 0; theta < weights_.size(); ++theta) {
    out[model_->params()[theta]] = weights_[theta];
  }
  return out;
}

PotentialValues potential_phi(const OptimisticPosterior& prior, std::span<const Observation> trace,
                              double eta, double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("the potential function needs lambda > 0");
  const ModelClass& model = prior.model();
  const std::size_t n = model.num_params();

  auto increment = [&](std::size_t theta, const Observation& obs) {
    const double ll = tempered_log_likelihood(model.loss_distribution(theta, obs.context, obs.action),
                                              obs.loss, eta);
    return ll == kNegInf ? kNegInf : ll - lambda * model.optimal_loss(theta, obs.context);
  };

  std::vector<double> accumulated(prior.log_weights().begin(), prior.log_weights().end());
  PotentialValues out;
  OptimisticPosterior current(prior.model_ptr(), eta, lambda, prior.weights());
  for (const Observation& obs : trace) {
    std::vector<double> step(n);
    for (std::size_t theta = 0; theta < n; ++theta) {
      const double lw = current.log_weights()[theta];
      const double inc = lw == kNegInf ? kNegInf : increment(theta, obs);
      step[theta] = inc == kNegInf ? kNegInf : lw + inc;
      if (accumulated[theta] != kNegInf) {
        const double acc_inc = increment(theta, obs);
        accumulated[theta] = acc_inc == kNegInf ? kNegInf : accumulated[theta] + acc_inc;
      }
    }
    const double log_norm = normalize_log_weights(step);
    if (log_norm == kNegInf) throw ModelInconsistency(obs.context, obs.action, obs.loss);
    out.telescoped += log_norm / lambda;
    current = current.update(obs);
  }
  if (!trace.empty()) out.direct = normalize_log_weights(accumulated) / lambda;
  return out;
}

}  // namespace oids
