#include "oids/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oids {

namespace {

bool two_point_family(Family f) { return f == Family::bernoulli || f == Family::ziu; }

LossDistribution two_point_law(Family f, double parameter) {
  return f == Family::bernoulli ? LossDistribution::bernoulli(parameter)
                                : LossDistribution::ziu(parameter);
}

// Posterior-mixed predictive for every action. Bernoulli and ZIU mix their
// scalar parameter directly.
std::vector<LossDistribution> predictives(const OptimisticPosterior& post, std::size_t x) {
  const ModelClass& model = post.model();
  const auto w = post.weights();
  std::vector<LossDistribution> out;
  out.reserve(model.num_actions());
  for (std::size_t a = 0; a < model.num_actions(); ++a) {
    if (two_point_family(model.family())) {
      double p = 0.0;
      for (std::size_t theta = 0; theta < w.size(); ++theta) {
        if (w[theta] > 0.0) p += w[theta] * model.loss_distribution(theta, x, a).parameter();
      }
      out.push_back(two_point_law(model.family(), std::clamp(p, 0.0, 1.0)));
    } else {
      out.push_back(post.predictive(x, a));
    }
  }
  return out;
}

template <typename Divergence>
std::vector<double> averaged_divergence(const OptimisticPosterior& post, std::size_t x,
                                        Divergence&& div) {
  const ModelClass& model = post.model();
  if (model.family() == Family::gaussian) {
    throw InvalidInput("gaussian family: use gaussian_surrogate_gain (squared-loss gains)");
  }
  const auto w = post.weights();
  const auto pbar = predictives(post, x);
  std::vector<double> out(model.num_actions(), 0.0);
  for (std::size_t a = 0; a < out.size(); ++a) {
    for (std::size_t theta = 0; theta < w.size(); ++theta) {
      if (w[theta] > 0.0) out[a] += w[theta] * div(model.loss_distribution(theta, x, a), pbar[a]);
    }
  }
  return out;
}

}  // namespace

GainMetric default_metric(Family family) {
  return family == Family::gaussian ? GainMetric::squared_loss : GainMetric::hellinger;
}

double RoundObjectives::max_gain() const {
  return gain_bar.empty() ? 0.0 : *std::max_element(gain_bar.begin(), gain_bar.end());
}

RoundObjectives compute_objectives(const OptimisticPosterior& post, std::size_t x, GainMetric metric) {
  const ModelClass& model = post.model();
  const auto w = post.weights();
  RoundObjectives obj;
  obj.metric = metric;
  obj.loss_bar.assign(model.num_actions(), 0.0);
  obj.delta_bar.assign(model.num_actions(), 0.0);
  for (std::size_t theta = 0; theta < w.size(); ++theta) {
    if (w[theta] == 0.0) continue;
    const auto row = model.losses(theta, x);
    const double best = model.optimal_loss(theta, x);
    obj.opt_bar += w[theta] * best;
    for (std::size_t a = 0; a < row.size(); ++a) {
      obj.loss_bar[a] += w[theta] * row[a];
      obj.delta_bar[a] += w[theta] * (row[a] - best);
    }
  }
  obj.gain_bar = metric == GainMetric::hellinger ? surrogate_gain(post, x)
                                                 : gaussian_surrogate_gain(post, x);
  return obj;
}

std::vector<double> surrogate_gain(const OptimisticPosterior& post, std::size_t x) {
  return averaged_divergence(post, x, [](const LossDistribution& p, const LossDistribution& q) {
    return hellinger_sq(p, q);
  });
}

std::vector<double> bayes_info_gain(const OptimisticPosterior& post, std::size_t x) {
  return averaged_divergence(post, x, [](const LossDistribution& p, const LossDistribution& q) {
    return kl(p, q);
  });
}

std::vector<double> gaussian_surrogate_gain(const OptimisticPosterior& post, std::size_t x) {
  const ModelClass& model = post.model();
  const auto w = post.weights();
  std::vector<double> out(model.num_actions(), 0.0);
  for (std::size_t a = 0; a < out.size(); ++a) {
    const double mean = post.surrogate_loss(x, a);
    for (std::size_t theta = 0; theta < w.size(); ++theta) {
      const double d = model.loss(theta, x, a) - mean;
      out[a] += w[theta] * d * d;
    }
  }
  return out;
}

double dot(std::span<const double> pi, std::span<const double> values) {
  if (pi.size() != values.size()) throw InvalidInput("policy and value vectors differ in length");
  double s = 0.0;
  for (std::size_t a = 0; a < pi.size(); ++a) s += pi[a] * values[a];
  return s;
}

std::optional<double> information_ratio(std::span<const double> delta_bar,
                                        std::span<const double> gain_bar,
                                        std::span<const double> pi) {
  const double num = dot(pi, delta_bar);
  if (num == 0.0) return 0.0;
  const double den = dot(pi, gain_bar);
  if (den <= kZeroInformation) return std::nullopt;
  return num * num / den;
}

double adec(std::span<const double> delta_bar, std::span<const double> gain_bar,
            std::span<const double> pi, double mu) {
  return dot(pi, delta_bar) - mu * dot(pi, gain_bar);
}

DecTable make_dec_table(const ModelClass& model, std::size_t x,
                        std::span<const LossDistribution> reference) {
  if (reference.size() != model.num_actions()) {
    throw InvalidInput("reference model needs one law per action");
  }
  DecTable table;
  table.num_params = model.num_params();
  table.num_actions = model.num_actions();
  table.regret.reserve(table.num_params * table.num_actions);
  table.divergence.reserve(table.num_params * table.num_actions);
  for (std::size_t theta = 0; theta < model.num_params(); ++theta) {
    for (std::size_t a = 0; a < model.num_actions(); ++a) {
      table.regret.push_back(model.loss(theta, x, a) - model.optimal_loss(theta, x));
      if (model.family() == Family::gaussian) {
        const double d = model.loss(theta, x, a) - reference[a].mean();
        table.divergence.push_back(d * d);
      } else {
        table.divergence.push_back(hellinger_sq(model.loss_distribution(theta, x, a), reference[a]));
      }
    }
  }
  return table;
}

double worst_case_dec(const DecTable& table, std::span<const double> pi, double gamma) {
  if (pi.size() != table.num_actions) throw InvalidInput("policy length differs from the action count");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t theta = 0; theta < table.num_params; ++theta) {
    double v = 0.0;
    for (std::size_t a = 0; a < table.num_actions; ++a) {
      v += pi[a] * (table.regret_at(theta, a) - gamma * table.divergence_at(theta, a));
    }
    best = std::max(best, v);
  }
  return best;
}

double worst_case_dec(const ModelClass& model, std::size_t x, std::span<const double> pi,
                      double gamma, std::span<const LossDistribution> reference) {
  return worst_case_dec(make_dec_table(model, x, reference), pi, gamma);
}

double TruthOracle::action_regret(std::size_t x, std::size_t a) const {
  const ModelClass& m = *env_->model;
  return m.loss(env_->true_param, x, a) - m.optimal_loss(env_->true_param, x);
}

double TruthOracle::policy_regret(std::size_t x, std::span<const double> pi) const {
  double r = 0.0;
  for (std::size_t a = 0; a < pi.size(); ++a) {
    if (pi[a] > 0.0) r += pi[a] * action_regret(x, a);
  }
  return r;
}

std::vector<double> TruthOracle::true_gain(const OptimisticPosterior& post, std::size_t x,
                                           GainMetric metric) const {
  const ModelClass& m = post.model();
  const std::size_t t0 = env_->true_param;
  const auto w = post.weights();
  std::vector<double> out(m.num_actions(), 0.0);
  for (std::size_t a = 0; a < out.size(); ++a) {
    for (std::size_t theta = 0; theta < w.size(); ++theta) {
      if (w[theta] == 0.0) continue;
      double d;
      if (metric == GainMetric::squared_loss) {
        const double diff = m.loss(theta, x, a) - m.loss(t0, x, a);
        d = diff * diff;
      } else {
        d = hellinger_sq(m.loss_distribution(t0, x, a), m.loss_distribution(theta, x, a));
      }
      out[a] += w[theta] * d;
    }
  }
  return out;
}

std::pair<double, double> TruthOracle::ue_og(const OptimisticPosterior& post, std::size_t x,
                                             std::span<const double> pi) const {
  const ModelClass& m = post.model();
  const std::size_t t0 = env_->true_param;
  double ue = 0.0;
  for (std::size_t a = 0; a < pi.size(); ++a) {
    if (pi[a] > 0.0) ue += pi[a] * (m.loss(t0, x, a) - post.surrogate_loss(x, a));
  }
  const double og = post.surrogate_optimal_loss(x) - m.optimal_loss(t0, x);
  return {ue, og};
}

}  // namespace oids
