#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "oids/distribution.hpp"
#include "oids/random.hpp"

namespace oids {

// A finite parametric contextual-bandit model: parameters x contexts x
// actions, a loss-mean table and the likelihood family tying each mean to a
// loss law.
//
// Loss laws per family:
//   bernoulli  Ber(l)
//   gaussian   N(l, 1)
//   ziu        zero-inflated uniform with atom 1 - 2l (requires l <= 1/2)
//   discrete   explicit table; point mass at l when no table is given
//
// All laws are built once at construction and the realizability condition
// |mean(law) - l| <= 1e-12 is checked for every triple.
class ModelClass {
 public:
  ModelClass(std::vector<std::string> params, std::vector<std::string> contexts,
             std::size_t num_actions, Family family, std::vector<double> loss_table,
             std::vector<LossDistribution> distributions = {});

  std::size_t num_params() const { return params_.size(); }
  std::size_t num_contexts() const { return contexts_.size(); }
  std::size_t num_actions() const { return num_actions_; }
  Family family() const { return family_; }
  const std::vector<std::string>& params() const { return params_; }
  const std::vector<std::string>& contexts() const { return contexts_; }

  // Index of a parameter id; throws InvalidInput for unknown ids.
  std::size_t param_index(const std::string& id) const;

  double loss(std::size_t theta, std::size_t x, std::size_t a) const {
    return losses_[offset(theta, x) + a];
  }
  std::span<const double> losses(std::size_t theta, std::size_t x) const {
    return {losses_.data() + offset(theta, x), num_actions_};
  }
  const LossDistribution& loss_distribution(std::size_t theta, std::size_t x, std::size_t a) const {
    return laws_[offset(theta, x) + a];
  }
  // min_a loss(theta, x, a)
  double optimal_loss(std::size_t theta, std::size_t x) const {
    return optimal_[theta * contexts_.size() + x];
  }
  // Lowest-index minimizer of loss(theta, x, .).
  std::size_t best_action(std::size_t theta, std::size_t x) const {
    return best_[theta * contexts_.size() + x];
  }

  // The full table, theta-major then context then action.
  std::span<const double> loss_table() const { return losses_; }
  // Explicit law table for the discrete family (empty otherwise).
  const std::vector<LossDistribution>& explicit_laws() const { return explicit_laws_; }

 private:
  std::size_t offset(std::size_t theta, std::size_t x) const {
    return (theta * contexts_.size() + x) * num_actions_;
  }

  std::vector<std::string> params_;
  std::vector<std::string> contexts_;
  std::size_t num_actions_;
  Family family_;
  std::vector<double> losses_;
  std::vector<LossDistribution> explicit_laws_;
  std::vector<LossDistribution> laws_;
  std::vector<double> optimal_;
  std::vector<std::size_t> best_;
};

double optimal_loss(const ModelClass& model, std::size_t theta, std::size_t x);
std::size_t best_action(const ModelClass& model, std::size_t theta, std::size_t x);
const LossDistribution& loss_distribution(const ModelClass& model, std::size_t theta,
                                          std::size_t x, std::size_t a);

// {"params":[...], "contexts":[...], "K":int, "family":string,
//  "loss_table":[[[...]]], "distributions":[[[{"support":[],"probs":[]}]]]}
// "distributions" is optional and only valid for the discrete family.
ModelClass model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const ModelClass& model);

// The simulated world: a model class, the true parameter and the context
// distribution. A binarized environment keeps its original model as
// `source`: draws come from the source law and are then rounded to {0,1}.
struct Environment {
  std::shared_ptr<const ModelClass> model;
  std::size_t true_param = 0;
  // Empty means uniform over contexts.
  std::vector<double> context_probs;
  std::shared_ptr<const ModelClass> source;

  const ModelClass& declared() const { return *model; }
  // Single-context environments do not consume randomness.
  std::size_t sample_context(Rng& rng) const;
  double context_prob(std::size_t x) const;
};

Environment make_environment(std::shared_ptr<const ModelClass> model, std::size_t true_param,
                             std::vector<double> context_probs = {});

// Draw from the true law of (x, a).
double sample_loss(const Environment& env, std::size_t x, std::size_t a, Rng& rng);

// Randomized rounding wrapper: observed loss B ~ Ber(L) with L drawn from the
// source law. The declared model is the same loss table under the Bernoulli
// family. Gaussian sources are rejected.
Environment binarize(const Environment& env);

}  // namespace oids
