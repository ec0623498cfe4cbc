#include "oids/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "json.hpp"

namespace oids {

namespace {

constexpr double kRealizabilityTolerance = 1e-12;

LossDistribution law_for(Family family, double loss) {
  switch (family) {
    case Family::bernoulli:
      return LossDistribution::bernoulli(loss);
    case Family::gaussian:
      return LossDistribution::gaussian(loss);
    case Family::ziu:
      if (loss > 0.5) {
        throw InvalidInput("zero-inflated uniform losses need a mean of at most 1/2");
      }
      return LossDistribution::ziu(1.0 - 2.0 * loss);
    case Family::discrete:
      return LossDistribution::point_mass(loss);
  }
  throw InvalidInput("unknown family");
}

std::string id_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return v.dump();
  throw InvalidInput("parameter and context ids must be strings or numbers");
}

}  // namespace

ModelClass::ModelClass(std::vector<std::string> params, std::vector<std::string> contexts,
                       std::size_t num_actions, Family family, std::vector<double> loss_table,
                       std::vector<LossDistribution> distributions)
    : params_(std::move(params)),
      contexts_(std::move(contexts)),
      num_actions_(num_actions),
      family_(family),
      losses_(std::move(loss_table)),
      explicit_laws_(std::move(distributions)) {
  if (params_.empty()) throw InvalidInput("a model class needs at least one parameter");
  if (contexts_.empty()) throw InvalidInput("a model class needs at least one context");
  if (num_actions_ < 1) throw InvalidInput("a model class needs at least one action");
  const std::size_t cells = params_.size() * contexts_.size() * num_actions_;
  if (losses_.size() != cells) throw InvalidInput("loss table has the wrong shape");
  for (double l : losses_) {
    if (!(l >= 0.0 && l <= 1.0)) throw InvalidInput("loss-table entries must lie in [0,1]");
  }
  if (!explicit_laws_.empty()) {
    if (family_ != Family::discrete) {
      throw InvalidInput("explicit loss laws are only accepted for the discrete family");
    }
    if (explicit_laws_.size() != cells) throw InvalidInput("law table has the wrong shape");
  }

  laws_.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    LossDistribution law = explicit_laws_.empty() ? law_for(family_, losses_[c]) : explicit_laws_[c];
    if (law.family() != family_ && !(family_ == Family::discrete && law.family() == Family::bernoulli)) {
      throw InvalidInput("explicit law outside the declared family");
    }
    if (std::abs(law.mean() - losses_[c]) > kRealizabilityTolerance) {
      throw InvalidInput("law mean differs from the loss table (realizability violated)");
    }
    laws_.push_back(std::move(law));
  }

  optimal_.resize(params_.size() * contexts_.size());
  best_.resize(optimal_.size());
  for (std::size_t theta = 0; theta < params_.size(); ++theta) {
    for (std::size_t x = 0; x < contexts_.size(); ++x) {
      const auto row = losses(theta, x);
      const auto it = std::min_element(row.begin(), row.end());
      optimal_[theta * contexts_.size() + x] = *it;
      best_[theta * contexts_.size() + x] = static_cast<std::size_t>(it - row.begin());
    }
  }
}

std::size_t ModelClass::param_index(const std::string& id) const {
  const auto it = std::find(params_.begin(), params_.end(), id);
  if (it == params_.end()) throw InvalidInput("unknown parameter id '" + id + "'");
  return static_cast<std::size_t>(it - params_.begin());
}

double optimal_loss(const ModelClass& model, std::size_t theta, std::size_t x) {
  return model.optimal_loss(theta, x);
}

std::size_t best_action(const ModelClass& model, std::size_t theta, std::size_t x) {
  return model.best_action(theta, x);
}

const LossDistribution& loss_distribution(const ModelClass& model, std::size_t theta,
                                          std::size_t x, std::size_t a) {
  return model.loss_distribution(theta, x, a);
}

ModelClass model_from_json(const nlohmann::json& doc) {
  static const char* const kKeys[] = {"params", "contexts", "K", "family", "loss_table",
                                      "distributions"};
  if (!doc.is_object()) throw InvalidInput("model document must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw InvalidInput("unknown model key '" + key + "'");
    }
  }
  for (const char* key : {"params", "contexts", "K", "family", "loss_table"}) {
    if (!doc.contains(key)) throw InvalidInput(std::string("model document is missing '") + key + "'");
  }
  std::vector<std::string> params;
  for (const auto& p : doc.at("params")) params.push_back(id_string(p));
  std::vector<std::string> contexts;
  for (const auto& c : doc.at("contexts")) contexts.push_back(id_string(c));
  if (!doc.at("K").is_number_integer() || doc.at("K").get<long long>() < 2) {
    throw InvalidInput("'K' must be an integer >= 2");
  }
  const auto k = static_cast<std::size_t>(doc.at("K").get<long long>());
  const Family family = family_from_string(doc.at("family").get<std::string>());

  const auto& table = doc.at("loss_table");
  std::vector<double> losses;
  std::vector<LossDistribution> laws;
  const bool has_laws = doc.contains("distributions");
  if (table.size() != params.size()) throw InvalidInput("loss_table must have one block per parameter");
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (table[t].size() != contexts.size()) {
      throw InvalidInput("loss_table must have one row per context");
    }
    for (std::size_t x = 0; x < contexts.size(); ++x) {
      if (table[t][x].size() != k) throw InvalidInput("loss_table rows must have K entries");
      for (std::size_t a = 0; a < k; ++a) {
        losses.push_back(table[t][x][a].get<double>());
        if (!has_laws) continue;
        const auto& cell = doc.at("distributions").at(t).at(x).at(a);
        laws.push_back(LossDistribution::discrete(cell.at("support").get<std::vector<double>>(),
                                                  cell.at("probs").get<std::vector<double>>()));
      }
    }
  }
  return ModelClass(std::move(params), std::move(contexts), k, family, std::move(losses),
                    std::move(laws));
}

nlohmann::json model_to_json(const ModelClass& model) {
  nlohmann::json doc;
  doc["params"] = model.params();
  doc["contexts"] = model.contexts();
  doc["K"] = model.num_actions();
  doc["family"] = std::string(to_string(model.family()));
  nlohmann::json table = nlohmann::json::array();
  nlohmann::json laws = nlohmann::json::array();
  for (std::size_t t = 0; t < model.num_params(); ++t) {
    nlohmann::json block = nlohmann::json::array();
    nlohmann::json law_block = nlohmann::json::array();
    for (std::size_t x = 0; x < model.num_contexts(); ++x) {
      const auto row = model.losses(t, x);
      block.push_back(std::vector<double>(row.begin(), row.end()));
      nlohmann::json law_row = nlohmann::json::array();
      for (std::size_t a = 0; a < model.num_actions() && !model.explicit_laws().empty(); ++a) {
        const auto& law = as_discrete(model.loss_distribution(t, x, a));
        law_row.push_back({{"support", std::vector<double>(law.support().begin(), law.support().end())},
                           {"probs", std::vector<double>(law.probs().begin(), law.probs().end())}});
      }
      law_block.push_back(std::move(law_row));
    }
    table.push_back(std::move(block));
    laws.push_back(std::move(law_block));
  }
  doc["loss_table"] = std::move(table);
  if (!model.explicit_laws().empty()) doc["distributions"] = std::move(laws);
  return doc;
}

std::size_t Environment::sample_context(Rng& rng) const {
  const std::size_t n = model->num_contexts();
  if (n == 1) return 0;
  if (context_probs.empty()) return rng.index(n);
  return rng.categorical(context_probs);
}

double Environment::context_prob(std::size_t x) const {
  if (context_probs.empty()) return 1.0 / static_cast<double>(model->num_contexts());
  return context_probs[x];
}

Environment make_environment(std::shared_ptr<const ModelClass> model, std::size_t true_param,
                             std::vector<double> context_probs) {
  if (!model) throw InvalidInput("environment needs a model class");
  if (true_param >= model->num_params()) throw InvalidInput("true parameter outside the model class");
  if (!context_probs.empty()) {
    if (context_probs.size() != model->num_contexts()) {
      throw InvalidInput("context distribution must have one entry per context");
    }
    double total = 0.0;
    for (double p : context_probs) {
      if (!(p >= 0.0)) throw InvalidInput("context probabilities must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("context probabilities must sum to 1");
  }
  Environment env;
  env.model = std::move(model);
  env.true_param = true_param;
  env.context_probs = std::move(context_probs);
  return env;
}

double sample_loss(const Environment& env, std::size_t x, std::size_t a, Rng& rng) {
  if (env.source) {
    const double l = sample(env.source->loss_distribution(env.true_param, x, a), rng);
    return rng.uniform01() < l ? 1.0 : 0.0;
  }
  return sample(env.model->loss_distribution(env.true_param, x, a), rng);
}

Environment binarize(const Environment& env) {
  const ModelClass& src = env.source ? *env.source : *env.model;
  if (src.family() == Family::gaussian) {
    throw InvalidInput("binarization needs losses in [0,1]; gaussian losses are unbounded");
  }
  auto declared = std::make_shared<const ModelClass>(
      src.params(), src.contexts(), src.num_actions(), Family::bernoulli,
      std::vector<double>(src.loss_table().begin(), src.loss_table().end()));
  Environment out = env;
  out.source = env.source ? env.source : env.model;
  out.model = std::move(declared);
  return out;
}

}  // namespace oids
