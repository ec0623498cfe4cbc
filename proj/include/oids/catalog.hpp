#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oids/model.hpp"
#include "oids/objectives.hpp"

namespace oids {

// Actions 0..K, parameters "1".."K", one context, point-mass losses
//   l(theta, 0) = 1 - 2^-theta,  l(theta, a) = 1{a != theta} for a >= 1.
std::shared_ptr<const ModelClass> revealing_action_model(std::size_t K);
Environment make_revealing_action(std::size_t K, std::size_t theta0_index = 0);

// Parameters are the d coordinate vectors ("1".."d"); action index m - 1
// stands for the normalized indicator of the nonzero bitmask m. Point-mass
// losses l(theta, a) = 1 - <a, theta>. Requires 2 <= d <= 12.
std::shared_ptr<const ModelClass> sparse_linear_model(std::size_t d);
Environment make_sparse_linear(std::size_t d, std::size_t theta0_index = 0);
// Number of coordinates in the support of action index `a`.
std::size_t sparse_action_size(std::size_t a);

// Parameters and actions 0..K-1 (ids "1".."K"), one context, ZIU losses with
// mean 1/2 - Delta on a = theta and 1/2 elsewhere. Requires 0 < Delta <= 1/2.
std::shared_ptr<const ModelClass> revelatory_zero_model(std::size_t K, double delta);
Environment make_revelatory_zero(std::size_t K, double delta, std::size_t theta0_index = 0);

// DEC table of the revelatory-zero class once theta0 has been identified and
// the reference model is theta0's: regret Delta 1{a != theta} and divergence
// 1{theta != theta0}, i.e. every alternative counts as fully distinguishable.
DecTable revelatory_zero_identified_table(std::size_t K, double delta, std::size_t theta0_index);

// Loss table i.i.d. U[0,1] drawn from Rng(seed) in table order (theta-major,
// then context, then action), followed by theta0 = index(N) from the same
// stream. Family bernoulli or gaussian.
Environment make_random_instance(std::size_t K, std::size_t N, std::size_t contexts,
                                 std::uint64_t seed, Family family = Family::bernoulli);
Environment make_random_bernoulli(std::size_t K, std::size_t N, std::size_t contexts,
                                  std::uint64_t seed);

enum class InstanceKind {
  revealing_action,
  sparse_linear,
  revelatory_zero,
  random_bernoulli,
  random_gaussian,
  model_file,
};

std::string_view to_string(InstanceKind kind);
InstanceKind instance_kind_from_string(std::string_view name);

// Everything needed to rebuild an environment.
struct InstanceRecipe {
  InstanceKind kind = InstanceKind::revealing_action;
  std::optional<std::size_t> K;
  std::optional<std::size_t> d;
  std::optional<double> delta;
  std::optional<std::size_t> N;
  std::optional<std::size_t> contexts;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> path;
  // Parameter id; unset means drawn per repetition.
  std::optional<std::string> theta0;
  std::vector<double> context_probs;
  bool binarize = false;

  std::string describe() const;
  friend bool operator==(const InstanceRecipe&, const InstanceRecipe&) = default;
};

// The model class of a recipe; validates required parameters.
std::shared_ptr<const ModelClass> build_model(const InstanceRecipe& recipe);

// Environment for one repetition. With no explicit theta0, the true
// parameter is Rng(derive_seed(repetition_seed, 0)).index(N).
Environment instantiate(const InstanceRecipe& recipe, std::shared_ptr<const ModelClass> model,
                        std::uint64_t repetition_seed);

}  // namespace oids
