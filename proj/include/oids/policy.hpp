#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oids/objectives.hpp"
#include "oids/posterior.hpp"
#include "oids/random.hpp"

namespace oids {

class PolicyDistribution {
 public:
  // Validates nonnegativity and normalization (within 1e-10 after a final
  // renormalization pass of at most 1e-9).
  explicit PolicyDistribution(std::vector<double> probs);

  static PolicyDistribution delta(std::size_t num_actions, std::size_t action);
  static PolicyDistribution uniform(std::size_t num_actions);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t a) const { return probs_[a]; }
  std::span<const double> probs() const { return probs_; }

  std::size_t sample(Rng& rng) const { return rng.categorical(probs_); }

 private:
  std::vector<double> probs_;
};

// Lowest-index minimizer.
std::size_t argmin(std::span<const double> values);

// Minimizer of (pi . delta)^2 / (pi . gain) over the simplex, searched over
// singletons and two-action supports with a closed-form interior point.
// Scan order: singleton i, then pairs (i, j > i); among values equal within
// a relative 1e-12 the first one found wins. nullopt when max gain is at
// most kZeroInformation (callers fall back to greedy).
std::optional<PolicyDistribution> voids(std::span<const double> delta_bar,
                                        std::span<const double> gain_bar);

// Greedy on the surrogate loss: delta at the lowest-index argmin.
PolicyDistribution greedy(std::span<const double> loss_bar);

// delta at argmin_a (delta(a) - mu * gain(a)); ties within a relative 1e-12
// go to the lowest index.
PolicyDistribution roids(std::span<const double> delta_bar, std::span<const double> gain_bar, double mu);

// pi(a) = sum_theta Q(theta) 1{best_action(theta, x) = a}
PolicyDistribution fgts_policy(const OptimisticPosterior& post, std::size_t x);

// Inverse gap weighting around b = argmin loss_bar:
//   pi(a) = lbar(b) / (K lbar(b) + gamma (lbar(a) - lbar(b)))   for a != b
// and pi(b) takes the remaining mass.
PolicyDistribution igw_policy(std::span<const double> loss_bar, double gamma);

struct E2DOptions {
  double tolerance = 1e-4;
  std::size_t max_iterations = 100000;
};

struct E2DResult {
  PolicyDistribution policy;
  double value = 0.0;  // worst-case DEC of `policy`
  double gap = 0.0;    // certified duality gap
  std::size_t iterations = 0;
};

// min_pi max_theta sum_a pi(a) (regret - gamma * divergence), solved as a
// matrix game with optimistic multiplicative weights for both players.
// Throws SolverError when the duality gap is still above tolerance after
// max_iterations.
E2DResult e2d_policy(const DecTable& table, double gamma, const E2DOptions& options = {});

// Hyperparameter schedules.
enum class MuVariant { proof, statement };  // v max 1, v min 1

double lambda_worst_case(std::size_t K, std::size_t N, std::size_t T);
double lambda_first_order(std::size_t K, std::size_t N, double lstar);
double lambda_subgaussian(std::size_t K, std::size_t N, std::size_t T, double v,
                          MuVariant variant = MuVariant::proof);
// 1 / (10 lambda)
double mu_from_lambda(double lambda);
// 1 / (80 lambda vv) with vv = max(v,1) (proof) or min(v,1) (statement)
double mu_subgaussian(double lambda, double v, MuVariant variant = MuVariant::proof);
inline constexpr double kHellingerEta = 0.25;
// (1 + sqrt(1 - min(v,1))) / (2v)
double eta_subgaussian(double v);

enum class AlgorithmKind {
  voids,
  roids,
  fgts,
  thompson,
  bayes_ids,
  igw,
  e2d,
  uniform,
  greedy,
  voids_sg,
  roids_sg,
};

std::string_view to_string(AlgorithmKind kind);
AlgorithmKind algorithm_kind_from_string(std::string_view name);

enum class LambdaSchedule { fixed, worst_case, first_order, subgaussian };

std::string_view to_string(LambdaSchedule schedule);

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::voids;
  std::optional<double> eta;
  // Schedule tag, or `fixed` with `lambda` holding the value. Unset means
  // the kind's default schedule.
  std::optional<LambdaSchedule> lambda_schedule;
  std::optional<double> lambda;
  std::optional<double> mu;
  std::optional<double> gamma;
  double v = 1.0;
  MuVariant mu_variant = MuVariant::proof;
  std::optional<double> lstar;
  std::string label;

  std::string display_name() const;
  friend bool operator==(const AlgorithmSpec&, const AlgorithmSpec&) = default;
};

struct ProblemSize {
  std::size_t num_actions = 0;
  std::size_t num_params = 0;
  std::size_t horizon = 0;
  Family family = Family::bernoulli;
  std::optional<double> lstar;
};

struct ResolvedAlgorithm {
  AlgorithmKind kind = AlgorithmKind::voids;
  std::string name;
  // Posterior stepsizes; eta = 1, lambda = 0 is the plain posterior.
  double eta = 1.0;
  double lambda = 0.0;
  std::optional<double> mu;
  std::optional<double> gamma;
  GainMetric metric = GainMetric::hellinger;
  E2DOptions e2d;

  bool uses_posterior() const;
};

// Fills in schedules and defaults and checks per-kind requirements.
ResolvedAlgorithm resolve(const AlgorithmSpec& spec, const ProblemSize& size);

struct PolicyDecision {
  PolicyDistribution policy;
  bool greedy_fallback = false;
};

// Round policy of `algo` given its posterior and the round's context.
// `objectives` may carry precomputed objectives for the same posterior and
// context (with the metric of `algo`).
PolicyDecision select_policy(const ResolvedAlgorithm& algo, const OptimisticPosterior& post,
                             std::size_t x, const RoundObjectives* objectives = nullptr);

}  // namespace oids
