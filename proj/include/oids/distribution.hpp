#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "oids/errors.hpp"
#include "oids/random.hpp"

namespace oids {

enum class Family { bernoulli, discrete, ziu, gaussian };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

// A loss law from one of four closed families.
//
//   bernoulli  Ber(p), p in [0,1]
//   discrete   finite law on distinct values in [0,1]
//   ziu        zero-inflated uniform: mass q at 0, density (1-q) on (0,1]
//   gaussian   N(m, 1)
//
// Values are immutable. Discrete laws are stored with sorted support and
// strictly positive probabilities; zero-probability points are dropped on
// construction.
class LossDistribution {
 public:
  static LossDistribution bernoulli(double p);
  static LossDistribution discrete(std::vector<double> support, std::vector<double> probs);
  static LossDistribution point_mass(double value);
  static LossDistribution ziu(double atom);
  static LossDistribution gaussian(double mean);

  Family family() const { return family_; }
  // Ber mean, ZIU atom or Gaussian mean. Zero for discrete laws.
  double parameter() const { return parameter_; }
  std::span<const double> support() const { return support_; }
  std::span<const double> probs() const { return probs_; }

  double mean() const;

  friend bool operator==(const LossDistribution&, const LossDistribution&) = default;

 private:
  LossDistribution(Family family, double parameter) : family_(family), parameter_(parameter) {}

  Family family_;
  double parameter_ = 0.0;
  std::vector<double> support_;
  std::vector<double> probs_;
};

// Bernoulli laws re-expressed over {0, 1}; discrete laws returned unchanged.
LossDistribution as_discrete(const LossDistribution& dist);

// Squared Hellinger distance, 1/2 * integral (sqrt(dP) - sqrt(dQ))^2.
// Bernoulli and discrete arguments may be mixed; every other family
// combination throws InvalidInput.
double hellinger_sq(const LossDistribution& p, const LossDistribution& q);

// KL(P || Q). Returns +infinity when Q does not dominate P.
double kl(const LossDistribution& p, const LossDistribution& q);

double total_variation(const LossDistribution& p, const LossDistribution& q);

// Weighted mixture of same-family laws. Components with zero weight are
// ignored. Gaussian mixtures leave the family and are rejected.
LossDistribution mixture(std::span<const LossDistribution* const> dists,
                         std::span<const double> weights);
LossDistribution mixture(std::span<const LossDistribution> dists, std::span<const double> weights);

// Log density with respect to the family's reference measure: counting
// measure (bernoulli, discrete), delta_0 + Lebesgue on (0,1] (ziu), Lebesgue
// (gaussian). Returns -infinity outside the support.
double log_density(const LossDistribution& dist, double loss);

double sample(const LossDistribution& dist, Rng& rng);

}  // namespace oids
