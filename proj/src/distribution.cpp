#include "oids/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

namespace oids {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbSumTolerance = 1e-12;
constexpr double kWeightSumTolerance = 1e-9;

void require_unit_interval(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidInput(std::string(what) + " must lie in [0,1], got " + std::to_string(value));
  }
}

// 0 * log(0 / q) = 0; p * log(p / 0) = +inf for p > 0.
double kl_term(double p, double q) {
  if (p <= 0.0) return 0.0;
  if (q <= 0.0) return kInf;
  return p * std::log(p / q);
}

double sqrt_diff_sq(double p, double q) {
  const double d = std::sqrt(p) - std::sqrt(q);
  return d * d;
}

// Calls fn(p_mass, q_mass) for every point of the union of two discrete
// supports; points missing from one side contribute mass 0 there.
template <typename Fn>
void for_union(const LossDistribution& p, const LossDistribution& q, Fn&& fn) {
  const auto ps = p.support();
  const auto pp = p.probs();
  const auto qs = q.support();
  const auto qp = q.probs();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ps.size() || j < qs.size()) {
    if (j == qs.size() || (i < ps.size() && ps[i] < qs[j])) {
      fn(pp[i++], 0.0);
    } else if (i == ps.size() || qs[j] < ps[i]) {
      fn(0.0, qp[j++]);
    } else {
      fn(pp[i++], qp[j++]);
    }
  }
}

enum class PairKind { two_point, discrete, gaussian };

// Resolves the family pair, applying the single Bernoulli -> discrete bridge.
PairKind classify(const LossDistribution& p, const LossDistribution& q) {
  const Family a = p.family();
  const Family b = q.family();
  if (a == b) {
    switch (a) {
      case Family::bernoulli:
      case Family::ziu:
        return PairKind::two_point;
      case Family::discrete:
        return PairKind::discrete;
      case Family::gaussian:
        return PairKind::gaussian;
    }
  }
  const bool bridge = (a == Family::bernoulli && b == Family::discrete) ||
                      (a == Family::discrete && b == Family::bernoulli);
  if (bridge) return PairKind::discrete;
  throw InvalidInput("loss distributions from different families: " + std::string(to_string(a)) +
                     " vs " + std::string(to_string(b)));
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::bernoulli:
      return "bernoulli";
    case Family::discrete:
      return "discrete";
    case Family::ziu:
      return "ziu";
    case Family::gaussian:
      return "gaussian";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "bernoulli") return Family::bernoulli;
  if (name == "discrete") return Family::discrete;
  if (name == "ziu") return Family::ziu;
  if (name == "gaussian") return Family::gaussian;
  throw InvalidInput("unknown likelihood family '" + std::string(name) + "'");
}

LossDistribution LossDistribution::bernoulli(double p) {
  require_unit_interval(p, "Bernoulli mean");
  return LossDistribution(Family::bernoulli, p);
}

LossDistribution LossDistribution::ziu(double atom) {
  require_unit_interval(atom, "zero-inflated uniform atom");
  return LossDistribution(Family::ziu, atom);
}

LossDistribution LossDistribution::gaussian(double mean) {
  if (!std::isfinite(mean)) throw InvalidInput("Gaussian mean must be finite");
  return LossDistribution(Family::gaussian, mean);
}

LossDistribution LossDistribution::point_mass(double value) {
  return discrete({value}, {1.0});
}

LossDistribution LossDistribution::discrete(std::vector<double> support, std::vector<double> probs) {
  if (support.size() != probs.size() || support.empty()) {
    throw InvalidInput("discrete law needs matching, non-empty support and probability lists");
  }
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });

  LossDistribution out(Family::discrete, 0.0);
  double total = 0.0;
  for (std::size_t k : order) {
    require_unit_interval(support[k], "discrete support value");
    if (!(probs[k] >= 0.0)) throw InvalidInput("discrete probabilities must be nonnegative");
    if (!out.support_.empty() && support[k] == out.support_.back()) {
      throw InvalidInput("discrete support values must be distinct");
    }
    total += probs[k];
    if (probs[k] == 0.0) continue;
    out.support_.push_back(support[k]);
    out.probs_.push_back(probs[k]);
  }
  if (std::abs(total - 1.0) > kProbSumTolerance) {
    throw InvalidInput("discrete probabilities sum to " + std::to_string(total) + ", not 1");
  }
  return out;
}

double LossDistribution::mean() const {
  switch (family_) {
    case Family::bernoulli:
    case Family::gaussian:
      return parameter_;
    case Family::ziu:
      return (1.0 - parameter_) / 2.0;
    case Family::discrete: {
      double m = 0.0;
      for (std::size_t i = 0; i < support_.size(); ++i) m += support_[i] * probs_[i];
      return m;
    }
  }
  return 0.0;
}

LossDistribution as_discrete(const LossDistribution& dist) {
  if (dist.family() == Family::discrete) return dist;
  if (dist.family() != Family::bernoulli) {
    throw InvalidInput("only Bernoulli laws convert to discrete laws");
  }
  const double p = dist.parameter();
  return LossDistribution::discrete({0.0, 1.0}, {1.0 - p, p});
}

double hellinger_sq(const LossDistribution& p, const LossDistribution& q) {
  switch (classify(p, q)) {
    case PairKind::two_point: {
      // Bernoulli mean or ZIU atom: both reduce to a two-cell comparison.
      const double a = p.parameter();
      const double b = q.parameter();
      return 0.5 * (sqrt_diff_sq(a, b) + sqrt_diff_sq(1.0 - a, 1.0 - b));
    }
    case PairKind::discrete: {
      const LossDistribution dp = as_discrete(p);
      const LossDistribution dq = as_discrete(q);
      double sum = 0.0;
      for_union(dp, dq, [&](double a, double b) { sum += sqrt_diff_sq(a, b); });
      return std::min(1.0, 0.5 * sum);
    }
    case PairKind::gaussian: {
      const double d = p.parameter() - q.parameter();
      return -std::expm1(-d * d / 8.0);
    }
  }
  return 0.0;
}

double kl(const LossDistribution& p, const LossDistribution& q) {
  switch (classify(p, q)) {
    case PairKind::two_point: {
      const double a = p.parameter();
      const double b = q.parameter();
      return kl_term(a, b) + kl_term(1.0 - a, 1.0 - b);
    }
    case PairKind::discrete: {
      const LossDistribution dp = as_discrete(p);
      const LossDistribution dq = as_discrete(q);
      double sum = 0.0;
      for_union(dp, dq, [&](double a, double b) { sum += kl_term(a, b); });
      return std::max(0.0, sum);
    }
    case PairKind::gaussian: {
      const double d = p.parameter() - q.parameter();
      return 0.5 * d * d;
    }
  }
  return 0.0;
}

double total_variation(const LossDistribution& p, const LossDistribution& q) {
  switch (classify(p, q)) {
    case PairKind::two_point:
      // Atom gap plus an equal gap spread over the continuous / complementary cell.
      return std::abs(p.parameter() - q.parameter());
    case PairKind::discrete: {
      const LossDistribution dp = as_discrete(p);
      const LossDistribution dq = as_discrete(q);
      double sum = 0.0;
      for_union(dp, dq, [&](double a, double b) { sum += std::abs(a - b); });
      return std::min(1.0, 0.5 * sum);
    }
    case PairKind::gaussian: {
      const double d = std::abs(p.parameter() - q.parameter());
      return std::erf(d / (2.0 * std::sqrt(2.0)));
    }
  }
  return 0.0;
}

LossDistribution mixture(std::span<const LossDistribution* const> dists,
                         std::span<const double> weights) {
  if (dists.empty() || dists.size() != weights.size()) {
    throw InvalidInput("mixture needs one weight per component");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidInput("mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw InvalidInput("mixture weights must sum to 1");
  }

  bool any_discrete = false;
  bool any_bernoulli = false;
  const Family first = dists.front()->family();
  for (const LossDistribution* d : dists) {
    const Family f = d->family();
    if (f == Family::gaussian) {
      throw InvalidInput(
          "Gaussian mixtures are not Gaussian; use squared-loss gains for the gaussian family");
    }
    any_discrete |= f == Family::discrete;
    any_bernoulli |= f == Family::bernoulli;
    if (f != first && !((f == Family::bernoulli || f == Family::discrete) &&
                        (first == Family::bernoulli || first == Family::discrete))) {
      throw InvalidInput("mixture components must share a family");
    }
  }

  if (!any_discrete) {
    double param = 0.0;
    for (std::size_t i = 0; i < dists.size(); ++i) param += weights[i] * dists[i]->parameter();
    param = std::clamp(param, 0.0, 1.0);
    return any_bernoulli ? LossDistribution::bernoulli(param) : LossDistribution::ziu(param);
  }

  std::vector<std::pair<double, double>> cells;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (weights[i] == 0.0) continue;
    if (dists[i]->family() == Family::bernoulli) {
      const double p = dists[i]->parameter();
      cells.emplace_back(0.0, weights[i] * (1.0 - p));
      cells.emplace_back(1.0, weights[i] * p);
      continue;
    }
    const auto s = dists[i]->support();
    const auto pr = dists[i]->probs();
    for (std::size_t k = 0; k < s.size(); ++k) cells.emplace_back(s[k], weights[i] * pr[k]);
  }
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> support;
  std::vector<double> probs;
  double mass = 0.0;
  for (const auto& [value, p] : cells) {
    if (!support.empty() && support.back() == value) {
      probs.back() += p;
    } else {
      support.push_back(value);
      probs.push_back(p);
    }
    mass += p;
  }
  for (double& p : probs) p /= mass;
  return LossDistribution::discrete(std::move(support), std::move(probs));
}

LossDistribution mixture(std::span<const LossDistribution> dists, std::span<const double> weights) {
  std::vector<const LossDistribution*> ptrs;
  ptrs.reserve(dists.size());
  for (const auto& d : dists) ptrs.push_back(&d);
  return mixture(std::span<const LossDistribution* const>(ptrs), weights);
}

double log_density(const LossDistribution& dist, double loss) {
  switch (dist.family()) {
    case Family::bernoulli: {
      if (loss == 1.0) return std::log(dist.parameter());
      if (loss == 0.0) return std::log1p(-dist.parameter());
      return -kInf;
    }
    case Family::discrete: {
      const auto s = dist.support();
      const auto it = std::lower_bound(s.begin(), s.end(), loss);
      if (it == s.end() || *it != loss) return -kInf;
      return std::log(dist.probs()[static_cast<std::size_t>(it - s.begin())]);
    }
    case Family::ziu: {
      if (loss == 0.0) return std::log(dist.parameter());
      if (loss > 0.0 && loss <= 1.0) return std::log1p(-dist.parameter());
      return -kInf;
    }
    case Family::gaussian: {
      const double d = loss - dist.parameter();
      return -0.5 * d * d - 0.5 * std::log(2.0 * M_PI);
    }
  }
  return -kInf;
}

double sample(const LossDistribution& dist, Rng& rng) {
  switch (dist.family()) {
    case Family::bernoulli:
      return rng.uniform01() < dist.parameter() ? 1.0 : 0.0;
    case Family::discrete:
      return dist.support()[rng.categorical(dist.probs())];
    case Family::ziu: {
      const bool atom = rng.uniform01() < dist.parameter();
      const double u = 1.0 - rng.uniform01();  // (0, 1]
      return atom ? 0.0 : u;
    }
    case Family::gaussian:
      return dist.parameter() + rng.normal();
  }
  return 0.0;
}

}  // namespace oids
