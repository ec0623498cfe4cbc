#include "oids/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace oids {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-12;

// True when `value` beats `incumbent` by more than the tie tolerance.
bool strictly_better(double value, double incumbent) {
  if (incumbent == kInf) return value < kInf;
  return value < incumbent - kTieTolerance * std::max(1.0, std::abs(incumbent));
}

// Exact ratio; the zero-information threshold applies only to max gain.
double ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den <= 0.0) return kInf;
  return num * num / den;
}

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 1) throw InvalidInput("objective vectors differ in length");
}

}  // namespace

PolicyDistribution::PolicyDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidInput("a policy needs at least one action");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw InvalidInput("policy probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("policy probabilities must sum to 1");
  for (double& p : probs_) p /= total;
}

PolicyDistribution PolicyDistribution::delta(std::size_t num_actions, std::size_t action) {
  if (action >= num_actions) throw InvalidInput("action index out of range");
  std::vector<double> p(num_actions, 0.0);
  p[action] = 1.0;
  return PolicyDistribution(std::move(p));
}

PolicyDistribution PolicyDistribution::uniform(std::size_t num_actions) {
  return PolicyDistribution(std::vector<double>(num_actions, 1.0 / static_cast<double>(num_actions)));
}

std::size_t argmin(std::span<const double> values) {
  return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
}

std::optional<PolicyDistribution> voids(std::span<const double> delta_bar,
                                        std::span<const double> gain_bar) {
  check_lengths(delta_bar, gain_bar);
  const std::size_t k = delta_bar.size();
  if (*std::max_element(gain_bar.begin(), gain_bar.end()) <= kZeroInformation) return std::nullopt;

  double best = kInf;
  std::size_t bi = 0;
  std::size_t bj = 0;
  double bq = 1.0;
  auto consider = [&](double value, std::size_t i, std::size_t j, double q) {
    if (strictly_better(value, best)) {
      best = value;
      bi = i;
      bj = j;
      bq = q;
    }
  };

  for (std::size_t i = 0; i < k; ++i) {
    consider(ratio(delta_bar[i], gain_bar[i]), i, i, 1.0);
    for (std::size_t j = i + 1; j < k; ++j) {
      // pi = q e_i + (1-q) e_j: numerator dj + b q, denominator gj + d q.
      const double dj = delta_bar[j];
      const double gj = gain_bar[j];
      const double b = delta_bar[i] - dj;
      const double d = gain_bar[i] - gj;
      double roots[2];
      int n = 0;
      if (b != 0.0) {
        roots[n++] = -dj / b;
        if (d != 0.0) roots[n++] = (d * dj - 2.0 * b * gj) / (b * d);
      }
      for (int r = 0; r < n; ++r) {
        const double q = roots[r];
        if (!(q > 0.0 && q < 1.0)) continue;
        consider(ratio(dj + b * q, gj + d * q), i, j, q);
      }
    }
  }
  if (best == kInf) return std::nullopt;
  std::vector<double> pi(k, 0.0);
  pi[bi] += bq;
  if (bj != bi) pi[bj] += 1.0 - bq;
  return PolicyDistribution(std::move(pi));
}

PolicyDistribution greedy(std::span<const double> loss_bar) {
  return PolicyDistribution::delta(loss_bar.size(), argmin(loss_bar));
}

PolicyDistribution roids(std::span<const double> delta_bar, std::span<const double> gain_bar, double mu) {
  check_lengths(delta_bar, gain_bar);
  double best = kInf;
  std::size_t pick = 0;
  for (std::size_t a = 0; a < delta_bar.size(); ++a) {
    const double score = delta_bar[a] - mu * gain_bar[a];
    if (strictly_better(score, best)) {
      best = score;
      pick = a;
    }
  }
  return PolicyDistribution::delta(delta_bar.size(), pick);
}

PolicyDistribution fgts_policy(const OptimisticPosterior& post, std::size_t x) {
  const ModelClass& model = post.model();
  std::vector<double> pi(model.num_actions(), 0.0);
  const auto w = post.weights();
  for (std::size_t theta = 0; theta < w.size(); ++theta) pi[model.best_action(theta, x)] += w[theta];
  return PolicyDistribution(std::move(pi));
}

PolicyDistribution igw_policy(std::span<const double> loss_bar, double gamma) {
  if (!(gamma >= 0.0)) throw InvalidInput("IGW scale gamma must be nonnegative");
  const std::size_t k = loss_bar.size();
  const std::size_t b = argmin(loss_bar);
  const double lb = loss_bar[b];
  if (lb <= 0.0) return PolicyDistribution::delta(k, b);
  std::vector<double> pi(k, 0.0);
  double rest = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    if (a == b) continue;
    pi[a] = lb / (static_cast<double>(k) * lb + gamma * (loss_bar[a] - lb));
    rest += pi[a];
  }
  pi[b] = std::max(0.0, 1.0 - rest);
  return PolicyDistribution(std::move(pi));
}

E2DResult e2d_policy(const DecTable& table, double gamma, const E2DOptions& options) {
  if (!(gamma >= 0.0)) throw InvalidInput("E2D scale gamma must be nonnegative");
  const std::size_t n = table.num_params;
  const std::size_t k = table.num_actions;
  if (n == 0 || k == 0) throw InvalidInput("empty DEC table");
  std::vector<double> m(n * k);
  double range = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = table.regret[i] - gamma * table.divergence[i];
    range = std::max(range, std::abs(m[i]));
  }

  // Row player (theta) maximizes, column player (pi) minimizes.
  auto row_payoffs = [&](std::span<const double> pi, std::vector<double>& out) {
    out.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t a = 0; a < k; ++a) out[t] += m[t * k + a] * pi[a];
    }
  };
  auto column_losses = [&](std::span<const double> y, std::vector<double>& out) {
    out.assign(k, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t a = 0; a < k; ++a) out[a] += y[t] * m[t * k + a];
    }
  };

  std::vector<double> upper_pi(k, 1.0 / static_cast<double>(k));
  double upper = kInf;
  double lower = -kInf;
  std::vector<double> rows;
  std::vector<double> cols;

  // Pure strategies are exact candidates and settle degenerate games at once.
  for (std::size_t a = 0; a < k; ++a) {
    std::vector<double> e(k, 0.0);
    e[a] = 1.0;
    row_payoffs(e, rows);
    const double v = *std::max_element(rows.begin(), rows.end());
    if (strictly_better(v, upper)) {
      upper = v;
      upper_pi = e;
    }
  }
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> e(n, 0.0);
    e[t] = 1.0;
    column_losses(e, cols);
    lower = std::max(lower, *std::min_element(cols.begin(), cols.end()));
  }

  E2DResult result{PolicyDistribution(upper_pi), upper, upper - lower, 0};
  if (range == 0.0 || upper - lower <= options.tolerance) return result;

  const double step = 0.5 / range;
  std::vector<double> log_pi(k, 0.0);
  std::vector<double> log_y(n, 0.0);
  std::vector<double> pi(k);
  std::vector<double> y(n);
  std::vector<double> avg_pi(k, 0.0);
  std::vector<double> avg_y(n, 0.0);
  std::vector<double> prev_cols(k, 0.0);
  std::vector<double> prev_rows(n, 0.0);

  auto softmax = [](const std::vector<double>& logits, std::vector<double>& out) {
    const double top = *std::max_element(logits.begin(), logits.end());
    double s = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) s += (out[i] = std::exp(logits[i] - top));
    for (double& v : out) v /= s;
  };
  auto tighten = [&](std::span<const double> p, std::span<const double> q) {
    row_payoffs(p, rows);
    const double v = *std::max_element(rows.begin(), rows.end());
    if (v < upper) {
      upper = v;
      upper_pi.assign(p.begin(), p.end());
    }
    column_losses(q, cols);
    lower = std::max(lower, *std::min_element(cols.begin(), cols.end()));
  };

  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    softmax(log_pi, pi);
    softmax(log_y, y);
    const double w = 1.0 / static_cast<double>(it + 1);
    for (std::size_t a = 0; a < k; ++a) avg_pi[a] += w * (pi[a] - avg_pi[a]);
    for (std::size_t t = 0; t < n; ++t) avg_y[t] += w * (y[t] - avg_y[t]);

    tighten(pi, y);
    const std::vector<double> cur_rows = rows;
    const std::vector<double> cur_cols = cols;
    tighten(avg_pi, avg_y);
    if (upper - lower <= options.tolerance) break;

    for (std::size_t a = 0; a < k; ++a) {
      log_pi[a] -= step * (2.0 * cur_cols[a] - prev_cols[a]);
    }
    for (std::size_t t = 0; t < n; ++t) {
      log_y[t] += step * (2.0 * cur_rows[t] - prev_rows[t]);
    }
    prev_cols = cur_cols;
    prev_rows = cur_rows;
  }
  if (upper - lower > options.tolerance) {
    throw SolverError("E2D did not reach its duality-gap tolerance; achieved gap " +
                          std::to_string(upper - lower),
                      upper - lower);
  }
  // Snap rounding dust so the policy normalizes exactly.
  for (double& p : upper_pi) p = std::max(p, 0.0);
  const double total = std::accumulate(upper_pi.begin(), upper_pi.end(), 0.0);
  for (double& p : upper_pi) p /= total;
  return E2DResult{PolicyDistribution(upper_pi), worst_case_dec(table, upper_pi, gamma), upper - lower,
                   it + 1};
}

double lambda_worst_case(std::size_t K, std::size_t N, std::size_t T) {
  const double t = static_cast<double>(std::max<std::size_t>(T, 1));
  return std::sqrt(std::log(static_cast<double>(N)) / ((80.0 * static_cast<double>(K) + 21.0 / 4.0) * t));
}

double lambda_first_order(std::size_t K, std::size_t N, double lstar) {
  if (!(lstar >= 0.0)) throw InvalidInput("L* must be nonnegative");
  const double k = static_cast<double>(K);
  const double cap = 1.0 / (250.0 * k + 54.0);
  if (lstar == 0.0) return cap;
  return std::min(std::sqrt(5.0 * std::log(static_cast<double>(N)) / ((500.0 * k + 108.0) * lstar)), cap);
}

namespace {
double v_factor(double v, MuVariant variant) {
  if (!(v > 0.0)) throw InvalidInput("subgaussian parameter v must be positive");
  return variant == MuVariant::proof ? std::max(v, 1.0) : std::min(v, 1.0);
}
}  // namespace

double lambda_subgaussian(std::size_t K, std::size_t N, std::size_t T, double v, MuVariant variant) {
  const double t = static_cast<double>(std::max<std::size_t>(T, 1));
  const double vv = v_factor(v, variant);
  return std::sqrt(std::log(static_cast<double>(N)) /
                   ((0.25 + 20.0 * vv * (1.0 + static_cast<double>(K))) * t));
}

double mu_from_lambda(double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("mu = 1/(10 lambda) needs lambda > 0");
  return 1.0 / (10.0 * lambda);
}

double mu_subgaussian(double lambda, double v, MuVariant variant) {
  if (!(lambda > 0.0)) throw InvalidInput("mu = 1/(80 lambda v) needs lambda > 0");
  return 1.0 / (80.0 * lambda * v_factor(v, variant));
}

double eta_subgaussian(double v) {
  if (!(v > 0.0)) throw InvalidInput("subgaussian parameter v must be positive");
  return (1.0 + std::sqrt(1.0 - std::min(v, 1.0))) / (2.0 * v);
}

namespace {

struct KindName {
  AlgorithmKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {AlgorithmKind::voids, "voids"},       {AlgorithmKind::roids, "roids"},
    {AlgorithmKind::fgts, "fgts"},         {AlgorithmKind::thompson, "thompson"},
    {AlgorithmKind::bayes_ids, "bayes_ids"}, {AlgorithmKind::igw, "igw"},
    {AlgorithmKind::e2d, "e2d"},           {AlgorithmKind::uniform, "uniform"},
    {AlgorithmKind::greedy, "greedy"},     {AlgorithmKind::voids_sg, "voids_sg"},
    {AlgorithmKind::roids_sg, "roids_sg"},
};

bool is_optimistic_hellinger(AlgorithmKind k) {
  return k == AlgorithmKind::voids || k == AlgorithmKind::roids || k == AlgorithmKind::fgts;
}

bool is_subgaussian(AlgorithmKind k) {
  return k == AlgorithmKind::voids_sg || k == AlgorithmKind::roids_sg;
}

}  // namespace

std::string_view to_string(AlgorithmKind kind) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return kn.name;
  }
  return "unknown";
}

AlgorithmKind algorithm_kind_from_string(std::string_view name) {
  for (const auto& kn : kKindNames) {
    if (kn.name == name) return kn.kind;
  }
  throw InvalidInput("unknown algorithm kind '" + std::string(name) + "'");
}

std::string_view to_string(LambdaSchedule schedule) {
  switch (schedule) {
    case LambdaSchedule::fixed:
      return "fixed";
    case LambdaSchedule::worst_case:
      return "auto-worst-case";
    case LambdaSchedule::first_order:
      return "auto-first-order";
    case LambdaSchedule::subgaussian:
      return "auto-subgaussian";
  }
  return "unknown";
}

std::string AlgorithmSpec::display_name() const {
  return label.empty() ? std::string(to_string(kind)) : label;
}

bool ResolvedAlgorithm::uses_posterior() const { return kind != AlgorithmKind::uniform; }

ResolvedAlgorithm resolve(const AlgorithmSpec& spec, const ProblemSize& size) {
  const std::string name = spec.display_name();
  auto fail = [&](const std::string& msg) -> void { throw InvalidInput(name + ": " + msg); };
  if (size.num_actions < 2 || size.num_params < 2) fail("problem needs K >= 2 and N >= 2");

  ResolvedAlgorithm out;
  out.kind = spec.kind;
  out.name = name;
  out.metric = default_metric(size.family);
  out.gamma = spec.gamma;
  const bool optimistic = is_optimistic_hellinger(spec.kind) || is_subgaussian(spec.kind) ||
                          spec.kind == AlgorithmKind::igw;

  if (!optimistic) {
    if (spec.eta || spec.lambda || spec.lambda_schedule) {
      fail("this algorithm uses the plain posterior; eta and lambda are not accepted");
    }
  }
  if (spec.kind == AlgorithmKind::igw || spec.kind == AlgorithmKind::e2d) {
    if (!spec.gamma) fail("gamma is required");
    if (!(*spec.gamma >= 0.0)) fail("gamma must be nonnegative");
  }
  if (spec.kind == AlgorithmKind::bayes_ids && size.family == Family::gaussian) {
    fail("Bayesian IDS needs predictive mixtures, which the gaussian family does not have");
  }
  if ((spec.kind == AlgorithmKind::voids || spec.kind == AlgorithmKind::roids) &&
      size.family == Family::gaussian) {
    fail("Hellinger gains are unavailable for the gaussian family; use voids_sg or roids_sg");
  }
  if (!(spec.v > 0.0)) fail("v must be positive");

  if (!optimistic) return out;

  // Posterior stepsizes.
  if (is_subgaussian(spec.kind)) {
    out.metric = GainMetric::squared_loss;
    out.eta = spec.eta.value_or(eta_subgaussian(spec.v));
    if (!(out.eta > 0.0)) fail("eta must be positive");
  } else if (spec.kind == AlgorithmKind::igw) {
    out.eta = spec.eta.value_or(1.0);
    if (!(out.eta > 0.0)) fail("eta must be positive");
  } else {
    if (spec.kind != AlgorithmKind::fgts) out.metric = GainMetric::hellinger;
    out.eta = spec.eta.value_or(kHellingerEta);
    if (!(out.eta > 0.0 && out.eta < 0.5)) fail("eta must lie in (0, 1/2)");
  }

  LambdaSchedule schedule;
  if (spec.lambda_schedule) {
    schedule = *spec.lambda_schedule;
  } else if (spec.lambda) {
    schedule = LambdaSchedule::fixed;
  } else if (spec.kind == AlgorithmKind::igw) {
    schedule = LambdaSchedule::fixed;
  } else {
    schedule = is_subgaussian(spec.kind) ? LambdaSchedule::subgaussian : LambdaSchedule::worst_case;
  }

  switch (schedule) {
    case LambdaSchedule::fixed:
      out.lambda = spec.lambda.value_or(0.0);
      if (!(out.lambda >= 0.0)) fail("lambda must be nonnegative");
      break;
    case LambdaSchedule::worst_case:
      out.lambda = lambda_worst_case(size.num_actions, size.num_params, size.horizon);
      break;
    case LambdaSchedule::first_order: {
      const std::optional<double> lstar = spec.lstar ? spec.lstar : size.lstar;
      if (!lstar) fail("the first-order schedule needs L*");
      out.lambda = lambda_first_order(size.num_actions, size.num_params, *lstar);
      break;
    }
    case LambdaSchedule::subgaussian:
      out.lambda = lambda_subgaussian(size.num_actions, size.num_params, size.horizon, spec.v,
                                      spec.mu_variant);
      break;
  }

  if (spec.mu) {
    out.mu = *spec.mu;
    if (!(*out.mu >= 0.0)) fail("mu must be nonnegative");
  } else if (out.lambda > 0.0) {
    out.mu = schedule == LambdaSchedule::subgaussian ? mu_subgaussian(out.lambda, spec.v, spec.mu_variant)
                                                     : mu_from_lambda(out.lambda);
  }
  if ((spec.kind == AlgorithmKind::roids || spec.kind == AlgorithmKind::roids_sg) && !out.mu) {
    fail("mu is required (or a positive lambda to derive it from)");
  }
  return out;
}

PolicyDecision select_policy(const ResolvedAlgorithm& algo, const OptimisticPosterior& post,
                             std::size_t x, const RoundObjectives* objectives) {
  const ModelClass& model = post.model();
  const std::size_t k = model.num_actions();
  std::optional<RoundObjectives> local;
  auto objs = [&]() -> const RoundObjectives& {
    if (objectives && objectives->metric == algo.metric) return *objectives;
    if (!local) local = compute_objectives(post, x, algo.metric);
    return *local;
  };
  auto surrogate_losses = [&]() {
    std::vector<double> lbar(k);
    for (std::size_t a = 0; a < k; ++a) lbar[a] = post.surrogate_loss(x, a);
    return lbar;
  };

  switch (algo.kind) {
    case AlgorithmKind::uniform:
      return {PolicyDistribution::uniform(k), false};
    case AlgorithmKind::greedy:
      return {greedy(surrogate_losses()), false};
    case AlgorithmKind::fgts:
    case AlgorithmKind::thompson:
      return {fgts_policy(post, x), false};
    case AlgorithmKind::voids:
    case AlgorithmKind::voids_sg: {
      const RoundObjectives& o = objs();
      if (auto pi = voids(o.delta_bar, o.gain_bar)) return {std::move(*pi), false};
      return {greedy(o.loss_bar), true};
    }
    case AlgorithmKind::roids:
    case AlgorithmKind::roids_sg: {
      const RoundObjectives& o = objs();
      return {roids(o.delta_bar, o.gain_bar, *algo.mu), false};
    }
    case AlgorithmKind::bayes_ids: {
      const RoundObjectives& o = objs();
      const auto ig = bayes_info_gain(post, x);
      if (auto pi = voids(o.delta_bar, ig)) return {std::move(*pi), false};
      return {greedy(o.loss_bar), true};
    }
    case AlgorithmKind::igw:
      return {igw_policy(surrogate_losses(), *algo.gamma), false};
    case AlgorithmKind::e2d: {
      std::vector<LossDistribution> reference;
      reference.reserve(k);
      for (std::size_t a = 0; a < k; ++a) {
        reference.push_back(model.family() == Family::gaussian
                                ? LossDistribution::gaussian(post.surrogate_loss(x, a))
                                : post.predictive(x, a));
      }
      return {e2d_policy(make_dec_table(model, x, reference), *algo.gamma, algo.e2d).policy, false};
    }
  }
  throw InvalidInput("unknown algorithm kind");
}

}  // namespace oids
