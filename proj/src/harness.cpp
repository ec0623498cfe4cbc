#include "oids/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

namespace oids {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RoundDiagnostics diagnose(const ResolvedAlgorithm& algo, const Environment& env,
                          const OptimisticPosterior& post, std::size_t x,
                          const RoundObjectives& obj, std::span<const double> pi) {
  const TruthOracle oracle(env);
  RoundDiagnostics d;
  const auto ir = information_ratio(obj.delta_bar, obj.gain_bar, pi);
  d.ir = ir ? *ir : kNaN;
  d.adec = algo.mu ? adec(obj.delta_bar, obj.gain_bar, pi, *algo.mu) : kNaN;
  d.sig = dot(pi, obj.gain_bar);
  d.tig = dot(pi, oracle.true_gain(post, x, obj.metric));
  const auto [ue, og] = oracle.ue_og(post, x, pi);
  d.ue = ue;
  d.og = og;
  d.entropy = post.entropy();
  return d;
}

}  // namespace

double optimal_cumulative_loss(const Environment& env, std::size_t T) {
  double e = 0.0;
  for (std::size_t x = 0; x < env.model->num_contexts(); ++x) {
    e += env.context_prob(x) * env.model->optimal_loss(env.true_param, x);
  }
  return static_cast<double>(T) * e;
}

ProblemSize problem_size(const Environment& env, std::size_t T) {
  ProblemSize s;
  s.num_actions = env.model->num_actions();
  s.num_params = env.model->num_params();
  s.horizon = T;
  s.family = env.model->family();
  s.lstar = optimal_cumulative_loss(env, T);
  return s;
}

RunTrace run_episode(const Environment& env, const AlgorithmSpec& spec, std::size_t T,
                     std::uint64_t seed, const RunOptions& options, const RoundObserver& observer) {
  return run_episode(env, resolve(spec, problem_size(env, T)), T, seed, options, observer);
}

RunTrace run_episode(const Environment& env, const ResolvedAlgorithm& algo, std::size_t T,
                     std::uint64_t seed, const RunOptions& options, const RoundObserver& observer) {
  RunTrace trace;
  trace.algorithm = algo.name;
  trace.seed = seed;
  trace.true_param = env.true_param;
  trace.rounds.reserve(T);

  const TruthOracle oracle(env);
  Rng rng(seed);
  OptimisticPosterior post(env.model, algo.eta, algo.lambda);
  const bool need_objectives =
      options.diagnostics || algo.kind == AlgorithmKind::voids || algo.kind == AlgorithmKind::roids ||
      algo.kind == AlgorithmKind::voids_sg || algo.kind == AlgorithmKind::roids_sg ||
      algo.kind == AlgorithmKind::bayes_ids;
  double cum_policy = 0.0;
  double cum_action = 0.0;

  for (std::size_t t = 1; t <= T; ++t) {
    try {
      RoundRecord rec;
      rec.t = t;
      rec.context = env.sample_context(rng);
      std::optional<RoundObjectives> obj;
      if (need_objectives) obj = compute_objectives(post, rec.context, algo.metric);
      PolicyDecision decision = select_policy(algo, post, rec.context, obj ? &*obj : nullptr);
      const auto pi = decision.policy.probs();
      rec.greedy_fallback = decision.greedy_fallback;
      rec.action = decision.policy.sample(rng);
      rec.loss = sample_loss(env, rec.context, rec.action, rng);
      rec.regret_policy = oracle.policy_regret(rec.context, pi);
      rec.regret_action = oracle.action_regret(rec.context, rec.action);
      cum_policy += rec.regret_policy;
      cum_action += rec.regret_action;
      rec.cum_regret_policy = cum_policy;
      rec.cum_regret_action = cum_action;
      if (options.record_policy) rec.policy.assign(pi.begin(), pi.end());
      if (options.diagnostics) rec.diag = diagnose(algo, env, post, rec.context, *obj, pi);
      post = post.update(rec.context, rec.action, rec.loss);
      rec.support_size = post.support_size();
      if (observer) observer(rec, post);
      trace.rounds.push_back(std::move(rec));
    } catch (const EpisodeError&) {
      throw;
    } catch (const std::exception& e) {
      throw EpisodeError(std::string(e.what()) + " (seed " + std::to_string(seed) + ", round " +
                             std::to_string(t) + ")",
                         seed, t);
    }
  }
  return trace;
}

std::string_view to_string(BoundTag tag) {
  switch (tag) {
    case BoundTag::worst_case:
      return "worst_case";
    case BoundTag::first_order:
      return "first_order";
    case BoundTag::subgaussian:
      return "subgaussian";
  }
  return "unknown";
}

BoundTag bound_tag_from_string(std::string_view name) {
  if (name == "worst_case") return BoundTag::worst_case;
  if (name == "first_order") return BoundTag::first_order;
  if (name == "subgaussian") return BoundTag::subgaussian;
  throw InvalidInput("unknown bound tag '" + std::string(name) + "'");
}

double worst_case_bound(std::size_t K, std::size_t N, std::size_t T) {
  return std::sqrt((320.0 * static_cast<double>(K) + 21.0) * static_cast<double>(T) *
                   std::log(static_cast<double>(N)));
}

double first_order_bound(std::size_t K, std::size_t N, double lstar) {
  const double k = static_cast<double>(K);
  const double ln_n = std::log(static_cast<double>(N));
  return std::sqrt((2500.0 * k + 540.0) * ln_n * lstar) + (1250.0 * k + 270.0) * ln_n;
}

double subgaussian_bound(std::size_t K, std::size_t N, std::size_t T, double v) {
  return std::sqrt((1.0 + 80.0 * std::max(v, 1.0) * (1.0 + static_cast<double>(K))) *
                   static_cast<double>(T) * std::log(static_cast<double>(N)));
}

double bound_value(BoundTag tag, const BoundInputs& in) {
  if (in.K < 2 || in.N < 2) throw InvalidInput("bounds need K >= 2 and N >= 2");
  switch (tag) {
    case BoundTag::worst_case:
      if (in.family == Family::gaussian) {
        throw InvalidInput("the worst_case bound assumes [0,1] losses; use subgaussian");
      }
      return worst_case_bound(in.K, in.N, in.T);
    case BoundTag::first_order:
      if (in.family == Family::gaussian) {
        throw InvalidInput("the first_order bound assumes [0,1] losses; use subgaussian");
      }
      if (!in.lstar) throw InvalidInput("the first_order bound needs L*");
      if (!(*in.lstar >= 0.0)) throw InvalidInput("L* must be nonnegative");
      return first_order_bound(in.K, in.N, *in.lstar);
    case BoundTag::subgaussian:
      if (!(in.v > 0.0)) throw InvalidInput("v must be positive");
      return subgaussian_bound(in.K, in.N, in.T, in.v);
  }
  throw InvalidInput("unknown bound tag");
}

BoundResult bound_check(const AlgorithmReport& report, BoundTag tag, const BoundInputs& meta) {
  BoundResult r;
  r.tag = tag;
  r.value = bound_value(tag, meta);
  r.satisfied = report.mean_final_regret + 3.0 * report.stderr_final <= r.value;
  return r;
}

namespace {

AlgorithmReport reduce(std::string algorithm, std::string instance, std::size_t T,
                       std::vector<RunTrace> traces, std::vector<double> lstars, bool keep) {
  AlgorithmReport rep;
  rep.algorithm = std::move(algorithm);
  rep.instance = std::move(instance);
  rep.T = T;
  rep.reps = traces.size();
  const double n = static_cast<double>(rep.reps);
  rep.mean_curve.assign(T, 0.0);
  rep.stderr_curve.assign(T, 0.0);
  for (const auto& tr : traces) {
    rep.final_regrets.push_back(tr.final_regret());
    rep.seeds.push_back(tr.seed);
  }
  for (double l : lstars) rep.mean_lstar += l / n;
  // Two passes per round: mean, then sample variance.
  for (std::size_t t = 0; t < T; ++t) {
    double mean = 0.0;
    for (const auto& tr : traces) mean += tr.rounds[t].cum_regret_policy;
    mean /= n;
    double ss = 0.0;
    for (const auto& tr : traces) {
      const double d = tr.rounds[t].cum_regret_policy - mean;
      ss += d * d;
    }
    rep.mean_curve[t] = mean;
    rep.stderr_curve[t] = rep.reps > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  }
  if (rep.reps > 0) {
    double mean = 0.0;
    for (double r : rep.final_regrets) mean += r;
    mean /= n;
    double ss = 0.0;
    for (double r : rep.final_regrets) ss += (r - mean) * (r - mean);
    rep.mean_final_regret = mean;
    rep.stderr_final = rep.reps > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  }
  if (keep) rep.traces = std::move(traces);
  return rep;
}

template <typename EnvFor>
std::vector<RunTrace> run_parallel(std::size_t reps, std::uint64_t base_seed, std::size_t jobs,
                                   const EnvFor& env_for, const AlgorithmSpec& spec, std::size_t T,
                                   const RunOptions& run, std::vector<double>& lstars) {
  std::vector<RunTrace> traces(reps);
  std::vector<std::exception_ptr> errors(reps);
  lstars.assign(reps, 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < reps; i = next++) {
      const std::uint64_t seed = derive_seed(base_seed, i);
      try {
        const Environment env = env_for(i, seed);
        lstars[i] = optimal_cumulative_loss(env, T);
        traces[i] = run_episode(env, spec, T, seed, run);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, reps));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < threads; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < reps; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const EpisodeError&) {
      throw;
    } catch (const std::exception& e) {
      throw EpisodeError(std::string(e.what()) + " (seed " + std::to_string(derive_seed(base_seed, i)) +
                             ", round 0)",
                         derive_seed(base_seed, i), 0);
    }
  }
  return traces;
}

}  // namespace

AlgorithmReport run_batch(const InstanceRecipe& recipe, const AlgorithmSpec& spec, std::size_t T,
                          std::size_t reps, std::uint64_t base_seed, const BatchOptions& options,
                          std::span<const BoundTag> bounds) {
  const auto start = std::chrono::steady_clock::now();
  const auto model = build_model(recipe);
  // Reject bad specs before spending any time.
  {
    ProblemSize size;
    size.num_actions = model->num_actions();
    size.num_params = model->num_params();
    size.horizon = T;
    size.family = model->family();
    size.lstar = 0.0;
    resolve(spec, size);
  }
  std::vector<double> lstars;
  auto traces = run_parallel(
      reps, base_seed, options.jobs,
      [&](std::size_t, std::uint64_t seed) { return instantiate(recipe, model, seed); }, spec, T,
      options.run, lstars);
  AlgorithmReport rep =
      reduce(spec.display_name(), recipe.describe(), T, std::move(traces), lstars, options.keep_traces);
  BoundInputs meta;
  meta.K = model->num_actions();
  meta.N = model->num_params();
  meta.T = T;
  meta.lstar = rep.mean_lstar;
  meta.v = spec.v;
  meta.family = recipe.binarize ? Family::bernoulli : model->family();
  for (BoundTag tag : bounds) rep.bounds.push_back(bound_check(rep, tag, meta));
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

AlgorithmReport run_batch(std::span<const Environment> envs, const AlgorithmSpec& spec, std::size_t T,
                          std::uint64_t base_seed, const BatchOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> lstars;
  auto traces = run_parallel(
      envs.size(), base_seed, options.jobs,
      [&](std::size_t i, std::uint64_t) { return envs[i]; }, spec, T, options.run, lstars);
  AlgorithmReport rep =
      reduce(spec.display_name(), "explicit environments", T, std::move(traces), lstars, options.keep_traces);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_header(bool diagnostics) {
  std::string h =
      "run_id,seed,t,context,action,loss,regret_policy,regret_action,cum_regret_policy,cum_regret_action";
  if (diagnostics) h += ",ir,adec,sig,tig,ue,og,posterior_entropy";
  return h;
}

void write_trace_csv(std::ostream& out, std::size_t run_id, const RunTrace& trace, bool diagnostics) {
  for (const auto& r : trace.rounds) {
    out << run_id << ',' << trace.seed << ',' << r.t << ',' << r.context << ',' << r.action << ','
        << format_double(r.loss) << ',' << format_double(r.regret_policy) << ','
        << format_double(r.regret_action) << ',' << format_double(r.cum_regret_policy) << ','
        << format_double(r.cum_regret_action);
    if (diagnostics) {
      const RoundDiagnostics d = r.diag.value_or(RoundDiagnostics{kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN});
      for (double v : {d.ir, d.adec, d.sig, d.tig, d.ue, d.og, d.entropy}) out << ',' << format_double(v);
    }
    out << '\n';
  }
}

nlohmann::json summary_json(const AlgorithmReport& report) {
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& b : report.bounds) {
    bounds.push_back({{"tag", std::string(to_string(b.tag))}, {"value", b.value}, {"satisfied", b.satisfied}});
  }
  return {{"algorithm", report.algorithm},
          {"instance", report.instance},
          {"T", report.T},
          {"reps", report.reps},
          {"mean_final_regret", report.mean_final_regret},
          {"stderr", report.stderr_final},
          {"bounds", std::move(bounds)}};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace oids
