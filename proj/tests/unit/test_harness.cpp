#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oids/catalog.hpp"
#include "oids/harness.hpp"

using namespace oids;
using doctest::Approx;

namespace {

AlgorithmSpec spec_of(AlgorithmKind kind) {
  AlgorithmSpec s;
  s.kind = kind;
  return s;
}

std::string csv_of(const RunTrace& trace, bool diag) {
  std::ostringstream out;
  write_trace_csv(out, 0, trace, diag);
  return out.str();
}

}  // namespace

TEST_CASE("revealing action episode") {
  for (std::size_t theta = 0; theta < 8; ++theta) {
    const auto env = make_revealing_action(8, theta);
    RunOptions opts;
    opts.record_policy = true;
    const RunTrace trace = run_episode(env, AlgorithmSpec{}, 50, 3, opts);
    REQUIRE(trace.rounds.size() == 50);
    CHECK(trace.rounds[0].policy[0] == 1.0);
    CHECK(trace.rounds[0].support_size == 1);
    const double expected = 1.0 - std::pow(2.0, -static_cast<double>(theta + 1));
    CHECK(std::abs(trace.final_regret() - expected) <= 1e-9);
    CHECK(trace.rounds[1].greedy_fallback);
  }
}

TEST_CASE("uniform policy regret per round") {
  const auto env = make_revelatory_zero(4, 0.1, 2);
  const RunTrace trace = run_episode(env, spec_of(AlgorithmKind::uniform), 20, 1);
  for (const auto& r : trace.rounds) CHECK(r.regret_policy == Approx(0.075).epsilon(1e-14));
  CHECK(trace.final_regret() == Approx(1.5).epsilon(1e-12));
}

TEST_CASE("empty horizon") {
  const auto env = make_revealing_action(3, 0);
  const RunTrace trace = run_episode(env, AlgorithmSpec{}, 0, 1);
  CHECK(trace.rounds.empty());
  CHECK(trace.final_regret() == 0.0);
}

TEST_CASE("episodes are deterministic in the seed") {
  const auto env = make_random_bernoulli(4, 8, 3, 12);
  RunOptions opts;
  opts.diagnostics = true;
  const auto a = run_episode(env, AlgorithmSpec{}, 200, 77, opts);
  const auto b = run_episode(env, AlgorithmSpec{}, 200, 77, opts);
  const auto c = run_episode(env, AlgorithmSpec{}, 200, 78, opts);
  CHECK(csv_of(a, true) == csv_of(b, true));
  CHECK(csv_of(a, true) != csv_of(c, true));
}

TEST_CASE("diagnostics satisfy the round inequalities") {
  const auto env = make_random_bernoulli(4, 10, 2, 5);
  RunOptions opts;
  opts.diagnostics = true;
  const auto trace = run_episode(env, AlgorithmSpec{}, 300, 9, opts);
  for (const auto& r : trace.rounds) {
    REQUIRE(r.diag.has_value());
    CHECK(r.diag->sig <= 4.0 * r.diag->tig + 1e-9);
    for (double gamma : {0.1, 1.0, 10.0}) CHECK(std::abs(r.diag->ue) <= gamma / 2.0 + r.diag->tig / gamma + 1e-9);
    CHECK(r.diag->entropy >= -1e-12);
  }
}

TEST_CASE("observer sees every round") {
  const auto env = make_sparse_linear(4, 2);
  std::size_t calls = 0;
  run_episode(env, AlgorithmSpec{}, 10, 0, {}, [&](const RoundRecord& r, const OptimisticPosterior& post) {
    ++calls;
    CHECK(r.support_size == post.support_size());
  });
  CHECK(calls == 10);
}

TEST_CASE("closed-form bounds") {
  CHECK(worst_case_bound(5, 20, 5000) == Approx(std::sqrt(1621.0 * 5000.0 * std::log(20.0))).epsilon(1e-14));
  CHECK(worst_case_bound(5, 20, 5000) == Approx(4927.6).epsilon(1e-4));
  CHECK(first_order_bound(4, 4, 0.0) == Approx(5270.0 * std::log(4.0)).epsilon(1e-14));
  CHECK(subgaussian_bound(5, 20, 5000, 0.5) == Approx(std::sqrt(481.0 * 5000.0 * std::log(20.0))).epsilon(1e-14));

  BoundInputs in{5, 20, 5000, std::nullopt, 1.0, Family::bernoulli};
  CHECK_THROWS_AS(bound_value(BoundTag::first_order, in), InvalidInput);
  in.lstar = 0.0;
  CHECK(bound_value(BoundTag::first_order, in) == Approx(6520.0 * std::log(20.0)));
  in.family = Family::gaussian;
  CHECK_THROWS_AS(bound_value(BoundTag::worst_case, in), InvalidInput);
  for (BoundTag t : {BoundTag::worst_case, BoundTag::first_order, BoundTag::subgaussian}) {
    CHECK(bound_tag_from_string(to_string(t)) == t);
  }

  AlgorithmReport rep;
  rep.mean_final_regret = 100.0;
  rep.stderr_final = 10.0;
  BoundInputs small{5, 20, 1, std::nullopt, 1.0, Family::bernoulli};
  CHECK_FALSE(bound_check(rep, BoundTag::worst_case, small).satisfied);
  CHECK(bound_check(rep, BoundTag::worst_case, BoundInputs{5, 20, 5000, std::nullopt, 1.0, Family::bernoulli}).satisfied);
}

TEST_CASE("batches") {
  InstanceRecipe recipe;
  recipe.kind = InstanceKind::random_bernoulli;
  recipe.K = 3;
  recipe.N = 6;
  recipe.contexts = 2;
  recipe.seed = 4;

  BatchOptions one;
  one.keep_traces = true;
  BatchOptions many = one;
  many.jobs = 3;
  const std::vector<BoundTag> tags{BoundTag::worst_case};
  const auto a = run_batch(recipe, AlgorithmSpec{}, 100, 7, 11, one, tags);
  const auto b = run_batch(recipe, AlgorithmSpec{}, 100, 7, 11, many, tags);
  CHECK(a.final_regrets == b.final_regrets);
  CHECK(a.mean_curve == b.mean_curve);
  CHECK(summary_json(a) == summary_json(b));
  REQUIRE(a.traces.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(a.seeds[i] == derive_seed(11, i));
    CHECK(csv_of(a.traces[i], false) == csv_of(b.traces[i], false));
  }
  REQUIRE(a.bounds.size() == 1);
  CHECK(a.bounds[0].value == Approx(worst_case_bound(3, 6, 100)));

  double mean = 0.0;
  for (double r : a.final_regrets) mean += r / 7.0;
  CHECK(a.mean_final_regret == Approx(mean).epsilon(1e-12));
  CHECK(a.mean_curve.back() == Approx(a.mean_final_regret).epsilon(1e-12));

  const auto single = run_batch(recipe, AlgorithmSpec{}, 50, 1, 2, one);
  CHECK(single.stderr_final == 0.0);
  const auto env = instantiate(recipe, build_model(recipe), derive_seed(2, 0));
  CHECK(single.mean_final_regret == run_episode(env, AlgorithmSpec{}, 50, derive_seed(2, 0)).final_regret());
}

TEST_CASE("formatting and csv") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(csv_header(false) ==
        "run_id,seed,t,context,action,loss,regret_policy,regret_action,cum_regret_policy,cum_regret_action");
  CHECK(csv_header(true).find(",ir,adec,") != std::string::npos);

  const auto env = make_revealing_action(3, 1);
  const auto trace = run_episode(env, AlgorithmSpec{}, 3, 5);
  const std::string csv = csv_of(trace, false);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
