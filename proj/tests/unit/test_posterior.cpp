#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oids/catalog.hpp"
#include "oids/posterior.hpp"

using namespace oids;
using doctest::Approx;

namespace {

using S = std::vector<std::string>;

// Action 0 carries the means [0.1, 0.5, 0.9]; action 1 sets l* = [0, 0.5, 0].
std::shared_ptr<const ModelClass> three_param_model() {
  return std::make_shared<const ModelClass>(S{"a", "b", "c"}, S{"x"}, 2, Family::bernoulli,
                                            std::vector<double>{0.1, 0.0, 0.5, 0.5, 0.9, 0.0});
}

std::vector<Observation> random_trace(const Environment& env, std::size_t n, Rng& rng) {
  std::vector<Observation> trace;
  for (std::size_t t = 0; t < n; ++t) {
    Observation o;
    o.context = env.sample_context(rng);
    o.action = rng.index(env.model->num_actions());
    o.loss = sample_loss(env, o.context, o.action, rng);
    trace.push_back(o);
  }
  return trace;
}

}  // namespace

TEST_CASE("tempered update without optimism") {
  const auto m = three_param_model();
  const OptimisticPosterior prior(m, 0.25, 0.0);
  const auto post = prior.update(0, 0, 1.0);
  const double w[3] = {std::pow(0.1, 0.25), std::pow(0.5, 0.25), std::pow(0.9, 0.25)};
  const double s = w[0] + w[1] + w[2];
  CHECK(s == Approx(2.377241).epsilon(1e-6));
  for (int i = 0; i < 3; ++i) CHECK(post.weight(i) == Approx(w[i] / s).epsilon(1e-14));
  CHECK(post.weight(0) == Approx(0.236552).epsilon(1e-5));
  CHECK(post.weight(1) == Approx(0.353727).epsilon(1e-5));
  CHECK(post.weight(2) == Approx(0.409720).epsilon(1e-5));
  // Inputs are untouched.
  CHECK(prior.weight(0) == Approx(1.0 / 3.0));
}

TEST_CASE("optimism multiplies by exp(-lambda l*)") {
  const auto m = three_param_model();
  const auto post = OptimisticPosterior(m, 0.25, 1.0).update(0, 0, 1.0);
  const double w[3] = {std::pow(0.1, 0.25), std::pow(0.5, 0.25) * std::exp(-0.5), std::pow(0.9, 0.25)};
  const double s = w[0] + w[1] + w[2];
  for (int i = 0; i < 3; ++i) CHECK(post.weight(i) == Approx(w[i] / s).epsilon(1e-14));
  CHECK(post.weight(0) == Approx(0.274799).epsilon(1e-5));
  CHECK(post.weight(1) == Approx(0.249235).epsilon(1e-5));
  CHECK(post.weight(2) == Approx(0.475966).epsilon(1e-5));
}

TEST_CASE("zero likelihood annihilates and stays absorbing") {
  const auto env = make_revealing_action(4, 2);
  OptimisticPosterior post(env.model, 0.25, 0.3);
  post = post.update(0, 1, 1.0);  // theta = 1 predicts loss 0 on action 1
  CHECK(post.weight(0) == 0.0);
  CHECK(post.support_size() == 3);
  post = post.update(0, 2, 1.0);
  CHECK(post.weight(0) == 0.0);
  CHECK(post.weight(1) == 0.0);
  const double total = std::accumulate(post.weights().begin(), post.weights().end(), 0.0);
  CHECK(total == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("impossible observation reports the triple") {
  const auto env = make_revealing_action(3, 0);
  const OptimisticPosterior post(env.model, 0.25, 0.0);
  try {
    (void)post.update(0, 1, 0.5);
    FAIL("expected ModelInconsistency");
  } catch (const ModelInconsistency& e) {
    CHECK(e.context() == 0);
    CHECK(e.action() == 1);
    CHECK(e.loss() == 0.5);
  }
}

TEST_CASE("plain posterior is exact Bayes") {
  const Environment env = make_random_bernoulli(3, 6, 2, 17);
  Rng rng(5);
  const auto trace = random_trace(env, 30, rng);
  OptimisticPosterior post(env.model, 1.0, 0.0);
  std::vector<double> direct(6, 1.0 / 6.0);
  for (const auto& o : trace) {
    post = post.update(o);
    double z = 0.0;
    for (std::size_t t = 0; t < 6; ++t) {
      const double p = env.model->loss(t, o.context, o.action);
      direct[t] *= o.loss == 1.0 ? p : 1.0 - p;
      z += direct[t];
    }
    for (double& d : direct) d /= z;
  }
  for (std::size_t t = 0; t < 6; ++t) CHECK(post.weight(t) == Approx(direct[t]).epsilon(1e-10));
}

TEST_CASE("updates commute") {
  const Environment env = make_random_bernoulli(4, 8, 3, 2);
  Rng rng(11);
  auto trace = random_trace(env, 40, rng);
  OptimisticPosterior a(env.model, 0.25, 0.2);
  for (const auto& o : trace) a = a.update(o);
  std::mt19937 shuffler(3);
  std::shuffle(trace.begin(), trace.end(), shuffler);
  OptimisticPosterior b(env.model, 0.25, 0.2);
  for (const auto& o : trace) b = b.update(o);
  for (std::size_t t = 0; t < 8; ++t) CHECK(std::abs(a.weight(t) - b.weight(t)) <= 1e-10);
}

TEST_CASE("normalization after long runs") {
  const Environment env = make_random_bernoulli(3, 10, 1, 21);
  Rng rng(1);
  OptimisticPosterior post(env.model, 0.25, 0.05);
  for (const auto& o : random_trace(env, 3000, rng)) {
    post = post.update(o);
    const double total = std::accumulate(post.weights().begin(), post.weights().end(), 0.0);
    REQUIRE(std::abs(total - 1.0) <= 1e-10);
  }
  CHECK(post.entropy() >= 0.0);
}

TEST_CASE("predictive and surrogate losses") {
  const auto env = make_revealing_action(4, 0);
  const OptimisticPosterior post(env.model, 0.25, 0.0);
  const auto pred = post.predictive(0, 1);
  REQUIRE(pred.support().size() == 2);
  CHECK(pred.probs()[0] == Approx(0.25));
  CHECK(pred.probs()[1] == Approx(0.75));
  CHECK(post.surrogate_loss(0, 2) == Approx(0.75).epsilon(1e-15));
  CHECK(post.surrogate_loss(0, 0) == Approx(0.765625).epsilon(1e-15));
  CHECK(post.surrogate_loss(0, 0) == Approx((0.5 + 0.75 + 0.875 + 0.9375) / 4.0).epsilon(1e-15));

  const std::vector<double> point{0.0, 0.0, 1.0, 0.0};
  const OptimisticPosterior delta(env.model, 0.25, 0.0, point);
  CHECK(delta.predictive(0, 3) == env.model->loss_distribution(2, 0, 3));
  CHECK(delta.surrogate_loss(0, 0) == env.model->loss(2, 0, 0));
  CHECK(delta.surrogate_optimal_loss(0) == env.model->optimal_loss(2, 0));

  const auto bern = std::make_shared<const ModelClass>(S{"a", "b"}, S{"x"}, 2, Family::bernoulli,
                                                       std::vector<double>{0.2, 0.0, 0.6, 0.0});
  const auto mix = OptimisticPosterior(bern, 0.25, 0.0).predictive(0, 0);
  CHECK(mix.family() == Family::bernoulli);
  CHECK(mix.parameter() == Approx(0.4));

  const auto gauss = make_random_instance(2, 3, 1, 4, Family::gaussian);
  CHECK_THROWS_AS(OptimisticPosterior(gauss.model, 0.5, 0.0).predictive(0, 0), InvalidInput);
}

TEST_CASE("snapshot maps ids to weights") {
  const auto env = make_revealing_action(3, 0);
  const auto snap = OptimisticPosterior(env.model, 0.25, 0.0).update(0, 1, 1.0).snapshot();
  CHECK(snap.at("1").get<double>() == 0.0);
  CHECK(snap.at("2").get<double>() == Approx(0.5));
  CHECK(snap.size() == 3);
}

TEST_CASE("construction checks") {
  const auto m = three_param_model();
  CHECK_THROWS_AS(OptimisticPosterior(m, 0.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(OptimisticPosterior(m, 0.25, -1.0), InvalidInput);
  const std::vector<double> wrong{0.5, 0.5};
  CHECK_THROWS_AS(OptimisticPosterior(m, 0.25, 0.0, wrong), InvalidInput);
  const std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(OptimisticPosterior(m, 0.25, 0.0, zero), InvalidInput);
}

TEST_CASE("potential function identity") {
  const Environment env = make_random_bernoulli(4, 10, 2, 33);
  const OptimisticPosterior prior(env.model, 0.25, 0.1);
  Rng rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const auto trace = random_trace(env, 20, rng);
    const auto phi = potential_phi(prior, trace, 0.25, 0.1);
    CHECK(std::abs(phi.direct - phi.telescoped) <= 1e-9);
  }

  Rng one(2);
  const auto single = random_trace(env, 1, one);
  const auto phi1 = potential_phi(prior, single, 0.25, 0.1);
  double integral = 0.0;
  for (std::size_t t = 0; t < 10; ++t) {
    const double p = env.model->loss(t, single[0].context, single[0].action);
    const double lik = single[0].loss == 1.0 ? p : 1.0 - p;
    integral += 0.1 * std::pow(lik, 0.25) * std::exp(-0.1 * env.model->optimal_loss(t, single[0].context));
  }
  CHECK(phi1.direct == Approx(std::log(integral) / 0.1).epsilon(1e-12));
  CHECK(phi1.telescoped == Approx(phi1.direct).epsilon(1e-12));

  const auto empty = potential_phi(prior, {}, 0.25, 0.1);
  CHECK(empty.direct == 0.0);
  CHECK(empty.telescoped == 0.0);
  CHECK_THROWS_AS(potential_phi(prior, single, 0.25, 0.0), InvalidInput);
}
