#include <cmath>

#include "doctest.h"
#include "oids/catalog.hpp"
#include "oids/posterior.hpp"

using namespace oids;
using doctest::Approx;

TEST_CASE("revealing action") {
  const auto env = make_revealing_action(4, 2);
  const auto& m = *env.model;
  CHECK(m.num_actions() == 5);
  CHECK(m.num_params() == 4);
  CHECK(m.params()[2] == "3");
  CHECK(m.loss(2, 0, 0) == 0.875);
  CHECK(m.loss(2, 0, 3) == 0.0);
  CHECK(m.loss(2, 0, 1) == 1.0);
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(m.optimal_loss(t, 0) == 0.0);
    CHECK(m.best_action(t, 0) == t + 1);
  }
  CHECK_THROWS_AS(make_revealing_action(4, 4), InvalidInput);
  CHECK_THROWS_AS(revealing_action_model(1), InvalidInput);
}

TEST_CASE("sparse linear") {
  const auto env = make_sparse_linear(4, 1);
  const auto& m = *env.model;
  CHECK(m.num_actions() == 15);
  CHECK(m.num_params() == 4);
  for (std::size_t t = 0; t < 4; ++t) {
    const std::size_t own = (std::size_t{1} << t) - 1;
    CHECK(m.loss(t, 0, own) == 0.0);
    CHECK(m.optimal_loss(t, 0) == 0.0);
  }
  // Action for mask 0b0110 touches coordinates 1 and 2.
  CHECK(sparse_action_size(5) == 2);
  CHECK(m.loss(1, 0, 5) == Approx(0.5));
  CHECK(m.loss(0, 0, 5) == 1.0);
  CHECK(m.loss(0, 0, 14) == Approx(0.75));
  CHECK_THROWS_AS(sparse_linear_model(1), InvalidInput);
  CHECK_THROWS_AS(sparse_linear_model(13), InvalidInput);
}

TEST_CASE("revelatory zero") {
  const double delta = 0.1;
  const auto env = make_revelatory_zero(4, delta, 1);
  const auto& m = *env.model;
  CHECK(m.family() == Family::ziu);
  CHECK(m.loss(1, 0, 1) == Approx(0.5 - delta));
  CHECK(m.loss(1, 0, 2) == Approx(0.5));

  const OptimisticPosterior prior(env.model, 0.25, 0.0);
  const auto zero = prior.update(0, 2, 0.0);
  CHECK(zero.weight(2) == 1.0);
  CHECK(zero.support_size() == 1);

  const auto positive = prior.update(0, 2, 0.4);
  CHECK(positive.weight(2) / positive.weight(0) == Approx(std::pow(1.0 - 2.0 * delta, 0.25)).epsilon(1e-13));
  CHECK(positive.weight(1) == Approx(positive.weight(0)).epsilon(1e-15));

  const DecTable t = revelatory_zero_identified_table(3, delta, 0);
  CHECK(t.regret_at(0, 0) == 0.0);
  CHECK(t.regret_at(0, 1) == Approx(delta));
  CHECK(t.divergence_at(0, 2) == 0.0);
  CHECK(t.divergence_at(1, 0) == 1.0);
  CHECK_THROWS_AS(revelatory_zero_model(3, 0.0), InvalidInput);
  CHECK_THROWS_AS(revelatory_zero_model(3, 0.6), InvalidInput);
}

TEST_CASE("random instances") {
  const auto a = make_random_bernoulli(5, 20, 3, 42);
  const auto b = make_random_bernoulli(5, 20, 3, 42);
  const auto c = make_random_bernoulli(5, 20, 3, 43);
  CHECK(a.model->loss_table().size() == 20 * 3 * 5);
  CHECK(std::equal(a.model->loss_table().begin(), a.model->loss_table().end(), b.model->loss_table().begin()));
  CHECK(a.true_param == b.true_param);
  CHECK_FALSE(std::equal(a.model->loss_table().begin(), a.model->loss_table().end(), c.model->loss_table().begin()));
  for (double v : a.model->loss_table()) CHECK((v >= 0.0 && v <= 1.0));
  CHECK(a.true_param < 20);

  // The table is the seeded U[0,1] stream in order.
  Rng rng(42);
  CHECK(a.model->loss(0, 0, 0) == rng.uniform01());
  CHECK(a.model->loss(0, 0, 1) == rng.uniform01());

  const auto g = make_random_instance(3, 4, 1, 42, Family::gaussian);
  CHECK(g.model->family() == Family::gaussian);
}

TEST_CASE("instance recipes") {
  InstanceRecipe r;
  r.kind = InstanceKind::revelatory_zero;
  CHECK_THROWS_AS(build_model(r), InvalidInput);
  r.K = 4;
  r.delta = 0.1;
  const auto m = build_model(r);
  CHECK(m->num_params() == 4);

  // Unset theta0: drawn from the repetition seed.
  const auto e = instantiate(r, m, 99);
  Rng rng(derive_seed(99, 0));
  CHECK(e.true_param == rng.index(4));
  r.theta0 = "3";
  CHECK(instantiate(r, m, 99).true_param == 2);
  r.theta0 = "9";
  CHECK_THROWS_AS(instantiate(r, m, 99), InvalidInput);

  InstanceRecipe rnd;
  rnd.kind = InstanceKind::random_bernoulli;
  rnd.K = 3;
  rnd.N = 5;
  rnd.seed = 7;
  const auto rm = build_model(rnd);
  CHECK(rm->num_actions() == 3);
  CHECK(rm->num_contexts() == 1);

  for (InstanceKind k : {InstanceKind::revealing_action, InstanceKind::sparse_linear, InstanceKind::revelatory_zero,
                         InstanceKind::random_bernoulli, InstanceKind::random_gaussian, InstanceKind::model_file}) {
    CHECK(instance_kind_from_string(to_string(k)) == k);
  }
  CHECK_FALSE(r.describe().empty());
}
