#include <cmath>
#include <memory>

#include "doctest.h"
#include "oids/catalog.hpp"
#include "oids/model.hpp"

using namespace oids;
using doctest::Approx;

namespace {

std::shared_ptr<const ModelClass> two_param_bernoulli() {
  return std::make_shared<const ModelClass>(std::vector<std::string>{"a", "b"}, std::vector<std::string>{"x"}, 3,
                                            Family::bernoulli, std::vector<double>{0.4, 0.1, 0.1, 0.3, 0.3, 0.3});
}

}  // namespace

TEST_CASE("optimal loss and lowest-index best action") {
  const auto m = two_param_bernoulli();
  CHECK(m->optimal_loss(0, 0) == 0.1);
  CHECK(m->best_action(0, 0) == 1);
  CHECK(m->optimal_loss(1, 0) == 0.3);
  CHECK(m->best_action(1, 0) == 0);
  CHECK(optimal_loss(*m, 0, 0) == 0.1);
  CHECK(best_action(*m, 0, 0) == 1);

  const auto rev = revealing_action_model(4);
  for (std::size_t theta = 0; theta < 4; ++theta) CHECK(rev->optimal_loss(theta, 0) == 0.0);
}

TEST_CASE("loss laws per family") {
  const auto m = two_param_bernoulli();
  CHECK(loss_distribution(*m, 1, 0, 2) == LossDistribution::bernoulli(0.3));

  const auto g = std::make_shared<const ModelClass>(std::vector<std::string>{"a", "b"}, std::vector<std::string>{"x"}, 2,
                                                    Family::gaussian, std::vector<double>{0.7, 0.2, 0.1, 0.9});
  CHECK(g->loss_distribution(0, 0, 0) == LossDistribution::gaussian(0.7));

  const auto z = revelatory_zero_model(3, 0.1);
  CHECK(z->loss_distribution(1, 0, 1).parameter() == Approx(0.2).epsilon(1e-15));
  CHECK(z->loss_distribution(1, 0, 0).parameter() == 0.0);
  CHECK(z->loss(1, 0, 1) == Approx(0.4));
}

TEST_CASE("model validation") {
  using S = std::vector<std::string>;
  CHECK_THROWS_AS(ModelClass(S{}, S{"x"}, 1, Family::bernoulli, {}), InvalidInput);
  CHECK_THROWS_AS(ModelClass(S{"a"}, S{"x"}, 0, Family::bernoulli, {}), InvalidInput);
  CHECK_NOTHROW(ModelClass(S{"a", "b"}, S{"x"}, 1, Family::bernoulli, {0.1, 0.2}));
  CHECK_NOTHROW(ModelClass(S{"a"}, S{"x"}, 2, Family::bernoulli, {0.1, 0.2}));
  CHECK_THROWS_AS(ModelClass(S{"a", "b"}, S{}, 2, Family::bernoulli, {}), InvalidInput);
  CHECK_THROWS_AS(ModelClass(S{"a", "b"}, S{"x"}, 2, Family::bernoulli, {0.1, 0.2, 0.3}), InvalidInput);
  CHECK_THROWS_AS(ModelClass(S{"a", "b"}, S{"x"}, 2, Family::bernoulli, {0.1, 0.2, 0.3, 1.5}), InvalidInput);
  CHECK_THROWS_AS(ModelClass(S{"a", "b"}, S{"x"}, 2, Family::ziu, {0.1, 0.2, 0.3, 0.7}), InvalidInput);
  // Explicit laws whose means disagree with the table.
  std::vector<LossDistribution> laws(4, LossDistribution::point_mass(0.5));
  CHECK_THROWS_AS(ModelClass(S{"a", "b"}, S{"x"}, 2, Family::discrete, {0.5, 0.5, 0.5, 0.4}, laws), InvalidInput);
  CHECK_NOTHROW(ModelClass(S{"a", "b"}, S{"x"}, 2, Family::discrete, {0.5, 0.5, 0.5, 0.5}, laws));
}

TEST_CASE("realizability holds for every catalog instance") {
  for (const auto& m : {revealing_action_model(5), sparse_linear_model(4), revelatory_zero_model(4, 0.25),
                        make_random_bernoulli(3, 4, 2, 9).model}) {
    for (std::size_t t = 0; t < m->num_params(); ++t) {
      for (std::size_t x = 0; x < m->num_contexts(); ++x) {
        for (std::size_t a = 0; a < m->num_actions(); ++a) {
          CHECK(std::abs(m->loss_distribution(t, x, a).mean() - m->loss(t, x, a)) <= 1e-12);
          CHECK(m->optimal_loss(t, x) <= m->loss(t, x, a));
        }
      }
    }
  }
}

TEST_CASE("json round trip") {
  const auto m = make_random_bernoulli(3, 4, 2, 9).model;
  const auto doc = model_to_json(*m);
  const ModelClass back = model_from_json(doc);
  CHECK(back.params() == m->params());
  CHECK(back.contexts() == m->contexts());
  CHECK(back.family() == m->family());
  CHECK(std::equal(back.loss_table().begin(), back.loss_table().end(), m->loss_table().begin()));

  nlohmann::json discrete = {{"params", {"p", "q"}},
                             {"contexts", {0}},
                             {"K", 2},
                             {"family", "discrete"},
                             {"loss_table", {{{0.5, 0.25}}, {{0.5, 1.0}}}},
                             {"distributions",
                              {{{{{"support", {0.0, 1.0}}, {"probs", {0.5, 0.5}}},
                                 {{"support", {0.25}}, {"probs", {1.0}}}}},
                               {{{{"support", {0.5}}, {"probs", {1.0}}}, {{"support", {1.0}}, {"probs", {1.0}}}}}}}};
  const ModelClass d = model_from_json(discrete);
  CHECK(d.loss_distribution(0, 0, 0).support().size() == 2);
  CHECK(d.contexts()[0] == "0");
  const ModelClass d2 = model_from_json(model_to_json(d));
  CHECK(d2.loss_distribution(0, 0, 0) == d.loss_distribution(0, 0, 0));

  auto bad = doc;
  bad["extra"] = 1;
  CHECK_THROWS_AS(model_from_json(bad), InvalidInput);
  auto missing = doc;
  missing.erase("K");
  CHECK_THROWS_AS(model_from_json(missing), InvalidInput);
}

TEST_CASE("environments") {
  const auto m = two_param_bernoulli();
  CHECK_THROWS_AS(make_environment(m, 2), InvalidInput);
  CHECK_THROWS_AS(make_environment(m, 0, {0.5, 0.5}), InvalidInput);
  const Environment env = make_environment(m, 1);
  Rng rng(4);
  // One context: no randomness consumed.
  Rng copy = rng;
  CHECK(env.sample_context(rng) == 0);
  CHECK(rng.next_u64() == copy.next_u64());

  Rng r2(8);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) sum += sample_loss(env, 0, 2, r2);
  CHECK(std::abs(sum / 100000.0 - 0.3) <= 0.01);
}

TEST_CASE("binarization") {
  using S = std::vector<std::string>;
  auto src = std::make_shared<const ModelClass>(S{"a", "b"}, S{"x"}, 3, Family::discrete,
                                                std::vector<double>{0.0, 1.0, 0.4, 0.0, 1.0, 0.4});
  const Environment env = make_environment(src, 1);
  const Environment bin = binarize(env);
  CHECK(bin.true_param == env.true_param);
  CHECK(bin.model->family() == Family::bernoulli);
  CHECK(std::equal(bin.model->loss_table().begin(), bin.model->loss_table().end(), src->loss_table().begin()));
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_loss(bin, 0, 0, rng) == 0.0);
    CHECK(sample_loss(bin, 0, 1, rng) == 1.0);
  }
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) sum += sample_loss(bin, 0, 2, rng);
  CHECK(std::abs(sum / 100000.0 - 0.4) <= 0.01);

  // ZIU source: observed losses are 0/1 with the source mean.
  const Environment zb = binarize(make_revelatory_zero(3, 0.2, 0));
  double zs = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double l = sample_loss(zb, 0, 0, rng);
    CHECK((l == 0.0 || l == 1.0));
    zs += l;
  }
  CHECK(std::abs(zs / 100000.0 - 0.3) <= 0.01);

  const auto g = std::make_shared<const ModelClass>(S{"a", "b"}, S{"x"}, 2, Family::gaussian,
                                                    std::vector<double>{0.7, 0.2, 0.1, 0.9});
  CHECK_THROWS_AS(binarize(make_environment(g, 0)), InvalidInput);
}
