#include "oids/catalog.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace oids {

namespace {

std::vector<std::string> numbered_ids(std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) ids.push_back(std::to_string(i));
  return ids;
}

std::size_t require(const std::optional<std::size_t>& v, const char* what, const InstanceRecipe& r) {
  if (!v) throw InvalidInput(std::string(to_string(r.kind)) + " needs '" + what + "'");
  return *v;
}

}  // namespace

std::shared_ptr<const ModelClass> revealing_action_model(std::size_t K) {
  if (K < 2) throw InvalidInput("revealing action needs K >= 2");
  const std::size_t actions = K + 1;
  std::vector<double> table;
  table.reserve(K * actions);
  for (std::size_t theta = 1; theta <= K; ++theta) {
    table.push_back(1.0 - std::ldexp(1.0, -static_cast<int>(theta)));
    for (std::size_t a = 1; a < actions; ++a) table.push_back(a == theta ? 0.0 : 1.0);
  }
  return std::make_shared<const ModelClass>(numbered_ids(K), std::vector<std::string>{"0"}, actions,
                                            Family::discrete, std::move(table));
}

Environment make_revealing_action(std::size_t K, std::size_t theta0_index) {
  return make_environment(revealing_action_model(K), theta0_index);
}

std::size_t sparse_action_size(std::size_t a) {
  return static_cast<std::size_t>(std::popcount(static_cast<unsigned long long>(a + 1)));
}

std::shared_ptr<const ModelClass> sparse_linear_model(std::size_t d) {
  if (d < 2 || d > 12) throw InvalidInput("sparse linear needs 2 <= d <= 12");
  const std::size_t actions = (std::size_t{1} << d) - 1;
  std::vector<double> table;
  table.reserve(d * actions);
  for (std::size_t theta = 0; theta < d; ++theta) {
    for (std::size_t a = 0; a < actions; ++a) {
      const std::size_t mask = a + 1;
      const double hit = (mask >> theta) & 1U ? 1.0 : 0.0;
      table.push_back(1.0 - hit / static_cast<double>(sparse_action_size(a)));
    }
  }
  return std::make_shared<const ModelClass>(numbered_ids(d), std::vector<std::string>{"0"}, actions,
                                            Family::discrete, std::move(table));
}

Environment make_sparse_linear(std::size_t d, std::size_t theta0_index) {
  return make_environment(sparse_linear_model(d), theta0_index);
}

std::shared_ptr<const ModelClass> revelatory_zero_model(std::size_t K, double delta) {
  if (K < 2) throw InvalidInput("revelatory zero needs K >= 2");
  if (!(delta > 0.0 && delta <= 0.5)) throw InvalidInput("revelatory zero needs 0 < Delta <= 1/2");
  std::vector<double> table;
  table.reserve(K * K);
  for (std::size_t theta = 0; theta < K; ++theta) {
    for (std::size_t a = 0; a < K; ++a) table.push_back(a == theta ? 0.5 - delta : 0.5);
  }
  return std::make_shared<const ModelClass>(numbered_ids(K), std::vector<std::string>{"0"}, K,
                                            Family::ziu, std::move(table));
}

Environment make_revelatory_zero(std::size_t K, double delta, std::size_t theta0_index) {
  return make_environment(revelatory_zero_model(K, delta), theta0_index);
}

DecTable revelatory_zero_identified_table(std::size_t K, double delta, std::size_t theta0_index) {
  if (theta0_index >= K) throw InvalidInput("theta0 outside the class");
  DecTable t;
  t.num_params = K;
  t.num_actions = K;
  for (std::size_t theta = 0; theta < K; ++theta) {
    for (std::size_t a = 0; a < K; ++a) {
      t.regret.push_back(a == theta ? 0.0 : delta);
      t.divergence.push_back(theta == theta0_index ? 0.0 : 1.0);
    }
  }
  return t;
}

Environment make_random_instance(std::size_t K, std::size_t N, std::size_t contexts,
                                 std::uint64_t seed, Family family) {
  if (family != Family::bernoulli && family != Family::gaussian) {
    throw InvalidInput("random instances are bernoulli or gaussian");
  }
  if (contexts < 1) throw InvalidInput("random instance needs at least one context");
  Rng rng(seed);
  std::vector<double> table(N * contexts * K);
  for (double& v : table) v = rng.uniform01();
  const std::size_t theta0 = N >= 1 ? rng.index(N) : 0;
  std::vector<std::string> ctx;
  for (std::size_t x = 0; x < contexts; ++x) ctx.push_back(std::to_string(x));
  auto model = std::make_shared<const ModelClass>(numbered_ids(N), std::move(ctx), K, family,
                                                  std::move(table));
  return make_environment(std::move(model), theta0);
}

Environment make_random_bernoulli(std::size_t K, std::size_t N, std::size_t contexts,
                                  std::uint64_t seed) {
  return make_random_instance(K, N, contexts, seed, Family::bernoulli);
}

namespace {

struct InstanceName {
  InstanceKind kind;
  std::string_view name;
};

constexpr InstanceName kInstanceNames[] = {
    {InstanceKind::revealing_action, "revealing_action"},
    {InstanceKind::sparse_linear, "sparse_linear"},
    {InstanceKind::revelatory_zero, "revelatory_zero"},
    {InstanceKind::random_bernoulli, "random_bernoulli"},
    {InstanceKind::random_gaussian, "random_gaussian"},
    {InstanceKind::model_file, "model_file"},
};

}  // namespace

std::string_view to_string(InstanceKind kind) {
  for (const auto& n : kInstanceNames) {
    if (n.kind == kind) return n.name;
  }
  return "unknown";
}

InstanceKind instance_kind_from_string(std::string_view name) {
  for (const auto& n : kInstanceNames) {
    if (n.name == name) return n.kind;
  }
  throw InvalidInput("unknown environment kind '" + std::string(name) + "'");
}

std::string InstanceRecipe::describe() const {
  std::ostringstream out;
  out << to_string(kind);
  if (K) out << " K=" << *K;
  if (d) out << " d=" << *d;
  if (delta) out << " delta=" << *delta;
  if (N) out << " N=" << *N;
  if (contexts) out << " contexts=" << *contexts;
  if (seed) out << " seed=" << *seed;
  if (path) out << " path=" << *path;
  if (theta0) out << " theta0=" << *theta0;
  if (binarize) out << " binarized";
  return out.str();
}

std::shared_ptr<const ModelClass> build_model(const InstanceRecipe& r) {
  switch (r.kind) {
    case InstanceKind::revealing_action:
      return revealing_action_model(require(r.K, "K", r));
    case InstanceKind::sparse_linear:
      return sparse_linear_model(require(r.d, "d", r));
    case InstanceKind::revelatory_zero:
      if (!r.delta) throw InvalidInput("revelatory_zero needs 'delta'");
      return revelatory_zero_model(require(r.K, "K", r), *r.delta);
    case InstanceKind::random_bernoulli:
    case InstanceKind::random_gaussian: {
      if (!r.seed) throw InvalidInput(std::string(to_string(r.kind)) + " needs 'seed'");
      const Family f = r.kind == InstanceKind::random_gaussian ? Family::gaussian : Family::bernoulli;
      return make_random_instance(require(r.K, "K", r), require(r.N, "N", r), r.contexts.value_or(1),
                                  *r.seed, f)
          .model;
    }
    case InstanceKind::model_file: {
      if (!r.path) throw InvalidInput("model_file needs 'path'");
      std::ifstream in(*r.path);
      if (!in) throw InvalidInput("cannot open model file '" + *r.path + "'");
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("model file '" + *r.path + "' is not valid JSON: " + e.what());
      }
      return std::make_shared<const ModelClass>(model_from_json(doc));
    }
  }
  throw InvalidInput("unknown environment kind");
}

Environment instantiate(const InstanceRecipe& recipe, std::shared_ptr<const ModelClass> model,
                        std::uint64_t repetition_seed) {
  const std::size_t theta0 = recipe.theta0
                                 ? model->param_index(*recipe.theta0)
                                 : Rng(derive_seed(repetition_seed, 0)).index(model->num_params());
  Environment env = make_environment(std::move(model), theta0, recipe.context_probs);
  return recipe.binarize ? binarize(env) : env;
}

}  // namespace oids
