#include "oids/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>

namespace oids {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw InvalidInput(field + ": " + msg);
}

void reject_unknown(const json& doc, const std::string& where, std::initializer_list<const char*> keys) {
  if (!doc.is_object()) fail(where, "must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      fail(where + "." + key, "unknown key");
    }
  }
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "must be a number");
  return v.get<double>();
}

std::uint64_t get_unsigned(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "must be an integer");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto s = v.get<std::int64_t>();
  if (s < 0) fail(field, "must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "must be a string");
  return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) fail(field, "must be true or false");
  return v.get<bool>();
}

template <typename T, typename Fn>
std::optional<T> optional_field(const json& doc, const char* key, const std::string& where, Fn&& get) {
  if (!doc.contains(key)) return std::nullopt;
  return static_cast<T>(get(doc.at(key), where + "." + key));
}

}  // namespace

AlgorithmSpec parse_algorithm(const json& doc, const std::string& where) {
  reject_unknown(doc, where, {"kind", "eta", "lambda", "mu", "gamma", "v", "mu_variant", "lstar", "label"});
  AlgorithmSpec spec;
  if (!doc.contains("kind")) fail(where + ".kind", "required field missing");
  try {
    spec.kind = algorithm_kind_from_string(get_string(doc.at("kind"), where + ".kind"));
  } catch (const InvalidInput& e) {
    fail(where + ".kind", e.what());
  }
  spec.eta = optional_field<double>(doc, "eta", where, get_number);
  if (doc.contains("lambda")) {
    const json& l = doc.at("lambda");
    if (l.is_number()) {
      spec.lambda = l.get<double>();
    } else if (l.is_string()) {
      const std::string tag = l.get<std::string>();
      if (tag == "auto-worst-case") {
        spec.lambda_schedule = LambdaSchedule::worst_case;
      } else if (tag == "auto-first-order") {
        spec.lambda_schedule = LambdaSchedule::first_order;
      } else if (tag == "auto-subgaussian") {
        spec.lambda_schedule = LambdaSchedule::subgaussian;
      } else {
        fail(where + ".lambda", "expected a number or auto-worst-case | auto-first-order | auto-subgaussian");
      }
    } else {
      fail(where + ".lambda", "must be a number or a schedule tag");
    }
  }
  spec.mu = optional_field<double>(doc, "mu", where, get_number);
  spec.gamma = optional_field<double>(doc, "gamma", where, get_number);
  if (doc.contains("v")) spec.v = get_number(doc.at("v"), where + ".v");
  if (doc.contains("mu_variant")) {
    const std::string mv = get_string(doc.at("mu_variant"), where + ".mu_variant");
    if (mv == "proof") {
      spec.mu_variant = MuVariant::proof;
    } else if (mv == "statement") {
      spec.mu_variant = MuVariant::statement;
    } else {
      fail(where + ".mu_variant", "expected proof or statement");
    }
  }
  spec.lstar = optional_field<double>(doc, "lstar", where, get_number);
  if (doc.contains("label")) spec.label = get_string(doc.at("label"), where + ".label");
  return spec;
}

InstanceRecipe parse_recipe(const json& doc, const std::string& where) {
  reject_unknown(doc, where, {"kind", "K", "d", "delta", "N", "contexts", "seed", "path", "theta0",
                              "context_probs", "binarize"});
  InstanceRecipe r;
  if (!doc.contains("kind")) fail(where + ".kind", "required field missing");
  try {
    r.kind = instance_kind_from_string(get_string(doc.at("kind"), where + ".kind"));
  } catch (const InvalidInput& e) {
    fail(where + ".kind", e.what());
  }
  r.K = optional_field<std::size_t>(doc, "K", where, get_unsigned);
  r.d = optional_field<std::size_t>(doc, "d", where, get_unsigned);
  r.delta = optional_field<double>(doc, "delta", where, get_number);
  r.N = optional_field<std::size_t>(doc, "N", where, get_unsigned);
  r.contexts = optional_field<std::size_t>(doc, "contexts", where, get_unsigned);
  r.seed = optional_field<std::uint64_t>(doc, "seed", where, get_unsigned);
  if (doc.contains("path")) r.path = get_string(doc.at("path"), where + ".path");
  if (doc.contains("theta0")) {
    const json& t = doc.at("theta0");
    if (t.is_string()) {
      r.theta0 = t.get<std::string>();
    } else if (t.is_number_integer()) {
      r.theta0 = std::to_string(t.get<long long>());
    } else {
      fail(where + ".theta0", "must be a parameter id");
    }
  }
  if (doc.contains("context_probs")) {
    const json& p = doc.at("context_probs");
    if (!p.is_array()) fail(where + ".context_probs", "must be an array of numbers");
    for (const auto& v : p) r.context_probs.push_back(get_number(v, where + ".context_probs[]"));
  }
  if (doc.contains("binarize")) r.binarize = get_bool(doc.at("binarize"), where + ".binarize");
  return r;
}

ExperimentConfig parse_config(const json& doc) {
  reject_unknown(doc, "config",
                 {"name", "env", "algos", "T", "reps", "base_seed", "diagnostics", "output_dir", "bounds"});
  for (const char* key : {"name", "env", "algos", "T"}) {
    if (!doc.contains(key)) fail(key, "required field missing");
  }
  ExperimentConfig c;
  c.name = get_string(doc.at("name"), "name");
  if (c.name.empty()) fail("name", "must not be empty");
  c.env = parse_recipe(doc.at("env"), "env");
  const json& algos = doc.at("algos");
  if (!algos.is_array() || algos.empty()) fail("algos", "must be a nonempty array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < algos.size(); ++i) {
    const std::string where = "algos[" + std::to_string(i) + "]";
    c.algos.push_back(parse_algorithm(algos[i], where));
    if (!names.insert(c.algos.back().display_name()).second) {
      fail(where, "duplicate algorithm name '" + c.algos.back().display_name() + "'; set a label");
    }
  }
  c.T = get_unsigned(doc.at("T"), "T");
  if (doc.contains("reps")) c.reps = get_unsigned(doc.at("reps"), "reps");
  if (c.reps < 1) fail("reps", "must be at least 1");
  if (doc.contains("base_seed")) c.base_seed = get_unsigned(doc.at("base_seed"), "base_seed");
  if (doc.contains("diagnostics")) c.diagnostics = get_bool(doc.at("diagnostics"), "diagnostics");
  if (doc.contains("output_dir")) c.output_dir = get_string(doc.at("output_dir"), "output_dir");
  if (doc.contains("bounds")) {
    const json& b = doc.at("bounds");
    if (!b.is_array()) fail("bounds", "must be an array of tags");
    for (const auto& tag : b) {
      try {
        c.bounds.push_back(bound_tag_from_string(get_string(tag, "bounds[]")));
      } catch (const InvalidInput& e) {
        fail("bounds", e.what());
      }
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("config: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("config: not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

json to_json(const AlgorithmSpec& s) {
  json j;
  j["kind"] = std::string(to_string(s.kind));
  if (s.eta) j["eta"] = *s.eta;
  if (s.lambda_schedule && *s.lambda_schedule != LambdaSchedule::fixed) {
    j["lambda"] = std::string(to_string(*s.lambda_schedule));
  } else if (s.lambda) {
    j["lambda"] = *s.lambda;
  }
  if (s.mu) j["mu"] = *s.mu;
  if (s.gamma) j["gamma"] = *s.gamma;
  if (s.v != 1.0) j["v"] = s.v;
  if (s.mu_variant != MuVariant::proof) j["mu_variant"] = "statement";
  if (s.lstar) j["lstar"] = *s.lstar;
  if (!s.label.empty()) j["label"] = s.label;
  return j;
}

json to_json(const InstanceRecipe& r) {
  json j;
  j["kind"] = std::string(to_string(r.kind));
  if (r.K) j["K"] = *r.K;
  if (r.d) j["d"] = *r.d;
  if (r.delta) j["delta"] = *r.delta;
  if (r.N) j["N"] = *r.N;
  if (r.contexts) j["contexts"] = *r.contexts;
  if (r.seed) j["seed"] = *r.seed;
  if (r.path) j["path"] = *r.path;
  if (r.theta0) j["theta0"] = *r.theta0;
  if (!r.context_probs.empty()) j["context_probs"] = r.context_probs;
  if (r.binarize) j["binarize"] = true;
  return j;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["env"] = to_json(c.env);
  j["algos"] = json::array();
  for (const auto& a : c.algos) j["algos"].push_back(to_json(a));
  j["T"] = c.T;
  j["reps"] = c.reps;
  j["base_seed"] = c.base_seed;
  j["diagnostics"] = c.diagnostics;
  if (c.output_dir) j["output_dir"] = *c.output_dir;
  if (!c.bounds.empty()) {
    j["bounds"] = json::array();
    for (BoundTag t : c.bounds) j["bounds"].push_back(std::string(to_string(t)));
  }
  return j;
}

}  // namespace oids
