#include "oids/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "oids/catalog.hpp"
#include "oids/config.hpp"
#include "oids/harness.hpp"

namespace oids {

namespace fs = std::filesystem;

namespace {

std::string file_stem_for(const std::string& name) {
  std::string s = name;
  for (char& c : s) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!keep) c = '_';
  }
  return s;
}

std::string curve_csv(const AlgorithmReport& rep) {
  std::ostringstream out;
  out << "t,mean_cum_regret,stderr\n";
  for (std::size_t t = 0; t < rep.mean_curve.size(); ++t) {
    out << t + 1 << ',' << format_double(rep.mean_curve[t]) << ',' << format_double(rep.stderr_curve[t])
        << '\n';
  }
  return out.str();
}

void write_report(const fs::path& dir, const AlgorithmReport& rep, bool with_traces, bool diagnostics) {
  const std::string stem = file_stem_for(rep.algorithm);
  if (with_traces) {
    std::ostringstream csv;
    csv << csv_header(diagnostics) << '\n';
    for (std::size_t i = 0; i < rep.traces.size(); ++i) write_trace_csv(csv, i, rep.traces[i], diagnostics);
    write_file_atomic(dir / (stem + ".trace.csv"), csv.str());
  }
  write_file_atomic(dir / (stem + ".curve.csv"), curve_csv(rep));
  write_file_atomic(dir / (stem + ".summary.json"), summary_json(rep).dump(2) + "\n");
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  const int parsed = guarded(err, [&] {
    config = load_config(args.config_path);
    if (args.seed_override) config.base_seed = *args.seed_override;
    // Fail fast on per-algorithm requirements.
    const auto model = build_model(config.env);
    for (const auto& spec : config.algos) {
      ProblemSize size;
      size.num_actions = model->num_actions();
      size.num_params = model->num_params();
      size.horizon = config.T;
      size.family = model->family();
      size.lstar = 0.0;
      resolve(spec, size);
    }
    return kExitOk;
  });
  if (parsed != kExitOk) return parsed;

  return guarded(err, [&] {
    fs::path dir;
    if (config.output_dir) {
      dir = *config.output_dir;
    } else if (const char* env_dir = std::getenv("OIDS_OUTPUT_DIR"); env_dir && *env_dir) {
      dir = env_dir;
    } else {
      dir = config.name;
    }
    BatchOptions opts;
    opts.jobs = std::max<std::size_t>(1, args.jobs);
    opts.keep_traces = true;
    opts.run.diagnostics = config.diagnostics;
    write_file_atomic(dir / "config.json", to_json(config).dump(2) + "\n");
    for (const auto& spec : config.algos) {
      const AlgorithmReport rep =
          run_batch(config.env, spec, config.T, config.reps, config.base_seed, opts, config.bounds);
      write_report(dir, rep, true, config.diagnostics);
      out << rep.algorithm << ": mean final regret " << format_double(rep.mean_final_regret) << " (stderr "
          << format_double(rep.stderr_final) << ", " << rep.reps << " reps, T=" << rep.T << ")\n";
      for (const auto& b : rep.bounds) {
        out << "  bound " << to_string(b.tag) << " = " << format_double(b.value) << " "
            << (b.satisfied ? "satisfied" : "VIOLATED") << '\n';
      }
    }
    out << "wrote " << dir.string() << '\n';
    return kExitOk;
  });
}

namespace {

int replicate_revealing(std::uint64_t base_seed, std::ostream& out) {
  constexpr std::size_t K = 8;
  constexpr std::size_t T = 50;
  AlgorithmSpec spec;
  spec.kind = AlgorithmKind::voids;
  bool all = true;
  out << "revealing action, K=" << K << ", VOIDS, T=" << T << '\n';
  for (std::size_t theta0 = 0; theta0 < K; ++theta0) {
    const Environment env = make_revealing_action(K, theta0);
    const RunTrace tr = run_episode(env, spec, T, derive_seed(base_seed, theta0), {.record_policy = true});
    const double expected = 1.0 - std::ldexp(1.0, -static_cast<int>(theta0 + 1));
    const bool first = tr.rounds.front().policy[0] == 1.0;
    const bool collapsed = tr.rounds.front().support_size == 1;
    const bool ok = first && collapsed && std::abs(tr.final_regret() - expected) <= 1e-9;
    all = all && ok;
    out << "  theta0=" << theta0 + 1 << "  regret=" << std::setprecision(12) << tr.final_regret()
        << "  expected=" << expected << "  " << verdict(ok) << '\n';
  }
  return all ? kExitOk : kExitCheckFailed;
}

int replicate_sparse(std::uint64_t base_seed, std::ostream& out) {
  constexpr std::size_t d = 8;
  constexpr std::size_t T = 20;
  constexpr std::size_t log2d = 3;
  AlgorithmSpec spec;
  spec.kind = AlgorithmKind::voids;
  bool all = true;
  out << "sparse linear, d=" << d << ", VOIDS, T=" << T << '\n';
  for (std::size_t theta0 = 0; theta0 < d; ++theta0) {
    const Environment env = make_sparse_linear(d, theta0);
    const RunTrace tr = run_episode(env, spec, T, derive_seed(base_seed, theta0));
    std::size_t identified = 0;
    for (const auto& r : tr.rounds) {
      if (r.support_size == 1) {
        identified = r.t;
        break;
      }
    }
    bool flat = identified > 0;
    for (const auto& r : tr.rounds) {
      if (identified > 0 && r.t > identified && r.regret_policy != 0.0) flat = false;
    }
    const bool ok = identified > 0 && identified <= log2d + 1 && flat;
    all = all && ok;
    out << "  theta0=" << theta0 + 1 << "  identified at round " << identified
        << (identified == log2d ? " (exactly log2 d)" : "") << "  regret=" << tr.final_regret() << "  "
        << verdict(ok) << '\n';
  }
  return all ? kExitOk : kExitCheckFailed;
}

int replicate_revelatory(std::uint64_t base_seed, std::size_t jobs,
                         const std::optional<std::string>& out_dir, std::ostream& out) {
  InstanceRecipe recipe;
  recipe.kind = InstanceKind::revelatory_zero;
  recipe.K = 4;
  recipe.delta = 0.1;
  constexpr std::size_t T = 500;
  constexpr std::size_t R = 500;
  bool all = true;
  out << "revelatory zero, K=4, delta=0.1, T=" << T << ", R=" << R << '\n';
  for (AlgorithmKind kind : {AlgorithmKind::voids, AlgorithmKind::roids}) {
    AlgorithmSpec spec;
    spec.kind = kind;
    BatchOptions opts;
    opts.jobs = jobs;
    const AlgorithmReport rep = run_batch(recipe, spec, T, R, base_seed, opts);
    if (out_dir) write_report(*out_dir, rep, false, false);
    const bool ok = rep.mean_final_regret >= 0.75 && rep.mean_final_regret <= 3.0;
    all = all && ok;
    out << "  " << rep.algorithm << "  mean regret=" << rep.mean_final_regret << " +- " << rep.stderr_final
        << "  band [0.75, 3.0]  " << verdict(ok) << '\n';
  }
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace

int cmd_replicate(const std::string& name, const std::optional<std::string>& out_dir,
                  std::optional<std::uint64_t> seed_override, std::size_t jobs, std::ostream& out,
                  std::ostream& err) {
  const std::uint64_t seed = seed_override.value_or(0);
  return guarded(err, [&] {
    if (name == "revealing") return replicate_revealing(seed, out);
    if (name == "sparse") return replicate_sparse(seed, out);
    if (name == "revelatory") return replicate_revelatory(seed, std::max<std::size_t>(1, jobs), out_dir, out);
    throw InvalidInput("unknown example '" + name + "' (expected revealing, sparse or revelatory)");
  });
}

namespace {

std::vector<fs::path> files_with_suffix(const fs::path& dir, const std::string& suffix) {
  if (!fs::is_directory(dir)) throw InvalidInput("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read '" + p.string() + "'");
  return nlohmann::json::parse(in);
}

}  // namespace

int cmd_export_plot(const std::string& dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto curves = files_with_suffix(dir, ".curve.csv");
    if (curves.empty()) throw InvalidInput("no *.curve.csv files in '" + dir + "'");
    std::ostringstream plot;
    plot << "algorithm,t,mean_cum_regret,stderr\n";
    for (const auto& path : curves) {
      const std::string file = path.filename().string();
      const std::string stem = file.substr(0, file.size() - std::string(".curve.csv").size());
      std::string algorithm = stem;
      const fs::path summary = fs::path(dir) / (stem + ".summary.json");
      if (fs::exists(summary)) algorithm = read_json(summary).at("algorithm").get<std::string>();
      std::ifstream in(path);
      std::string line;
      std::getline(in, line);
      if (line != "t,mean_cum_regret,stderr") throw InvalidInput("'" + file + "' has an unexpected header");
      while (std::getline(in, line)) {
        if (!line.empty()) plot << algorithm << ',' << line << '\n';
      }
    }
    const fs::path target = fs::path(dir) / "plot.csv";
    write_file_atomic(target, plot.str());
    out << "wrote " << target.string() << '\n';
    return kExitOk;
  });
}

int cmd_check_bounds(const CheckBoundsArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto summaries = files_with_suffix(args.dir, ".summary.json");
    if (summaries.empty()) throw InvalidInput("no *.summary.json files in '" + args.dir + "'");
    bool all = true;
    for (const auto& path : summaries) {
      const auto doc = read_json(path);
      AlgorithmReport rep;
      rep.algorithm = doc.at("algorithm").get<std::string>();
      rep.T = doc.at("T").get<std::size_t>();
      rep.reps = doc.at("reps").get<std::size_t>();
      rep.mean_final_regret = doc.at("mean_final_regret").get<double>();
      rep.stderr_final = doc.at("stderr").get<double>();
      std::vector<BoundTag> tags;
      for (const auto& b : doc.at("bounds")) tags.push_back(bound_tag_from_string(b.at("tag").get<std::string>()));
      if (tags.empty()) {
        tags = {BoundTag::worst_case, BoundTag::subgaussian};
        if (args.lstar) tags.push_back(BoundTag::first_order);
      }
      BoundInputs meta;
      meta.K = args.K;
      meta.N = args.N;
      meta.T = rep.T;
      meta.lstar = args.lstar;
      meta.v = args.v;
      for (BoundTag tag : tags) {
        const BoundResult r = bound_check(rep, tag, meta);
        all = all && r.satisfied;
        out << rep.algorithm << "  " << to_string(tag) << "  mean+3se="
            << format_double(rep.mean_final_regret + 3.0 * rep.stderr_final)
            << "  bound=" << format_double(r.value) << "  " << (r.satisfied ? "satisfied" : "VIOLATED")
            << '\n';
      }
    }
    return all ? kExitOk : kExitCheckFailed;
  });
}

}  // namespace oids
