#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "oids/catalog.hpp"
#include "oids/model.hpp"
#include "oids/objectives.hpp"
#include "oids/policy.hpp"
#include "oids/posterior.hpp"

namespace oids {

struct RunOptions {
  bool diagnostics = false;
  bool record_policy = false;
};

// Per-round diagnostics; quantities that are undefined in a round (an
// information ratio with no information, ADEC without mu) are NaN.
struct RoundDiagnostics {
  double ir = 0.0;
  double adec = 0.0;
  double sig = 0.0;  // surrogate gain of the played policy
  double tig = 0.0;  // true gain of the played policy
  double ue = 0.0;
  double og = 0.0;
  double entropy = 0.0;
};

struct RoundRecord {
  std::size_t t = 0;  // 1-based
  std::size_t context = 0;
  std::size_t action = 0;
  double loss = 0.0;
  double regret_policy = 0.0;  // sum_a pi(a) (l(theta0,x,a) - l*(theta0,x))
  double regret_action = 0.0;  // l(theta0,x,A) - l*(theta0,x)
  double cum_regret_policy = 0.0;
  double cum_regret_action = 0.0;
  bool greedy_fallback = false;
  std::size_t support_size = 0;  // posterior support after the update
  std::vector<double> policy;    // filled when record_policy is set
  std::optional<RoundDiagnostics> diag;
};

struct RunTrace {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::size_t true_param = 0;
  std::vector<RoundRecord> rounds;

  double final_regret() const { return rounds.empty() ? 0.0 : rounds.back().cum_regret_policy; }
};

// A failed episode, tagged with its seed and the 1-based round.
class EpisodeError : public std::runtime_error {
 public:
  EpisodeError(const std::string& what, std::uint64_t seed, std::size_t round)
      : std::runtime_error(what), seed_(seed), round_(round) {}
  std::uint64_t seed() const { return seed_; }
  std::size_t round() const { return round_; }

 private:
  std::uint64_t seed_;
  std::size_t round_;
};

// Called after every round with the record and the updated posterior.
using RoundObserver = std::function<void(const RoundRecord&, const OptimisticPosterior&)>;

// Expected optimal cumulative loss T * E_x l*(theta0, x).
double optimal_cumulative_loss(const Environment& env, std::size_t T);

ProblemSize problem_size(const Environment& env, std::size_t T);

// Randomness per round from Rng(seed), in this order: context (only with
// more than one context), action, loss.
RunTrace run_episode(const Environment& env, const ResolvedAlgorithm& algo, std::size_t T,
                     std::uint64_t seed, const RunOptions& options = {},
                     const RoundObserver& observer = {});
RunTrace run_episode(const Environment& env, const AlgorithmSpec& spec, std::size_t T,
                     std::uint64_t seed, const RunOptions& options = {},
                     const RoundObserver& observer = {});

enum class BoundTag { worst_case, first_order, subgaussian };

std::string_view to_string(BoundTag tag);
BoundTag bound_tag_from_string(std::string_view name);

struct BoundInputs {
  std::size_t K = 0;
  std::size_t N = 0;
  std::size_t T = 0;
  std::optional<double> lstar;
  double v = 1.0;
  Family family = Family::bernoulli;
};

// sqrt((320K + 21) T ln N)
double worst_case_bound(std::size_t K, std::size_t N, std::size_t T);
// sqrt((2500K + 540) ln N L*) + (1250K + 270) ln N
double first_order_bound(std::size_t K, std::size_t N, double lstar);
// sqrt((1 + 80 max(v,1) (1 + K)) T ln N)
double subgaussian_bound(std::size_t K, std::size_t N, std::size_t T, double v);
// Dispatches on the tag; rejects tags that do not apply to the inputs.
double bound_value(BoundTag tag, const BoundInputs& in);

struct BoundResult {
  BoundTag tag = BoundTag::worst_case;
  double value = 0.0;
  bool satisfied = false;
};

struct AlgorithmReport {
  std::string algorithm;
  std::string instance;
  std::size_t T = 0;
  std::size_t reps = 0;
  double mean_final_regret = 0.0;
  double stderr_final = 0.0;  // sample sd / sqrt(reps); 0 for one repetition
  std::vector<double> mean_curve;    // mean cumulative policy regret per round
  std::vector<double> stderr_curve;
  std::vector<double> final_regrets;  // in repetition order
  std::vector<std::uint64_t> seeds;
  double mean_lstar = 0.0;
  std::vector<BoundResult> bounds;
  double wall_seconds = 0.0;
  std::vector<RunTrace> traces;  // kept only on request
};

// mean + 3 stderr <= bound
BoundResult bound_check(const AlgorithmReport& report, BoundTag tag, const BoundInputs& meta);

struct BatchOptions {
  std::size_t jobs = 1;
  bool keep_traces = false;
  RunOptions run;
};

// Repetition i uses seed derive_seed(base_seed, i) and the environment
// instantiate(recipe, model, seed). Repetitions may run on several threads;
// results are reduced in repetition order, so reports do not depend on
// `jobs`. The first failing repetition (by index) aborts the batch with an
// EpisodeError.
AlgorithmReport run_batch(const InstanceRecipe& recipe, const AlgorithmSpec& spec, std::size_t T,
                          std::size_t reps, std::uint64_t base_seed, const BatchOptions& options = {},
                          std::span<const BoundTag> bounds = {});

// Same, over an explicit list of environments (one per repetition).
AlgorithmReport run_batch(std::span<const Environment> envs, const AlgorithmSpec& spec, std::size_t T,
                          std::uint64_t base_seed, const BatchOptions& options = {});

// Exact shortest round-trip decimal; "nan" / "inf" / "-inf" otherwise.
std::string format_double(double v);

std::string csv_header(bool diagnostics);
void write_trace_csv(std::ostream& out, std::size_t run_id, const RunTrace& trace, bool diagnostics);

// {algorithm, instance, T, reps, mean_final_regret, stderr, bounds:[{tag, value, satisfied}]}
nlohmann::json summary_json(const AlgorithmReport& report);

// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace oids
