#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace oids {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

struct RunArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::size_t jobs = 1;
};

// Per algorithm, writes <name>.trace.csv, <name>.curve.csv and
// <name>.summary.json into the output directory (config "output_dir", else
// $OIDS_OUTPUT_DIR, else ./<config name>), plus config.json.
int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);

// NAME is revealing, sparse or revelatory.
int cmd_replicate(const std::string& name, const std::optional<std::string>& out_dir,
                  std::optional<std::uint64_t> seed_override, std::size_t jobs, std::ostream& out,
                  std::ostream& err);

// Collects every <name>.curve.csv in DIR into DIR/plot.csv with columns
// algorithm,t,mean_cum_regret,stderr.
int cmd_export_plot(const std::string& dir, std::ostream& out, std::ostream& err);

struct CheckBoundsArgs {
  std::string dir;
  std::size_t K = 0;
  std::size_t N = 0;
  std::optional<double> lstar;
  double v = 1.0;
};

// Re-evaluates the bounds for every summary in DIR. Exit 1 when any bound is
// violated.
int cmd_check_bounds(const CheckBoundsArgs& args, std::ostream& out, std::ostream& err);

}  // namespace oids
