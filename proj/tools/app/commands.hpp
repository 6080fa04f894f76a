#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "app/config.hpp"

namespace qmcst::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
};

/// Loads --config (or defaults when absent and allowed) and applies the global overrides.
ExperimentConfig resolve_config(const GlobalOptions& g, bool config_required);

struct Table1Cell {
  std::string column;
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  double mean = 0.0;
  double min = 0.0;
  std::size_t sets = 0;
};

/// Columns: sobol, iid, st_iid_n2, st_iid_16n, st_sobol_n2, st_sobol_16n.
/// Every ST mean averages all output sets of every repetition.
std::vector<Table1Cell> compute_table1(const ExperimentConfig& cfg,
                                       const std::vector<std::string>& columns = {});

struct BenchRow {
  std::string method;
  std::uint64_t n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  double error = 0.0;
  std::optional<double> stardisc;
};

/// Methods: wsubgtrans (all output sets of each repetition), iid and sobol-owen
/// (as many sets per repetition), sobol (one unscrambled set per n).
std::vector<BenchRow> compute_bench(const ExperimentConfig& cfg);

std::string bench_raw_csv(const std::vector<BenchRow>& rows);
std::string bench_summary_csv(const std::vector<BenchRow>& rows);

/// Random dyadic boxes (k/2^l, (k+1)/2^l] per dimension, levels in [0, max_level].
std::vector<Region> random_dyadic_regions(int d, int max_level, std::size_t count, std::uint64_t seed);

int cmd_generate(const GlobalOptions& g, std::ostream& out, std::ostream& err);
int cmd_stardisc(const GlobalOptions& g, const std::string& file, std::size_t samples,
                 std::ostream& out, std::ostream& err);
int cmd_table1(const GlobalOptions& g, std::ostream& out, std::ostream& err);
int cmd_bench(const GlobalOptions& g, std::ostream& out, std::ostream& err);
int cmd_audit(const GlobalOptions& g, const std::string& manifest, const std::string& regions,
              std::size_t random_dyadic, std::ostream& out, std::ostream& err);

/// Entry point shared by the qmcst binary and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qmcst::app
