#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmcst/integrands.hpp"
#include "qmcst/sampling.hpp"
#include "qmcst/transference.hpp"

namespace qmcst::app {

/// Invalid configuration or command line; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InitKind { Iid, Sobol, External };

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> n;
  std::vector<std::uint64_t> n_sweep;
  int d = 2;
  std::uint64_t oversample_k = 16;

  WeightMode weight_mode = WeightMode::Full;
  std::vector<double> gammas;  // empty means unit weights
  int s = 0;
  std::optional<int> h;

  InitKind init_kind = InitKind::Iid;
  std::optional<std::uint64_t> init_seed;
  ScrambleKind init_scramble = ScrambleKind::None;
  std::string init_path;

  bool strict_walk = false;
  double lambda = 1e-3;
  double delta = 0.5;
  std::optional<std::uint64_t> walk_seed;
  bool shuffle_pairs = false;

  std::optional<std::uint64_t> shift_seed;
  /// Unset means the command's default: Grid, except table1 which uses Points.
  std::optional<ShiftTarget> shift_target;

  int repetitions = 16;
  bool baseline_iid = true;
  bool baseline_sobol = true;
  bool baseline_sobol_scrambled = true;

  std::string integrand;
  AsianParams asian;

  std::string output_dir;
  int workers = 1;

  WeightProfile profile() const;
  /// Transference settings for target size n and repetition `rep`. Explicit
  /// seeds are offset by rep; missing ones are derived from `seed`.
  TransferenceConfig transference(std::uint64_t n, std::size_t rep) const;
  /// Seed of the independent stream `stream` for repetition `rep`.
  std::uint64_t derived_seed(std::size_t rep, std::uint64_t stream) const;
};

/// Parses and validates; unknown keys anywhere are rejected with ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Validates every transference setting the config implies (each n, rep 0).
void validate_transference(const ExperimentConfig& cfg);

}  // namespace qmcst::app
