#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "camfis/forward_models.hpp"
#include "camfis/laplace.hpp"

namespace camfis::harness {

enum class Scale { paper, desk };

Scale parse_scale(std::string_view name);

/// Cost constants supplied by the user instead of being timed by the pilot.
struct PinnedCosts {
  double c0 = 0.0;
  double c1 = 0.0;
  double high_fidelity_cost = 0.0;  // C
};

struct CampaignConfig {
  ProblemKind problem = ProblemKind::heat;
  std::vector<int> fidelities;
  int high_fidelity = 256;
  std::vector<double> theta_truth;
  double noise_variance = 1e-5;
  std::vector<double> prior_mean;
  double prior_variance = 0.1;

  std::size_t pilot_m = 1000;
  std::size_t pilot_trials = 500;
  std::size_t truth_m = 100000;
  std::size_t truth_trials = 500;
  std::size_t mse_trials = 1000;

  std::vector<double> tolerances;
  double f_sup_factor = 1.0;
  /// Resolution used by the surrogate-alone comparison; 0 means the coarsest fidelity.
  int baseline_fidelity = 0;

  NewtonConfig newton;
  std::optional<PinnedCosts> pinned_costs;

  /// Worker threads for independent trials; 0 picks the hardware concurrency.
  std::size_t threads = 0;
  /// Potential evaluations per timing batch when measuring c(h) and C.
  std::size_t timing_evals = 200;
  std::size_t timing_repeats = 5;

  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;
};

/// Built-in configurations: full experiment sizes (paper) or the
/// reduced sizes used by the acceptance suite (desk).
CampaignConfig default_config(ProblemKind problem, Scale scale);

/// Reads `key = value` lines. `[pilot]`, `[truth]`, `[mse]`, `[newton]`,
/// `[costs]` and `[run]` sections hold the grouped keys; `[heat]` and
/// `[beam]` sections hold top-level keys that apply only to that problem.
/// Lists are separated by commas and/or whitespace; '#' starts a comment.
/// Keys that are absent keep their value from `base`.
CampaignConfig parse_config(std::istream& in, const CampaignConfig& base);
CampaignConfig load_config(const std::filesystem::path& path, const CampaignConfig& base);

/// Inverse of parse_config: writes every key in the format above.
void write_config(std::ostream& out, const CampaignConfig& cfg);

/// Problem named by a config file's top-level `problem` key, if any.
std::optional<ProblemKind> peek_problem(const std::filesystem::path& path);

}  // namespace camfis::harness
