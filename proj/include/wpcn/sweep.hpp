#pragma once

// Monte-Carlo sweeps over one scenario parameter.
//
// Spec layout:
//   {
//     "scenario": {...} | "scenario_file": "path",
//     "parameter": "power_req" | "rate_req" | "num_users" | "num_antennas",
//     "values": [...], "trials": 200, "schemes": ["mrt", "sdr"], "seed": 1,
//     "distance_range_m": [3, 10], "threads": 0
//   }
// power_req values are in W and apply to every user. For num_users the user
// list is built by cycling through the scenario's users. With
// distance_range_m every trial draws user distances uniformly in the range.
// Trial t of every sweep point uses the generator trial_rng(seed, t), so
// points that keep the dimensions see identical channels.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "wpcn/planner.hpp"
#include "wpcn/scenario.hpp"

namespace wpcn {

enum class SweepParameter { power_req, rate_req, num_users, num_antennas };

struct SweepSpec {
  Scenario base;
  SweepParameter parameter = SweepParameter::power_req;
  std::vector<double> values;
  int trials = 1;
  std::vector<Scheme> schemes;
  std::uint64_t seed = 1;
  std::optional<std::pair<double, double>> distance_range;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

SweepSpec sweep_spec_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
SweepSpec load_sweep_spec(const std::string& path);

struct SweepRow {
  double swept_value = 0.0;
  Scheme scheme = Scheme::optimal;
  double mean_p_dl_w = 0.0;  // over trials with a verified plan; NaN if none
  double feasible_frac = 0.0;
  double mean_wall_s = 0.0;
  std::uint64_t seed = 0;
  std::string status = "ok";
};

/// Outcome of one scheme on one trial.
struct TrialOutcome {
  bool feasible = false;  // plan produced and verified
  double cost = 0.0;
  double wall_s = 0.0;
  std::string error;      // solver or verification failure other than infeasibility
};

/// The instance of trial `trial` at sweep point `point`.
SystemInstance sweep_instance(const SweepSpec& spec, std::size_t point, int trial);

/// Raw outcomes indexed [point][scheme][trial].
using SweepOutcomes = std::vector<std::vector<std::vector<TrialOutcome>>>;
SweepOutcomes run_sweep_trials(const SweepSpec& spec);

std::vector<SweepRow> summarize_sweep(const SweepSpec& spec, const SweepOutcomes& outcomes);
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// swept_value,scheme,mean_p_dl_w,feasible_frac,mean_wall_s,seed,status
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace wpcn
