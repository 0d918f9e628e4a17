#pragma once

// JSON scenario files and plan dumps.
//
// Scenario layout (all fields optional except "users"):
//   {
//     "num_antennas": 5, "carrier_freq_hz": 868e6, "frame_length_s": 1.0,
//     "noise_variance_w": 1e-15, "grid_mu": 10, "grid_tau": 100, "mrt_step": 0.01,
//     "eh_model": {"kind": "rectifier", "mu": 0.03, "nu": 2400, "lambda": 1e-10,
//                  "sat_input_w": 4e-4},
//     "users": [{"distance_m": 3, "rate_req": 1, "power_req_w": 2e-5,
//                "initial_energy_j": 0, "eh_model": {...}}],
//     "channel": [[[re, im], ...], ...]
//   }
// Without "channel" the channel is drawn from the seed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wpcn/oracle.hpp"
#include "wpcn/planner.hpp"
#include "wpcn/system_model.hpp"

namespace wpcn {

struct Scenario {
  SystemConfig config;
  std::vector<UserSpec> users;
  std::optional<Eigen::MatrixXcd> channel;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

EhModelPtr eh_model_from_json(const nlohmann::json& j);
nlohmann::json eh_model_to_json(const EhModel& m);

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j);

/// Generator of trial `trial` under `seed`; trial 0 is used by single runs.
CounterRng trial_rng(std::uint64_t seed, std::uint64_t trial);

/// The scenario's fixed channel, or one drawn from trial_rng(seed, 0).
SystemInstance build_instance(const Scenario& s, std::uint64_t seed);

struct PlanRecord {
  EnergySignalPlan plan;
  std::uint64_t seed = 0;
  std::optional<Eigen::MatrixXcd> channel;
};

nlohmann::json plan_to_json(const EnergySignalPlan& plan, std::uint64_t seed,
                            const Eigen::MatrixXcd& channel);
PlanRecord plan_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const VerificationReport& r);

}  // namespace wpcn
