#pragma once

// A fully specified scenario: antennas, users, their requirements and EH
// circuits, the downlink channel, and the equivalent uplink noise after
// zero-forcing.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "wpcn/eh_model.hpp"
#include "wpcn/rng.hpp"

namespace wpcn {

inline constexpr double kSpeedOfLight = 299792458.0;

struct SystemConfig {
  int num_antennas = 5;
  double carrier_freq = 868e6;    // Hz
  double frame_length = 1.0;      // s
  double noise_variance = 1e-15;  // W (-120 dBm)
  int grid_mu = 10;               // levels per user of the harvest grid
  int grid_tau = 100;             // points of the downlink-fraction grid
  double mrt_step = 1e-2;         // downlink-fraction step of the MRT scheme
  std::uint64_t rng_seed = 1;

  void validate(int num_users) const;
};

struct UserSpec {
  double distance = 3.0;        // m
  double rate_req = 0.0;        // bits per channel use
  double power_req = 0.0;       // W
  double initial_energy = 0.0;  // J
  EhModelPtr eh;

  void validate() const;
};

/// Row k of `channel` is h_k (1 x N_t).
struct SystemInstance {
  SystemConfig config;
  std::vector<UserSpec> users;
  Eigen::MatrixXcd channel;
  Eigen::VectorXd zf_noise;  // equivalent uplink noise variance per user

  int num_users() const { return static_cast<int>(users.size()); }
  int num_antennas() const { return static_cast<int>(channel.cols()); }
  const EhModel& eh(int k) const { return *users[static_cast<std::size_t>(k)].eh; }
};

/// Free-space gain (c / (4 pi d f_c))^2.
double path_loss_gain(double distance, double carrier_freq);

/// K x N_t Rayleigh channel; entry (k, j) ~ CN(0, path_loss_gain(d_k, f_c)).
Eigen::MatrixXcd sample_channel(const SystemConfig& config, const std::vector<UserSpec>& users,
                                CounterRng& rng);

/// sigma^2 ||f_k||^2 for the rows f_k of the ZF equalizer F = (H H^H)^{-1} H.
Eigen::VectorXd zf_noise_variances(const Eigen::MatrixXcd& channel, double noise_variance);

/// Validates and assembles an instance for a given channel.
SystemInstance make_instance(const SystemConfig& config, std::vector<UserSpec> users,
                             Eigen::MatrixXcd channel);

/// Assembles an instance with a channel drawn from `rng`.
SystemInstance sample_instance(const SystemConfig& config, std::vector<UserSpec> users,
                               CounterRng& rng);

/// Minimum uplink power for user k to reach its rate in the (1 - tau_bar)
/// uplink share. +inf when tau_bar = 1 and a positive rate is required.
double min_uplink_power(const SystemInstance& inst, int k, double tau_bar);

/// Net power user k must harvest during the downlink share tau_bar, after
/// crediting its battery. May be negative.
double required_harvest(const SystemInstance& inst, int k, double tau_bar);

/// (1 - tau_bar) log2(1 + p_u / noise).
double achievable_rate(double tau_bar, double uplink_power, double noise);

}  // namespace wpcn
