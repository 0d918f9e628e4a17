#include "wpcn/system_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "wpcn/errors.hpp"

namespace wpcn {

void SystemConfig::validate(int num_users) const {
  if (num_users < 1) throw ConfigError("at least one user is required");
  if (num_antennas < num_users) throw ConfigError("num_antennas must be >= num_users");
  if (!(carrier_freq > 0)) throw ConfigError("carrier_freq must be positive");
  if (!(frame_length > 0)) throw ConfigError("frame_length must be positive");
  if (!(noise_variance > 0)) throw ConfigError("noise_variance must be positive");
  if (grid_mu < 2) throw ConfigError("grid_mu must be >= 2");
  if (grid_tau < 2) throw ConfigError("grid_tau must be >= 2");
  if (!(mrt_step > 0 && mrt_step <= 1)) throw ConfigError("mrt_step must lie in (0, 1]");
}

void UserSpec::validate() const {
  if (!(distance > 0)) throw ConfigError("user distance must be positive");
  if (!(rate_req >= 0)) throw ConfigError("rate_req must be non-negative");
  if (!(power_req >= 0)) throw ConfigError("power_req must be non-negative");
  if (!(initial_energy >= 0)) throw ConfigError("initial_energy must be non-negative");
  if (!eh) throw ConfigError("user has no EH model");
}

double path_loss_gain(double distance, double carrier_freq) {
  const double a = kSpeedOfLight / (4.0 * std::numbers::pi * distance * carrier_freq);
  return a * a;
}

Eigen::MatrixXcd sample_channel(const SystemConfig& config, const std::vector<UserSpec>& users,
                                CounterRng& rng) {
  const auto k_users = static_cast<Eigen::Index>(users.size());
  Eigen::MatrixXcd h(k_users, config.num_antennas);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const double sd =
        std::sqrt(path_loss_gain(users[static_cast<std::size_t>(k)].distance, config.carrier_freq) / 2.0);
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      h(k, j) = {sd * re, sd * im};
    }
  }
  return h;
}

Eigen::VectorXd zf_noise_variances(const Eigen::MatrixXcd& channel, double noise_variance) {
  if (channel.rows() < 1 || channel.cols() < channel.rows())
    throw RankDeficientChannelError("zf: channel must be K x N_t with N_t >= K");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(channel);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-12 * sv(0)))
    throw RankDeficientChannelError("zf: channel matrix is rank deficient");

  // F = (H_u^H H_u)^{-1} H_u^H with H_u = H^H, i.e. F = (H H^H)^{-1} H
  const Eigen::MatrixXcd gram = channel * channel.adjoint();
  const Eigen::MatrixXcd f = gram.ldlt().solve(channel);
  const Eigen::MatrixXcd check = f * channel.adjoint();
  const double resid =
      (check - Eigen::MatrixXcd::Identity(channel.rows(), channel.rows())).cwiseAbs().maxCoeff();
  if (resid > 1e-9)
    throw RankDeficientChannelError("zf: equalizer residual too large (ill-conditioned channel)");
  return f.rowwise().squaredNorm() * noise_variance;
}

SystemInstance make_instance(const SystemConfig& config, std::vector<UserSpec> users,
                             Eigen::MatrixXcd channel) {
  config.validate(static_cast<int>(users.size()));
  for (const auto& u : users) u.validate();
  if (channel.rows() != static_cast<Eigen::Index>(users.size()) ||
      channel.cols() != config.num_antennas)
    throw ConfigError("channel dimensions do not match users x antennas");
  for (Eigen::Index k = 0; k < channel.rows(); ++k)
    if (channel.row(k).squaredNorm() == 0.0) throw RankDeficientChannelError("zero channel row");

  SystemInstance inst;
  inst.config = config;
  inst.users = std::move(users);
  inst.zf_noise = zf_noise_variances(channel, config.noise_variance);
  inst.channel = std::move(channel);
  return inst;
}

SystemInstance sample_instance(const SystemConfig& config, std::vector<UserSpec> users,
                               CounterRng& rng) {
  config.validate(static_cast<int>(users.size()));
  Eigen::MatrixXcd h = sample_channel(config, users, rng);
  return make_instance(config, std::move(users), std::move(h));
}

double min_uplink_power(const SystemInstance& inst, int k, double tau_bar) {
  const double rate = inst.users[static_cast<std::size_t>(k)].rate_req;
  if (rate == 0.0) return 0.0;
  if (tau_bar >= 1.0) return std::numeric_limits<double>::infinity();
  return inst.zf_noise(k) * std::expm1(std::numbers::ln2 * rate / (1.0 - tau_bar));
}

double required_harvest(const SystemInstance& inst, int k, double tau_bar) {
  const auto& u = inst.users[static_cast<std::size_t>(k)];
  const double pu = min_uplink_power(inst, k, tau_bar);
  if (std::isinf(pu)) return pu;
  return (1.0 - tau_bar) * pu + u.power_req - u.initial_energy / inst.config.frame_length;
}

double achievable_rate(double tau_bar, double uplink_power, double noise) {
  return (1.0 - tau_bar) * std::log2(1.0 + uplink_power / noise);
}

}  // namespace wpcn
