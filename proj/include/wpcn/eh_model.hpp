#pragma once

// Instantaneous energy-harvesting models: map the received RF power |z|^2 (W)
// to the harvested DC power (W), saturating above the input power A^2.

#include <memory>
#include <string>

namespace wpcn {

class EhModel {
 public:
  virtual ~EhModel() = default;

  /// Unclamped characteristic curve; only evaluated on [0, sat_input()].
  virtual double curve(double input_power) const = 0;

  /// Minimum input power A^2 that drives the circuit into saturation.
  virtual double sat_input() const = 0;

  virtual std::string kind() const = 0;

  /// min{curve(P), curve(A^2)}.
  double harvested_power(double input_power) const;

  /// curve(A^2), the plateau value.
  double saturation_output() const;

  /// Minimal input power whose harvested power reaches `target`. The plateau
  /// maps back to its left end A^2.
  virtual double inverse_harvested_power(double target) const;

 protected:
  void init_saturation();

 private:
  double saturation_output_ = 0.0;
};

using EhModelPtr = std::shared_ptr<const EhModel>;

/// Half-wave rectifier curve
///   lambda * (W0(mu e^mu I0(nu sqrt(2P))) / mu - 1)^2,
/// which vanishes at P = 0.
class RectifierEhModel final : public EhModel {
 public:
  RectifierEhModel(double mu, double nu, double lambda_scale, double sat_input);

  double curve(double input_power) const override;
  double sat_input() const override { return sat_input_; }
  std::string kind() const override { return "rectifier"; }

  double mu() const { return mu_; }
  double nu() const { return nu_; }
  double lambda_scale() const { return lambda_; }

 private:
  double mu_;
  double nu_;
  double lambda_;
  double sat_input_;
  double log_mu_exp_mu_;
};

/// eta * min(P, A^2).
class LinearSaturatedEhModel final : public EhModel {
 public:
  LinearSaturatedEhModel(double efficiency, double sat_input);

  double curve(double input_power) const override { return efficiency_ * input_power; }
  double sat_input() const override { return sat_input_; }
  std::string kind() const override { return "linear"; }
  double inverse_harvested_power(double target) const override;

  double efficiency() const { return efficiency_; }

 private:
  double efficiency_;
  double sat_input_;
};

/// Circuit parameters used throughout the reference simulations.
EhModelPtr default_rectifier_model();

}  // namespace wpcn
