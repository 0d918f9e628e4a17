#include "wpcn/eh_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wpcn/errors.hpp"
#include "wpcn/numerics.hpp"

namespace wpcn {

double EhModel::harvested_power(double input_power) const {
  if (!(input_power >= 0.0)) throw NegativeInputError("harvested_power: negative input power");
  if (input_power >= sat_input()) return saturation_output_;
  return std::min(curve(input_power), saturation_output_);
}

double EhModel::saturation_output() const { return saturation_output_; }

void EhModel::init_saturation() { saturation_output_ = curve(sat_input()); }

double EhModel::inverse_harvested_power(double target) const {
  const double sat = saturation_output_;
  if (target > sat * (1.0 + 1e-9))
    throw TargetExceedsSaturationError("inverse_harvested_power: target above saturation");
  if (target <= 0.0) return 0.0;
  if (target >= sat) return sat_input();

  // curve is increasing on [0, A^2]; keep hi on the feasible side
  double lo = 0.0;
  double hi = sat_input();
  for (int it = 0; it < 2000; ++it) {
    if (hi - lo <= 1e-13 * hi) break;
    const double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (curve(mid) >= target)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

RectifierEhModel::RectifierEhModel(double mu, double nu, double lambda_scale, double sat_input)
    : mu_(mu), nu_(nu), lambda_(lambda_scale), sat_input_(sat_input) {
  if (!(mu > 0 && nu > 0 && lambda_scale > 0 && sat_input > 0))
    throw ConfigError("RectifierEhModel: parameters must be positive");
  log_mu_exp_mu_ = std::log(mu_) + mu_;
  init_saturation();
}

double RectifierEhModel::curve(double input_power) const {
  if (input_power <= 0.0) return 0.0;
  const double x = nu_ * std::sqrt(2.0 * input_power);
  double r;
  if (x < 0.02) {
    // r = W0(mu e^mu I0(x)) / mu - 1 solves log1p(r) + mu r = log I0(x).
    // Solving that directly keeps full relative precision as r -> 0.
    const double q = x * x / 4.0;
    const double log_i0 = std::log1p(q * (1.0 + q / 4.0 * (1.0 + q / 9.0)));
    r = 0.0;
    for (int it = 0; it < 50; ++it) {
      const double g = std::log1p(r) + mu_ * r - log_i0;
      const double step = g / (1.0 / (1.0 + r) + mu_);
      r -= step;
      if (std::abs(step) <= 1e-16 * r) break;
    }
  } else {
    // W0 argument mu e^mu I0(x), formed in the log domain
    const double w = lambert_w0_exp(log_mu_exp_mu_ + log_bessel_i0(x));
    r = w / mu_ - 1.0;
  }
  return lambda_ * r * r;
}

LinearSaturatedEhModel::LinearSaturatedEhModel(double efficiency, double sat_input)
    : efficiency_(efficiency), sat_input_(sat_input) {
  if (!(efficiency > 0 && sat_input > 0))
    throw ConfigError("LinearSaturatedEhModel: parameters must be positive");
  init_saturation();
}

double LinearSaturatedEhModel::inverse_harvested_power(double target) const {
  const double sat = saturation_output();
  if (target > sat * (1.0 + 1e-9))
    throw TargetExceedsSaturationError("inverse_harvested_power: target above saturation");
  if (target <= 0.0) return 0.0;
  if (target >= sat) return sat_input_;
  return std::min(target / efficiency_, sat_input_);
}

EhModelPtr default_rectifier_model() {
  return std::make_shared<RectifierEhModel>(0.03, 2.4e3, 1e-10, 0.4e-3);
}

}  // namespace wpcn
