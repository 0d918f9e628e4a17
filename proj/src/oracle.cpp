#include "wpcn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "wpcn/errors.hpp"

namespace wpcn {

namespace {

constexpr double kHard = std::numeric_limits<double>::infinity();

// Unit coefficient vector c in C^K with c_0 real: K-1 hyperspherical angles
// in [0, pi/2] for the magnitudes followed by K-1 phases.
Eigen::VectorXcd coefficients(const std::vector<double>& params, int k_users) {
  Eigen::VectorXcd c(k_users);
  double rest = 1.0;
  for (int k = 0; k < k_users - 1; ++k) {
    const double a = params[static_cast<std::size_t>(k)];
    c(k) = rest * std::cos(a);
    rest *= std::sin(a);
  }
  c(k_users - 1) = rest;
  for (int k = 1; k < k_users; ++k)
    c(k) *= std::polar(1.0, params[static_cast<std::size_t>(k_users - 2 + k)]);
  return c;
}

// Power of the beam along H^H c scaled onto the constraints; +inf if some
// active user receives nothing.
double scaled_power(const Eigen::MatrixXcd& h, const Eigen::VectorXd& rho, const Eigen::VectorXcd& c) {
  const Eigen::VectorXcd x = h.adjoint() * c;
  const Eigen::VectorXcd r = h * x;
  double ratio = 0.0;
  for (Eigen::Index k = 0; k < rho.size(); ++k) {
    if (rho(k) <= 0.0) continue;
    const double got = std::norm(r(k));
    if (!(got > 0.0)) return std::numeric_limits<double>::infinity();
    ratio = std::max(ratio, rho(k) / got);
  }
  return ratio * x.squaredNorm();
}

}  // namespace

double brute_force_psi(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& rho, int resolution) {
  const auto k_users = static_cast<int>(channel.rows());
  if (rho.size() != k_users) throw DomainError("brute_force_psi: rho has the wrong length");
  if (k_users < 1 || k_users > 3) throw DomainError("brute_force_psi: requires 1 <= K <= 3");
  if (resolution < 50) throw DomainError("brute_force_psi: resolution must be >= 50");
  if ((rho.array() < 0.0).any()) throw DomainError("brute_force_psi: rho must be non-negative");
  if (rho.maxCoeff() == 0.0) return 0.0;

  const int dims = 2 * k_users - 2;
  auto eval = [&](const std::vector<double>& p) {
    return scaled_power(channel, rho, coefficients(p, k_users));
  };
  if (dims == 0) return eval({});

  std::vector<double> span(static_cast<std::size_t>(dims));
  std::vector<double> step(static_cast<std::size_t>(dims));
  for (int d = 0; d < dims; ++d) {
    const bool angle = d < k_users - 1;
    span[static_cast<std::size_t>(d)] = angle ? std::numbers::pi / 2 : 2 * std::numbers::pi;
    // magnitude angles include both end points, phases wrap around
    step[static_cast<std::size_t>(d)] =
        span[static_cast<std::size_t>(d)] / (angle ? resolution - 1 : resolution);
  }

  std::vector<int> idx(static_cast<std::size_t>(dims), 0);
  std::vector<double> p(static_cast<std::size_t>(dims)), best_p;
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    for (int d = 0; d < dims; ++d)
      p[static_cast<std::size_t>(d)] = idx[static_cast<std::size_t>(d)] * step[static_cast<std::size_t>(d)];
    const double v = eval(p);
    if (v < best) {
      best = v;
      best_p = p;
    }
    int d = 0;
    while (d < dims && ++idx[static_cast<std::size_t>(d)] == resolution) idx[static_cast<std::size_t>(d++)] = 0;
    if (d == dims) break;
  }
  if (!std::isfinite(best))
    throw ResolutionTooCoarseError("brute_force_psi: no feasible grid point");

  // compass search around the best grid point
  std::vector<double> h = step;
  for (int it = 0; it < 100000; ++it) {
    bool improved = false;
    for (int d = 0; d < dims && !improved; ++d) {
      for (double sign : {1.0, -1.0}) {
        std::vector<double> q = best_p;
        q[static_cast<std::size_t>(d)] += sign * h[static_cast<std::size_t>(d)];
        const double v = eval(q);
        if (v < best) {
          best = v;
          best_p = std::move(q);
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      bool small = true;
      for (auto& s : h) {
        s /= 2;
        small = small && s < 1e-12;
      }
      if (small) break;
    }
  }
  return best;
}

VerificationReport verify_plan(const SystemInstance& inst, const EnergySignalPlan& plan,
                               const VerifyTolerances& tol) {
  const int k_users = inst.num_users();
  const double tf = inst.config.frame_length;
  VerificationReport rep;
  rep.rate_margin = Eigen::VectorXd::Zero(k_users);
  rep.energy_margin = Eigen::VectorXd::Zero(k_users);

  auto fail = [&](const std::string& what, double shortfall_over_tol) {
    rep.violations.push_back(what);
    rep.worst_violation = std::max(rep.worst_violation, shortfall_over_tol);
  };

  if (!(plan.tau_bar >= 0.0 && plan.tau_bar <= 1.0)) fail("tau_bar outside [0, 1]", kHard);
  if (plan.uplink_powers.size() != k_users) {
    fail("uplink power vector has the wrong length", kHard);
    rep.pass = false;
    return rep;
  }

  double total = 0.0;
  for (std::size_t n = 0; n < plan.slots.size(); ++n) {
    const auto& s = plan.slots[n];
    total += s.duration;
    if (!(s.duration >= 0.0)) fail("slot " + std::to_string(n) + ": negative duration", kHard);
    if (s.beam.w.size() != inst.num_antennas())
      fail("slot " + std::to_string(n) + ": beam has the wrong length", kHard);
  }
  rep.duration_residual = total - plan.tau_bar;
  if (std::abs(rep.duration_residual) > tol.duration) {
    std::ostringstream m;
    m << "slot durations sum to " << total << " instead of tau_bar " << plan.tau_bar;
    fail(m.str(), std::abs(rep.duration_residual) / tol.duration);
  }
  if (!rep.violations.empty() && rep.worst_violation == kHard) {
    rep.pass = false;
    return rep;
  }

  for (int k = 0; k < k_users; ++k) {
    const auto& u = inst.users[static_cast<std::size_t>(k)];
    const double pu = plan.uplink_powers(k);
    if (!(pu >= 0.0)) fail("user " + std::to_string(k) + ": negative uplink power", kHard);

    double harvested = 0.0;
    for (const auto& s : plan.slots) {
      const double input = std::norm(inst.channel.row(k).dot(s.beam.w.conjugate()));
      harvested += s.duration * inst.eh(k).harvested_power(input);
    }
    const double energy = u.initial_energy + tf * harvested;
    const double consumed = (1.0 - plan.tau_bar) * pu * tf + u.power_req * tf;
    rep.energy_margin(k) = energy - consumed;

    const double rate = plan.tau_bar < 1.0 ? achievable_rate(plan.tau_bar, std::max(pu, 0.0), inst.zf_noise(k)) : 0.0;
    rep.rate_margin(k) = rate - u.rate_req;

    if (rep.energy_margin(k) < -tol.energy) {
      std::ostringstream m;
      m << "user " << k << ": energy short by " << -rep.energy_margin(k) << " J";
      fail(m.str(), -rep.energy_margin(k) / tol.energy);
    }
    if (rep.rate_margin(k) < -tol.rate) {
      std::ostringstream m;
      m << "user " << k << ": rate short by " << -rep.rate_margin(k) << " bits/use";
      fail(m.str(), -rep.rate_margin(k) / tol.rate);
    }
  }
  rep.pass = rep.violations.empty();
  return rep;
}

DualityCertificate certify_duality(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& rho,
                                   const DualSolution& dual, const BeamVector& beam) {
  DualityCertificate cert;
  const double obj = rho.dot(dual.lambda);
  const double power = beam.w.squaredNorm();
  cert.gap = std::abs(power - obj) / std::max(obj, std::numeric_limits<double>::min());
  if (power == 0.0 && obj == 0.0) cert.gap = 0.0;

  // multipliers are compared against their largest entry, which makes the
  // activity threshold independent of the channel scale
  const double lam_max = dual.lambda.size() > 0 ? dual.lambda.maxCoeff() : 0.0;
  const Eigen::VectorXcd r = channel * beam.w;
  cert.worst_slackness = 0.0;
  for (Eigen::Index k = 0; k < rho.size(); ++k) {
    if (!(dual.lambda(k) > 1e-6 * lam_max) || rho(k) <= 0.0) continue;
    cert.worst_slackness = std::max(cert.worst_slackness, (std::norm(r(k)) - rho(k)) / rho(k));
  }
  cert.complementary_slackness = cert.worst_slackness <= 1e-6;
  return cert;
}

}  // namespace wpcn
