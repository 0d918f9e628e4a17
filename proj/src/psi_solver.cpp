#include "wpcn/psi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "wpcn/errors.hpp"
#include "wpcn/lp.hpp"
#include "wpcn/numerics.hpp"

namespace wpcn {

namespace {

using cd = std::complex<double>;

std::vector<Eigen::Index> active_users(const Eigen::VectorXd& rho) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = 0; k < rho.size(); ++k)
    if (rho(k) > 0.0) idx.push_back(k);
  return idx;
}

double mean_row_energy(const Eigen::MatrixXcd& h) {
  return h.rowwise().squaredNorm().mean();
}

// Least-index principal pivoting (Murty) for the LCP
//   z = Q nu - s >= 0,  nu >= 0,  nu^T z = 0,
// finite for positive definite Q.
Eigen::VectorXd solve_lcp(const Eigen::MatrixXd& q, const Eigen::VectorXd& s) {
  const Eigen::Index n = s.size();
  std::vector<bool> basic(static_cast<std::size_t>(n), false);
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(n);
  const double s_scale = std::max(1e-300, s.cwiseAbs().maxCoeff());
  for (int it = 0; it < 100000; ++it) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (basic[static_cast<std::size_t>(i)]) idx.push_back(i);
    nu.setZero();
    if (!idx.empty()) {
      const auto m = static_cast<Eigen::Index>(idx.size());
      Eigen::MatrixXd qs(m, m);
      Eigen::VectorXd ss(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        ss(a) = s(idx[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < m; ++b)
          qs(a, b) = q(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
      }
      const Eigen::VectorXd x = qs.ldlt().solve(ss);
      for (Eigen::Index a = 0; a < m; ++a) nu(idx[static_cast<std::size_t>(a)]) = x(a);
    }
    const Eigen::VectorXd z = q * nu - s;
    const double nu_scale = std::max(1e-300, nu.cwiseAbs().maxCoeff());
    Eigen::Index flip = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool b = basic[static_cast<std::size_t>(i)];
      if ((b && nu(i) < -1e-13 * nu_scale) || (!b && z(i) < -1e-13 * s_scale)) {
        flip = i;
        break;
      }
    }
    if (flip < 0) return nu.cwiseMax(0.0);
    basic[static_cast<std::size_t>(flip)] = !basic[static_cast<std::size_t>(flip)];
  }
  throw ConvergenceError("refine_beam: LCP pivoting did not terminate");
}

Eigen::VectorXcd scale_onto(const Eigen::MatrixXcd& h, const Eigen::VectorXd& rho,
                            Eigen::VectorXcd w) {
  double ratio = 0.0;
  for (Eigen::Index k = 0; k < rho.size(); ++k) {
    if (rho(k) <= 0.0) continue;
    const double got = std::norm(h.row(k).dot(w.conjugate()));
    if (got <= 0.0) return Eigen::VectorXcd::Zero(w.size());
    ratio = std::max(ratio, rho(k) / got);
  }
  if (ratio == 0.0) return Eigen::VectorXcd::Zero(w.size());
  return w * std::sqrt(ratio);
}

// h_k w for every row
Eigen::VectorXcd received(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& w) { return h * w; }

// Fixed-phase refinement on a normalized channel. Returns the refined beam
// and the received-power multipliers in normalized units.
Eigen::VectorXcd refine_normalized(const Eigen::MatrixXcd& hn, const Eigen::MatrixXcd& gram,
                                   const Eigen::VectorXd& rho, const Eigen::VectorXcd& start,
                                   Eigen::VectorXd& lambda) {
  const auto act = active_users(rho);
  lambda = Eigen::VectorXd::Zero(rho.size());
  if (act.empty()) return Eigen::VectorXcd::Zero(hn.cols());
  const auto m = static_cast<Eigen::Index>(act.size());

  Eigen::VectorXcd w = scale_onto(hn, rho, start);
  if (w.squaredNorm() == 0.0) {
    // start direction misses a user; fall back to a sum of matched filters
    Eigen::VectorXcd mf = Eigen::VectorXcd::Zero(hn.cols());
    for (auto k : act) mf += std::sqrt(rho(k)) * hn.row(k).adjoint() / hn.row(k).squaredNorm();
    w = scale_onto(hn, rho, mf);
  }
  double power = w.squaredNorm();

  Eigen::VectorXd s(m);
  for (Eigen::Index a = 0; a < m; ++a) s(a) = std::sqrt(rho(act[static_cast<std::size_t>(a)]));

  bool have_multipliers = false;
  for (int it = 0; it < 500; ++it) {
    const Eigen::VectorXcd r = received(hn, w);
    Eigen::VectorXcd phase(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const cd v = r(act[static_cast<std::size_t>(a)]);
      phase(a) = std::abs(v) > 0.0 ? v / std::abs(v) : cd(1.0, 0.0);
    }
    Eigen::MatrixXd q(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b)
        q(a, b) = (std::conj(phase(a)) *
                   gram(act[static_cast<std::size_t>(a)], act[static_cast<std::size_t>(b)]) *
                   phase(b))
                      .real();
    const Eigen::VectorXd nu = solve_lcp(q, s);

    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(hn.cols());
    for (Eigen::Index a = 0; a < m; ++a)
      next += nu(a) * phase(a) * hn.row(act[static_cast<std::size_t>(a)]).adjoint();
    next = scale_onto(hn, rho, next);
    const double next_power = next.squaredNorm();
    if (next_power == 0.0 || next_power > power * (1.0 + 1e-15)) break;

    const bool stalled = next_power >= power * (1.0 - 1e-15);
    w = std::move(next);
    power = next_power;
    for (Eigen::Index a = 0; a < m; ++a) lambda(act[static_cast<std::size_t>(a)]) = nu(a) / s(a);
    have_multipliers = true;
    if (stalled) break;
  }
  if (!have_multipliers) lambda.setZero();
  return w;
}

double top_eigenvalue(const Eigen::MatrixXcd& b, const Eigen::VectorXd& lambda,
                      Eigen::VectorXcd* vec = nullptr) {
  const Eigen::MatrixXcd m = b * lambda.cast<cd>().asDiagonal() * b;
  auto [val, v] = top_eigenpair<double>((m + m.adjoint()) / 2.0);
  if (vec) *vec = v;
  return val;
}

}  // namespace

PsiSolver::PsiSolver(const Eigen::MatrixXcd& channel, PsiOptions options)
    : channel_(channel), options_(options) {
  if (channel.rows() < 1 || channel.cols() < channel.rows())
    throw RankDeficientChannelError("psi: channel must be K x N_t with N_t >= K");
  h_scale_ = mean_row_energy(channel);
  if (!(h_scale_ > 0.0)) throw RankDeficientChannelError("psi: zero channel");
  hn_ = channel / std::sqrt(h_scale_);
  gram_n_ = hn_ * hn_.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram_n_, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(es.eigenvalues().size() - 1);
  if (!(lo > 1e-24 * hi))  // squared singular values, 1e-12 relative
    throw RankDeficientChannelError("psi: channel matrix is rank deficient");
  b_n_ = psd_sqrt<double>(gram_n_);
}

Eigen::MatrixXcd PsiSolver::channel_sqrt() const { return b_n_ * std::sqrt(h_scale_); }

std::pair<double, DualSolution> PsiSolver::solve(const Eigen::VectorXd& rho) const {
  const Eigen::Index k_users = channel_.rows();
  if (rho.size() != k_users) throw DomainError("psi: rho has the wrong length");
  if ((rho.array() < 0.0).any() || !rho.allFinite())
    throw DomainError("psi: rho must be finite and non-negative");

  DualSolution dual;
  dual.lambda = Eigen::VectorXd::Zero(k_users);
  const auto act = active_users(rho);
  if (act.empty()) return {0.0, dual};
  const auto m = static_cast<Eigen::Index>(act.size());

  const double rho_scale = rho.maxCoeff();
  const Eigen::VectorXd rho_n = rho / rho_scale;
  // normalized psi -> watts
  const double to_watts = rho_scale / h_scale_;

  Eigen::VectorXd obj(m);
  for (Eigen::Index a = 0; a < m; ++a) obj(a) = rho_n(act[static_cast<std::size_t>(a)]);

  std::vector<Eigen::VectorXcd> cuts;
  for (Eigen::Index k = 0; k < k_users; ++k) cuts.push_back(Eigen::VectorXcd::Unit(k_users, k));

  LpProblem master(m);
  master.objective = -obj;
  auto add_cut = [&](const Eigen::VectorXcd& u) {
    const Eigen::VectorXcd bu = b_n_ * u;
    Eigen::RowVectorXd row(m);
    for (Eigen::Index a = 0; a < m; ++a) row(a) = std::norm(bu(act[static_cast<std::size_t>(a)]));
    master.add_le(row, 1.0);
  };
  for (const auto& u : cuts) add_cut(u);

  double best_lb = 0.0;
  Eigen::VectorXd best_lambda = Eigen::VectorXd::Zero(k_users);
  double best_ub = std::numeric_limits<double>::infinity();
  double best_primal_power = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd best_primal;

  auto offer_dual = [&](const Eigen::VectorXd& lam_full) {
    if (lam_full.maxCoeff() <= 0.0) return;
    const double g = top_eigenvalue(b_n_, lam_full);
    if (!(g > 0.0)) return;
    const double lb = rho_n.dot(lam_full) / g;
    if (lb > best_lb) {
      best_lb = lb;
      best_lambda = lam_full / g;
    }
  };
  auto offer_primal = [&](const Eigen::VectorXcd& start) {
    Eigen::VectorXd mult;
    const Eigen::VectorXcd w = refine_normalized(hn_, gram_n_, rho_n, start, mult);
    const double p = w.squaredNorm();
    if (p > 0.0 && p < best_primal_power) {
      best_primal_power = p;
      best_primal = w;
      best_ub = std::min(best_ub, p);
    }
    offer_dual(mult);
  };

  bool converged = false;
  int it = 0;
  for (; it < options_.max_cuts; ++it) {
    const LpSolution sol = solve_lp(master);
    if (sol.status != LpStatus::optimal)
      throw ConvergenceError("psi: cutting-plane master is not bounded");
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(k_users);
    for (Eigen::Index a = 0; a < m; ++a) lam(act[static_cast<std::size_t>(a)]) = sol.x(a);
    const double ub_lp = rho_n.dot(lam);
    dual.master_bounds.push_back(ub_lp * to_watts);
    best_ub = std::min(best_ub, ub_lp);

    Eigen::VectorXcd u;
    const double g = top_eigenvalue(b_n_, lam, &u);
    offer_dual(lam);

    if (options_.polish) {
      // Dominant eigenvector of hn^H diag(lam) hn, computed in K-space:
      // if y is the top eigenvector of D^{1/2} G D^{1/2}, then hn^H D^{1/2} y.
      const Eigen::VectorXd d = lam.cwiseMax(0.0).cwiseSqrt();
      const Eigen::MatrixXcd m_k = d.cast<cd>().asDiagonal() * gram_n_ * d.cast<cd>().asDiagonal();
      const auto [delta, y] = top_eigenpair<double>((m_k + m_k.adjoint()) / 2.0);
      offer_primal(hn_.adjoint() * (d.cast<cd>().asDiagonal() * y));
      if (it == 0) {
        Eigen::VectorXcd mf = Eigen::VectorXcd::Zero(hn_.cols());
        for (auto k : act) mf += std::sqrt(rho_n(k)) * hn_.row(k).adjoint() / hn_.row(k).squaredNorm();
        offer_primal(mf);
      }
    }

    if (best_ub <= best_lb * (1.0 + options_.tol) || g <= 1.0 + 1e-15) {
      converged = true;
      ++it;
      break;
    }
    cuts.push_back(u);
    add_cut(u);
  }

  dual.iterations = it;
  dual.cuts = std::move(cuts);
  dual.lambda = best_lambda / h_scale_;
  dual.objective = best_lb * to_watts;
  dual.upper_bound = best_ub * to_watts;
  if (best_primal.size() > 0) dual.primal = best_primal * std::sqrt(to_watts);
  dual.gap_certificate = (best_ub - best_lb) / std::max(best_lb, 1e-300);
  if (!converged) {
    std::ostringstream msg;
    msg << "psi: cutting plane hit the iteration cap; certified bounds [" << dual.objective
        << ", " << dual.upper_bound << "]";
    throw ConvergenceError(msg.str());
  }
  return {dual.objective, std::move(dual)};
}

std::pair<double, DualSolution> compute_psi(const Eigen::MatrixXcd& channel,
                                            const Eigen::VectorXd& rho, double tol) {
  PsiOptions opt;
  opt.tol = tol;
  return PsiSolver(channel, opt).solve(rho);
}

double dual_constraint_norm(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& lambda) {
  const Eigen::MatrixXcd b = psd_sqrt<double>(channel * channel.adjoint());
  return top_eigenvalue(b, lambda);
}

Eigen::MatrixXcd kkt_matrix(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& lambda) {
  Eigen::MatrixXcd delta = channel.adjoint() * lambda.cast<cd>().asDiagonal() * channel;
  return (delta + delta.adjoint()) / 2.0;
}

Eigen::VectorXcd scale_onto_constraints(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& rho,
                                        Eigen::VectorXcd w) {
  return scale_onto(channel, rho, std::move(w));
}

BeamVector refine_beam(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& rho,
                       const Eigen::VectorXcd& start, Eigen::VectorXd* multipliers) {
  const auto act = active_users(rho);
  if (act.empty()) {
    if (multipliers) *multipliers = Eigen::VectorXd::Zero(rho.size());
    return BeamVector::from(Eigen::VectorXcd::Zero(channel.cols()));
  }
  const double hs = mean_row_energy(channel);
  const double rs = rho.maxCoeff();
  const Eigen::MatrixXcd hn = channel / std::sqrt(hs);
  const Eigen::MatrixXcd gram = hn * hn.adjoint();
  Eigen::VectorXd lam;
  const Eigen::VectorXcd wn =
      refine_normalized(hn, gram, rho / rs, start * std::sqrt(hs / rs), lam);
  if (multipliers) *multipliers = lam / hs;
  return BeamVector::from(scale_onto(channel, rho, wn * std::sqrt(rs / hs)));
}

BeamVector recover_beamformer(const Eigen::MatrixXcd& channel, const DualSolution& dual,
                              const Eigen::VectorXd& rho) {
  const auto act = active_users(rho);
  if (act.empty()) return BeamVector::from(Eigen::VectorXcd::Zero(channel.cols()));
  if (dual.lambda.size() != channel.rows()) throw DomainError("recover_beamformer: bad dual");

  const auto eig = hermitian_eig<double>(kkt_matrix(channel, dual.lambda));
  const double top = eig.values(0);
  if (std::abs(top - 1.0) > 1e-6)
    throw OptimalityCheckFailedError("recover_beamformer: dual solution is not converged");
  Eigen::Index mult = 1;
  while (mult < eig.values.size() && eig.values(mult) >= top - 1e-8 * top) ++mult;

  Eigen::VectorXcd start;
  if (mult == 1) {
    start = scale_onto(channel, rho, eig.vectors.col(0));
  } else {
    // Tied dominant eigenvalues: the optimum lies in the tied eigenspace.
    const Eigen::MatrixXcd e = eig.vectors.leftCols(mult);
    Eigen::VectorXcd mf = Eigen::VectorXcd::Zero(channel.cols());
    for (auto k : act) mf += std::sqrt(rho(k)) * channel.row(k).adjoint() / channel.row(k).squaredNorm();
    start = scale_onto(channel, rho, e * (e.adjoint() * mf));
  }

  BeamVector beam = BeamVector::from(start);
  if (beam.power == 0.0 || beam.power > dual.objective * (1.0 + 1e-12)) {
    BeamVector refined = refine_beam(channel, rho, start.squaredNorm() > 0.0 ? start : Eigen::VectorXcd(channel.row(act[0]).adjoint()));
    if (beam.power == 0.0 || refined.power < beam.power) beam = std::move(refined);
  }
  // A nearly tied dominant eigenvalue makes the eigenvector ill-determined;
  // the solver's own polished beam is then the better candidate.
  if (dual.primal.size() == channel.cols() && beam.power > dual.objective * (1.0 + 1e-12)) {
    const Eigen::VectorXcd w = scale_onto(channel, rho, dual.primal);
    if (w.squaredNorm() > 0.0 && w.squaredNorm() < beam.power) beam = BeamVector::from(w);
  }

  if (!(beam.power <= dual.objective * (1.0 + 1e-6))) {
    if (mult > 1)
      throw DegenerateEigenspaceError("recover_beamformer: dominant eigenvalue is not simple");
    throw OptimalityCheckFailedError("recover_beamformer: recovered power exceeds the dual bound");
  }
  return beam;
}

BeamVector min_trace_beamforming(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& b,
                                 const PsiOptions& options) {
  const PsiSolver solver(channel, options);
  try {
    const auto [value, dual] = solver.solve(b);
    return recover_beamformer(channel, dual, b);
  } catch (const DegenerateEigenspaceError&) {
    Eigen::VectorXd perturbed = b;
    for (Eigen::Index k = 0; k < b.size(); ++k) perturbed(k) *= 1.0 + 1e-9 * static_cast<double>(k + 1);
    const auto [value, dual] = solver.solve(perturbed);
    return recover_beamformer(channel, dual, perturbed);
  }
}

BeamVector rank_one_approximation(const Eigen::MatrixXcd& channel, const DualSolution& dual,
                                  const Eigen::VectorXd& rho, const Eigen::VectorXcd& hint) {
  const auto act = active_users(rho);
  if (act.empty()) return BeamVector::from(Eigen::VectorXcd::Zero(channel.cols()));
  if (dual.lambda.size() != channel.rows()) throw DomainError("rank_one_approximation: bad dual");

  BeamVector best;
  best.power = std::numeric_limits<double>::infinity();
  auto offer = [&](const Eigen::VectorXcd& start) {
    if (start.size() != channel.cols() || start.squaredNorm() == 0.0) return;
    BeamVector b = refine_beam(channel, rho, start);
    if (b.power > 0.0 && b.power < best.power) best = std::move(b);
  };
  offer(hint);
  offer(dual.primal);

  const auto eig = hermitian_eig<double>(kkt_matrix(channel, dual.lambda));
  const double top = eig.values(0);
  Eigen::Index dim = 1;
  while (dim < eig.values.size() && eig.values(dim) >= top - 1e-6 * top) ++dim;
  const Eigen::MatrixXcd e = eig.vectors.leftCols(dim);
  for (Eigen::Index i = 0; i < dim; ++i) offer(e.col(i));
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> g;
  for (int r = 0; r < 16 * static_cast<int>(dim); ++r) {
    Eigen::VectorXcd c(dim);
    for (Eigen::Index i = 0; i < dim; ++i) c(i) = {g(rng), g(rng)};
    offer(e * c);
  }
  if (!std::isfinite(best.power)) offer(channel.row(act[0]).adjoint());
  return best;
}

BeamVector min_power_beam(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& b,
                          const Eigen::VectorXcd& hint, const PsiOptions& options) {
  const PsiSolver solver(channel, options);
  const auto [value, dual] = solver.solve(b);
  try {
    return recover_beamformer(channel, dual, b);
  } catch (const DegenerateEigenspaceError&) {
  } catch (const OptimalityCheckFailedError&) {
  }
  return rank_one_approximation(channel, dual, b, hint);
}

}  // namespace wpcn
