#include "pathbeam/optim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "pathbeam/numkern.hpp"
#include "pathbeam/rate.hpp"

namespace pathbeam {

std::string algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::Wsmse: return "wsmse";
    case Algorithm::MinorizeIcsit: return "minorize_icsit";
    case Algorithm::MinorizePwcsit: return "minorize_pwcsit";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "wsmse") return Algorithm::Wsmse;
  if (name == "minorize_icsit") return Algorithm::MinorizeIcsit;
  if (name == "minorize_pwcsit") return Algorithm::MinorizePwcsit;
  throw ValidationError("unknown algorithm: " + name);
}

namespace {

CMat hermitize(const CMat& m) { return 0.5 * (m + m.adjoint()); }

CMat pd_inverse(const CMat& m, const char* who) {
  Eigen::LLT<CMat> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericError(std::string(who) + ": matrix not positive definite");
  return llt.solve(CMat::Identity(m.rows(), m.rows()));
}

// Shared construction of the minorization pair. `compress` maps a per-user
// receive-side Hermitian form W to the transmit side of one (user, cell)
// link: H^H W H for instantaneous channels, the pathwise analogue otherwise.
template <typename Compress>
MinorizeMatrices build_minorize(const Scenario& scn, const CovariancePair& cov,
                                Compress compress) {
  const int users = scn.users();
  std::vector<CMat> rbar_inv(users), delta(users);
  for (int i = 0; i < users; ++i) {
    rbar_inv[i] = pd_inverse(cov.interference[i], "minorize matrices");
    delta[i] = hermitize(rbar_inv[i] - pd_inverse(cov.total[i],
                                                  "minorize matrices"));
  }

  std::vector<CMat> cell_sum(scn.cells);
  for (int c = 0; c < scn.cells; ++c) {
    cell_sum[c] = CMat::Zero(scn.tx_antennas[c], scn.tx_antennas[c]);
    for (int i = 0; i < users; ++i)
      cell_sum[c] += scn.rate_weight[i] * compress(i, c, delta[i]);
  }

  MinorizeMatrices out;
  out.signal.resize(users);
  out.leakage.resize(users);
  for (int k = 0; k < users; ++k) {
    const int c = scn.serving[k];
    out.signal[k] = hermitize(compress(k, c, rbar_inv[k]));
    out.leakage[k] = hermitize(cell_sum[c] -
                               scn.rate_weight[k] * compress(k, c, delta[k]));
  }
  return out;
}

}  // namespace

MinorizeMatrices minorize_matrices_icsit(const Scenario& scn,
                                         const ChannelRealization& h,
                                         const BeamformerSet& bf) {
  const CovariancePair cov = rx_covariances(scn, h, bf);
  return build_minorize(scn, cov, [&](int user, int cell, const CMat& w) {
    const CMat& hm = h.of(user, cell);
    return CMat(hm.adjoint() * w * hm);
  });
}

MinorizeMatrices minorize_matrices_pwcsit(const Scenario& scn,
                                          const BeamformerSet& bf) {
  const CovariancePair cov = pathwise_rx_covariances(scn, bf);
  return build_minorize(scn, cov, [&](int user, int cell, const CMat& w) {
    const PathwiseLink& link = scn.link(user, cell);
    const RVec gains =
        link.amplitude.array().square() *
        (link.rx_response.adjoint() * w * link.rx_response)
            .diagonal().real().array();
    return CMat(link.tx_response * gains.asDiagonal() *
                link.tx_response.adjoint());
  });
}

namespace {

// One BS's joint (lambda, beams, powers) update for a minorization sweep.
struct CellUpdate {
  std::vector<CMat> beams;
  std::vector<RVec> powers;
  double lambda = 0.0;
};

struct CellEval {
  std::vector<CMat> dirs;
  std::vector<WaterfillStream> streams;  // flattened over members
  RVec powers;
  double total = 0.0;
};

// Off-diagonal leakage of the quadratic forms must vanish in the
// generalized eigenbasis; asserted rather than assumed for d > 1.
void check_diagonalized(const CMat& form, const char* who) {
  const Eigen::Index d = form.rows();
  if (d < 2) return;
  const double scale = std::max(1.0, form.diagonal().cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (i != j && std::abs(form(i, j)) > 1e-10 * scale)
        throw NumericError(std::string(who) +
                           ": generalized eigenbasis failed to diagonalize");
}

CellUpdate solve_cell(const Scenario& scn, const MinorizeMatrices& mats,
                      const std::vector<int>& members,
                      const std::vector<int>& dims, double budget,
                      double warm_lambda) {
  const int m_count = static_cast<int>(members.size());
  const int n = static_cast<int>(mats.signal[members[0]].rows());

  // Jitter floors keep the pencil positive definite near lambda = 0 when a
  // leakage matrix is singular.
  std::vector<double> floor_of(m_count);
  for (int m = 0; m < m_count; ++m) {
    double f = 1e-12 * mats.leakage[members[m]].real().trace() / n;
    if (!(f > 0.0)) f = 0.0;
    floor_of[m] = f;
  }

  auto eval = [&](double lambda, CellEval& ev) -> double {
    ev.dirs.assign(m_count, CMat());
    ev.streams.clear();
    for (int m = 0; m < m_count; ++m) {
      const int k = members[m];
      const CMat& b = mats.signal[k];
      const CMat& a = mats.leakage[k];
      const double lam_eff = std::max(lambda, floor_of[m]);
      const CMat shifted = a + lam_eff * CMat::Identity(n, n);
      const EigenPairs ep = generalized_eig_top(b, shifted, dims[m]);
      ev.dirs[m] = ep.vectors;
      if (dims[m] > 1) {
        // The eigenbasis diagonalizes both quadratic forms of the pencil;
        // verified, not assumed, because the columns were renormalized.
        check_diagonalized(ep.vectors.adjoint() * b * ep.vectors,
                           "solve_cell");
        check_diagonalized(ep.vectors.adjoint() * shifted * ep.vectors,
                           "solve_cell");
      }
      for (int j = 0; j < dims[m]; ++j) {
        const CVec v = ep.vectors.col(j);
        const double s1 = (v.adjoint() * b * v)(0, 0).real();
        const double s2 = (v.adjoint() * a * v)(0, 0).real();
        ev.streams.push_back({scn.rate_weight[k], std::max(s1, 0.0),
                              std::max(s2, 0.0)});
      }
    }
    ev.powers = waterfill_powers(ev.streams, lambda);
    ev.total = ev.powers.sum();
    return ev.total;
  };

  auto assemble = [&](const CellEval& ev, double lambda) {
    CellUpdate up;
    up.lambda = lambda;
    up.beams.resize(m_count);
    up.powers.resize(m_count);
    int s = 0;
    for (int m = 0; m < m_count; ++m) {
      up.beams[m] = ev.dirs[m];
      up.powers[m].resize(dims[m]);
      for (int j = 0; j < dims[m]; ++j, ++s) {
        up.powers[m][j] = ev.powers[s];
        up.beams[m].col(j) *= std::sqrt(ev.powers[s]);
      }
    }
    return up;
  };

  // lambda = 0 already under budget: multipliers may be zero.
  CellEval ev;
  bool zero_ok = true;
  double total0 = std::numeric_limits<double>::infinity();
  try {
    total0 = eval(0.0, ev);
  } catch (const SingularPencilError&) {
    zero_ok = false;  // pencil needs lambda > 0; forces the bisection below
  }
  if (zero_ok && total0 <= budget) return assemble(ev, 0.0);

  double hi = std::max(1.0, 2.0 * warm_lambda);
  CellEval ev_hi;
  for (int grow = 0; eval(hi, ev_hi) > budget; ++grow) {
    if (grow > 200)
      throw NumericError("solve_cell: no multiplier meets the power budget");
    hi *= 2.0;
  }

  double lo = 0.0;
  CellEval best = ev_hi;
  double best_lambda = hi;
  const double tol = 1e-9 * budget;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double total = eval(mid, ev);
    if (std::abs(total - budget) <= tol) return assemble(ev, mid);
    if (total > budget) {
      lo = mid;
    } else {
      hi = mid;
      best = ev;
      best_lambda = mid;
    }
  }
  // Bracket collapsed without hitting the tolerance (eigenvalue crossing
  // can make the total jump); keep the feasible side.
  return assemble(best, best_lambda);
}

OptimizerState minorize_sweep(OptimizerState state, const Scenario& scn,
                              const MinorizeMatrices& mats) {
  state.expansion.resize(scn.users());
  for (int k = 0; k < scn.users(); ++k)
    state.expansion[k] = state.beams.covariance(k);

  if (state.beams.multipliers.size() != scn.cells)
    state.beams.multipliers = RVec::Zero(scn.cells);
  if (state.beams.powers.size() != static_cast<size_t>(scn.users()))
    state.beams.powers.resize(scn.users());

  for (int c = 0; c < scn.cells; ++c) {
    const std::vector<int> members = scn.cell_users(c);
    if (members.empty()) continue;
    std::vector<int> dims(members.size());
    for (size_t m = 0; m < members.size(); ++m)
      dims[m] = state.beams.streams(members[m]);
    const CellUpdate up = solve_cell(scn, mats, members, dims,
                                     scn.bs_power[c],
                                     state.beams.multipliers[c]);
    for (size_t m = 0; m < members.size(); ++m) {
      state.beams.beams[members[m]] = up.beams[m];
      state.beams.powers[members[m]] = up.powers[m];
    }
    state.beams.multipliers[c] = up.lambda;
  }
  ++state.iter;
  return state;
}

}  // namespace

OptimizerState minorize_step_icsit(OptimizerState state, const Scenario& scn,
                                   const ChannelRealization& h) {
  const MinorizeMatrices mats = minorize_matrices_icsit(scn, h, state.beams);
  state = minorize_sweep(std::move(state), scn, mats);
  state.objective_history.push_back(wsr(scn, h, state.beams));
  return state;
}

OptimizerState minorize_step_pwcsit(OptimizerState state, const Scenario& scn) {
  const MinorizeMatrices mats = minorize_matrices_pwcsit(scn, state.beams);
  state = minorize_sweep(std::move(state), scn, mats);
  state.objective_history.push_back(massive_ewsr(scn, state.beams));
  return state;
}

RVec stream_mse(const Scenario& scn, const ChannelRealization& h,
                const BeamformerSet& bf, const CMat& rx, int user) {
  const CovariancePair cov = rx_covariances(scn, h, bf);
  const CMat t = h.of(user, scn.serving[user]) * bf.beams[user];
  if (rx.rows() != t.rows() || rx.cols() != t.cols())
    throw ValidationError("stream_mse: receive filter has wrong shape");
  RVec mse(t.cols());
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    const CVec f = rx.col(j);
    mse[j] = 1.0 - 2.0 * f.dot(t.col(j)).real() +
             (f.adjoint() * cov.total[user] * f)(0, 0).real();
  }
  return mse;
}

double wsmse_cost(const Scenario& scn, const ChannelRealization& h,
                  const OptimizerState& state) {
  double cost = 0.0;
  for (int k = 0; k < scn.users(); ++k) {
    const RVec e = stream_mse(scn, h, state.beams, state.rx[k], k);
    for (Eigen::Index j = 0; j < e.size(); ++j)
      cost += scn.rate_weight[k] *
              (state.weights[k][j] * e[j] - std::log(state.weights[k][j]));
  }
  for (int c = 0; c < scn.cells; ++c)
    cost += state.beams.multipliers[c] *
            (state.beams.bs_power_used(scn, c) - scn.bs_power[c]);
  return cost;
}

OptimizerState wsmse_step(OptimizerState state, const Scenario& scn,
                          const ChannelRealization& h,
                          const RVec* fixed_multipliers) {
  const int users = scn.users();
  const CovariancePair cov = rx_covariances(scn, h, state.beams);

  // (a) MMSE receivers at the current beams.
  state.rx.resize(users);
  for (int k = 0; k < users; ++k) {
    Eigen::LLT<CMat> llt(cov.total[k]);
    if (llt.info() != Eigen::Success)
      throw NumericError("wsmse_step: receive covariance not positive definite");
    state.rx[k] = llt.solve(h.of(k, scn.serving[k]) * state.beams.beams[k]);
  }

  // (b) weights w = 1/e at the fresh receivers.
  state.weights.resize(users);
  for (int k = 0; k < users; ++k) {
    const CMat t = h.of(k, scn.serving[k]) * state.beams.beams[k];
    state.weights[k].resize(t.cols());
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      const CVec f = state.rx[k].col(j);
      const double e = 1.0 - 2.0 * f.dot(t.col(j)).real() +
                       (f.adjoint() * cov.total[k] * f)(0, 0).real();
      if (!(e > 0.0) || !std::isfinite(e))
        throw NumericError("wsmse_step: non-positive stream MSE");
      state.weights[k][j] = 1.0 / e;
    }
  }

  // (c) regularized transmit update, one shared multiplier per BS.
  if (state.beams.multipliers.size() != scn.cells)
    state.beams.multipliers = RVec::Zero(scn.cells);
  if (state.beams.powers.size() != static_cast<size_t>(users))
    state.beams.powers.resize(users);
  BeamformerSet next = state.beams;

  for (int c = 0; c < scn.cells; ++c) {
    const std::vector<int> members = scn.cell_users(c);
    if (members.empty()) continue;
    const int n = scn.tx_antennas[c];

    CMat m0 = CMat::Zero(n, n);
    for (int i = 0; i < users; ++i) {
      const CMat r = h.of(i, c).adjoint() * state.rx[i];
      for (Eigen::Index j = 0; j < r.cols(); ++j)
        m0.noalias() += scn.rate_weight[i] * state.weights[i][j] *
                        (r.col(j) * r.col(j).adjoint());
    }

    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(m0));
    if (es.info() != Eigen::Success)
      throw NumericError("wsmse_step: eigensolver did not converge");
    const RVec evals = es.eigenvalues().cwiseMax(0.0);
    const CMat& u = es.eigenvectors();
    const double eval_floor = 1e-14 * evals.maxCoeff();

    // Spectral targets u_k w_kj U^H H^H f_kj per stream of this BS. Null
    // components are pure roundoff (the targets span the same rank-one sum
    // that built m0) and are clamped so they cannot soak up power.
    std::vector<std::pair<int, CMat>> targets;  // (user, spectral columns)
    for (int k : members) {
      CMat y = u.adjoint() * (h.of(k, c).adjoint() * state.rx[k]);
      for (Eigen::Index j = 0; j < y.cols(); ++j) {
        y.col(j) *= scn.rate_weight[k] * state.weights[k][j];
        for (int q = 0; q < n; ++q)
          if (evals[q] <= eval_floor) y(q, j) = 0.0;
      }
      targets.emplace_back(k, std::move(y));
    }

    auto power_at = [&](double lambda) {
      double total = 0.0;
      for (const auto& [k, y] : targets)
        for (Eigen::Index j = 0; j < y.cols(); ++j)
          for (int q = 0; q < n; ++q) {
            const double denom = evals[q] + lambda;
            const double mag = std::abs(y(q, j));
            if (mag > 0.0) total += (mag * mag) / (denom * denom);
          }
      return total;
    };

    double lambda = 0.0;
    const double budget = scn.bs_power[c];
    if (fixed_multipliers) {
      lambda = (*fixed_multipliers)[c];
    } else if (power_at(0.0) > budget) {
      double hi = std::max(1.0, 2.0 * state.beams.multipliers[c]);
      for (int grow = 0; power_at(hi) > budget; ++grow) {
        if (grow > 200)
          throw NumericError("wsmse_step: no multiplier meets the budget");
        hi *= 2.0;
      }
      double lo = 0.0;
      const double tol = 1e-9 * budget;
      bool done = false;
      for (int it = 0; it < 300 && !done; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double total = power_at(mid);
        if (std::abs(total - budget) <= tol) {
          lambda = mid;
          done = true;
        } else {
          (total > budget ? lo : hi) = mid;
        }
      }
      if (!done) lambda = hi;  // feasible side of a collapsed bracket
    }

    for (const auto& [k, y] : targets) {
      CMat g(n, y.cols());
      for (Eigen::Index j = 0; j < y.cols(); ++j)
        g.col(j) = u * (y.col(j).array() / (evals.array() + lambda)).matrix();
      next.beams[k] = g;
      next.powers[k] = g.colwise().squaredNorm().transpose();
    }
    next.multipliers[c] = lambda;
  }

  state.beams = std::move(next);
  ++state.iter;
  state.objective_history.push_back(wsr(scn, h, state.beams));
  return state;
}

BeamformerSet init_beamformers(const Scenario& scn, InitStrategy strategy,
                               int streams_per_user, Rng& rng,
                               const ChannelRealization* h) {
  scn.validate();
  const int users = scn.users();
  BeamformerSet bf;
  bf.beams.resize(users);
  bf.powers.resize(users);
  bf.multipliers = RVec::Zero(scn.cells);

  for (int k = 0; k < users; ++k) {
    const int c = scn.serving[k];
    const int nt = scn.tx_antennas[c];
    const int d = streams_per_user;
    if (d < 1 || d > std::min(nt, scn.rx_antennas[k]))
      throw ValidationError("init_beamformers: invalid stream count");
    const double share =
        scn.bs_power[c] / static_cast<double>(scn.cell_users(c).size());

    CMat g(nt, d);
    if (strategy == InitStrategy::Matched) {
      if (h) {
        Eigen::JacobiSVD<CMat> svd(h->of(k, c), Eigen::ComputeThinV);
        g = svd.matrixV().leftCols(d);
      } else {
        const PathwiseLink& link = scn.link(k, c);
        const CMat gram = link.tx_response *
                          link.amplitude.array().square().matrix().asDiagonal() *
                          link.tx_response.adjoint();
        g = hermitian_eig(gram).vectors.leftCols(d);
      }
      g *= std::sqrt(share / d);
    } else {
      for (int col = 0; col < d; ++col)
        for (int row = 0; row < nt; ++row) g(row, col) = rng.cgaussian();
      g *= std::sqrt(share / g.squaredNorm());
    }
    bf.beams[k] = g;
    bf.powers[k] = g.colwise().squaredNorm().transpose();
  }
  return bf;
}

double minorize_surrogate_value(const Scenario& scn,
                                const MinorizeMatrices& mats,
                                const BeamformerSet& bf) {
  double value = 0.0;
  for (int k = 0; k < scn.users(); ++k) {
    const CMat& g = bf.beams[k];
    const CMat inner = CMat::Identity(g.cols(), g.cols()) +
                       g.adjoint() * mats.signal[k] * g;
    value += scn.rate_weight[k] * ln_det_pd(hermitize(inner)) -
             (g.adjoint() * mats.leakage[k] * g).real().trace();
  }
  return value;
}

std::vector<CMat> minorize_surrogate_gradient(const Scenario& scn,
                                              const MinorizeMatrices& mats,
                                              const BeamformerSet& bf) {
  std::vector<CMat> grad(scn.users());
  for (int k = 0; k < scn.users(); ++k) {
    const CMat& g = bf.beams[k];
    const CMat inner = CMat::Identity(g.cols(), g.cols()) +
                       g.adjoint() * mats.signal[k] * g;
    grad[k] = scn.rate_weight[k] * mats.signal[k] * g * inner.inverse() -
              mats.leakage[k] * g;
  }
  return grad;
}

double kkt_residual(const Scenario& scn, const MinorizeMatrices& mats,
                    const BeamformerSet& bf) {
  double worst = 0.0;
  for (int k = 0; k < scn.users(); ++k) {
    const CMat& g = bf.beams[k];
    const double gnorm = g.norm();
    if (!(gnorm > 0.0)) continue;
    const int n = static_cast<int>(g.rows());
    const CMat inner = CMat::Identity(g.cols(), g.cols()) +
                       g.adjoint() * mats.signal[k] * g;
    const CMat resid =
        scn.rate_weight[k] * mats.signal[k] * g * inner.inverse() -
        (mats.leakage[k] +
         bf.multipliers[scn.serving[k]] * CMat::Identity(n, n)) *
            g;
    worst = std::max(worst, resid.norm() / gnorm);
  }
  return worst;
}

double kkt_residual_icsit(const Scenario& scn, const ChannelRealization& h,
                          const BeamformerSet& bf) {
  return kkt_residual(scn, minorize_matrices_icsit(scn, h, bf), bf);
}

double kkt_residual_pwcsit(const Scenario& scn, const BeamformerSet& bf) {
  return kkt_residual(scn, minorize_matrices_pwcsit(scn, bf), bf);
}

OptimizeResult optimize(Algorithm algo, const Scenario& scn,
                        const ChannelRealization* h, const BeamformerSet& init,
                        const OptimizeOptions& options) {
  scn.validate();
  if (algo == Algorithm::MinorizePwcsit) {
    if (h)
      throw ValidationError(
          "optimize: the pathwise design takes no channel realization");
  } else if (!h) {
    throw ValidationError(
        "optimize: perfect-CSIT designs need a channel realization");
  }

  double total_power = 0.0;
  for (const CMat& g : init.beams) total_power += g.squaredNorm();
  if (!(total_power > 0.0))
    throw ValidationError("optimize: all-zero initial beamformers");

  OptimizerState state;
  state.beams = init;
  if (state.beams.multipliers.size() != scn.cells)
    state.beams.multipliers = RVec::Zero(scn.cells);
  if (state.beams.powers.size() != static_cast<size_t>(scn.users())) {
    state.beams.powers.resize(scn.users());
    for (int k = 0; k < scn.users(); ++k)
      state.beams.powers[k] =
          state.beams.beams[k].colwise().squaredNorm().transpose();
  }

  auto objective = [&]() {
    return algo == Algorithm::MinorizePwcsit ? massive_ewsr(scn, state.beams)
                                             : wsr(scn, *h, state.beams);
  };
  state.objective_history.push_back(objective());

  bool converged = false;
  int iterations = 0;
  int streak = 0;
  for (int it = 1; it <= options.max_iter; ++it) {
    switch (algo) {
      case Algorithm::Wsmse:
        state = wsmse_step(std::move(state), scn, *h);
        break;
      case Algorithm::MinorizeIcsit:
        state = minorize_step_icsit(std::move(state), scn, *h);
        break;
      case Algorithm::MinorizePwcsit:
        state = minorize_step_pwcsit(std::move(state), scn);
        break;
    }
    iterations = it;
    const auto& hist = state.objective_history;
    const double cur = hist.back();
    const double prev = hist[hist.size() - 2];
    if (std::abs(cur - prev) <= options.tol * (1.0 + std::abs(cur)))
      ++streak;
    else
      streak = 0;
    if (streak >= 3) {
      converged = true;
      break;
    }
  }

  OptimizeResult res;
  res.objective = state.objective_history.back();
  res.iterations = iterations;
  res.converged = converged;
  res.kkt_residual = algo == Algorithm::MinorizePwcsit
                         ? kkt_residual_pwcsit(scn, state.beams)
                         : kkt_residual_icsit(scn, *h, state.beams);
  res.beams = std::move(state.beams);
  return res;
}

}  // namespace pathbeam
