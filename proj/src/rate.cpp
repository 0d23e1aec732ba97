#include "pathbeam/rate.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "pathbeam/channel.hpp"

namespace pathbeam {

double ln_det_pd(const CMat& m) {
  Eigen::LLT<CMat> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericError("ln_det_pd: matrix is not positive definite");
  double out = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    out += std::log(llt.matrixL()(i, i).real());
  return 2.0 * out;
}

namespace {

void check_beams(const Scenario& scn, const BeamformerSet& bf) {
  if (static_cast<int>(bf.beams.size()) != scn.users())
    throw ValidationError("beamformer set: one matrix per user required");
  for (int k = 0; k < scn.users(); ++k)
    if (bf.beams[k].rows() != scn.tx_antennas[scn.serving[k]])
      throw ValidationError("beamformer set: row count must match BS antennas");
}

}  // namespace

CovariancePair rx_covariances(const Scenario& scn,
                              const ChannelRealization& h,
                              const BeamformerSet& bf) {
  check_beams(scn, bf);
  const int users = scn.users();
  CovariancePair out;
  out.total.resize(users);
  out.interference.resize(users);
  for (int k = 0; k < users; ++k) {
    const int nr = scn.rx_antennas[k];
    CMat rbar = CMat::Identity(nr, nr);
    for (int i = 0; i < users; ++i) {
      if (i == k) continue;
      const CMat t = h.of(k, scn.serving[i]) * bf.beams[i];
      rbar.noalias() += t * t.adjoint();
    }
    const CMat own = h.of(k, scn.serving[k]) * bf.beams[k];
    out.interference[k] = rbar;
    out.total[k] = rbar + own * own.adjoint();
  }
  return out;
}

CMat mmse_rx(const Scenario& scn, const ChannelRealization& h,
             const BeamformerSet& bf, int user) {
  const CovariancePair cov = rx_covariances(scn, h, bf);
  Eigen::LLT<CMat> llt(cov.total[user]);
  if (llt.info() != Eigen::Success)
    throw NumericError("mmse_rx: receive covariance is not positive definite");
  return llt.solve(h.of(user, scn.serving[user]) * bf.beams[user]);
}

namespace {

// u_k ln det(I + T^H Rbar^{-1} T) with T the effective receive signal H G.
double user_rate(const CMat& rbar, const CMat& t, double weight) {
  if (t.cols() == 0) return 0.0;
  Eigen::LLT<CMat> llt(rbar);
  if (llt.info() != Eigen::Success)
    throw NumericError("wsr: interference covariance not positive definite");
  const CMat m = CMat::Identity(t.cols(), t.cols()) +
                 t.adjoint() * llt.solve(t);
  return weight * ln_det_pd(m);
}

}  // namespace

double wsr(const Scenario& scn, const ChannelRealization& h,
           const BeamformerSet& bf) {
  const CovariancePair cov = rx_covariances(scn, h, bf);
  double total = 0.0;
  for (int k = 0; k < scn.users(); ++k)
    total += user_rate(cov.interference[k],
                       h.of(k, scn.serving[k]) * bf.beams[k],
                       scn.rate_weight[k]);
  return total;
}

CovariancePair pathwise_rx_covariances(const Scenario& scn,
                                       const BeamformerSet& bf) {
  check_beams(scn, bf);
  const int users = scn.users();
  CovariancePair out;
  out.total.resize(users);
  out.interference.resize(users);
  for (int k = 0; k < users; ++k) {
    const int nr = scn.rx_antennas[k];
    CMat rbar = CMat::Identity(nr, nr);
    CMat own_term = CMat::Zero(nr, nr);
    for (int i = 0; i < users; ++i) {
      const PathwiseLink& link = scn.link(k, scn.serving[i]);
      // diag(Ht^H Q_i Ht) = per-path squared norms of Ht^H G_i.
      const CMat w = link.tx_response.adjoint() * bf.beams[i];
      const RVec gains = link.amplitude.array().square() *
                         w.rowwise().squaredNorm().array();
      const CMat term = link.rx_response * gains.asDiagonal() *
                        link.rx_response.adjoint();
      if (i == k)
        own_term = term;
      else
        rbar += term;
    }
    out.interference[k] = 0.5 * (rbar + rbar.adjoint());
    out.total[k] = out.interference[k] + 0.5 * (own_term + own_term.adjoint());
  }
  return out;
}

double massive_ewsr(const Scenario& scn, const BeamformerSet& bf) {
  const CovariancePair cov = pathwise_rx_covariances(scn, bf);
  double total = 0.0;
  for (int k = 0; k < scn.users(); ++k)
    total += scn.rate_weight[k] *
             (ln_det_pd(cov.total[k]) - ln_det_pd(cov.interference[k]));
  return total;
}

MonteCarloRate monte_carlo_ewsr(const Scenario& scn, const BeamformerSet& bf,
                                int trials, std::uint64_t seed) {
  if (trials < 1) throw ValidationError("monte_carlo_ewsr: trials must be >= 1");
  double mean = 0.0;
  double m2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed_mix({seed, static_cast<std::uint64_t>(t)}));
    const ChannelRealization h = sample_realization(scn, rng);
    const double x = wsr(scn, h, bf);
    const double delta = x - mean;
    mean += delta / (t + 1);
    m2 += delta * (x - mean);
  }
  MonteCarloRate out;
  out.mean = mean;
  if (trials > 1)
    out.std_error = std::sqrt(m2 / (static_cast<double>(trials) - 1.0) /
                              static_cast<double>(trials));
  return out;
}

}  // namespace pathbeam
