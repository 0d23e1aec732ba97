#pragma once

#include <cstdint>

#include "pathbeam/types.hpp"

namespace pathbeam {

/// ln det of a Hermitian positive definite matrix via Cholesky.
double ln_det_pd(const CMat& m);

/// Per-user total and interference-plus-noise receive covariances for one
/// channel realization: R_kbar = sum_{i != k} H_{k,b_i} Q_i H_{k,b_i}^H + I,
/// R_k = R_kbar + H_{k,b_k} Q_k H_{k,b_k}^H.
CovariancePair rx_covariances(const Scenario& scn,
                              const ChannelRealization& h,
                              const BeamformerSet& bf);

/// MMSE receive filter of user k: f_k = R_k^{-1} H_{k,b_k} G_k.
CMat mmse_rx(const Scenario& scn, const ChannelRealization& h,
             const BeamformerSet& bf, int user);

/// Weighted sum rate in nats:
/// sum_k u_k ln det(I + G_k^H H_{k,b_k}^H R_kbar^{-1} H_{k,b_k} G_k).
double wsr(const Scenario& scn, const ChannelRealization& h,
           const BeamformerSet& bf);

/// Phase-averaged receive covariances in the large-antenna limit, a pure
/// function of the slow link parameters:
/// R_k = I + sum_i Hr_{k,b_i} D_{k,b_i}^2
///               diag(Ht_{k,b_i}^H Q_i Ht_{k,b_i}) Hr_{k,b_i}^H,
/// with the i = k term removed for the interference part.
CovariancePair pathwise_rx_covariances(const Scenario& scn,
                                       const BeamformerSet& bf);

/// Expected weighted sum rate in the large-antenna limit (expectation moved
/// inside the ln det), in nats.
double massive_ewsr(const Scenario& scn, const BeamformerSet& bf);

struct MonteCarloRate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error of the weighted sum rate over `trials`
/// independent phase realizations. Deterministic given the seed; trial t
/// uses the derived seed seed_mix({seed, t}).
MonteCarloRate monte_carlo_ewsr(const Scenario& scn, const BeamformerSet& bf,
                                int trials, std::uint64_t seed);

}  // namespace pathbeam
