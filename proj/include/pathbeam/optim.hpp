#pragma once

#include <optional>
#include <string>

#include "pathbeam/rng.hpp"
#include "pathbeam/types.hpp"

namespace pathbeam {

enum class Algorithm { Wsmse, MinorizeIcsit, MinorizePwcsit };
enum class InitStrategy { Matched, Random };

std::string algorithm_name(Algorithm algo);
Algorithm parse_algorithm(const std::string& name);

/// State carried across optimizer iterations. `rx` and `weights` are used by
/// the alternating MSE scheme only; `expansion` holds the previous transmit
/// covariances for the minorization schemes.
struct OptimizerState {
  BeamformerSet beams;
  std::vector<CMat> rx;
  std::vector<RVec> weights;
  std::vector<CMat> expansion;
  int iter = 0;
  std::vector<double> objective_history;
};

struct OptimizeResult {
  BeamformerSet beams;
  double objective = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
};

struct OptimizeOptions {
  double tol = 1e-8;
  int max_iter = 500;
};

/// Starting beamformers. `matched` aligns each user with the dominant
/// transmit directions of its serving channel (the instantaneous channel
/// when `h` is given, otherwise the slow-fading transmit Gram of the
/// serving link); `random` draws complex Gaussian columns. Either way each
/// BS budget is met exactly with an equal per-user, per-stream power split.
BeamformerSet init_beamformers(const Scenario& scn, InitStrategy strategy,
                               int streams_per_user, Rng& rng,
                               const ChannelRealization* h = nullptr);

/// The quadratic-form pair driving one minorization update: per user the
/// signal matrix (B) and the frozen interference-leakage penalty (A), both
/// evaluated at the expansion point.
struct MinorizeMatrices {
  std::vector<CMat> signal;
  std::vector<CMat> leakage;
};

MinorizeMatrices minorize_matrices_icsit(const Scenario& scn,
                                         const ChannelRealization& h,
                                         const BeamformerSet& bf);
MinorizeMatrices minorize_matrices_pwcsit(const Scenario& scn,
                                          const BeamformerSet& bf);

/// Concave surrogate maximized by one minorization sweep (constants from the
/// expansion point dropped):
/// sum_k u_k ln det(I + G_k^H B_k G_k) - tr(G_k^H A_k G_k).
double minorize_surrogate_value(const Scenario& scn,
                                const MinorizeMatrices& mats,
                                const BeamformerSet& bf);

/// Conjugate gradient of the surrogate with respect to each G_k; the
/// directional derivative along a perturbation D is 2 Re sum_k tr(grad_k^H D_k).
std::vector<CMat> minorize_surrogate_gradient(const Scenario& scn,
                                              const MinorizeMatrices& mats,
                                              const BeamformerSet& bf);

/// Per-stream MSEs of one user for arbitrary receive filters `rx`
/// (one column per stream), treating every other stream as noise.
RVec stream_mse(const Scenario& scn, const ChannelRealization& h,
                const BeamformerSet& bf, const CMat& rx, int user);

/// Augmented weighted-MSE cost of a full state (receivers, weights, beams,
/// per-BS multipliers).
double wsmse_cost(const Scenario& scn, const ChannelRealization& h,
                  const OptimizerState& state);

/// One alternating cycle: MMSE receivers, weight update w = 1/e, then the
/// regularized transmit update with per-BS multipliers found by bisection to
/// meet each power budget (or zero when already under budget). Passing
/// `fixed_multipliers` skips the bisection and reuses the given multipliers,
/// which keeps the augmented cost non-increasing at fixed lambda.
OptimizerState wsmse_step(OptimizerState state, const Scenario& scn,
                          const ChannelRealization& h,
                          const RVec* fixed_multipliers = nullptr);

/// One minorization sweep under perfect channel knowledge: generalized
/// eigenvector beams of (B_k, A_k + lambda_c I) with powers and lambda_c
/// found jointly per BS.
OptimizerState minorize_step_icsit(OptimizerState state, const Scenario& scn,
                                   const ChannelRealization& h);

/// Same sweep on the phase-averaged objective; depends on the scenario only.
OptimizerState minorize_step_pwcsit(OptimizerState state, const Scenario& scn);

/// Stationarity residual of the weighted-rate problem at the given design:
/// max_k || u_k B_k G_k (I + G_k^H B_k G_k)^{-1} - (A_k + lambda_{b_k} I) G_k ||_F
/// normalized by ||G_k||_F (users with zero beams are skipped).
double kkt_residual(const Scenario& scn, const MinorizeMatrices& mats,
                    const BeamformerSet& bf);
double kkt_residual_icsit(const Scenario& scn, const ChannelRealization& h,
                          const BeamformerSet& bf);
double kkt_residual_pwcsit(const Scenario& scn, const BeamformerSet& bf);

/// Runs the chosen algorithm from `init` until the objective change stays
/// within tol*(1+|objective|) for 3 consecutive iterations or `max_iter` is
/// reached (converged=false, result still returned). `h` is required for the
/// perfect-CSIT algorithms and must be omitted for the pathwise one.
OptimizeResult optimize(Algorithm algo, const Scenario& scn,
                        const ChannelRealization* h, const BeamformerSet& init,
                        const OptimizeOptions& options = {});

}  // namespace pathbeam
