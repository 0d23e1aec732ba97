#pragma once

#include "pathbeam/rng.hpp"
#include "pathbeam/types.hpp"

namespace pathbeam {

enum class ArraySide { Tx, Rx };

/// Uniform linear array response at half-wavelength spacing: element m is
/// exp(j*pi*m*sin(angle)), m = 0..n-1. The Tx side is scaled by 1/sqrt(n)
/// (unit norm); the Rx side is left unscaled (squared norm n).
CVec steering_vector(double angle, int n, ArraySide side);

/// Builds one slow-fading link from per-path amplitudes and angles.
/// Throws ValidationError on length mismatch or non-positive amplitudes.
PathwiseLink make_link(const RVec& amplitudes, const RVec& aod,
                       const RVec& aoa, int tx_antennas, int rx_antennas);

/// Draws i.i.d. uniform path phases and returns the instantaneous channel
/// H = Hr * diag(e^{j psi}) * D * Ht^H.
CMat sample_pathwise(const PathwiseLink& link, Rng& rng);

/// One instantaneous channel per (user, BS) link, phases independent across
/// links. Links are visited in (user, bs) row-major order, so a given seed
/// always consumes the generator identically.
ChannelRealization sample_realization(const Scenario& scn, Rng& rng);

/// Random scenario: `users_per_cell` users per cell, all links with `paths`
/// paths, angles i.i.d. uniform on [-pi/2, pi/2], per-link amplitudes drawn
/// i.i.d. uniform(0.5, 1.5) then normalized so their squares sum to 1, unit
/// rate weights, every BS with budget `power`.
Scenario random_scenario(int cells, int users_per_cell, int paths,
                         int tx_antennas, int rx_antennas, double power,
                         Rng& rng);

/// Expected receive Gram E[H g g^H H^H] under Gaussian channel knowledge:
/// the channel mean `hbar` (Nr x Nt) plus the covariance `chh` of
/// vec(H^T), laid out row-of-H major, so chh is (Nr*Nt) x (Nr*Nt).
/// Returns hbar g g^H hbar^H + (I kron g^T) chh (I kron g^*).
CMat gaussian_expected_gram(const CMat& hbar, const CMat& chh, const CVec& g);

}  // namespace pathbeam
