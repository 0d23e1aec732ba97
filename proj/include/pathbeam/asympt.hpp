#pragma once

#include "pathbeam/types.hpp"

namespace pathbeam {

/// Closed-form weighted sum rate in the vanishing-SNR regime with perfect
/// channel knowledge (matched Tx/Rx filters):
/// sum_k u_k ln det(I + S^2(H_{k,b_k}) P_k), where S^2 holds the squared
/// singular values of the serving channel, descending, truncated to the
/// stream count given by `stream_powers[k]`.
double low_snr_wsr_icsit(const Scenario& scn, const ChannelRealization& h,
                         const std::vector<RVec>& stream_powers);

/// Pathwise analogue at vanishing SNR:
/// sum_k u_k ln det(I + Hr^H Hr D^2 diag(Ht^H Q_k Ht)) over the serving
/// links, with Q_k the per-user transmit covariances.
double low_snr_wsr_pwcsit(const Scenario& scn,
                          const std::vector<CMat>& tx_covariances);

enum class PathHandler { Ue, Bs };

/// Which node neutralizes each interfering path: handlers[k][j] has one
/// entry per path of link (k, j) whenever BS j sends interference towards
/// user k, and is empty otherwise.
struct PathPartition {
  std::vector<std::vector<std::vector<PathHandler>>> handlers;

  bool interferes(int user, int bs) const {
    return !handlers[user][bs].empty();
  }
};

/// Splits the zero-forcing work between receivers and transmitters. Each
/// victim claims up to Nr_k - d_k intercell path directions for receive-side
/// handling, largest amplitude first; everything else falls to the owning
/// BS (interference arriving through a user's own serving link is always a
/// BS job, since nulling those directions at the receiver would null the
/// signal too). When the greedy split overloads a BS and the instance has
/// at most 16 interfering paths, all assignments are enumerated before
/// giving up. Throws FeasibilityError (carrying the unassignable direction
/// count) when no split fits the antenna budgets.
PathPartition default_partition(const Scenario& scn, int streams_per_user = 1);

/// Receive filters, normalized transmit filters and the closed-form rate of
/// the high-SNR pathwise zero-forcing construction.
struct ZfDesign {
  std::vector<CMat> rx;  // F_k, orthonormal columns
  std::vector<CMat> tx;  // G'_k, orthonormal columns
  double wsr_high_snr = 0.0;
};

/// Builds the projection + inverse-square-root zero-forcing design for a
/// feasible partition, with `power` split equally over each BS's served
/// streams. Throws DegenerateGeometryError when a projected Gram loses rank
/// (the useful signal was projected away).
ZfDesign high_snr_zf_pwcsit(const Scenario& scn, const PathPartition& part,
                            double power, int streams_per_user = 1);

/// Joint Tx/Rx zero-forcing leakage metric:
/// max over k and i != k of ||F_k^H H_{k,b_i} G_i||_F normalized by
/// ||F_k||_F ||G_i||_F. Zero iff joint zero forcing holds.
double high_snr_zf_check_icsit(const Scenario& scn,
                               const ChannelRealization& h,
                               const std::vector<CMat>& rx,
                               const std::vector<CMat>& tx);

}  // namespace pathbeam
