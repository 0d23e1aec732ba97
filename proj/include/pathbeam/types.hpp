#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "pathbeam/errors.hpp"

namespace pathbeam {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Result of a (generalized) Hermitian eigendecomposition: values sorted
/// descending, one unit-norm column per value.
struct EigenPairs {
  RVec values;
  CMat vectors;
};

/// One power-allocation stream: rate weight, useful-signal gain sigma1 and
/// leakage gain sigma2 along its beam direction.
struct WaterfillStream {
  double weight = 1.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

/// Per-stream powers plus the power-constraint multiplier that produced them.
struct WaterfillResult {
  RVec powers;
  double lambda = 0.0;
};

/// Slow-fading description of one BS->user channel: per-path amplitudes,
/// departure/arrival angles, and the derived steering-matrix factors.
struct PathwiseLink {
  RVec amplitude;   // A_i > 0
  RVec aod;         // departure angles, radians
  RVec aoa;         // arrival angles, radians
  CMat tx_response; // Nt x L, column i = unit-norm tx steering at aod[i]
  CMat rx_response; // Nr x L, column i = rx steering at aoa[i], |.|^2 = Nr

  int paths() const { return static_cast<int>(amplitude.size()); }
  int tx_antennas() const { return static_cast<int>(tx_response.rows()); }
  int rx_antennas() const { return static_cast<int>(rx_response.rows()); }
};

/// Full multi-cell system description. Channel randomness enters only
/// through the per-link path phases; everything here is slow fading.
struct Scenario {
  int cells = 0;
  std::vector<int> serving;                      // user k -> serving BS
  std::vector<int> tx_antennas;                  // per BS
  std::vector<int> rx_antennas;                  // per user
  RVec bs_power;                                 // per BS budget P_c > 0
  RVec rate_weight;                              // per user u_k > 0
  std::vector<std::vector<PathwiseLink>> links;  // [user][bs]

  int users() const { return static_cast<int>(serving.size()); }

  std::vector<int> cell_users(int cell) const {
    std::vector<int> out;
    for (int k = 0; k < users(); ++k)
      if (serving[k] == cell) out.push_back(k);
    return out;
  }

  const PathwiseLink& link(int user, int bs) const { return links[user][bs]; }

  void validate() const;
};

/// Instantaneous channel matrices for one draw of the path phases.
struct ChannelRealization {
  std::vector<std::vector<CMat>> h;  // [user][bs], Nr_k x Nt_j

  const CMat& of(int user, int bs) const { return h[user][bs]; }
};

/// Per-user beamforming matrices (stream powers baked into the columns),
/// the per-stream powers, and the per-BS power multipliers.
struct BeamformerSet {
  std::vector<CMat> beams;        // per user, Nt_{b_k} x d_k
  std::vector<RVec> powers;       // per user, d_k stream powers
  RVec multipliers;               // per BS lambda_c >= 0

  int streams(int user) const { return static_cast<int>(beams[user].cols()); }

  /// Transmit covariance Q_k = G_k G_k^H.
  CMat covariance(int user) const {
    return beams[user] * beams[user].adjoint();
  }

  /// Total transmit power spent by one BS.
  double bs_power_used(const Scenario& scn, int cell) const {
    double total = 0.0;
    for (int k = 0; k < scn.users(); ++k)
      if (scn.serving[k] == cell) total += beams[k].squaredNorm();
    return total;
  }
};

/// Per-user total and interference-plus-noise receive covariances.
struct CovariancePair {
  std::vector<CMat> total;         // R_k
  std::vector<CMat> interference;  // R_kbar (interference plus noise)
};

}  // namespace pathbeam
