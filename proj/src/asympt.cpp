#include "pathbeam/asympt.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "pathbeam/numkern.hpp"
#include "pathbeam/rate.hpp"

namespace pathbeam {

double low_snr_wsr_icsit(const Scenario& scn, const ChannelRealization& h,
                         const std::vector<RVec>& stream_powers) {
  if (stream_powers.size() != static_cast<size_t>(scn.users()))
    throw ValidationError("low_snr_wsr_icsit: one power vector per user");
  double total = 0.0;
  for (int k = 0; k < scn.users(); ++k) {
    const RVec& p = stream_powers[k];
    if ((p.array() < 0.0).any())
      throw ValidationError("low_snr_wsr_icsit: negative stream power");
    Eigen::JacobiSVD<CMat> svd(h.of(k, scn.serving[k]));
    const RVec& sv = svd.singularValues();
    for (Eigen::Index j = 0; j < std::min(p.size(), sv.size()); ++j)
      total += scn.rate_weight[k] * std::log1p(sv[j] * sv[j] * p[j]);
  }
  return total;
}

double low_snr_wsr_pwcsit(const Scenario& scn,
                          const std::vector<CMat>& tx_covariances) {
  if (tx_covariances.size() != static_cast<size_t>(scn.users()))
    throw ValidationError("low_snr_wsr_pwcsit: one covariance per user");
  double total = 0.0;
  for (int k = 0; k < scn.users(); ++k) {
    const PathwiseLink& link = scn.link(k, scn.serving[k]);
    const RVec diag_q =
        (link.tx_response.adjoint() * tx_covariances[k] * link.tx_response)
            .diagonal().real().cwiseMax(0.0);
    const RVec gains = link.amplitude.array().square() * diag_q.array();
    // ln det(I + Hr^H Hr * diag(gains)), computed on the symmetrized
    // congruence so Cholesky applies.
    const CMat gram = link.rx_response.adjoint() * link.rx_response;
    const RVec root = gains.cwiseSqrt();
    const CMat sym = CMat::Identity(link.paths(), link.paths()) +
                     root.asDiagonal() * gram * root.asDiagonal();
    total += scn.rate_weight[k] * ln_det_pd(0.5 * (sym + sym.adjoint()));
  }
  return total;
}

namespace {

struct InterferingPath {
  int victim;
  int bs;
  int path;
  double amplitude;
  bool via_serving_link;  // intracell interference through the victim's own link
};

// All (victim, bs, path) triples that carry interference: BS j interferes
// with user k when it serves at least one other user.
std::vector<InterferingPath> interfering_paths(const Scenario& scn) {
  std::vector<InterferingPath> out;
  for (int k = 0; k < scn.users(); ++k)
    for (int j = 0; j < scn.cells; ++j) {
      bool active = false;
      for (int i = 0; i < scn.users() && !active; ++i)
        active = (i != k && scn.serving[i] == j);
      if (!active) continue;
      const PathwiseLink& link = scn.link(k, j);
      for (int p = 0; p < link.paths(); ++p)
        out.push_back({k, j, p, link.amplitude[p], j == scn.serving[k]});
    }
  return out;
}

}  // namespace

PathPartition default_partition(const Scenario& scn, int streams_per_user) {
  scn.validate();
  if (streams_per_user < 1)
    throw ValidationError("default_partition: invalid stream count");

  std::vector<int> rx_cap(scn.users());
  for (int k = 0; k < scn.users(); ++k)
    rx_cap[k] = scn.rx_antennas[k] - streams_per_user;
  std::vector<int> bs_cap(scn.cells);
  for (int c = 0; c < scn.cells; ++c)
    bs_cap[c] = scn.tx_antennas[c] -
                streams_per_user * static_cast<int>(scn.cell_users(c).size());

  std::vector<InterferingPath> paths = interfering_paths(scn);

  PathPartition part;
  part.handlers.assign(scn.users(),
                       std::vector<std::vector<PathHandler>>(scn.cells));
  for (const auto& ip : paths)
    part.handlers[ip.victim][ip.bs].resize(scn.link(ip.victim, ip.bs).paths(),
                                           PathHandler::Bs);
  if (paths.empty()) return part;

  // Greedy: victims claim their strongest intercell paths first.
  std::vector<int> order(paths.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return paths[a].amplitude > paths[b].amplitude;
  });
  std::vector<int> rx_used(scn.users(), 0);
  std::vector<int> bs_used(scn.cells, 0);
  for (int idx : order) {
    const auto& ip = paths[idx];
    if (!ip.via_serving_link && rx_used[ip.victim] < rx_cap[ip.victim]) {
      part.handlers[ip.victim][ip.bs][ip.path] = PathHandler::Ue;
      ++rx_used[ip.victim];
    } else {
      ++bs_used[ip.bs];
    }
  }

  int deficit = 0;
  for (int c = 0; c < scn.cells; ++c)
    deficit += std::max(0, bs_used[c] - std::max(bs_cap[c], 0)) +
               std::max(0, -bs_cap[c]);
  if (deficit == 0) {
    bool rx_ok = true;
    for (int k = 0; k < scn.users(); ++k)
      if (rx_cap[k] < 0) rx_ok = false;
    if (rx_ok) return part;
    ++deficit;
  }

  // Exhaustive fallback on small instances: any assignment within the
  // dimension budgets counts as feasible.
  if (paths.size() <= 16) {
    std::fill(rx_used.begin(), rx_used.end(), 0);
    std::fill(bs_used.begin(), bs_used.end(), 0);
    bool caps_ok = true;
    for (int c = 0; c < scn.cells; ++c)
      if (!scn.cell_users(c).empty() && bs_cap[c] < 0) caps_ok = false;
    for (int k = 0; k < scn.users(); ++k)
      if (rx_cap[k] < 0) caps_ok = false;

    std::function<bool(size_t)> assign = [&](size_t i) -> bool {
      if (i == paths.size()) return true;
      const auto& ip = paths[i];
      // BS first for serving-link paths, UE first otherwise.
      const PathHandler first =
          ip.via_serving_link ? PathHandler::Bs : PathHandler::Ue;
      for (PathHandler hnd : {first, first == PathHandler::Bs
                                         ? PathHandler::Ue
                                         : PathHandler::Bs}) {
        if (hnd == PathHandler::Ue) {
          if (rx_used[ip.victim] >= rx_cap[ip.victim]) continue;
          ++rx_used[ip.victim];
        } else {
          if (bs_used[ip.bs] >= bs_cap[ip.bs]) continue;
          ++bs_used[ip.bs];
        }
        part.handlers[ip.victim][ip.bs][ip.path] = hnd;
        if (assign(i + 1)) return true;
        if (hnd == PathHandler::Ue)
          --rx_used[ip.victim];
        else
          --bs_used[ip.bs];
      }
      return false;
    };
    if (caps_ok && assign(0)) return part;
  }

  throw FeasibilityError(
      "default_partition: zero-forcing split exceeds antenna budgets (" +
          std::to_string(deficit) + " unassignable direction(s))",
      deficit);
}

namespace {

CMat inverse_sqrt_pd(const CMat& m, const char* who) {
  const EigenPairs ep = hermitian_eig(0.5 * (m + m.adjoint()));
  const double top = ep.values[0];
  if (!(top > 0.0) || ep.values[ep.values.size() - 1] <= 1e-10 * top)
    throw DegenerateGeometryError(
        std::string(who) + ": projected Gram is singular");
  const RVec root = ep.values.cwiseInverse().cwiseSqrt();
  return ep.vectors * root.asDiagonal() * ep.vectors.adjoint();
}

CMat sqrt_psd(const CMat& m) {
  const EigenPairs ep = hermitian_eig(0.5 * (m + m.adjoint()));
  const RVec root = ep.values.cwiseMax(0.0).cwiseSqrt();
  return ep.vectors * root.asDiagonal() * ep.vectors.adjoint();
}

}  // namespace

ZfDesign high_snr_zf_pwcsit(const Scenario& scn, const PathPartition& part,
                            double power, int streams_per_user) {
  scn.validate();
  if (!(power > 0.0))
    throw ValidationError("high_snr_zf_pwcsit: power must be positive");

  ZfDesign design;
  design.rx.resize(scn.users());
  design.tx.resize(scn.users());

  for (int k = 0; k < scn.users(); ++k) {
    const int c = scn.serving[k];
    const PathwiseLink& own = scn.link(k, c);

    // Receive side: project away the directions this user agreed to null.
    std::vector<int> rx_cols;
    CMat rx_null(scn.rx_antennas[k], 0);
    for (int j = 0; j < scn.cells; ++j)
      for (size_t p = 0; p < part.handlers[k][j].size(); ++p)
        if (part.handlers[k][j][p] == PathHandler::Ue) {
          rx_null.conservativeResize(Eigen::NoChange, rx_null.cols() + 1);
          rx_null.col(rx_null.cols() - 1) =
              scn.link(k, j).rx_response.col(static_cast<int>(p));
        }
    const CMat proj_rx = proj_orth_complement(rx_null);
    const CMat t_gram = own.rx_response.adjoint() * proj_rx * own.rx_response;

    // Transmit side: directions BS c must keep clean for other victims.
    CMat tx_null(scn.tx_antennas[c], 0);
    for (int v = 0; v < scn.users(); ++v) {
      if (v == k) continue;
      for (size_t p = 0; p < part.handlers[v][c].size(); ++p)
        if (part.handlers[v][c][p] == PathHandler::Bs) {
          tx_null.conservativeResize(Eigen::NoChange, tx_null.cols() + 1);
          tx_null.col(tx_null.cols() - 1) =
              scn.link(v, c).tx_response.col(static_cast<int>(p));
        }
    }
    const CMat proj_tx = proj_orth_complement(tx_null);
    const CMat s_gram = own.tx_response.adjoint() * proj_tx * own.tx_response;

    design.rx[k] = proj_rx * own.rx_response *
                   inverse_sqrt_pd(t_gram, "high_snr_zf_pwcsit");
    design.tx[k] = proj_tx * own.tx_response *
                   inverse_sqrt_pd(s_gram, "high_snr_zf_pwcsit");

    const CMat s_root = sqrt_psd(s_gram);
    const RVec t_diag = t_gram.diagonal().real().cwiseMax(0.0);
    const RVec gains = own.amplitude.array().square() * t_diag.array();
    const CMat m = s_root * gains.asDiagonal() * s_root;
    const EigenPairs ep = hermitian_eig(0.5 * (m + m.adjoint()));

    const double split =
        power / (streams_per_user *
                 static_cast<double>(scn.cell_users(c).size()));
    for (int j = 0; j < std::min<int>(streams_per_user, ep.values.size()); ++j)
      design.wsr_high_snr +=
          scn.rate_weight[k] * std::log1p(std::max(ep.values[j], 0.0) * split);
  }
  return design;
}

double high_snr_zf_check_icsit(const Scenario& scn,
                               const ChannelRealization& h,
                               const std::vector<CMat>& rx,
                               const std::vector<CMat>& tx) {
  if (rx.size() != static_cast<size_t>(scn.users()) ||
      tx.size() != static_cast<size_t>(scn.users()))
    throw ValidationError("high_snr_zf_check_icsit: one filter per user");
  double worst = 0.0;
  for (int k = 0; k < scn.users(); ++k) {
    const double fn = rx[k].norm();
    if (!(fn > 0.0)) continue;
    for (int i = 0; i < scn.users(); ++i) {
      if (i == k) continue;
      const double gn = tx[i].norm();
      if (!(gn > 0.0)) continue;
      const double leak =
          (rx[k].adjoint() * h.of(k, scn.serving[i]) * tx[i]).norm();
      worst = std::max(worst, leak / (fn * gn));
    }
  }
  return worst;
}

}  // namespace pathbeam
