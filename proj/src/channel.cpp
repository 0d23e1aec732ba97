#include "pathbeam/channel.hpp"

#include <cmath>

namespace pathbeam {

void Scenario::validate() const {
  const int k = users();
  if (cells < 1 || k < 1) throw ValidationError("scenario: empty system");
  if (static_cast<int>(tx_antennas.size()) != cells ||
      static_cast<int>(rx_antennas.size()) != k ||
      bs_power.size() != cells || rate_weight.size() != k ||
      static_cast<int>(links.size()) != k)
    throw ValidationError("scenario: inconsistent field sizes");
  for (int c = 0; c < cells; ++c)
    if (!(bs_power[c] > 0.0))
      throw ValidationError("scenario: non-positive BS power budget");
  for (int u = 0; u < k; ++u) {
    if (serving[u] < 0 || serving[u] >= cells)
      throw ValidationError("scenario: user without a serving BS");
    if (!(rate_weight[u] > 0.0))
      throw ValidationError("scenario: non-positive rate weight");
    if (static_cast<int>(links[u].size()) != cells)
      throw ValidationError("scenario: missing links for a user");
    for (int c = 0; c < cells; ++c) {
      const PathwiseLink& l = links[u][c];
      if (l.tx_antennas() != tx_antennas[c] ||
          l.rx_antennas() != rx_antennas[u])
        throw ValidationError("scenario: link dimensions disagree");
    }
  }
}

CVec steering_vector(double angle, int n, ArraySide side) {
  if (n < 1) throw ValidationError("steering_vector: need at least 1 antenna");
  CVec v(n);
  const double phase_step = M_PI * std::sin(angle);
  for (int m = 0; m < n; ++m)
    v[m] = Cplx(std::cos(phase_step * m), std::sin(phase_step * m));
  if (side == ArraySide::Tx) v /= std::sqrt(static_cast<double>(n));
  return v;
}

PathwiseLink make_link(const RVec& amplitudes, const RVec& aod,
                       const RVec& aoa, int tx_antennas, int rx_antennas) {
  const Eigen::Index l = amplitudes.size();
  if (l < 1) throw ValidationError("make_link: need at least one path");
  if (aod.size() != l || aoa.size() != l)
    throw ValidationError("make_link: parameter length mismatch");
  if ((amplitudes.array() <= 0.0).any())
    throw ValidationError("make_link: amplitudes must be positive");

  PathwiseLink link;
  link.amplitude = amplitudes;
  link.aod = aod;
  link.aoa = aoa;
  link.tx_response.resize(tx_antennas, l);
  link.rx_response.resize(rx_antennas, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    link.tx_response.col(i) = steering_vector(aod[i], tx_antennas,
                                              ArraySide::Tx);
    link.rx_response.col(i) = steering_vector(aoa[i], rx_antennas,
                                              ArraySide::Rx);
  }
  return link;
}

CMat sample_pathwise(const PathwiseLink& link, Rng& rng) {
  const int l = link.paths();
  CVec gains(l);
  for (int i = 0; i < l; ++i) gains[i] = link.amplitude[i] * rng.phasor();
  return link.rx_response * gains.asDiagonal() * link.tx_response.adjoint();
}

ChannelRealization sample_realization(const Scenario& scn, Rng& rng) {
  ChannelRealization out;
  out.h.resize(scn.users());
  for (int k = 0; k < scn.users(); ++k) {
    out.h[k].resize(scn.cells);
    for (int c = 0; c < scn.cells; ++c)
      out.h[k][c] = sample_pathwise(scn.link(k, c), rng);
  }
  return out;
}

Scenario random_scenario(int cells, int users_per_cell, int paths,
                         int tx_antennas, int rx_antennas, double power,
                         Rng& rng) {
  if (cells < 1 || users_per_cell < 1 || paths < 1 || tx_antennas < 1 ||
      rx_antennas < 1 || !(power > 0.0))
    throw ValidationError("random_scenario: all counts must be positive");

  const int users = cells * users_per_cell;
  Scenario scn;
  scn.cells = cells;
  scn.serving.resize(users);
  scn.tx_antennas.assign(cells, tx_antennas);
  scn.rx_antennas.assign(users, rx_antennas);
  scn.bs_power = RVec::Constant(cells, power);
  scn.rate_weight = RVec::Ones(users);
  scn.links.resize(users);

  for (int k = 0; k < users; ++k) {
    scn.serving[k] = k / users_per_cell;
    scn.links[k].resize(cells);
    for (int c = 0; c < cells; ++c) {
      RVec aod(paths), aoa(paths), amp(paths);
      for (int i = 0; i < paths; ++i) aod[i] = rng.uniform(-M_PI_2, M_PI_2);
      for (int i = 0; i < paths; ++i) aoa[i] = rng.uniform(-M_PI_2, M_PI_2);
      for (int i = 0; i < paths; ++i) amp[i] = rng.uniform(0.5, 1.5);
      amp /= amp.norm();  // per-link energy normalization: sum A_i^2 = 1
      scn.links[k][c] = make_link(amp, aod, aoa, tx_antennas, rx_antennas);
    }
  }
  scn.validate();
  return scn;
}

CMat gaussian_expected_gram(const CMat& hbar, const CMat& chh, const CVec& g) {
  const Eigen::Index nr = hbar.rows();
  const Eigen::Index nt = hbar.cols();
  if (g.size() != nt || chh.rows() != nr * nt || chh.cols() != nr * nt)
    throw ValidationError("gaussian_expected_gram: dimension mismatch");

  const CVec mean_rx = hbar * g;
  CMat out = mean_rx * mean_rx.adjoint();
  for (Eigen::Index r = 0; r < nr; ++r)
    for (Eigen::Index s = 0; s < nr; ++s)
      out(r, s) += g.transpose() * chh.block(r * nt, s * nt, nt, nt) *
                   g.conjugate();
  return 0.5 * (out + out.adjoint());
}

}  // namespace pathbeam
