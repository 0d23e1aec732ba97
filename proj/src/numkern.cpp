#include "pathbeam/numkern.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace pathbeam {

namespace {

void require_hermitian(const CMat& m, const char* who) {
  if (m.rows() != m.cols())
    throw ValidationError(std::string(who) + ": matrix is not square");
  if (!m.allFinite())
    throw ValidationError(std::string(who) + ": non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTol * scale)
    throw ValidationError(std::string(who) + ": matrix is not Hermitian");
}

// Largest-magnitude entry made real positive. Pins down the free phase of
// each eigenvector so results are reproducible across calls.
void canonicalize_phase(CMat& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index imax = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&imax);
    const Cplx pivot = vectors(imax, c);
    const double mag = std::abs(pivot);
    if (mag > 0.0) vectors.col(c) *= std::conj(pivot) / mag;
  }
}

}  // namespace

EigenPairs hermitian_eig(const CMat& m) {
  require_hermitian(m, "hermitian_eig");
  const CMat sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> solver(sym);
  if (solver.info() != Eigen::Success)
    throw NumericError("hermitian_eig: eigensolver did not converge");

  EigenPairs out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  canonicalize_phase(out.vectors);
  return out;
}

EigenPairs generalized_eig_top(const CMat& b, const CMat& a, int d) {
  require_hermitian(b, "generalized_eig_top");
  require_hermitian(a, "generalized_eig_top");
  if (a.rows() != b.rows())
    throw ValidationError("generalized_eig_top: dimension mismatch");
  if (d < 1 || d > a.rows())
    throw ValidationError("generalized_eig_top: invalid pair count");

  Eigen::LLT<CMat> llt(0.5 * (a + a.adjoint()));
  if (llt.info() != Eigen::Success)
    throw SingularPencilError(
        "generalized_eig_top: right-hand matrix is not positive definite");

  // C = L^-1 b L^-H is Hermitian with the pencil's eigenvalues.
  const CMat y = llt.matrixL().solve(b);
  const CMat c = llt.matrixL().solve(y.adjoint()).adjoint();

  Eigen::SelfAdjointEigenSolver<CMat> solver(0.5 * (c + c.adjoint()));
  if (solver.info() != Eigen::Success)
    throw NumericError("generalized_eig_top: eigensolver did not converge");

  const Eigen::Index n = a.rows();
  EigenPairs out;
  out.values.resize(d);
  out.vectors.resize(n, d);
  for (int j = 0; j < d; ++j) {
    out.values[j] = solver.eigenvalues()[n - 1 - j];
    CVec x = llt.matrixU().solve(solver.eigenvectors().col(n - 1 - j));
    out.vectors.col(j) = x / x.norm();
  }
  canonicalize_phase(out.vectors);
  return out;
}

RVec waterfill_powers(std::span<const WaterfillStream> streams,
                      double lambda) {
  double sigma1_max = 0.0;
  for (const auto& s : streams) {
    if (s.sigma1 < 0.0 || s.sigma2 < 0.0 || !(s.weight > 0.0))
      throw ValidationError("waterfill_powers: invalid stream parameters");
    sigma1_max = std::max(sigma1_max, s.sigma1);
  }
  const double sigma1_floor = 1e-14 * sigma1_max;

  RVec powers = RVec::Zero(static_cast<Eigen::Index>(streams.size()));
  for (size_t j = 0; j < streams.size(); ++j) {
    const auto& s = streams[j];
    if (!(s.sigma1 > sigma1_floor) || sigma1_max == 0.0) continue;
    const double denom = s.sigma2 + lambda;
    if (denom <= 0.0)
      powers[j] = std::numeric_limits<double>::infinity();
    else
      powers[j] = std::max(s.weight / denom - 1.0 / s.sigma1, 0.0);
  }
  return powers;
}

WaterfillResult waterfill_bs(std::span<const WaterfillStream> streams,
                             double budget) {
  if (streams.empty())
    throw ValidationError("waterfill_bs: empty stream list");
  if (!(budget > 0.0))
    throw ValidationError("waterfill_bs: budget must be positive");

  WaterfillResult out;
  out.powers = waterfill_powers(streams, 0.0);
  if (out.powers.sum() <= budget) {
    out.lambda = 0.0;
    return out;
  }

  double hi = 1.0;
  while (waterfill_powers(streams, hi).sum() > budget) hi *= 2.0;
  double lo = 0.0;
  const double tol = 1e-9 * budget;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    out.powers = waterfill_powers(streams, mid);
    const double total = out.powers.sum();
    if (std::abs(total - budget) <= tol) {
      out.lambda = mid;
      return out;
    }
    (total > budget ? lo : hi) = mid;
  }
  throw NumericError("waterfill_bs: bisection did not converge");
}

CMat proj_orth_complement(const CMat& m) {
  const Eigen::Index rows = m.rows();
  if (m.cols() == 0) return CMat::Identity(rows, rows);
  if (!m.allFinite())
    throw ValidationError("proj_orth_complement: non-finite entries");

  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU);
  const double cutoff = std::max(m.rows(), m.cols()) *
                        std::numeric_limits<double>::epsilon() *
                        svd.singularValues()[0];
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > cutoff) ++rank;

  const CMat u = svd.matrixU().leftCols(rank);
  CMat p = CMat::Identity(rows, rows) - u * u.adjoint();
  return 0.5 * (p + p.adjoint());
}

}  // namespace pathbeam
