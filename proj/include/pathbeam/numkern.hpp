#pragma once

#include <span>

#include "pathbeam/types.hpp"

namespace pathbeam {

/// Tolerance for accepting a matrix as Hermitian, relative to its largest
/// entry magnitude.
inline constexpr double kHermitianTol = 1e-12;

/// Full spectrum of a Hermitian matrix, eigenvalues descending, orthonormal
/// eigenvectors with a canonical column phase (largest-magnitude entry made
/// real positive, so repeated calls and near-identical inputs agree).
/// Throws ValidationError if the input is not Hermitian within tolerance.
EigenPairs hermitian_eig(const CMat& m);

/// Top-d eigenpairs of the Hermitian pencil (b, a): b v = mu a v with a
/// positive definite. Reduced by Cholesky a = L L^H to an ordinary Hermitian
/// problem on L^-1 b L^-H. Returned vectors are rescaled to unit Euclidean
/// norm; the values are the pencil eigenvalues and do not depend on that
/// scaling. Throws SingularPencilError when the Cholesky factorization of a
/// fails.
EigenPairs generalized_eig_top(const CMat& b, const CMat& a, int d);

/// Per-stream powers at a fixed multiplier: stream j receives
/// max(weight_j / (sigma2_j + lambda) - 1/sigma1_j, 0). Streams whose sigma1
/// falls below 1e-14 times the largest sigma1 in the list are treated as
/// null directions and get zero power. Entries can be +inf when
/// sigma2 + lambda vanishes for a live stream.
RVec waterfill_powers(std::span<const WaterfillStream> streams, double lambda);

/// Interference-leakage-aware water filling over the streams of one BS:
/// waterfill_powers at a multiplier lambda >= 0 found by bisection so that
/// the powers sum to `budget`, except when lambda = 0 already keeps the
/// total at or under budget. Bisection stops at |total - budget| <=
/// 1e-9 * budget and throws NumericError after 200 halvings.
WaterfillResult waterfill_bs(std::span<const WaterfillStream> streams,
                             double budget);

/// Orthogonal projector onto the complement of the column space of m:
/// P = I - m (m^H m)^+ m^H, computed from the SVD of m with singular values
/// below max(rows, cols) * eps * sigma_max treated as zero. A matrix with
/// zero columns yields the identity (of dimension m.rows()).
CMat proj_orth_complement(const CMat& m);

}  // namespace pathbeam
