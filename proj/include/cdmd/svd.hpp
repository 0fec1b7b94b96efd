#pragma once

#include <cstdint>
#include <vector>

#include "cdmd/matrix.hpp"

namespace cdmd {

/// Thin SVD factors m = u * diag(sigma) * v^T.
///
/// sigma is non-increasing; columns of u and v are orthonormal. rank_used
/// counts the leading singular triplets kept by the relative drop rule
/// sigma_i / sigma_0 >= 1e-12; trailing triplets are still present but must
/// not be used for pseudoinverse work.
struct SvdFactors {
    Matrix u;                  // n x r
    std::vector<double> sigma; // r, non-increasing
    Matrix v;                  // m x r
    std::size_t rank_used = 0;
};

/// Relative threshold below which singular values count as dropped.
inline constexpr double kSigmaDropTol = 1e-12;

/// Thin SVD of a tall matrix (rows >= cols; callers transpose otherwise).
/// Computed by one-sided Jacobi rotations; the entry of largest magnitude
/// in each column of u is made non-negative (ties broken by lowest row index).
SvdFactors svd(const Matrix& m);

/// First r singular triplets of svd(m). Accepts any shape with
/// 1 <= r <= min(rows, cols); wide inputs are transposed internally.
SvdFactors truncated_svd(const Matrix& m, std::size_t r);

/// Randomized range-finder SVD (Gaussian sketch, `power_iters` rounds of
/// re-orthonormalized power iteration). Deterministic for a fixed seed.
SvdFactors randomized_svd(const Matrix& m, std::size_t r, std::size_t oversample,
                          std::size_t power_iters, std::uint64_t seed);

/// v * diag(sigma)^-1 * u^T * y over the rank_used triplets only.
std::vector<double> pseudoinverse_apply(const SvdFactors& f, std::span<const double> y);

} // namespace cdmd
