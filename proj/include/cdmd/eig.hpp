#pragma once

#include <complex>
#include <vector>

#include "cdmd/matrix.hpp"

namespace cdmd {

/// Eigendecomposition of a real square matrix.
///
/// values are sorted by non-increasing modulus, ties by non-increasing real
/// part, then non-decreasing imaginary part. Complex eigenvalues of a real
/// matrix come in exact conjugate pairs. Column j of vectors is a unit-norm
/// eigenvector for values[j]; conjugate eigenvalues carry conjugate vectors.
struct EigPair {
    std::vector<std::complex<double>> values;
    ComplexMatrix vectors; // r x r
};

/// Dense real eigensolver: Hessenberg reduction, shifted QR with 2x2
/// real-Schur block extraction, eigenvectors by inverse iteration on the
/// shifted matrix. Desk-scale bound r <= 512.
EigPair eig_real(const Matrix& a);

} // namespace cdmd
