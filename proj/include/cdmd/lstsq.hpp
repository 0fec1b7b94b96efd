#pragma once

#include <complex>
#include <vector>

#include "cdmd/matrix.hpp"

namespace cdmd {

/// Result of a complex least-squares solve.
///
/// When the column spectrum of psi decays below the relative drop tolerance
/// the minimum-norm solution is returned and rank_deficient is set.
struct ComplexLstsq {
    std::vector<std::complex<double>> solution;
    bool rank_deficient = false;
    std::size_t rank = 0;
};

/// Minimizes ||psi * b - y||_2 over complex b for a real right-hand side.
/// psi must be tall or square (columns <= rows).
ComplexLstsq complex_least_squares(const ComplexMatrix& psi, std::span<const double> y);

} // namespace cdmd
