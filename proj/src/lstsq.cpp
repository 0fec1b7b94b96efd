#include "cdmd/lstsq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cdmd/svd.hpp"

namespace cdmd {

namespace {

using cd = std::complex<double>;
using Columns = std::vector<std::vector<cd>>;

cd cdot(const std::vector<cd>& a, const std::vector<cd>& b) {
    cd s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// Complex one-sided Jacobi: the phase of the cross product is absorbed into
// one column, reducing each (p, q) elimination to a real rotation.
void jacobi_sweeps_complex(Columns& a, Columns& v, std::size_t rows) {
    const std::size_t n = a.size();
    const int max_sweeps = 60;
    const double tol = 1e-15;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = cdot(a[p], a[p]).real();
                const double beta = cdot(a[q], a[q]).real();
                const cd gamma = cdot(a[p], a[q]);
                const double gmag = std::abs(gamma);
                if (gmag <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;

                const cd phase = std::conj(gamma) / gmag;
                const double zeta = (beta - alpha) / (2.0 * gmag);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                const cd sp = s * phase;
                const cd cp = c * phase;

                for (std::size_t i = 0; i < rows; ++i) {
                    const cd ap = a[p][i];
                    const cd aq = a[q][i];
                    a[p][i] = c * ap - sp * aq;
                    a[q][i] = s * ap + cp * aq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cd vp = v[p][i];
                    const cd vq = v[q][i];
                    v[p][i] = c * vp - sp * vq;
                    v[q][i] = s * vp + cp * vq;
                }
            }
        }
        if (!rotated) return;
    }
    throw NumericError("complex_least_squares: Jacobi rotations did not converge within 60 sweeps");
}

} // namespace

ComplexLstsq complex_least_squares(const ComplexMatrix& psi, std::span<const double> y) {
    if (psi.rows() == 0 || psi.cols() == 0)
        throw InputError("complex_least_squares: empty matrix");
    if (psi.rows() != y.size())
        throw InputError("complex_least_squares: psi rows must equal y length");
    if (psi.cols() > psi.rows())
        throw InputError("complex_least_squares: psi must have columns <= rows");
    if (!psi.all_finite()) throw InputError("complex_least_squares: entries must be finite");

    const std::size_t rows = psi.rows(), n = psi.cols();
    Columns a(n, std::vector<cd>(rows));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < rows; ++i) a[j][i] = psi(i, j);
    Columns v(n, std::vector<cd>(n, cd(0.0)));
    for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

    jacobi_sweeps_complex(a, v, rows);

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(std::span<const cd>(a[j]));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t z) { return sigma[x] > sigma[z]; });

    const double sigma0 = sigma[order[0]];
    std::size_t rank = 0;
    while (rank < n && sigma0 > 0.0 && sigma[order[rank]] / sigma0 >= kSigmaDropTol) ++rank;

    // Minimum-norm solution b = V Sigma^-1 U^H y over the retained triplets.
    ComplexLstsq out;
    out.rank = rank;
    out.rank_deficient = rank < n;
    out.solution.assign(n, cd(0.0));
    for (std::size_t jj = 0; jj < rank; ++jj) {
        const std::size_t j = order[jj];
        cd coeff = 0.0;
        for (std::size_t i = 0; i < rows; ++i) coeff += std::conj(a[j][i]) * y[i];
        coeff /= sigma[j] * sigma[j]; // u = a / sigma, then divide by sigma again
        for (std::size_t i = 0; i < n; ++i) out.solution[i] += coeff * v[j][i];
    }
    return out;
}

} // namespace cdmd
