#include "cdmd/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace cdmd {

namespace {

using cd = std::complex<double>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Householder similarity reduction to upper Hessenberg form.
Matrix hessenberg(Matrix h) {
    const std::size_t n = h.rows();
    if (n < 3) return h;
    std::vector<double> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double scale = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) scale += std::fabs(h(i, k));
        if (scale == 0.0) continue;
        double norm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = h(i, k) / scale;
            norm += v[i] * v[i];
        }
        norm = std::sqrt(norm);
        if (v[k + 1] < 0.0) norm = -norm;
        v[k + 1] += norm;
        const double denom = norm * v[k + 1];
        if (denom == 0.0) continue;

        // Left: H <- (I - v v^T / denom) H
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * h(i, j);
            s /= denom;
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= s * v[i];
        }
        // Right: H <- H (I - v v^T / denom)
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
            s /= denom;
            for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * v[j];
        }
        h(k + 1, k) = -norm * scale;
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
    return h;
}

// Eigenvalues of [[a, b], [c, d]], exact conjugates when complex.
std::pair<cd, cd> eig2x2(double a, double b, double c, double d) {
    const double mid = 0.5 * (a + d);
    const double det = a * d - b * c;
    const double disc = mid * mid - det;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double l1 = mid >= 0.0 ? mid + sq : mid - sq;
        const double l2 = (l1 != 0.0) ? det / l1 : mid - (mid >= 0.0 ? sq : -sq);
        return {cd(l1, 0.0), cd(l2, 0.0)};
    }
    const double im = std::sqrt(-disc);
    return {cd(mid, im), cd(mid, -im)};
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
std::vector<cd> hessenberg_qr_eigenvalues(Matrix h) {
    const std::size_t n = h.rows();
    std::vector<cd> values;
    values.reserve(n);
    if (n == 0) return values;

    double hnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i == 0 ? 0 : i - 1); j < n; ++j) hnorm += std::fabs(h(i, j));
    if (hnorm == 0.0) hnorm = 1.0;

    std::size_t p = n - 1;
    int iters = 0;
    while (true) {
        // Zero negligible subdiagonals.
        for (std::size_t i = 1; i <= p; ++i) {
            const double small = kEps * (std::fabs(h(i - 1, i - 1)) + std::fabs(h(i, i)));
            if (std::fabs(h(i, i - 1)) <= std::max(small, kEps * hnorm * 1e-3)) h(i, i - 1) = 0.0;
        }
        // Start of the trailing irreducible block.
        std::size_t l = p;
        while (l > 0 && h(l, l - 1) != 0.0) --l;

        if (l == p) {
            values.push_back(cd(h(p, p), 0.0));
            if (p == 0) break;
            --p;
            iters = 0;
            continue;
        }
        if (l + 1 == p) {
            auto [l1, l2] = eig2x2(h(l, l), h(l, p), h(p, l), h(p, p));
            values.push_back(l1);
            values.push_back(l2);
            if (l == 0) break;
            p = l - 1;
            iters = 0;
            continue;
        }

        ++iters;
        if (iters > 60)
            throw NumericError("eig_real: QR iteration did not converge for the block ending at row " +
                               std::to_string(p));

        // Shifts from the trailing 2x2; exceptional shifts on iterations 10, 20, ...
        double s = h(p - 1, p - 1) + h(p, p);
        double t = h(p - 1, p - 1) * h(p, p) - h(p - 1, p) * h(p, p - 1);
        if (iters % 10 == 0) {
            const double ex = std::fabs(h(p, p - 1)) + std::fabs(h(p - 1, p - 2));
            const double h11 = 0.75 * ex + h(p, p);
            const double h22 = h11;
            s = h11 + h22;
            t = h11 * h22 - (-0.4375 * ex) * ex;
        }

        // First column of (H - aI)(H - bI) restricted to the block.
        double x = h(l, l) * h(l, l) + h(l, l + 1) * h(l + 1, l) - s * h(l, l) + t;
        double y = h(l + 1, l) * (h(l, l) + h(l + 1, l + 1) - s);
        double z = h(l + 1, l) * h(l + 2, l + 1);

        for (std::size_t k = l; k <= p - 2; ++k) {
            // Householder annihilating (y, z) into x, acting on rows k..k+2.
            const double scale = std::fabs(x) + std::fabs(y) + std::fabs(z);
            if (scale != 0.0) {
                double vx = x / scale, vy = y / scale, vz = z / scale;
                double norm = std::sqrt(vx * vx + vy * vy + vz * vz);
                if (vx < 0.0) norm = -norm;
                vx += norm;
                const double denom = norm * vx;
                if (denom != 0.0) {
                    const std::size_t jlo = (k == l) ? l : k - 1;
                    for (std::size_t j = jlo; j < n; ++j) {
                        double sum = vx * h(k, j) + vy * h(k + 1, j) + vz * h(k + 2, j);
                        sum /= denom;
                        h(k, j) -= sum * vx;
                        h(k + 1, j) -= sum * vy;
                        h(k + 2, j) -= sum * vz;
                    }
                    const std::size_t ihi = std::min(p, k + 3);
                    for (std::size_t i = 0; i <= ihi; ++i) {
                        double sum = vx * h(i, k) + vy * h(i, k + 1) + vz * h(i, k + 2);
                        sum /= denom;
                        h(i, k) -= sum * vx;
                        h(i, k + 1) -= sum * vy;
                        h(i, k + 2) -= sum * vz;
                    }
                }
            }
            x = h(k + 1, k);
            y = h(k + 2, k);
            z = (k + 3 <= p) ? h(k + 3, k) : 0.0;
        }

        // Final 2-row Givens rotation annihilating y into x at rows p-1, p.
        const double scale = std::fabs(x) + std::fabs(y);
        if (scale != 0.0) {
            double vx = x / scale, vy = y / scale;
            double norm = std::sqrt(vx * vx + vy * vy);
            if (vx < 0.0) norm = -norm;
            vx += norm;
            const double denom = norm * vx;
            if (denom != 0.0) {
                for (std::size_t j = p - 2; j < n; ++j) {
                    double sum = vx * h(p - 1, j) + vy * h(p, j);
                    sum /= denom;
                    h(p - 1, j) -= sum * vx;
                    h(p, j) -= sum * vy;
                }
                for (std::size_t i = 0; i <= p; ++i) {
                    double sum = vx * h(i, p - 1) + vy * h(i, p);
                    sum /= denom;
                    h(i, p - 1) -= sum * vx;
                    h(i, p) -= sum * vy;
                }
            }
        }
    }
    return values;
}

// Complex LU with partial pivoting; tiny pivots are floored so the factors
// stay usable for inverse iteration at (near-)exact eigenvalues.
struct ComplexLu {
    std::size_t n = 0;
    std::vector<cd> lu;
    std::vector<std::size_t> perm;

    ComplexLu(const Matrix& a, cd shift, double pivot_floor) : n(a.rows()), lu(n * n), perm(n) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) lu[i * n + j] = cd(a(i, j)) - (i == j ? shift : cd(0.0));
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            double best = std::abs(lu[perm[k] * n + k]);
            for (std::size_t i = k + 1; i < n; ++i) {
                const double mag = std::abs(lu[perm[i] * n + k]);
                if (mag > best) {
                    best = mag;
                    piv = i;
                }
            }
            std::swap(perm[k], perm[piv]);
            cd& pivot = lu[perm[k] * n + k];
            if (std::abs(pivot) < pivot_floor) pivot = cd(pivot_floor, 0.0);
            for (std::size_t i = k + 1; i < n; ++i) {
                cd& lik = lu[perm[i] * n + k];
                lik /= pivot;
                for (std::size_t j = k + 1; j < n; ++j) lu[perm[i] * n + j] -= lik * lu[perm[k] * n + j];
            }
        }
    }

    std::vector<cd> solve(const std::vector<cd>& b) const {
        std::vector<cd> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            cd s = b[perm[i]];
            for (std::size_t j = 0; j < i; ++j) s -= lu[perm[i] * n + j] * y[j];
            y[i] = s;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            cd s = y[ii];
            for (std::size_t j = ii + 1; j < n; ++j) s -= lu[perm[ii] * n + j] * y[j];
            y[ii] = s / lu[perm[ii] * n + ii];
        }
        return y;
    }
};

double eigen_residual(const Matrix& a, const std::vector<cd>& v, cd lambda) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cd s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
        s -= lambda * v[i];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

std::vector<cd> inverse_iteration(const Matrix& a, cd lambda, double anorm, std::uint64_t salt) {
    const std::size_t n = a.rows();
    const double accept = 1e-8 * std::max(1.0, anorm);
    std::mt19937_64 rng(0x5eed0000u + salt);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    std::vector<cd> best;
    double best_res = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < 4; ++attempt) {
        const double floor = std::max(anorm, 1.0) * kEps * double(n) * (attempt + 1);
        ComplexLu lu(a, lambda, floor);
        std::vector<cd> v(n);
        for (auto& x : v) x = cd(unif(rng), attempt == 0 ? 0.0 : unif(rng));
        const double nv = norm2(std::span<const cd>(v));
        for (auto& x : v) x /= nv;
        for (int it = 0; it < 4; ++it) {
            std::vector<cd> w = lu.solve(v);
            const double nw = norm2(std::span<const cd>(w));
            if (!(nw > 0.0) || !std::isfinite(nw)) break;
            for (auto& x : w) x /= nw;
            v = std::move(w);
            const double res = eigen_residual(a, v, lambda);
            if (res < best_res) {
                best_res = res;
                best = v;
            }
            if (res <= accept * 0.25) return v;
        }
        if (best_res <= accept) return best;
    }
    if (best_res <= accept) return best;
    throw NumericError("eig_real: inverse iteration failed to reach the residual bound");
}

} // namespace

EigPair eig_real(const Matrix& a) {
    if (a.rows() != a.cols()) throw InputError("eig_real: matrix must be square");
    if (a.rows() == 0) throw InputError("eig_real: empty matrix");
    if (a.rows() > 512) throw InputError("eig_real: desk-scale bound r <= 512 exceeded");
    if (!a.all_finite()) throw InputError("eig_real: input entries must be finite");

    const std::size_t n = a.rows();
    std::vector<cd> values = hessenberg_qr_eigenvalues(hessenberg(a));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const double mx = std::abs(values[x]), my = std::abs(values[y]);
        if (mx != my) return mx > my;
        if (values[x].real() != values[y].real()) return values[x].real() > values[y].real();
        return values[x].imag() < values[y].imag();
    });
    std::vector<cd> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = values[order[i]];

    const double anorm = inf_norm(a);
    EigPair out;
    out.values = std::move(sorted);
    out.vectors = ComplexMatrix(n, n);

    for (std::size_t j = 0; j < n; ++j) {
        const cd lambda = out.values[j];
        // Conjugate partner already computed: reuse its conjugated vector.
        if (lambda.imag() < 0.0) {
            bool found = false;
            for (std::size_t k = 0; k < j; ++k) {
                if (out.values[k] == std::conj(lambda)) {
                    for (std::size_t i = 0; i < n; ++i)
                        out.vectors(i, j) = std::conj(out.vectors(i, k));
                    found = true;
                    break;
                }
            }
            if (found) continue;
        }
        std::vector<cd> v = inverse_iteration(a, lambda, anorm, j);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v[i];
    }
    return out;
}

} // namespace cdmd
