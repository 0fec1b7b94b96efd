#include "cdmd/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cdmd {

namespace {

// Column-major working form: one contiguous vector per column.
using Columns = std::vector<std::vector<double>>;

Columns to_columns(const Matrix& m) {
    Columns cols(m.cols(), std::vector<double>(m.rows()));
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) cols[j][i] = m(i, j);
    return cols;
}

Matrix from_columns(const Columns& cols, std::size_t rows) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// One-sided Jacobi on a tall column set; accumulates right rotations in v.
// Converges when every column pair is numerically orthogonal.
void jacobi_sweeps(Columns& a, Columns& v, std::size_t rows) {
    const std::size_t n = a.size();
    const int max_sweeps = 60;
    const double tol = 1e-15;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = dot(a[p], a[p]);
                const double beta = dot(a[q], a[q]);
                const double gamma = dot(a[p], a[q]);
                if (std::fabs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;

                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                for (std::size_t i = 0; i < rows; ++i) {
                    const double ap = a[p][i];
                    const double aq = a[q][i];
                    a[p][i] = c * ap - s * aq;
                    a[q][i] = s * ap + c * aq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v[p][i];
                    const double vq = v[q][i];
                    v[p][i] = c * vp - s * vq;
                    v[q][i] = s * vp + c * vq;
                }
            }
        }
        if (!rotated) return;
    }
    // Identify the worst remaining pair so the error names a column.
    std::size_t worst_col = 0;
    double worst = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const double denom = std::sqrt(dot(a[p], a[p]) * dot(a[q], a[q]));
            const double off = denom > 0.0 ? std::fabs(dot(a[p], a[q])) / denom : 0.0;
            if (off > worst) {
                worst = off;
                worst_col = q;
            }
        }
    }
    throw NumericError("svd: Jacobi rotations did not converge within 60 sweeps (column " +
                       std::to_string(worst_col) + ")");
}

// Replaces near-zero columns of u with an orthonormal completion of the
// existing columns so thin factors stay orthonormal at any rank.
void complete_null_columns(Columns& u, const std::vector<double>& sigma, double sigma_floor,
                           std::size_t rows) {
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (sigma[j] > sigma_floor) {
            const double inv = 1.0 / sigma[j];
            for (double& x : u[j]) x *= inv;
            continue;
        }
        // Unit-basis candidate least represented by the columns so far.
        std::size_t best_k = 0;
        double best_res = -1.0;
        for (std::size_t k = 0; k < rows; ++k) {
            double proj = 0.0;
            for (std::size_t c = 0; c < j; ++c) proj += u[c][k] * u[c][k];
            const double res = 1.0 - proj;
            if (res > best_res) {
                best_res = res;
                best_k = k;
            }
        }
        std::vector<double> cand(rows, 0.0);
        cand[best_k] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t c = 0; c < j; ++c) {
                const double proj = dot(cand, u[c]);
                for (std::size_t i = 0; i < rows; ++i) cand[i] -= proj * u[c][i];
            }
        }
        const double nrm = norm2(cand);
        if (nrm <= 0.0) throw NumericError("svd: failed to complete orthonormal basis");
        for (std::size_t i = 0; i < rows; ++i) cand[i] /= nrm;
        u[j] = std::move(cand);
    }
}

struct CoreSvd {
    Columns u;
    std::vector<double> sigma;
    Columns v;
};

// Thin SVD of a tall matrix; factors come back sorted by non-increasing
// sigma, columns of u and v orthonormal, no sign convention yet.
CoreSvd jacobi_svd_tall(const Matrix& m) {
    const std::size_t rows = m.rows(), n = m.cols();
    Columns a = to_columns(m);
    Columns v(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

    jacobi_sweeps(a, v, rows);

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(a[j]);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    CoreSvd out;
    out.sigma.resize(n);
    out.u.resize(n);
    out.v.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.sigma[j] = sigma[order[j]];
        out.u[j] = std::move(a[order[j]]);
        out.v[j] = std::move(v[order[j]]);
    }

    const double sigma_max = out.sigma.empty() ? 0.0 : out.sigma[0];
    complete_null_columns(out.u, out.sigma, sigma_max * 1e-300 + 0.0, rows);
    return out;
}

void apply_sign_convention(Matrix& u, Matrix& v) {
    for (std::size_t j = 0; j < u.cols(); ++j) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < u.rows(); ++i) {
            const double mag = std::fabs(u(i, j));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (u(arg, j) < 0.0) {
            for (std::size_t i = 0; i < u.rows(); ++i) u(i, j) = -u(i, j);
            for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) = -v(i, j);
        }
    }
}

std::size_t count_retained(const std::vector<double>& sigma) {
    if (sigma.empty() || sigma[0] <= 0.0) return 0;
    std::size_t used = 0;
    while (used < sigma.size() && sigma[used] / sigma[0] >= kSigmaDropTol) ++used;
    return used;
}

SvdFactors assemble(CoreSvd core, std::size_t keep, std::size_t rows, bool swap_uv) {
    core.u.resize(keep);
    core.v.resize(keep);
    core.sigma.resize(keep);
    SvdFactors f;
    f.sigma = std::move(core.sigma);
    Matrix u = from_columns(core.u, rows);
    Matrix v = from_columns(core.v, core.v.empty() ? 0 : core.v[0].size());
    if (swap_uv) std::swap(u, v);
    apply_sign_convention(u, v);
    f.u = std::move(u);
    f.v = std::move(v);
    f.rank_used = count_retained(f.sigma);
    return f;
}

} // namespace

SvdFactors svd(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) throw InputError("svd: empty matrix");
    if (m.rows() < m.cols()) throw InputError("svd: requires rows >= cols; transpose first");
    if (!m.all_finite()) throw InputError("svd: input entries must be finite");
    return assemble(jacobi_svd_tall(m), m.cols(), m.rows(), false);
}

SvdFactors truncated_svd(const Matrix& m, std::size_t r) {
    if (m.rows() == 0 || m.cols() == 0) throw InputError("truncated_svd: empty matrix");
    if (r < 1 || r > std::min(m.rows(), m.cols()))
        throw InputError("truncated_svd: rank out of range");
    if (!m.all_finite()) throw InputError("truncated_svd: input entries must be finite");
    if (m.rows() >= m.cols()) return assemble(jacobi_svd_tall(m), r, m.rows(), false);
    // Wide input: factor the transpose and swap the roles of u and v.
    return assemble(jacobi_svd_tall(transpose(m)), r, m.cols(), true);
}

SvdFactors randomized_svd(const Matrix& m, std::size_t r, std::size_t oversample,
                          std::size_t power_iters, std::uint64_t seed) {
    const std::size_t mindim = std::min(m.rows(), m.cols());
    if (r < 1) throw InputError("randomized_svd: rank must be positive");
    if (r + oversample > mindim)
        throw InputError("randomized_svd: r + oversample exceeds min(rows, cols)");
    if (!m.all_finite()) throw InputError("randomized_svd: input entries must be finite");

    const std::size_t k = r + oversample;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Matrix omega(m.cols(), k);
    for (auto& x : omega.entries()) x = gauss(rng);

    const Matrix mt = transpose(m);
    Matrix y = multiply(m, omega); // rows x k

    // Orthonormalizes the columns of `b` in place (two MGS passes).
    auto orthonormalize = [](Matrix& b) {
        Columns cols = to_columns(b);
        for (std::size_t j = 0; j < cols.size(); ++j) {
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t c = 0; c < j; ++c) {
                    const double proj = dot(cols[j], cols[c]);
                    for (std::size_t i = 0; i < cols[j].size(); ++i)
                        cols[j][i] -= proj * cols[c][i];
                }
            }
            const double nrm = norm2(cols[j]);
            if (nrm > 0.0)
                for (double& x : cols[j]) x /= nrm;
        }
        b = from_columns(cols, b.rows());
    };

    orthonormalize(y);
    for (std::size_t it = 0; it < power_iters; ++it) {
        Matrix z = multiply(mt, y);
        orthonormalize(z);
        y = multiply(m, z);
        orthonormalize(y);
    }

    const Matrix b = multiply(transpose(y), m); // k x cols
    SvdFactors small = truncated_svd(b, std::min(r, std::min(b.rows(), b.cols())));

    SvdFactors f;
    f.sigma = small.sigma;
    f.u = multiply(y, small.u);
    f.v = small.v;
    apply_sign_convention(f.u, f.v);
    f.rank_used = count_retained(f.sigma);
    return f;
}

std::vector<double> pseudoinverse_apply(const SvdFactors& f, std::span<const double> y) {
    if (y.size() != f.u.rows()) throw InputError("pseudoinverse_apply: length mismatch");
    std::vector<double> x(f.v.rows(), 0.0);
    for (std::size_t j = 0; j < f.rank_used; ++j) {
        double coeff = 0.0;
        for (std::size_t i = 0; i < f.u.rows(); ++i) coeff += f.u(i, j) * y[i];
        coeff /= f.sigma[j];
        for (std::size_t i = 0; i < f.v.rows(); ++i) x[i] += coeff * f.v(i, j);
    }
    return x;
}

} // namespace cdmd
