// Test-only oracles, independent of the library implementation paths they
// check.
#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "cdmd/matrix.hpp"

namespace cdmd::testing {

/// Eigenvalues of a symmetric 3x3 matrix by the trigonometric closed form of
/// the characteristic cubic, returned in non-increasing order.
inline std::array<double, 3> symmetric_eigenvalues_3x3(const Matrix& a) {
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    std::array<double, 3> eig{};
    if (p1 == 0.0) {
        eig = {a(0, 0), a(1, 1), a(2, 2)};
        std::sort(eig.begin(), eig.end(), std::greater<double>());
        return eig;
    }
    const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
    const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                      (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Matrix b(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
    const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                        b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                        b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    double r = detb / 2.0;
    r = std::clamp(r, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    eig[0] = q + 2.0 * p * std::cos(phi);
    eig[2] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    eig[1] = 3.0 * q - eig[0] - eig[2];
    return eig;
}

/// Deterministic uniform(-1, 1) matrix.
inline Matrix seeded_matrix(std::size_t rows, std::size_t cols, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix m(rows, cols);
    for (auto& x : m.entries()) x = dist(rng);
    return m;
}

inline std::vector<double> seeded_vector(std::size_t n, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

/// One explicit propagation step of the spatially homogeneous delayed SIRD
/// system (diffusion vanishes on constants): the reference for grid runs
/// started from uniform fields.
struct ScalarSirdOracle {
    double beta_i, beta_e, gamma, delta, dt;
    std::size_t delay_depth;
    std::vector<double> infected_history; // i at the last delay_depth steps

    double s, i, r, d;

    ScalarSirdOracle(double bi, double be, double g, double de, double dt_, std::size_t depth,
                     double s0, double i0, double r0, double d0)
        : beta_i(bi), beta_e(be), gamma(g), delta(de), dt(dt_), delay_depth(depth),
          infected_history(depth, i0), s(s0), i(i0), r(r0), d(d0) {}

    void step() {
        const double i_delayed = delay_depth == 0 ? i : infected_history.front();
        const double n_pop = s + i + r;
        const double infection =
            n_pop > 0.0 ? (beta_i * s * i_delayed + beta_e * s * i) / n_pop : 0.0;
        const double recovery = gamma * i_delayed;
        const double death = delta * i_delayed;
        const double s_new = s - dt * infection;
        const double i_new = i + dt * infection - dt * (recovery + death);
        const double r_new = r + dt * recovery;
        const double d_new = d + dt * death;
        if (delay_depth > 0) {
            infected_history.erase(infected_history.begin());
            infected_history.push_back(i);
        }
        s = s_new;
        i = i_new;
        r = r_new;
        d = d_new;
    }
};

} // namespace cdmd::testing
