#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <complex>

#include "cdmd/eig.hpp"
#include "cdmd/lstsq.hpp"
#include "cdmd/svd.hpp"
#include "oracles.hpp"

using namespace cdmd;
using cd = std::complex<double>;
using cdmd::testing::seeded_matrix;
using cdmd::testing::seeded_vector;

namespace {

Matrix reconstruct(const SvdFactors& f) {
    Matrix us = f.u;
    for (std::size_t j = 0; j < f.sigma.size(); ++j)
        for (std::size_t i = 0; i < us.rows(); ++i) us(i, j) *= f.sigma[j];
    return multiply(us, transpose(f.v));
}

double max_abs_offdiag_gram(const Matrix& q) {
    const Matrix g = multiply(transpose(q), q);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j)
            worst = std::max(worst, std::fabs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return worst;
}

double frobenius_diff(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double d = a(i, j) - b(i, j);
            s += d * d;
        }
    return std::sqrt(s);
}

} // namespace

TEST_CASE("svd of the 2x2 identity") {
    const SvdFactors f = svd(Matrix::identity(2));
    CHECK(f.sigma == std::vector<double>{1.0, 1.0});
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(f.u(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
            CHECK(f.v(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
        }
    CHECK(f.rank_used == 2);
}

TEST_CASE("svd of a diagonal matrix sorts the absolute diagonal") {
    const std::vector<double> d{3.0, 2.0};
    const SvdFactors f = svd(Matrix::diagonal(d));
    REQUIRE(f.sigma.size() == 2);
    CHECK(f.sigma[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(f.sigma[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("seeded 5x3 singular values match the characteristic-cubic oracle on M^T M") {
    const Matrix m = seeded_matrix(5, 3, 42);
    const Matrix gram = multiply(transpose(m), m);
    const auto eig = cdmd::testing::symmetric_eigenvalues_3x3(gram);
    const SvdFactors f = svd(m);
    REQUIRE(f.sigma.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(f.sigma[i] == doctest::Approx(std::sqrt(std::max(0.0, eig[i]))).epsilon(1e-9));
}

TEST_CASE("svd reconstruction and orthonormality over assorted shapes") {
    const std::vector<std::pair<std::size_t, std::size_t>> shapes{
        {1, 1}, {3, 1}, {4, 4}, {7, 3}, {20, 11}, {33, 32}, {64, 17}};
    std::uint32_t seed = 100;
    for (auto [rows, cols] : shapes) {
        const Matrix m = seeded_matrix(rows, cols, seed++);
        const SvdFactors f = svd(m);
        CHECK(frobenius_diff(m, reconstruct(f)) <= 1e-10 * std::max(1.0, frobenius_norm(m)));
        CHECK(max_abs_offdiag_gram(f.u) <= 1e-10);
        CHECK(max_abs_offdiag_gram(f.v) <= 1e-10);
        for (std::size_t i = 0; i + 1 < f.sigma.size(); ++i) CHECK(f.sigma[i] >= f.sigma[i + 1]);
    }
}

TEST_CASE("svd reconstruction at the desk-scale bound 512x256") {
    const Matrix m = seeded_matrix(512, 256, 7);
    const SvdFactors f = svd(m);
    CHECK(frobenius_diff(m, reconstruct(f)) <= 1e-10 * frobenius_norm(m));
    CHECK(max_abs_offdiag_gram(f.u) <= 1e-10);
    CHECK(max_abs_offdiag_gram(f.v) <= 1e-10);
}

TEST_CASE("svd sign convention makes the largest-magnitude entry of each u column non-negative") {
    const Matrix m = seeded_matrix(9, 4, 3);
    const SvdFactors f = svd(m);
    for (std::size_t j = 0; j < f.u.cols(); ++j) {
        double best = 0.0;
        for (std::size_t i = 0; i < f.u.rows(); ++i)
            if (std::fabs(f.u(i, j)) > std::fabs(best)) best = f.u(i, j);
        CHECK(best >= 0.0);
    }
}

TEST_CASE("svd input validation") {
    CHECK_THROWS_AS(svd(seeded_matrix(2, 5, 1)), InputError);
    Matrix bad(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd(bad), InputError);
}

TEST_CASE("truncated_svd keeps the leading triplets of diag(3,2,1)") {
    const std::vector<double> d{3.0, 2.0, 1.0};
    const SvdFactors f = truncated_svd(Matrix::diagonal(d), 2);
    REQUIRE(f.sigma.size() == 2);
    CHECK(f.sigma[0] == doctest::Approx(3.0));
    CHECK(f.sigma[1] == doctest::Approx(2.0));
    CHECK(frobenius_diff(Matrix::diagonal(d), reconstruct(f)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("truncated_svd at full rank equals svd") {
    const Matrix m = seeded_matrix(6, 4, 11);
    const SvdFactors full = svd(m);
    const SvdFactors trunc = truncated_svd(m, 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(trunc.sigma[i] == doctest::Approx(full.sigma[i]).epsilon(1e-14));
    CHECK(frobenius_diff(full.u, trunc.u) <= 1e-12);
    CHECK(frobenius_diff(full.v, trunc.v) <= 1e-12);
}

TEST_CASE("rank-1 outer product truncated at r=3 reports rank_used 1") {
    const auto x = seeded_vector(6, 21);
    const auto y = seeded_vector(4, 22);
    Matrix m(6, 4);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 4; ++j) m(i, j) = x[i] * y[j];
    const SvdFactors f = truncated_svd(m, 3);
    CHECK(f.rank_used == 1);
    CHECK(f.sigma[1] / f.sigma[0] < 1e-12);
}

TEST_CASE("Eckart-Young: truncation error equals the dropped tail energy") {
    std::uint32_t seed = 500;
    for (auto [rows, cols] : std::vector<std::pair<std::size_t, std::size_t>>{{8, 5}, {5, 8}, {12, 12}}) {
        const Matrix m = seeded_matrix(rows, cols, seed++);
        const SvdFactors full = truncated_svd(m, std::min(rows, cols));
        for (std::size_t r = 1; r <= std::min(rows, cols); ++r) {
            const SvdFactors f = truncated_svd(m, r);
            double tail = 0.0;
            for (std::size_t i = f.rank_used; i < full.sigma.size(); ++i)
                tail += full.sigma[i] * full.sigma[i];
            const double err = frobenius_diff(m, reconstruct(f));
            CHECK(err * err == doctest::Approx(tail).epsilon(1e-9));
        }
    }
}

TEST_CASE("truncated_svd validates the rank") {
    const Matrix m = seeded_matrix(4, 3, 2);
    CHECK_THROWS_AS(truncated_svd(m, 0), InputError);
    CHECK_THROWS_AS(truncated_svd(m, 4), InputError);
}

TEST_CASE("pseudoinverse_apply on identity and diagonal factors") {
    const SvdFactors fi = svd(Matrix::identity(2));
    const std::vector<double> y{1.0, 2.0};
    const auto xi = pseudoinverse_apply(fi, y);
    CHECK(xi[0] == doctest::Approx(1.0));
    CHECK(xi[1] == doctest::Approx(2.0));

    const std::vector<double> d{2.0, 4.0};
    const SvdFactors fd = svd(Matrix::diagonal(d));
    const std::vector<double> y2{2.0, 4.0};
    const auto xd = pseudoinverse_apply(fd, y2);
    CHECK(xd[0] == doctest::Approx(1.0));
    CHECK(xd[1] == doctest::Approx(1.0));
}

TEST_CASE("pseudoinverse recovers the preimage of a full-rank tall map") {
    const Matrix m = seeded_matrix(6, 3, 33);
    const auto x = seeded_vector(3, 34);
    const auto y = multiply(m, x);
    const auto back = pseudoinverse_apply(svd(m), y);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-9));
}

TEST_CASE("pseudoinverse then forward map is identity on the row space") {
    for (std::uint32_t seed : {51u, 52u, 53u}) {
        const Matrix m = seeded_matrix(7, 4, seed);
        const SvdFactors f = svd(m);
        const auto x = seeded_vector(4, seed + 100);
        const auto y = multiply(m, x);
        const auto xr = pseudoinverse_apply(f, y);
        const auto yr = multiply(m, xr);
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(yr[i] == doctest::Approx(y[i]).epsilon(1e-9));
    }
}

TEST_CASE("pseudoinverse_apply validates the length") {
    const SvdFactors f = svd(Matrix::identity(3));
    const std::vector<double> y{1.0, 2.0};
    CHECK_THROWS_AS(pseudoinverse_apply(f, y), InputError);
}

TEST_CASE("randomized_svd tracks truncated_svd on a decaying spectrum") {
    std::vector<double> d{100.0, 10.0, 1e-8, 1e-9, 1e-10, 1e-11};
    const Matrix m = Matrix::diagonal(d);
    const SvdFactors exact = truncated_svd(m, 2);
    const SvdFactors rand = randomized_svd(m, 2, 3, 2, 1234);
    REQUIRE(rand.sigma.size() >= 2);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::fabs(rand.sigma[i] - exact.sigma[i]) <= 1e-6 * exact.sigma[i]);
}

TEST_CASE("randomized_svd of the identity at full rank") {
    const SvdFactors f = randomized_svd(Matrix::identity(4), 4, 0, 0, 9);
    REQUIRE(f.sigma.size() == 4);
    for (double s : f.sigma) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("randomized_svd is bit-deterministic per seed") {
    const Matrix m = seeded_matrix(12, 8, 77);
    const SvdFactors a = randomized_svd(m, 3, 2, 2, 424242);
    const SvdFactors b = randomized_svd(m, 3, 2, 2, 424242);
    CHECK(a.sigma == b.sigma);
    CHECK(a.u.entries() == b.u.entries());
    CHECK(a.v.entries() == b.v.entries());
}

TEST_CASE("randomized_svd validates dimensions") {
    const Matrix m = seeded_matrix(5, 4, 1);
    CHECK_THROWS_AS(randomized_svd(m, 3, 2, 1, 0), InputError);
}

TEST_CASE("eig of diag(2,3)") {
    const std::vector<double> d{2.0, 3.0};
    const EigPair e = eig_real(Matrix::diagonal(d));
    REQUIRE(e.values.size() == 2);
    CHECK(e.values[0] == cd(3.0, 0.0));
    CHECK(e.values[1] == cd(2.0, 0.0));
}

TEST_CASE("eig of the quarter rotation is the conjugate pair {i, -i}") {
    Matrix rot(2, 2);
    rot(0, 1) = 1.0;
    rot(1, 0) = -1.0;
    const EigPair e = eig_real(rot);
    REQUIRE(e.values.size() == 2);
    CHECK(e.values[0].real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.values[0].imag() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(e.values[1].imag() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eig of the companion matrix of z^3 - 6z^2 + 11z - 6") {
    // Roots (z-1)(z-2)(z-3); the polynomial-evaluation oracle confirms them.
    Matrix c(3, 3);
    c(0, 2) = 6.0;
    c(1, 2) = -11.0;
    c(2, 2) = 6.0;
    c(1, 0) = 1.0;
    c(2, 1) = 1.0;
    const EigPair e = eig_real(c);
    std::vector<double> got;
    for (const auto& v : e.values) {
        CHECK(std::fabs(v.imag()) <= 1e-9);
        got.push_back(v.real());
        const cd p = v * v * v - 6.0 * v * v + 11.0 * v - 6.0;
        CHECK(std::abs(p) <= 1e-8);
    }
    std::sort(got.begin(), got.end());
    CHECK(got[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(got[1] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(got[2] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("eig residual, unit vectors and conjugate closure on seeded matrices") {
    for (std::size_t n : {2u, 3u, 5u, 8u, 13u}) {
        const Matrix a = seeded_matrix(n, n, 600 + static_cast<std::uint32_t>(n));
        const EigPair e = eig_real(a);
        const double anorm = inf_norm(a);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<cd> v(n);
            double nrm = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = e.vectors(i, j);
                nrm += std::norm(v[i]);
            }
            CHECK(std::sqrt(nrm) == doctest::Approx(1.0).epsilon(1e-10));
            double resid = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cd s = -e.values[j] * v[i];
                for (std::size_t k = 0; k < n; ++k) s += a(i, k) * v[k];
                resid = std::max(resid, std::abs(s));
            }
            CHECK(resid <= 1e-8 * std::max(1.0, anorm));
        }
        // Conjugate closure of the eigenvalue multiset.
        for (const auto& v : e.values) {
            const cd want = std::conj(v);
            bool found = false;
            for (const auto& w : e.values)
                if (std::abs(w - want) <= 1e-10 * std::max(1.0, std::abs(want))) found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("eig is invariant under permutation similarity") {
    const std::size_t n = 6;
    const Matrix a = seeded_matrix(n, n, 999);
    Matrix p(n, n);
    const std::vector<std::size_t> perm{2, 0, 4, 1, 5, 3};
    for (std::size_t i = 0; i < n; ++i) p(i, perm[i]) = 1.0;
    const Matrix pap = multiply(p, multiply(a, transpose(p)));

    auto sorted_values = [](const EigPair& e) {
        auto v = e.values;
        std::sort(v.begin(), v.end(), [](cd x, cd y) {
            if (x.real() != y.real()) return x.real() < y.real();
            return x.imag() < y.imag();
        });
        return v;
    };
    const auto va = sorted_values(eig_real(a));
    const auto vb = sorted_values(eig_real(pap));
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(va[i] - vb[i]) <= 1e-9);
}

TEST_CASE("eig input validation") {
    CHECK_THROWS_AS(eig_real(seeded_matrix(3, 4, 1)), InputError);
}

TEST_CASE("complex_least_squares against the complex identity") {
    const ComplexMatrix psi = ComplexMatrix::identity(3);
    const std::vector<double> y{1.0, 2.0, 3.0};
    const ComplexLstsq ls = complex_least_squares(psi, y);
    CHECK_FALSE(ls.rank_deficient);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(ls.solution[i].real() == doctest::Approx(y[i]).epsilon(1e-12));
        CHECK(std::fabs(ls.solution[i].imag()) <= 1e-12);
    }
}

TEST_CASE("one-column solve matches the closed-form normal equation") {
    // psi = [1; i]: psi^H psi = 2, so b = psi^H y / 2 for any y.
    ComplexMatrix psi(2, 1);
    psi(0, 0) = cd(1.0, 0.0);
    psi(1, 0) = cd(0.0, 1.0);

    auto oracle = [&](const std::vector<double>& y) {
        cd num = std::conj(psi(0, 0)) * y[0] + std::conj(psi(1, 0)) * y[1];
        return num / 2.0;
    };
    for (const auto& y : std::vector<std::vector<double>>{{1.0, 0.0}, {1.0, 1.0}, {0.3, -0.7}}) {
        const ComplexLstsq ls = complex_least_squares(psi, y);
        const cd want = oracle(y);
        CHECK(std::abs(ls.solution[0] - want) <= 1e-12);
        // Residual orthogonality: psi^H (psi b - y) = 0.
        const cd r0 = psi(0, 0) * ls.solution[0] - y[0];
        const cd r1 = psi(1, 0) * ls.solution[0] - y[1];
        CHECK(std::abs(std::conj(psi(0, 0)) * r0 + std::conj(psi(1, 0)) * r1) <= 1e-12);
    }
    // The y = [1, 1] case lands on the hand value 0.5 - 0.5i.
    const ComplexLstsq ls = complex_least_squares(psi, std::vector<double>{1.0, 1.0});
    CHECK(ls.solution[0].real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ls.solution[0].imag() == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("consistent systems are solved to a tiny residual") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ComplexMatrix psi(5, 2);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 2; ++j) psi(i, j) = cd(dist(rng), dist(rng));
    const std::vector<cd> b0{cd(0.4, -0.2), cd(-1.1, 0.3)};
    // Real right-hand side in the column space of [psi, conj(psi)]: use
    // y = Re(psi b0) and check the residual is orthogonal to the columns.
    std::vector<double> y(5);
    for (std::size_t i = 0; i < 5; ++i) {
        cd s = psi(i, 0) * b0[0] + psi(i, 1) * b0[1];
        y[i] = s.real();
    }
    const ComplexLstsq ls = complex_least_squares(psi, y);
    std::vector<cd> resid(5);
    for (std::size_t i = 0; i < 5; ++i) {
        resid[i] = psi(i, 0) * ls.solution[0] + psi(i, 1) * ls.solution[1] - y[i];
    }
    for (std::size_t j = 0; j < 2; ++j) {
        cd s = 0.0;
        for (std::size_t i = 0; i < 5; ++i) s += std::conj(psi(i, j)) * resid[i];
        CHECK(std::abs(s) <= 1e-9);
    }

    // Exactly representable case: a real matrix with a real preimage.
    ComplexMatrix psir(5, 2);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 2; ++j) psir(i, j) = cd(dist(rng), 0.0);
    std::vector<double> yr(5);
    for (std::size_t i = 0; i < 5; ++i)
        yr[i] = (psir(i, 0) * cd(1.5, 0.0) + psir(i, 1) * cd(-0.25, 0.0)).real();
    const ComplexLstsq lsr = complex_least_squares(psir, yr);
    double rn = 0.0;
    for (std::size_t i = 0; i < 5; ++i)
        rn += std::norm(psir(i, 0) * lsr.solution[0] + psir(i, 1) * lsr.solution[1] - yr[i]);
    CHECK(std::sqrt(rn) <= 1e-10);
}

TEST_CASE("rank-deficient systems are flagged and solved with minimum norm") {
    ComplexMatrix psi(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        psi(i, 0) = cd(1.0 + double(i), 0.5);
        psi(i, 1) = psi(i, 0); // duplicated column
    }
    const std::vector<double> y{1.0, 2.0, 3.0, 4.0};
    const ComplexLstsq ls = complex_least_squares(psi, y);
    CHECK(ls.rank_deficient);
    CHECK(ls.rank == 1);
    // Minimum-norm solutions split the coefficient evenly across duplicates.
    CHECK(std::abs(ls.solution[0] - ls.solution[1]) <= 1e-12);
}

TEST_CASE("complex_least_squares validates shapes") {
    const ComplexMatrix psi = ComplexMatrix::identity(2);
    CHECK_THROWS_AS(complex_least_squares(psi, std::vector<double>{1.0}), InputError);
    ComplexMatrix wide(1, 2);
    wide(0, 0) = 1.0;
    wide(0, 1) = 1.0;
    CHECK_THROWS_AS(complex_least_squares(wide, std::vector<double>{1.0}), InputError);
}
