#include "cdmd/grid.hpp"

#include <cmath>

namespace cdmd {

void Grid::validate() const {
    if (nx < 2) throw InputError("grid: nx must be at least 2");
    if (ny < 1) throw InputError("grid: ny must be at least 1");
    if (!(hx > 0.0) || !(hy > 0.0)) throw InputError("grid: spacing must be positive");
}

BandedMatrix::BandedMatrix(std::size_t n, std::size_t bandwidth)
    : n_(n), bw_(bandwidth), bands_(n * (2 * bandwidth + 1), 0.0) {}

double& BandedMatrix::at(std::size_t i, std::size_t j) {
    const std::ptrdiff_t off = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i);
    if (off < -static_cast<std::ptrdiff_t>(bw_) || off > static_cast<std::ptrdiff_t>(bw_))
        throw InputError("banded: index outside the band");
    return bands_[i * (2 * bw_ + 1) + static_cast<std::size_t>(off + static_cast<std::ptrdiff_t>(bw_))];
}

double BandedMatrix::get(std::size_t i, std::size_t j) const {
    const std::ptrdiff_t off = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i);
    if (off < -static_cast<std::ptrdiff_t>(bw_) || off > static_cast<std::ptrdiff_t>(bw_)) return 0.0;
    return bands_[i * (2 * bw_ + 1) + static_cast<std::size_t>(off + static_cast<std::ptrdiff_t>(bw_))];
}

void BandedMatrix::factor() {
    for (std::size_t k = 0; k < n_; ++k) {
        const double pivot = at(k, k);
        if (pivot == 0.0 || !std::isfinite(pivot))
            throw NumericError("banded: zero pivot at row " + std::to_string(k));
        const std::size_t iend = std::min(n_ - 1, k + bw_);
        for (std::size_t i = k + 1; i <= iend; ++i) {
            double& lik = at(i, k);
            if (lik == 0.0) continue;
            lik /= pivot;
            const std::size_t jend = std::min(n_ - 1, k + bw_);
            for (std::size_t j = k + 1; j <= jend; ++j) at(i, j) -= lik * at(k, j);
        }
    }
    factored_ = true;
}

void BandedMatrix::solve(std::span<double> rhs) const {
    if (!factored_) throw InputError("banded: solve before factor");
    if (rhs.size() != n_) throw InputError("banded: rhs length mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t jbeg = i > bw_ ? i - bw_ : 0;
        double s = rhs[i];
        for (std::size_t j = jbeg; j < i; ++j) s -= get(i, j) * rhs[j];
        rhs[i] = s;
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        const std::size_t jend = std::min(n_ - 1, ii + bw_);
        double s = rhs[ii];
        for (std::size_t j = ii + 1; j <= jend; ++j) s -= get(ii, j) * rhs[j];
        rhs[ii] = s / get(ii, ii);
    }
}

std::vector<bool> dirichlet_mask(const Grid& g) {
    g.validate();
    std::vector<bool> mask(g.nodes(), false);
    auto mark = [&](std::size_t ix, std::size_t iy) { mask[iy * g.nx + ix] = true; };
    if (g.left.kind == EdgeKind::fixed_value)
        for (std::size_t iy = 0; iy < g.ny; ++iy) mark(0, iy);
    if (g.right.kind == EdgeKind::fixed_value)
        for (std::size_t iy = 0; iy < g.ny; ++iy) mark(g.nx - 1, iy);
    if (!g.is_1d()) {
        if (g.bottom.kind == EdgeKind::fixed_value)
            for (std::size_t ix = 0; ix < g.nx; ++ix) mark(ix, 0);
        if (g.top.kind == EdgeKind::fixed_value)
            for (std::size_t ix = 0; ix < g.nx; ++ix) mark(ix, g.ny - 1);
    }
    return mask;
}

void apply_dirichlet_values(const Grid& g, std::span<double> field) {
    if (field.size() != g.nodes()) throw InputError("dirichlet: field length mismatch");
    if (g.left.kind == EdgeKind::fixed_value)
        for (std::size_t iy = 0; iy < g.ny; ++iy) field[iy * g.nx] = g.left.value;
    if (g.right.kind == EdgeKind::fixed_value)
        for (std::size_t iy = 0; iy < g.ny; ++iy) field[iy * g.nx + g.nx - 1] = g.right.value;
    if (!g.is_1d()) {
        if (g.bottom.kind == EdgeKind::fixed_value)
            for (std::size_t ix = 0; ix < g.nx; ++ix) field[ix] = g.bottom.value;
        if (g.top.kind == EdgeKind::fixed_value)
            for (std::size_t ix = 0; ix < g.nx; ++ix) field[(g.ny - 1) * g.nx + ix] = g.top.value;
    }
}

BandedMatrix implicit_diffusion_matrix(const Grid& g, std::span<const double> node_weight,
                                       double scale, const std::vector<bool>& dirichlet) {
    g.validate();
    if (node_weight.size() != g.nodes()) throw InputError("diffusion: weight length mismatch");
    if (dirichlet.size() != g.nodes()) throw InputError("diffusion: mask length mismatch");

    const std::size_t bw = g.is_1d() ? 1 : g.nx;
    BandedMatrix a(g.nodes(), bw);
    for (std::size_t idx = 0; idx < g.nodes(); ++idx) a.at(idx, idx) = 1.0;

    auto couple = [&](std::size_t i, std::size_t j, double h) {
        const double w = 0.5 * (node_weight[i] + node_weight[j]) * scale / (h * h);
        if (!dirichlet[i]) {
            a.at(i, i) += w;
            a.at(i, j) -= w;
        }
        if (!dirichlet[j]) {
            a.at(j, j) += w;
            a.at(j, i) -= w;
        }
    };

    for (std::size_t iy = 0; iy < g.ny; ++iy) {
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            const std::size_t idx = iy * g.nx + ix;
            if (ix + 1 < g.nx) couple(idx, idx + 1, g.hx);
            if (iy + 1 < g.ny) couple(idx, idx + g.nx, g.hy);
        }
    }
    return a;
}

} // namespace cdmd
