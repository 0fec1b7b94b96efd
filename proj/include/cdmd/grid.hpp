#pragma once

#include <vector>

#include "cdmd/matrix.hpp"

namespace cdmd {

enum class EdgeKind { zero_flux, fixed_value };

struct EdgeCondition {
    EdgeKind kind = EdgeKind::zero_flux;
    double value = 0.0;
};

/// Uniform tensor grid; ny = 1 selects a 1D line. Node (ix, iy) sits at
/// (ix*hx, iy*hy) and flattens to index iy*nx + ix.
struct Grid {
    std::size_t nx = 2;
    std::size_t ny = 1;
    double hx = 1.0;
    double hy = 1.0;
    EdgeCondition left, right, bottom, top;

    std::size_t nodes() const { return nx * ny; }
    bool is_1d() const { return ny == 1; }
    double cell_weight() const { return is_1d() ? hx : hx * hy; }
    double node_x(std::size_t idx) const { return static_cast<double>(idx % nx) * hx; }
    double node_y(std::size_t idx) const { return static_cast<double>(idx / nx) * hy; }

    void validate() const;
};

/// Square banded matrix with LU factorization (no pivoting; intended for
/// the diagonally dominant implicit diffusion operators assembled below).
class BandedMatrix {
public:
    BandedMatrix(std::size_t n, std::size_t bandwidth);

    double& at(std::size_t i, std::size_t j);
    double get(std::size_t i, std::size_t j) const;

    void factor();
    void solve(std::span<double> rhs) const;

    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    std::size_t bw_;
    std::vector<double> bands_; // (2 bw + 1) diagonals per row
    bool factored_ = false;
};

/// Nodes lying on fixed-value edges.
std::vector<bool> dirichlet_mask(const Grid& g);

/// Overwrites entries of `field` on fixed-value edges with the edge value.
void apply_dirichlet_values(const Grid& g, std::span<double> field);

/// Assembles I - scale * div(w grad .) in conservative flux form with
/// face weights 0.5 (w_i + w_j); zero-flux edges contribute no face and
/// Dirichlet nodes become identity rows. Row sums of the flux part vanish,
/// so the operator preserves discrete totals under pure zero-flux closure.
BandedMatrix implicit_diffusion_matrix(const Grid& g, std::span<const double> node_weight,
                                       double scale, const std::vector<bool>& dirichlet);

} // namespace cdmd
