#pragma once

#include "cdmd/grid.hpp"
#include "cdmd/snapshot.hpp"

namespace cdmd {

/// Regimes of the delayed removal term: positivity-preserving, merely
/// asymptotically stable, or oscillatory/unstable.
enum class DelayStability { stable_positive, stable, unstable };

/// Classifies gamma + delta against the delay sigma:
/// stable_positive iff gamma+delta < 1/(e sigma); stable up to pi/(2 sigma).
DelayStability check_delay_stability(double gamma, double delta, double sigma);

/// Physical parameters of the delayed SIRD reaction-diffusion model.
/// Rates are per day, diffusion in km^2 persons^-1 day^-1, sigma and dt in
/// days; sigma must be an exact non-negative integer multiple of dt.
struct SirdParams {
    double beta_i = 0.125;
    double beta_e = 0.125;
    double gamma = 1.0 / 24.0;
    double delta = 1.0 / 180.0;
    double nu_s = 0.01;
    double nu_i = 0.01;
    double nu_r = 0.01;
    double sigma = 7.0;
    double dt = 0.25;

    std::size_t delay_depth() const; // sigma / dt, validated as exact
    void validate() const;
};

/// Per-node density fields; n_pop is the living population s + i + r.
struct SirdState {
    std::vector<double> s, i, r, d, n_pop;

    void validate(const Grid& g) const;
    void refresh_population();
};

/// Ring of the infected field at the last sigma/dt steps. The pre-history
/// is the initial infected field: i(t) = i0 on [-sigma, 0].
class DelayBuffer {
public:
    DelayBuffer(std::size_t depth, const std::vector<double>& i0);

    std::size_t depth() const { return slots_.size(); }

    /// i(t - sigma) seen from the current step; `current` when depth is 0.
    const std::vector<double>& delayed(const std::vector<double>& current) const;

    /// Replace the oldest slot with the pre-step infected field.
    void rotate(const std::vector<double>& current);

private:
    std::vector<std::vector<double>> slots_;
    std::size_t head_ = 0; // oldest slot
};

/// One backward Euler step: implicit conservative diffusion per living
/// field with the population-weighted coefficient frozen at the previous
/// step, reactions and the delay term lagged, no diffusion on d.
SirdState step_sird(const SirdState& state, const SirdParams& params, DelayBuffer& buf,
                    const Grid& grid);

/// Time-steps the model and collects a snapshot history with layout
/// [s, i, r, d]; column 0 is the initial state and dt = params.dt * stride.
SnapshotMatrix run_sird(const Grid& grid, const SirdParams& params, const SirdState& initial,
                        std::size_t steps, std::size_t output_stride);

/// Spatially uniform state, handy for the scalar-oracle comparisons.
SirdState uniform_sird_state(const Grid& grid, double s0, double i0, double r0, double d0);

/// Desk-scale default: uniform susceptible background with a Gaussian
/// infection seed in the domain center.
SirdState default_sird_initial_state(const Grid& grid);

} // namespace cdmd
