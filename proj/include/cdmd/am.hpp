#pragma once

#include "cdmd/grid.hpp"
#include "cdmd/snapshot.hpp"

namespace cdmd {

/// Thermal and phase-change parameters with constant surrogate material
/// values. Units: temperatures in K, time in seconds, lengths in the grid's
/// unit; sigmoid_sharpness is per kelvin for temperature factors and per
/// K/ms for rate factors.
struct AmParams {
    double rho = 8000.0;
    double c_p = 500.0;
    double kappa = 15.0;
    double t_s = 1658.0; // melting begins
    double t_f = 1723.0; // melting complete
    double laser_amp = 9e6;
    double laser_center_x = 0.0;
    double laser_center_y = 0.0;
    double laser_off_time = 1.5e-3;
    double sigmoid_sharpness = 1.0;
    double dt = 1.25e-5;

    void validate() const;
};

/// Temperature field plus per-node phase fractions (powder, liquid, solid);
/// the fractions sum to one at every node.
struct AmState {
    std::vector<double> t, phi_p, phi_l, phi_s;

    void validate(const Grid& g) const;
};

enum class SwitchKind { powder, liquid, solid };

/// Quartic-exponential heat source, active until laser_off_time:
/// amp * exp((-(x-xc)^4 - (y-yc)^4) / 1e-8).
double laser_source(double x, double y, const AmParams& params, double time);

/// Product of two logistic factors approaching the phase-change indicator
/// as the sharpness grows; temp_rate is in K/s.
double sigmoid_switch(SwitchKind kind, double temperature, double temp_rate,
                      const AmParams& params);

struct PhaseFractions {
    double p = 1.0, l = 0.0, s = 0.0;
};

/// Pointwise backward Euler update of the phase ODEs over one step with
/// dT/dt = (t_new - t_old)/dt and switches at (t_new, rate); the result is
/// renormalized so the fractions sum to one exactly.
PhaseFractions update_phases(const PhaseFractions& phi, double t_new, double t_old, double dt,
                             const AmParams& params);

/// One BE step: implicit conductive transport with the bottom edge held at
/// its fixed value, explicit laser source, then the pointwise phase update.
AmState step_am(const AmState& state, const AmParams& params, const Grid& grid, double time);

/// Runs the model from powder at the boundary temperature and collects a
/// snapshot history with layout [T, phi_p, phi_l, phi_s].
SnapshotMatrix run_am(const Grid& grid, const AmParams& params, std::size_t steps,
                      std::size_t output_stride);

/// Powder fraction along the vertical centerline (x nearest nx/2), ordered
/// bottom to top, for the given time column.
std::vector<double> melt_pool_profile(const SnapshotMatrix& snapshot, std::size_t column,
                                      const Grid& grid);

AmState default_am_initial_state(const Grid& grid, const AmParams& params);

/// Desk-scale setup: 50x50 nodes over a 0.04 x 0.04 domain (cm) with the
/// bottom edge pinned at 293.15 K, laser centered on the top edge.
struct AmSetup {
    Grid grid;
    AmParams params;
    std::size_t steps = 600;
};
AmSetup default_am_setup();

} // namespace cdmd
