#include "cdmd/am.hpp"

#include <algorithm>
#include <cmath>

namespace cdmd {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void validate_am_grid(const Grid& grid) {
    grid.validate();
    if (grid.is_1d()) throw InputError("am: the grid must be two-dimensional");
    if (grid.bottom.kind != EdgeKind::fixed_value)
        throw InputError("am: the bottom edge must hold a fixed temperature");
    if (grid.left.kind != EdgeKind::zero_flux || grid.right.kind != EdgeKind::zero_flux ||
        grid.top.kind != EdgeKind::zero_flux)
        throw InputError("am: left, right and top edges must be zero-flux");
}

AmState step_with_matrix(const AmState& state, const AmParams& params, const Grid& grid,
                         double time, const BandedMatrix& factored) {
    const std::size_t n = grid.nodes();
    const double dt = params.dt;
    const double inv_heat = 1.0 / (params.rho * params.c_p);

    std::vector<double> t_new(n);
    for (std::size_t k = 0; k < n; ++k)
        t_new[k] = state.t[k] +
                   dt * inv_heat * laser_source(grid.node_x(k), grid.node_y(k), params, time);
    apply_dirichlet_values(grid, t_new);
    factored.solve(t_new);

    AmState next;
    next.t = std::move(t_new);
    next.phi_p.resize(n);
    next.phi_l.resize(n);
    next.phi_s.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(next.t[k]))
            throw NumericError("step_am: temperature overflowed at node " + std::to_string(k));
        const PhaseFractions phi = update_phases({state.phi_p[k], state.phi_l[k], state.phi_s[k]},
                                                 next.t[k], state.t[k], dt, params);
        next.phi_p[k] = phi.p;
        next.phi_l[k] = phi.l;
        next.phi_s[k] = phi.s;
    }
    return next;
}

BandedMatrix build_heat_matrix(const AmParams& params, const Grid& grid) {
    const std::vector<double> weight(grid.nodes(), params.kappa);
    BandedMatrix a = implicit_diffusion_matrix(grid, weight,
                                               params.dt / (params.rho * params.c_p),
                                               dirichlet_mask(grid));
    a.factor();
    return a;
}

} // namespace

void AmParams::validate() const {
    if (!(rho > 0.0) || !(c_p > 0.0) || !(kappa > 0.0))
        throw InputError("am: material constants must be positive");
    if (!(t_f > t_s)) throw InputError("am: t_f must exceed t_s");
    if (!(sigmoid_sharpness > 0.0)) throw InputError("am: sigmoid_sharpness must be positive");
    if (!(dt > 0.0)) throw InputError("am: dt must be positive");
    if (laser_amp < 0.0) throw InputError("am: laser_amp must be non-negative");
}

void AmState::validate(const Grid& g) const {
    const std::size_t n = g.nodes();
    if (t.size() != n || phi_p.size() != n || phi_l.size() != n || phi_s.size() != n)
        throw InputError("am: state field lengths must equal the grid node count");
}

double laser_source(double x, double y, const AmParams& params, double time) {
    if (time >= params.laser_off_time) return 0.0;
    const double dx = x - params.laser_center_x;
    const double dy = y - params.laser_center_y;
    const double dx2 = dx * dx, dy2 = dy * dy;
    return params.laser_amp * std::exp((-dx2 * dx2 - dy2 * dy2) / 1e-8);
}

double sigmoid_switch(SwitchKind kind, double temperature, double temp_rate,
                      const AmParams& params) {
    params.validate();
    const double k_temp = params.sigmoid_sharpness;        // per K
    const double k_rate = params.sigmoid_sharpness * 1e-3; // per K/s, i.e. 1/(K/ms)
    switch (kind) {
        case SwitchKind::powder:
        case SwitchKind::solid:
            // Active while heating above the solidus (the published table
            // gives S_s the same condition as S_p).
            return logistic(k_rate * temp_rate) * logistic(k_temp * (temperature - params.t_s));
        case SwitchKind::liquid:
            return logistic(-k_rate * temp_rate) * logistic(k_temp * (params.t_f - temperature));
    }
    throw InputError("sigmoid_switch: unknown kind");
}

PhaseFractions update_phases(const PhaseFractions& phi, double t_new, double t_old, double dt,
                             const AmParams& params) {
    if (!(dt > 0.0)) throw InputError("update_phases: dt must be positive");
    const double rate = (t_new - t_old) / dt;
    const double c = rate / (params.t_f - params.t_s);
    const double a = sigmoid_switch(SwitchKind::powder, t_new, rate, params) * c;
    const double e = sigmoid_switch(SwitchKind::solid, t_new, rate, params) * c;
    const double g = sigmoid_switch(SwitchKind::liquid, t_new, rate, params) * c;

    const double p_new = phi.p / (1.0 + dt * a);
    const double rhs_l = phi.l + dt * a * p_new;
    const double big_e = dt * e, big_g = dt * g;
    const double det = 1.0 + big_e - big_g;
    if (!(det > 0.0)) throw NumericError("update_phases: phase system became singular");
    const double l_new = ((1.0 + big_e) * rhs_l + big_e * phi.s) / det;
    const double s_new = ((1.0 - big_g) * phi.s - big_g * rhs_l) / det;

    const double sum = p_new + l_new + s_new;
    if (!(sum > 0.0) || !std::isfinite(sum))
        throw NumericError("update_phases: phase fractions left the unit simplex");
    return {p_new / sum, l_new / sum, s_new / sum};
}

AmState step_am(const AmState& state, const AmParams& params, const Grid& grid, double time) {
    validate_am_grid(grid);
    params.validate();
    state.validate(grid);
    return step_with_matrix(state, params, grid, time, build_heat_matrix(params, grid));
}

AmState default_am_initial_state(const Grid& grid, const AmParams& params) {
    validate_am_grid(grid);
    params.validate();
    AmState st;
    st.t.assign(grid.nodes(), grid.bottom.value);
    st.phi_p.assign(grid.nodes(), 1.0);
    st.phi_l.assign(grid.nodes(), 0.0);
    st.phi_s.assign(grid.nodes(), 0.0);
    return st;
}

SnapshotMatrix run_am(const Grid& grid, const AmParams& params, std::size_t steps,
                      std::size_t output_stride) {
    validate_am_grid(grid);
    params.validate();
    if (output_stride == 0) throw InputError("run_am: output_stride must be positive");

    const std::size_t n = grid.nodes();
    const std::size_t stored = steps / output_stride + 1;

    SnapshotMatrix out;
    out.dt = params.dt * static_cast<double>(output_stride);
    out.cell_weight = grid.cell_weight();
    out.layout.names = {"T", "phi_p", "phi_l", "phi_s"};
    out.layout.node_count = n;
    out.data = Matrix(4 * n, stored);

    auto store = [&](const AmState& st, std::size_t col) {
        for (std::size_t k = 0; k < n; ++k) {
            out.data(k, col) = st.t[k];
            out.data(n + k, col) = st.phi_p[k];
            out.data(2 * n + k, col) = st.phi_l[k];
            out.data(3 * n + k, col) = st.phi_s[k];
        }
    };

    const BandedMatrix heat = build_heat_matrix(params, grid);
    AmState state = default_am_initial_state(grid, params);
    store(state, 0);
    std::size_t col = 1;
    for (std::size_t step = 1; step <= steps; ++step) {
        const double time = params.dt * static_cast<double>(step - 1);
        state = step_with_matrix(state, params, grid, time, heat);
        if (step % output_stride == 0 && col < stored) store(state, col++);
    }
    return out;
}

std::vector<double> melt_pool_profile(const SnapshotMatrix& snapshot, std::size_t column,
                                      const Grid& grid) {
    snapshot.validate();
    grid.validate();
    if (grid.is_1d()) throw InputError("melt_pool_profile: the grid must be two-dimensional");
    if (column >= snapshot.columns()) throw InputError("melt_pool_profile: column out of range");
    if (snapshot.layout.node_count != grid.nodes())
        throw InputError("melt_pool_profile: snapshot layout does not match the grid");

    const auto it = std::find(snapshot.layout.names.begin(), snapshot.layout.names.end(), "phi_p");
    if (it == snapshot.layout.names.end())
        throw InputError("melt_pool_profile: snapshot has no phi_p compartment");
    const std::size_t block = static_cast<std::size_t>(it - snapshot.layout.names.begin());

    const std::size_t ix = grid.nx / 2;
    std::vector<double> profile(grid.ny);
    for (std::size_t iy = 0; iy < grid.ny; ++iy)
        profile[iy] = snapshot.data(block * grid.nodes() + iy * grid.nx + ix, column);
    return profile;
}

AmSetup default_am_setup() {
    AmSetup setup;
    setup.grid.nx = 50;
    setup.grid.ny = 50;
    setup.grid.hx = 0.04 / 49.0;
    setup.grid.hy = 0.04 / 49.0;
    setup.grid.bottom = {EdgeKind::fixed_value, 293.15};
    // Working units are cm and seconds: the quartic laser width constant
    // then spans ~180 microns and the surrogate constants below give a
    // diffusivity of 0.0375 cm^2/s.
    setup.params.rho = 0.008;
    setup.params.c_p = 500.0;
    setup.params.kappa = 0.15;
    setup.params.laser_amp = 9e6;
    setup.params.laser_center_x = 0.02;
    setup.params.laser_center_y = 0.04;
    setup.params.laser_off_time = 1.5e-3;
    setup.params.dt = 1.25e-5;
    setup.steps = 600;
    return setup;
}

} // namespace cdmd
