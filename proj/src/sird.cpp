#include "cdmd/sird.hpp"

#include <cmath>

namespace cdmd {

DelayStability check_delay_stability(double gamma, double delta, double sigma) {
    if (gamma < 0.0 || delta < 0.0 || sigma < 0.0)
        throw InputError("check_delay_stability: rates and sigma must be non-negative");
    if (sigma == 0.0) throw InputError("check_delay_stability: sigma must be positive");
    const double rate = gamma + delta;
    if (rate < 1.0 / (M_E * sigma)) return DelayStability::stable_positive;
    if (rate < M_PI / (2.0 * sigma)) return DelayStability::stable;
    return DelayStability::unstable;
}

std::size_t SirdParams::delay_depth() const {
    if (sigma == 0.0) return 0;
    const double ratio = sigma / dt;
    const double rounded = std::round(ratio);
    if (std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw InputError("sird: sigma must be an exact integer multiple of dt");
    return static_cast<std::size_t>(rounded);
}

void SirdParams::validate() const {
    if (beta_i < 0.0 || beta_e < 0.0 || gamma < 0.0 || delta < 0.0)
        throw InputError("sird: rates must be non-negative");
    if (nu_s < 0.0 || nu_i < 0.0 || nu_r < 0.0)
        throw InputError("sird: diffusion coefficients must be non-negative");
    if (sigma < 0.0) throw InputError("sird: sigma must be non-negative");
    if (!(dt > 0.0)) throw InputError("sird: dt must be positive");
    (void)delay_depth();
}

void SirdState::validate(const Grid& g) const {
    const std::size_t n = g.nodes();
    if (s.size() != n || i.size() != n || r.size() != n || d.size() != n || n_pop.size() != n)
        throw InputError("sird: state field lengths must equal the grid node count");
}

void SirdState::refresh_population() {
    n_pop.resize(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) n_pop[k] = s[k] + i[k] + r[k];
}

DelayBuffer::DelayBuffer(std::size_t depth, const std::vector<double>& i0)
    : slots_(depth, i0) {}

const std::vector<double>& DelayBuffer::delayed(const std::vector<double>& current) const {
    if (slots_.empty()) return current;
    return slots_[head_];
}

void DelayBuffer::rotate(const std::vector<double>& current) {
    if (slots_.empty()) return;
    slots_[head_] = current;
    head_ = (head_ + 1) % slots_.size();
}

SirdState step_sird(const SirdState& state, const SirdParams& params, DelayBuffer& buf,
                    const Grid& grid) {
    grid.validate();
    params.validate();
    state.validate(grid);
    if (grid.left.kind != EdgeKind::zero_flux || grid.right.kind != EdgeKind::zero_flux ||
        (!grid.is_1d() && (grid.bottom.kind != EdgeKind::zero_flux ||
                           grid.top.kind != EdgeKind::zero_flux)))
        throw InputError("step_sird: all edges must be zero-flux");
    if (buf.depth() != params.delay_depth())
        throw InputError("step_sird: delay buffer depth does not match sigma/dt");

    const std::size_t n = grid.nodes();
    const std::vector<double>& i_delayed = buf.delayed(state.i);
    const double dt = params.dt;

    std::vector<double> rhs_s(n), rhs_i(n), rhs_r(n), d_new(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double pop = state.n_pop[k];
        const double infection =
            pop > 0.0 ? (params.beta_i * state.s[k] * i_delayed[k] +
                         params.beta_e * state.s[k] * state.i[k]) / pop
                      : 0.0;
        const double recovery = params.gamma * i_delayed[k];
        const double death = params.delta * i_delayed[k];
        // The i sink subtracts the very same products r and d gain, so the
        // pointwise reaction sum cancels exactly in floating point.
        rhs_s[k] = state.s[k] - dt * infection;
        rhs_i[k] = state.i[k] + dt * infection - dt * (recovery + death);
        rhs_r[k] = state.r[k] + dt * recovery;
        d_new[k] = state.d[k] + dt * death;
    }

    const std::vector<bool> mask(n, false);
    std::vector<double> weight(n);
    auto diffuse = [&](std::vector<double>& field, double nu) {
        if (nu == 0.0) return;
        for (std::size_t k = 0; k < n; ++k) weight[k] = nu * state.n_pop[k];
        BandedMatrix a = implicit_diffusion_matrix(grid, weight, dt, mask);
        a.factor();
        a.solve(field);
    };
    diffuse(rhs_s, params.nu_s);
    diffuse(rhs_i, params.nu_i);
    diffuse(rhs_r, params.nu_r);

    SirdState next;
    next.s = std::move(rhs_s);
    next.i = std::move(rhs_i);
    next.r = std::move(rhs_r);
    next.d = std::move(d_new);
    next.refresh_population();

    for (std::size_t k = 0; k < n; ++k) {
        if (next.s[k] < -1e-8 || next.i[k] < -1e-8 || next.r[k] < -1e-8 || next.d[k] < -1e-8)
            throw NumericError("step_sird: populations left the positivity regime at node " +
                               std::to_string(k));
    }

    buf.rotate(state.i);
    return next;
}

SnapshotMatrix run_sird(const Grid& grid, const SirdParams& params, const SirdState& initial,
                        std::size_t steps, std::size_t output_stride) {
    grid.validate();
    params.validate();
    initial.validate(grid);
    if (output_stride == 0) throw InputError("run_sird: output_stride must be positive");

    const std::size_t n = grid.nodes();
    const std::size_t stored = steps / output_stride + 1;

    SnapshotMatrix out;
    out.dt = params.dt * static_cast<double>(output_stride);
    out.cell_weight = grid.cell_weight();
    out.layout.names = {"s", "i", "r", "d"};
    out.layout.node_count = n;
    out.data = Matrix(4 * n, stored);

    auto store = [&](const SirdState& st, std::size_t col) {
        for (std::size_t k = 0; k < n; ++k) {
            out.data(k, col) = st.s[k];
            out.data(n + k, col) = st.i[k];
            out.data(2 * n + k, col) = st.r[k];
            out.data(3 * n + k, col) = st.d[k];
        }
    };

    SirdState state = initial;
    state.refresh_population();
    DelayBuffer buf(params.delay_depth(), state.i);
    store(state, 0);
    std::size_t col = 1;
    for (std::size_t step = 1; step <= steps; ++step) {
        state = step_sird(state, params, buf, grid);
        if (step % output_stride == 0 && col < stored) store(state, col++);
    }
    return out;
}

SirdState uniform_sird_state(const Grid& grid, double s0, double i0, double r0, double d0) {
    grid.validate();
    const std::size_t n = grid.nodes();
    SirdState st;
    st.s.assign(n, s0);
    st.i.assign(n, i0);
    st.r.assign(n, r0);
    st.d.assign(n, d0);
    st.refresh_population();
    return st;
}

SirdState default_sird_initial_state(const Grid& grid) {
    grid.validate();
    const std::size_t n = grid.nodes();
    const double lx = static_cast<double>(grid.nx - 1) * grid.hx;
    const double ly = grid.is_1d() ? 0.0 : static_cast<double>(grid.ny - 1) * grid.hy;
    const double wx = std::max(0.15 * lx, grid.hx);
    const double wy = grid.is_1d() ? 1.0 : std::max(0.15 * ly, grid.hy);

    SirdState st;
    st.s.assign(n, 10.0);
    st.i.resize(n);
    st.r.assign(n, 0.0);
    st.d.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = (grid.node_x(k) - 0.5 * lx) / wx;
        const double dy = grid.is_1d() ? 0.0 : (grid.node_y(k) - 0.5 * ly) / wy;
        st.i[k] = 0.5 * std::exp(-0.5 * (dx * dx + dy * dy));
    }
    st.refresh_population();
    return st;
}

} // namespace cdmd
