#pragma once

#include "ifed/bench/common.hpp"

#include <numbers>

namespace ifed::bench {

/// Slanted channel between two rigid, tethered plates with the rotated plane
/// Poiseuille profile imposed at inlet and outlet.
struct ChannelFlowSetup
{
    double length = 6.0;   // domain [0, L]^2
    double width = 1.0;    // lumen width D
    double wall = 0.24;    // plate thickness w
    double angle = std::numbers::pi / 18.0;
    double p0 = 0.2;
    double rho = 1.0;
    double mu = 0.01;
    int n = 64;
    double dt_factor = 0.05; // dt = dt_factor * dx
    double t_final = 40.0;
    double kappa_factor = 0.1; // kappa_B = kappa_factor * dx / dt^2
    double eta_factor = 0.1;   // eta_B = eta_factor * rho / dt
    int exclude_cells = 2;
    double upwind_blend = 0.25;

    static ChannelFlowSetup read(Parameters& p)
    {
        ChannelFlowSetup s;
        s.length = p.number("length", s.length);
        s.width = p.number("width", s.width);
        s.wall = p.number("wall_thickness", s.wall);
        s.angle = p.number("angle", s.angle);
        s.p0 = p.number("p0", s.p0);
        s.rho = p.number("rho", s.rho);
        s.mu = p.number("mu", s.mu);
        s.n = p.integer("n", s.n);
        s.dt_factor = p.number("dt_factor", s.dt_factor);
        s.t_final = p.number("t_final", s.t_final);
        s.kappa_factor = p.number("kappa_b_factor", s.kappa_factor);
        s.eta_factor = p.number("eta_b_factor", s.eta_factor);
        s.exclude_cells = p.integer("exclude_cells", s.exclude_cells);
        s.upwind_blend = p.number("upwind_blend", s.upwind_blend);
        IFED_REQUIRE(s.n > 0 && s.dt_factor > 0.0 && s.t_final >= 0.0, "invalid channel parameters");
        return s;
    }

    /// Pressure gradient between inlet and outlet.
    double gradient() const { return 2.0 * p0 / (length / std::cos(angle) + width * std::tan(angle)); }

    /// Height of the lower plate's inner wall at x = 0, chosen so the lumen
    /// centerline passes through the domain center.
    double y0() const
    {
        const double c = std::cos(angle), s = std::sin(angle), h = 0.5 * length;
        return h - h * s / c - 0.5 * width / c;
    }

    double eta(const Vec2& x) const { return -x.x * std::sin(angle) + (x.y - y0()) * std::cos(angle); }

    /// Analytic velocity; zero outside the lumen.
    Vec2 exact(const Vec2& x) const
    {
        const double e = eta(x);
        if (e < 0.0 || e > width) return {};
        const double speed = gradient() * width / (2.0 * mu) * e * (1.0 - e / width);
        return speed * Vec2{std::cos(angle), std::sin(angle)};
    }
};

namespace detail {

/// Plate occupying eta in [lo, hi] over x in [0, L], as a sheared block.
inline StructuralMesh channel_plate(const ChannelFlowSetup& s, double lo, double hi, int nx, int ny, ElementKind kind)
{
    const double c = std::cos(s.angle), sn = std::sin(s.angle), y0 = s.y0();
    auto at = [&](double x, double e) { return Vec2{x, y0 + (e + x * sn) / c}; };
    return generate_patch_mesh({at(0, lo), at(s.length, lo), at(s.length, hi), at(0, hi)}, nx, ny, kind);
}

inline BoundarySpec channel_boundaries(std::function<Vec2(const Vec2&)> profile)
{
    BoundarySpec bc = BoundarySpec::no_slip_box();
    auto fn = [profile](const Vec2& x, double) { return profile(x); };
    bc[Side::Left] = SideCondition::prescribed(fn);
    bc[Side::Right] = SideCondition::prescribed(fn);
    return bc;
}

inline void set_velocity(const MACGrid& g, StaggeredField& u, const std::function<Vec2(const Vec2&)>& fn)
{
    for (int d = 0; d < 2; ++d)
        for (int j = 0; j < g.face_ny(d); ++j)
            for (int i = 0; i < g.face_nx(d); ++i)
            {
                const Vec2 v = fn(g.face_center(d, i, j));
                u[d](i, j) = d == 0 ? v.x : v.y;
            }
}

/// Fluid-only control: a grid-aligned channel of width D whose walls are the
/// domain boundary, at nearly the same spacing. Its error is the fluid
/// discretization floor for this resolution.
inline RunOutput run_channel_control(const ChannelFlowSetup& s, Parameters& p)
{
    const double dx_target = s.length / s.n;
    const int ny = std::max(4, static_cast<int>(std::lround(s.width / dx_target)));
    const double dx = s.width / ny;
    const int nx = std::max(1, static_cast<int>(std::lround(s.length / dx)));
    const MACGrid g(nx, ny, dx);
    const double G = s.gradient(), D = s.width, mu = s.mu;
    auto profile = [=](const Vec2& x) {
        const double e = std::clamp(x.y, 0.0, D);
        return Vec2{G * D / (2 * mu) * e * (1 - e / D), 0.0};
    };
    NavierStokesSolver fluid(g, channel_boundaries(profile), {s.rho, s.mu, s.upwind_blend});
    FluidState st = fluid.make_state();
    set_velocity(g, st.u, profile);
    const double dt = s.dt_factor * dx;
    const std::size_t steps = step_count(s.t_final, dt);
    for (std::size_t k = 0; k < steps; ++k) fluid.step(st, nullptr, dt);

    RunOutput out;
    BenchmarkRow& row = out.row;
    row.benchmark = "channel_flow";
    row.scheme = "none";
    row.n = s.n;
    row.nx = nx;
    row.ny = ny;
    row.dx = dx;
    row.dt = dt;
    row.steps = steps;
    row.t_final = st.t;
    const double margin = s.exclude_cells * dx;
    row.error = velocity_error(g, st.u, profile, [&](const Vec2& x) { return x.y >= margin && x.y <= D - margin; });
    row.config = p.canonical();
    out.snapshot = Snapshot{g, st.t, st.u, st.p};
    return out;
}

} // namespace detail

/// Runs the channel benchmark; scheme "none" gives the fluid-only control.
inline RunOutput run_channel_flow(Parameters p)
{
    const ChannelFlowSetup s = ChannelFlowSetup::read(p);
    const int every = p.integer("output_every", 0);
    if (p.has("scheme") && p.text("scheme", "") == "none")
    {
        p.require_all_used();
        return detail::run_channel_control(s, p);
    }
    const CouplingChoice c = CouplingChoice::read(p, ElementKind::P1, 1.0);
    p.require_all_used();

    const double dx = s.length / s.n;
    const MACGrid g(s.n, s.n, dx);
    const double dt = s.dt_factor * dx;
    auto exact = [&s](const Vec2& x) { return s.exact(x); };
    NavierStokesSolver fluid(g, detail::channel_boundaries(exact), {s.rho, s.mu, s.upwind_blend});

    const double h = c.element_size(dx);
    const int nx = divisions(s.length, h), ny = divisions(s.wall, h);
    const StructuralMesh mesh = merge_meshes(detail::channel_plate(s, -s.wall, 0.0, nx, ny, c.element),
                                             detail::channel_plate(s, s.width, s.width + s.wall, nx, ny, c.element));

    StructureModel model{{MaterialModel::RigidPenalty}};
    model.body_tethers.push_back(Tether{s.kappa_factor * dx / (dt * dt), s.eta_factor * s.rho / dt});
    // the plates end on the inlet and outlet, where the kernel is cut off
    FSISolver fsi(mesh, model, fluid, c.config(SupportPolicy::Truncate), {dt});
    SimulationState st = fsi.initial_state();
    detail::set_velocity(g, st.fluid.u, exact);

    RunOutput out;
    const std::size_t steps = step_count(s.t_final, dt);
    advance_fsi(fsi, st, steps, every > 0 ? every : std::max<std::size_t>(1, steps / 100), s.rho, {}, out.history);

    BenchmarkRow& row = out.row;
    describe_run(row, "channel_flow", c, g, dt, mesh);
    row.n = s.n;
    finish_fsi_row(row, fsi, st);
    const double margin = s.exclude_cells * dx;
    row.error = velocity_error(g, st.fluid.u, exact, [&](const Vec2& x) {
        const double e = s.eta(x);
        return e >= margin && e <= s.width - margin;
    });
    row.config = p.canonical();
    out.snapshot = Snapshot{g, st.t, st.fluid.u, st.fluid.p};
    return out;
}

} // namespace ifed::bench
