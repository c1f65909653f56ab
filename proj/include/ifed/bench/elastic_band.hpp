#pragma once

#include "ifed/bench/common.hpp"

namespace ifed::bench {

/// Vertical elastic band spanning a 2L x L channel, loaded by the pressure
/// difference between traction-driven left and right sides. The steady state
/// is at rest, so the velocity itself is the error.
struct ElasticBandSetup
{
    double length = 1.0; // L; domain [0, 2L] x [0, L]
    double thickness = 0.25;
    double traction = 5.0; // |h|
    double rho = 1.0;
    double mu = 0.01;
    double shear_modulus = 100.0;
    double bulk_modulus = 500.0;
    int n = 64; // cells across L
    double dt_factor = 0.02;
    double t_final = 5.0;
    double eta_body = 20.0;     // body damping, vanishes at rest
    double kappa_factor = 0.05; // end anchors: kappa_S = kappa_factor * dx / dt^2
    double upwind_blend = 0.25;

    static ElasticBandSetup read(Parameters& p)
    {
        ElasticBandSetup s;
        s.length = p.number("length", s.length);
        s.thickness = p.number("thickness", s.thickness);
        s.traction = p.number("traction", s.traction);
        s.rho = p.number("rho", s.rho);
        s.mu = p.number("mu", s.mu);
        s.shear_modulus = p.number("shear_modulus", s.shear_modulus);
        s.bulk_modulus = p.number("bulk_modulus", s.bulk_modulus);
        s.n = p.integer("n", s.n);
        s.dt_factor = p.number("dt_factor", s.dt_factor);
        s.t_final = p.number("t_final", s.t_final);
        s.eta_body = p.number("eta_b", s.eta_body);
        s.kappa_factor = p.number("kappa_s_factor", s.kappa_factor);
        s.upwind_blend = p.number("upwind_blend", s.upwind_blend);
        IFED_REQUIRE(s.n > 0 && s.dt_factor > 0.0 && s.t_final >= 0.0, "invalid elastic band parameters");
        return s;
    }
};

inline RunOutput run_elastic_band(Parameters p)
{
    const ElasticBandSetup s = ElasticBandSetup::read(p);
    const CouplingChoice c = CouplingChoice::read(p, ElementKind::P2, 1.0);
    const int every = p.integer("output_every", 0);
    p.require_all_used();

    const double dx = s.length / s.n;
    const MACGrid g(2 * s.n, s.n, dx);
    const double dt = s.dt_factor * dx;
    BoundarySpec bc = BoundarySpec::no_slip_box();
    // sigma n = -h on the left and +h on the right, with n = +x on both
    bc[Side::Left] = SideCondition::traction(-s.traction);
    bc[Side::Right] = SideCondition::traction(s.traction);
    NavierStokesSolver fluid(g, bc, {s.rho, s.mu, s.upwind_blend});

    const double h = c.element_size(dx);
    const StructuralMesh mesh = generate_block_mesh(s.thickness, s.length, divisions(s.thickness, h),
                                                    divisions(s.length, h), c.element,
                                                    {s.length - 0.5 * s.thickness, 0.0});
    StructureModel model{{MaterialModel::IncompressibleNeoHookean, s.shear_modulus, s.bulk_modulus}};
    const double kappa = s.kappa_factor * dx / (dt * dt);
    for (int marker : {bottom_side, top_side})
    {
        SurfaceTether anchor;
        anchor.kappa = kappa;
        anchor.marker = marker;
        model.surface_tethers.push_back(anchor);
    }
    if (s.eta_body > 0.0) model.body_tethers.push_back(Tether{0.0, s.eta_body});

    // the band ends touch the walls, where the kernel is cut off
    FSISolver fsi(mesh, model, fluid, c.config(SupportPolicy::Truncate), {dt});
    SimulationState st = fsi.initial_state();
    const std::size_t mid = nearest_node(mesh, {s.length, 0.5 * s.length});
    auto qoi = [&](const SimulationState& x) { return x.chi[mid].x - mesh.node(mid).x; };

    RunOutput out;
    const std::size_t steps = step_count(s.t_final, dt);
    advance_fsi(fsi, st, steps, every > 0 ? every : std::max<std::size_t>(1, steps / 100), s.rho, qoi, out.history);

    BenchmarkRow& row = out.row;
    describe_run(row, "elastic_band", c, g, dt, mesh);
    row.n = s.n;
    finish_fsi_row(row, fsi, st);
    row.error = velocity_error(g, st.fluid.u, [](const Vec2&) { return Vec2{}; }, [](const Vec2&) { return true; });
    row.qoi = qoi(st);
    row.config = p.canonical();
    out.snapshot = Snapshot{g, st.t, st.fluid.u, st.fluid.p};
    return out;
}

} // namespace ifed::bench
