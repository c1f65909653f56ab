#pragma once

#include "ifed/bench/common.hpp"

#include <algorithm>

namespace ifed::bench {

/// Shared physics and numerics of the quasi-static benchmarks: a solid immersed
/// in a closed box, loaded by a ramped traction and held by penalty tethers.
struct QuasiStaticSetup
{
    double domain = 40.0;
    double rho = 1.0;
    double mu = 0.16;
    double shear_modulus = 0.0;
    double bulk_modulus = 0.0;
    double load_time = 0.0;
    double final_time = 0.0;
    double traction = 0.0;
    double dt_factor = 0.001;    // dt = dt_factor * dx
    double kappa_factor = 0.0;   // kappa_S = kappa_factor * dx / dt
    double eta_s = 0.0;
    double eta_body = 0.0;        // body damping, vanishes at rest
    double average_window = 0.05; // QoI averaged over this final fraction of time
    int elements = 8;             // M
    double upwind_blend = 0.25;

    void read(Parameters& p)
    {
        domain = p.number("domain", domain);
        rho = p.number("rho", rho);
        mu = p.number("mu", mu);
        shear_modulus = p.number("shear_modulus", shear_modulus);
        bulk_modulus = p.number("bulk_modulus", bulk_modulus);
        load_time = p.number("load_time", load_time);
        final_time = p.number("t_final", final_time);
        traction = p.number("traction", traction);
        dt_factor = p.number("dt_factor", dt_factor);
        kappa_factor = p.number("kappa_s_factor", kappa_factor);
        eta_s = p.number("eta_s", eta_s);
        eta_body = p.number("eta_b", eta_body);
        average_window = p.number("average_window", average_window);
        elements = p.integer("elements", elements);
        upwind_blend = p.number("upwind_blend", upwind_blend);
        IFED_REQUIRE(elements >= 1, "elements must be at least 1");
        IFED_REQUIRE(load_time <= final_time, "load time must not exceed the final time");
        IFED_REQUIRE(average_window > 0.0 && average_window <= 1.0, "average_window must be in (0, 1]");
    }
};

/// Grid size N = ceil(ratio * M * E_FAC * M_FAC), guarded against round-off in the product.
inline int static_grid_size(double ratio, int elements, ElementKind kind, double mfac)
{
    return std::max(1, static_cast<int>(std::ceil(ratio * elements * element_factor(kind) * mfac - 1e-9)));
}

namespace detail {

struct QuasiStaticProblem
{
    StructuralMesh mesh;
    StructureModel model;
    std::size_t qoi_node = 0;
};

/// Runs a prepared problem to the final time and reports the y-displacement of
/// the QoI node averaged over the final window.
inline RunOutput run_quasi_static(const std::string& name, const QuasiStaticSetup& s, const CouplingChoice& c,
                                  const MACGrid& g, QuasiStaticProblem prob, Parameters& p, int every)
{
    const double dt = s.dt_factor * g.dx;
    if (s.eta_body > 0.0) prob.model.body_tethers.push_back(Tether{0.0, s.eta_body});
    NavierStokesSolver fluid(g, BoundarySpec::no_slip_box(), {s.rho, s.mu, s.upwind_blend});
    FSISolver fsi(prob.mesh, prob.model, fluid, c.config(SupportPolicy::Strict), {dt});
    SimulationState st = fsi.initial_state();
    const StructuralMesh& mesh = prob.mesh;
    const std::size_t node = prob.qoi_node;
    auto qoi = [&](const SimulationState& x) { return x.chi[node].y - mesh.node(node).y; };

    const std::size_t steps = step_count(s.final_time, dt);
    const double window_start = (1.0 - s.average_window) * steps * dt;
    double sum = 0.0;
    std::size_t count = 0;
    RunOutput out;
    advance_fsi(fsi, st, steps, every > 0 ? every : std::max<std::size_t>(1, steps / 100), s.rho, qoi, out.history,
                [&](const SimulationState& x) {
                    if (x.t < window_start - 1e-12 * dt) return;
                    sum += qoi(x);
                    ++count;
                });

    BenchmarkRow& row = out.row;
    describe_run(row, name, c, g, dt, mesh);
    row.n = g.nx;
    finish_fsi_row(row, fsi, st);
    row.qoi = count > 0 ? sum / count : qoi(st);
    row.config = p.canonical();
    out.snapshot = Snapshot{g, st.t, st.fluid.u, st.fluid.p};
    return out;
}

} // namespace detail

/// Plane strain block (width 2H x height H) compressed by a downward traction on
/// the central half of its top face; bottom held vertically, top horizontally.
/// QoI: y-displacement at the center of the top face.
inline RunOutput run_compressed_block(Parameters p)
{
    QuasiStaticSetup s;
    s.domain = 40.0;
    s.shear_modulus = 80.194;
    s.bulk_modulus = 374.239;
    s.load_time = 40.0;
    s.final_time = 100.0;
    s.traction = 40.0;
    s.kappa_factor = 2.5;
    s.read(p);
    const double width = p.number("block_width", 20.0);
    const double height = p.number("block_height", 10.0);
    const double loaded = p.number("loaded_width", 10.0);
    const CouplingChoice c = CouplingChoice::read(p, ElementKind::Q1, 1.0);
    const int every = p.integer("output_every", 0);
    p.require_all_used();

    const int M = s.elements;
    const int n = static_grid_size(s.domain / std::max(width, height), M, c.element, c.mfac);
    const MACGrid g(n, n, s.domain / n);
    const double dt = s.dt_factor * g.dx;

    const Vec2 origin{0.5 * (s.domain - width), 0.5 * (s.domain - height)};
    const int ny = std::max(1, static_cast<int>(std::lround(M * height / width)));
    const double eps = 1e-9 * width;
    constexpr int loaded_top = 5;
    const StructuralMesh mesh =
        generate_block_mesh(width, height, M, ny, c.element, origin).with_markers([&](const Vec2& m) {
            const Vec2 r = m - origin;
            if (r.y < eps) return int(bottom_side);
            if (r.y > height - eps)
                return std::abs(r.x - 0.5 * width) < 0.5 * loaded ? loaded_top : int(top_side);
            if (r.x < eps) return int(left_side);
            if (r.x > width - eps) return int(right_side);
            return int(interior_marker);
        });

    const auto loaded_facets = std::count_if(mesh.boundary_facets().begin(), mesh.boundary_facets().end(),
                                             [](const BoundaryFacet& f) { return f.marker == loaded_top; });
    if (loaded_facets == 0)
        throw UnsupportedConfiguration("no top facet lies inside the loaded width; use more elements (M divisible by 4)");

    detail::QuasiStaticProblem prob{mesh, {{MaterialModel::ModifiedNeoHookean, s.shear_modulus, s.bulk_modulus}}, 0};
    prob.model.tractions.push_back({loaded_top, {0.0, -s.traction}});
    prob.model.ramp_time = s.load_time;
    const double kappa = s.kappa_factor * g.dx / dt;
    SurfaceTether bottom;
    bottom.kappa = kappa;
    bottom.eta = s.eta_s;
    bottom.mask_x = false;
    bottom.marker = bottom_side;
    prob.model.surface_tethers.push_back(bottom);
    for (int marker : {int(top_side), loaded_top})
    {
        SurfaceTether top;
        top.kappa = kappa;
        top.eta = s.eta_s;
        top.mask_y = false;
        top.marker = marker;
        prob.model.surface_tethers.push_back(top);
    }
    prob.qoi_node = nearest_node(mesh, origin + Vec2{0.5 * width, height});
    return detail::run_quasi_static("compressed_block", s, c, g, std::move(prob), p, every);
}

/// Cook's membrane: tapered panel clamped on the left, sheared upward on the
/// right. QoI: y-displacement of the upper right corner.
inline RunOutput run_cooks_membrane(Parameters p)
{
    QuasiStaticSetup s;
    s.domain = 10.0;
    s.shear_modulus = 83.333;
    s.bulk_modulus = 388.889;
    s.load_time = 20.0;
    s.final_time = 50.0;
    s.traction = 2.5;
    s.kappa_factor = 0.125;
    s.read(p);
    const double longest = p.number("longest_side", 6.5);
    const CouplingChoice c = CouplingChoice::read(p, ElementKind::Q1, 1.0);
    const int every = p.integer("output_every", 0);
    p.require_all_used();

    const int M = s.elements;
    const int n = static_grid_size(s.domain / longest, M, c.element, c.mfac);
    const MACGrid g(n, n, s.domain / n);
    const double dt = s.dt_factor * g.dx;

    const auto unit = cooks_membrane_corners(longest);
    const Vec2 extent{unit[1].x, unit[2].y};
    const Vec2 origin = 0.5 * (Vec2{s.domain, s.domain} - extent);
    const StructuralMesh mesh = generate_cooks_membrane(M, M, c.element, longest, origin);

    detail::QuasiStaticProblem prob{mesh, {{MaterialModel::ModifiedNeoHookean, s.shear_modulus, s.bulk_modulus}}, 0};
    prob.model.tractions.push_back({right_side, {0.0, s.traction}});
    prob.model.ramp_time = s.load_time;
    SurfaceTether clamp;
    clamp.kappa = s.kappa_factor * g.dx / dt;
    clamp.eta = s.eta_s;
    clamp.marker = left_side;
    prob.model.surface_tethers.push_back(clamp);
    prob.qoi_node = nearest_node(mesh, origin + unit[2]);
    return detail::run_quasi_static("cooks_membrane", s, c, g, std::move(prob), p, every);
}

} // namespace ifed::bench
