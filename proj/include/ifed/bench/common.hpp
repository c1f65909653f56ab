#pragma once

#include "ifed/bench/report.hpp"
#include "ifed/fluid/snapshot.hpp"
#include "ifed/fsi/timestepper.hpp"
#include "ifed/mesh/mesh_generators.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ifed::bench {

struct DiagnosticSample
{
    double t = 0.0;
    double kinetic_energy = 0.0;
    double max_velocity = 0.0;
    double qoi = 0.0;
};

/// Everything a run produces: the report row, a coarse time history and the
/// final fluid state.
struct RunOutput
{
    BenchmarkRow row;
    std::vector<DiagnosticSample> history;
    std::optional<Snapshot> snapshot;
};

/// Coupling-related choices shared by every FSI benchmark.
struct CouplingChoice
{
    CouplingScheme scheme = CouplingScheme::Nodal;
    KernelKind kernel = KernelKind::BSpline3;
    ElementKind element = ElementKind::P1;
    double mfac = 1.0;
    double c_a = 0.5;

    static CouplingChoice read(Parameters& p, ElementKind default_element, double default_mfac)
    {
        CouplingChoice c;
        c.scheme = parse_coupling_scheme(p.text("scheme", "nodal"));
        c.kernel = parse_kernel_kind(p.text("kernel", "bspline3"));
        c.element = parse_element_kind(p.text("element", std::string(to_string(default_element))));
        c.mfac = p.number("mfac", default_mfac);
        c.c_a = p.number("c_a", 0.5);
        IFED_REQUIRE(c.mfac > 0.0, "mfac must be positive");
        return c;
    }

    Coupling::Config config(SupportPolicy policy) const
    {
        Coupling::Config cfg;
        cfg.scheme = scheme;
        cfg.kernel = kernel;
        cfg.c_a = c_a;
        cfg.policy = policy;
        return cfg;
    }

    /// Structural element size for this mesh factor.
    double element_size(double dx) const { return mfac * element_factor(element) * dx; }
};

inline std::size_t step_count(double t_final, double dt)
{
    if (t_final <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

/// Number of elements of size close to h along a length.
inline int divisions(double length, double h) { return std::max(1, static_cast<int>(std::lround(length / h))); }

inline double kinetic_energy(const MACGrid& g, const StaggeredField& u, double rho)
{
    double e = 0.0;
    for (int d = 0; d < 2; ++d)
        for (int j = 0; j < g.face_ny(d); ++j)
            for (int i = 0; i < g.face_nx(d); ++i) e += u[d](i, j) * u[d](i, j);
    return 0.5 * rho * e * g.dx * g.dx;
}

/// Velocity error over the faces whose location satisfies `in_region`, pooled
/// over both components. Norms are normalized by the sampled area so they are
/// comparable across grids: l1 is the mean, l2 the root mean square.
template <class Exact, class Region>
ErrorNorms velocity_error(const MACGrid& g, const StaggeredField& u, const Exact& exact, const Region& in_region)
{
    ErrorNorms n;
    double weight = 0.0;
    for (int d = 0; d < 2; ++d)
        for (int j = 0; j < g.face_ny(d); ++j)
            for (int i = 0; i < g.face_nx(d); ++i)
            {
                const Vec2 x = g.face_center(d, i, j);
                if (!in_region(x)) continue;
                const Vec2 ue = exact(x);
                const double e = std::abs(u[d](i, j) - (d == 0 ? ue.x : ue.y));
                n.l1 += e;
                n.l2 += e * e;
                n.linf = std::max(n.linf, e);
                weight += 1.0;
            }
    IFED_REQUIRE(weight > 0.0, "error region contains no faces");
    n.l1 /= weight;
    n.l2 = std::sqrt(n.l2 / weight);
    return n;
}

/// Common fields of a row for an FSI run.
inline void describe_run(BenchmarkRow& row, const std::string& name, const CouplingChoice& c, const MACGrid& g,
                         double dt, const StructuralMesh& mesh)
{
    row.benchmark = name;
    row.scheme = std::string(to_string(c.scheme));
    row.kernel = std::string(to_string(c.kernel));
    row.element = std::string(to_string(c.element));
    row.mfac = c.mfac;
    row.nx = g.nx;
    row.ny = g.ny;
    row.dx = g.dx;
    row.dt = dt;
    row.dofs = mesh.num_nodes();
    row.elements = mesh.num_elements();
}

/// Advances `steps` steps, sampling diagnostics every `every` steps and at the end.
inline void advance_fsi(FSISolver& fsi, SimulationState& s, std::size_t steps, std::size_t every, double rho,
                        const std::function<double(const SimulationState&)>& qoi, std::vector<DiagnosticSample>& history,
                        const std::function<void(const SimulationState&)>& each_step = {})
{
    const MACGrid& g = fsi.coupling().grid();
    auto sample = [&] {
        history.push_back({s.t, kinetic_energy(g, s.fluid.u, rho), s.fluid.u.max_abs(), qoi ? qoi(s) : 0.0});
    };
    sample();
    for (std::size_t k = 0; k < steps; ++k)
    {
        fsi.step(s);
        if (each_step) each_step(s);
        if (every > 0 && (k + 1) % every == 0 && k + 1 != steps) sample();
    }
    if (steps > 0) sample();
}

inline void finish_fsi_row(BenchmarkRow& row, const FSISolver& fsi, const SimulationState& s)
{
    row.steps = s.step;
    row.t_final = s.t;
    row.interaction_points = fsi.coupling().positions().size();
    row.timings = fsi.timings();
    row.mass_solves = fsi.coupling().mass().solve_count();
    row.mass_iterations = fsi.coupling().mass().iteration_count();
}

inline void write_history_csv(const std::string& path, const std::vector<DiagnosticSample>& history)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "schema,t,kinetic_energy,max_velocity,qoi\n";
    for (const auto& h : history)
        detail::csv_line(out, csv_schema, format_number(h.t), format_number(h.kinetic_energy),
                         format_number(h.max_velocity), format_number(h.qoi));
    if (!out) throw Error("write to '" + path + "' failed");
}

inline std::size_t nearest_node(const StructuralMesh& mesh, const Vec2& X)
{
    std::size_t best = 0;
    for (std::size_t k = 1; k < mesh.num_nodes(); ++k)
        if (norm(mesh.node(k) - X) < norm(mesh.node(best) - X)) best = k;
    return best;
}

} // namespace ifed::bench
