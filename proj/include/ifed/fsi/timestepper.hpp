#pragma once

#include "ifed/coupling/coupling.hpp"
#include "ifed/fluid/navier_stokes.hpp"
#include "ifed/mechanics/loads.hpp"
#include "ifed/mechanics/material.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <vector>

namespace ifed {

/// Structural model: material, ramped dead-load tractions and penalty tethers.
struct StructureModel
{
    Material material;
    std::vector<TractionLoad> tractions; // scaled by load_ramp(t, ramp_time)
    double ramp_time = 0.0;
    std::vector<SurfaceTether> surface_tethers;
    std::vector<Tether> body_tethers;
};

struct SimulationState
{
    double t = 0.0;
    std::size_t step = 0;
    FEField chi;
    FEField U;
    FEField F;
    FluidState fluid;
};

/// Accumulated wall-clock seconds per phase.
struct PhaseTimings
{
    double assembly = 0.0;      // load vector, tethers, tractions
    double rule_update = 0.0;   // interaction rule and positions
    double projection = 0.0;    // force and velocity projections
    double spreading = 0.0;
    double interpolation = 0.0;
    double fluid = 0.0;

    double coupling() const { return rule_update + projection + spreading + interpolation; }
    double total() const { return assembly + coupling() + fluid; }
};

struct FSIOptions
{
    double dt = 0.0;
    /// Check zeroth and first force moments against the load vector at every
    /// spreading call (relative to the l1 norm of L).
    bool check_conservation = false;
    double conservation_tolerance = 1e-10;
};

namespace detail {

/// Runs fn and adds its wall-clock duration to acc.
template<class Fn>
auto timed(double& acc, Fn&& fn)
{
    struct Guard
    {
        double& acc;
        std::chrono::steady_clock::time_point t0;
        ~Guard() { acc += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
    } guard{acc, std::chrono::steady_clock::now()};
    return fn();
}

} // namespace detail

class FSISolver
{
public:
    FSISolver(const StructuralMesh& mesh, StructureModel model, const NavierStokesSolver& fluid, Coupling::Config coupling,
              FSIOptions options)
        : mesh_(&mesh), model_(std::move(model)), fluid_(&fluid), coupling_(mesh, fluid.grid(), coupling),
          options_(options), load_rule_(consistent_rule(mesh))
    {
        IFED_REQUIRE(options_.dt > 0.0, "time step must be positive");
        model_.material.validate();
    }

    const Coupling& coupling() const noexcept { return coupling_; }
    const PhaseTimings& timings() const noexcept { return timings_; }
    const StructureModel& model() const noexcept { return model_; }
    const FSIOptions& options() const noexcept { return options_; }
    double dt() const noexcept { return options_.dt; }

    SimulationState initial_state() const
    {
        SimulationState s{0.0, 0, FEField::identity(*mesh_), FEField(*mesh_, FieldRole::Velocity),
                          FEField(*mesh_, FieldRole::Force), fluid_->make_state()};
        return s;
    }

    /// Structural load vector at configuration chi with velocity U at time t.
    std::vector<Vec2> assemble_load(const FEField& chi, const FEField& U, double t) const
    {
        std::vector<Vec2> L = model_.material.model == MaterialModel::RigidPenalty
                                  ? std::vector<Vec2>(mesh_->num_nodes())
                                  : assemble_load_vector(chi, model_.material, load_rule_);
        const double ramp = load_ramp(t, model_.ramp_time);
        for (const auto& tr : model_.tractions) add_traction_load(L, *mesh_, tr, ramp);
        for (const auto& st : model_.surface_tethers) add_surface_tether(L, chi, &U, st);
        for (const auto& bt : model_.body_tethers) add_body_tether(L, chi, &U, load_rule_, bt);
        return L;
    }

    /// Midpoint step: spread at chi^n, half fluid step, move to chi^{n+1/2},
    /// re-spread, full fluid step, then advance chi with the midpoint velocity.
    void step(SimulationState& s)
    {
        const double dt = options_.dt;
        fluid_->check_time_step(s.fluid.u, dt);

        // first stage at chi^n
        std::vector<Vec2> L = detail::timed(timings_.assembly, [&] { return assemble_load(s.chi, s.U, s.t); });
        detail::timed(timings_.rule_update, [&] { coupling_.update(s.chi); });
        StaggeredField f = spread(L, s.chi);
        StaggeredField u_half;
        detail::timed(timings_.fluid, [&] { fluid_->stage(s.fluid.u, s.fluid.u, s.fluid.p, &f, 0.5 * dt, s.t + 0.5 * dt, u_half); });
        FEField U_half = velocity(u_half);
        FEField chi_half = advance(s.chi, U_half, 0.5 * dt);

        // second stage at chi^{n+1/2}
        L = detail::timed(timings_.assembly, [&] { return assemble_load(chi_half, U_half, s.t + 0.5 * dt); });
        detail::timed(timings_.rule_update, [&] { coupling_.update(chi_half); });
        f = spread(L, chi_half);
        StaggeredField u_new;
        detail::timed(timings_.fluid, [&] { fluid_->stage(s.fluid.u, u_half, s.fluid.p, &f, dt, s.t + dt, u_new); });

        // midpoint velocity at chi^{n+1/2}
        StaggeredField u_mid = u_new;
        for (int d = 0; d < 2; ++d)
        {
            auto a = u_mid[d].raw();
            const auto b = s.fluid.u[d].raw();
            for (std::size_t k = 0; k < a.size(); ++k) a[k] = 0.5 * (a[k] + b[k]);
        }
        FEField U_mid = velocity(u_mid);
        s.chi = advance(s.chi, U_mid, dt);
        s.U = std::move(U_mid);
        s.F = *last_F_;
        s.fluid.u = std::move(u_new);
        s.t += dt;
        s.fluid.t = s.t;
        ++s.step;
        last_force_ = std::move(f);
        check_state(s);
    }

    /// Force density spread during the last stage of the last step.
    const StaggeredField& last_force() const noexcept { return last_force_; }

    /// The projected structural force from the last spreading call.
    const FEField& last_projected_force() const { return *last_F_; }

private:
    StaggeredField spread(const std::vector<Vec2>& L, const FEField& chi)
    {
        StaggeredField f;
        if (coupling_.scheme() == CouplingScheme::Nodal)
        {
            detail::timed(timings_.spreading, [&] { f = coupling_.spread(L); });
            last_F_.emplace(coupling_.project_force(L)); // diagnostic only: D^-1 L is never spread
        }
        else
        {
            last_F_.emplace(detail::timed(timings_.projection, [&] { return coupling_.project_force(L); }));
            detail::timed(timings_.spreading, [&] { f = coupling_.spread_field(*last_F_); });
        }
        if (options_.check_conservation) check_moments(f, L, chi);
        return f;
    }

    FEField velocity(const StaggeredField& u)
    {
        const std::vector<Vec2> u_ib = detail::timed(timings_.interpolation, [&] { return coupling_.interpolate(u); });
        return detail::timed(timings_.projection, [&] { return coupling_.project_velocity(u_ib); });
    }

    static FEField advance(const FEField& chi, const FEField& U, double h)
    {
        FEField out = chi;
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += h * U[k];
        return out;
    }

    void check_moments(const StaggeredField& f, const std::vector<Vec2>& L, const FEField& chi) const
    {
        const GridMoments m = grid_moments(fluid_->grid(), f);
        Vec2 total;
        double first = 0.0, scale = 0.0, scale1 = 0.0;
        for (std::size_t i = 0; i < L.size(); ++i)
        {
            total += L[i];
            first += dot(chi[i], L[i]);
            scale += std::abs(L[i].x) + std::abs(L[i].y);
            scale1 += std::abs(chi[i].x * L[i].x) + std::abs(chi[i].y * L[i].y);
        }
        const double e0 = norm(m.total - total) / std::max(scale, 1e-300);
        const double e1 = std::abs(m.first - first) / std::max(scale1, 1e-300);
        if (e0 > options_.conservation_tolerance || e1 > options_.conservation_tolerance)
            throw ContractViolation("force moments not conserved by spreading (zeroth " + std::to_string(e0) +
                                    ", first " + std::to_string(e1) + ")");
    }

    void check_state(const SimulationState& s) const
    {
        for (const auto& v : s.chi.values())
            if (!std::isfinite(v.x) || !std::isfinite(v.y))
                throw BlowUpError("non-finite structure position", s.step);
        if (model_.material.model == MaterialModel::RigidPenalty) return;
        for (std::size_t e = 0; e < mesh_->num_elements(); ++e)
            for (const auto& p : load_rule_.element_points(e))
            {
                const Mat2 F = deformation_gradient(s.chi, e, *p.shape, physical_gradients(p));
                if (!(F.det() > 0.0)) throw InvertedElementError(e, F.det());
            }
    }

    const StructuralMesh* mesh_;
    StructureModel model_;
    const NavierStokesSolver* fluid_;
    Coupling coupling_;
    FSIOptions options_;
    MeshQuadrature load_rule_;
    PhaseTimings timings_;
    StaggeredField last_force_;
    std::optional<FEField> last_F_;
};

} // namespace ifed
