#pragma once

#include "ifed/fluid/mac_grid.hpp"
#include "ifed/fluid/poisson.hpp"

#include <cmath>
#include <memory>
#include <vector>

namespace ifed {

struct FluidParameters
{
    double rho = 1.0;
    double mu = 0.01;
    /// Fraction of first-order upwinding mixed into the advective derivative
    /// where the cell Peclet number exceeds 2 (0 = purely centered).
    double upwind_blend = 0.25;
    PoissonBackend poisson = PoissonBackend::FFT;
};

struct FluidState
{
    StaggeredField u;
    CellField p;
    double t = 0.0;
};

/// Incompressible Navier-Stokes on a MAC grid.
///
/// Time stepping: explicit midpoint (RK2) for advection, viscosity and forcing,
/// with an incremental pressure projection at the end of each stage. Boundary
/// faces with prescribed normal velocity are not unknowns; on traction sides the
/// normal face is updated and the pressure takes the Dirichlet value -sigma_nn
/// (exact when the tangential velocity vanishes, since then du_n/dn = 0).
class NavierStokesSolver
{
public:
    NavierStokesSolver(const MACGrid& grid, BoundarySpec bc, FluidParameters params)
        : grid_(grid), bc_(std::move(bc)), params_(params)
    {
        IFED_REQUIRE(params_.rho > 0.0 && params_.mu >= 0.0, "density must be positive, viscosity non-negative");
        PoissonBoundary pb;
        for (Side s : all_sides) pb.dirichlet[static_cast<int>(s)] = bc_[s].type == BoundaryType::Traction;
        poisson_ = std::make_unique<PoissonSolver>(grid_, pb, params_.poisson);
    }

    const MACGrid& grid() const noexcept { return grid_; }
    const BoundarySpec& boundary() const noexcept { return bc_; }
    const FluidParameters& parameters() const noexcept { return params_; }
    int poisson_iterations() const noexcept { return poisson_->last_iterations(); }

    FluidState make_state(double t = 0.0) const
    {
        FluidState s{StaggeredField(grid_), make_cell_field(grid_), t};
        apply_boundary_conditions(s.u, t);
        fill_pressure_ghosts(s.p);
        return s;
    }

    /// Index range [lo, hi] of unknown faces of component d along its normal axis.
    std::pair<int, int> unknown_range(int d) const
    {
        const Side lo = d == 0 ? Side::Left : Side::Bottom;
        const Side hi = d == 0 ? Side::Right : Side::Top;
        const int n = d == 0 ? grid_.nx : grid_.ny;
        return {bc_[lo].type == BoundaryType::Traction ? 0 : 1, bc_[hi].type == BoundaryType::Traction ? n : n - 1};
    }

    /// Sets prescribed boundary faces and fills all ghost layers of u at time t.
    void apply_boundary_conditions(StaggeredField& u, double t) const
    {
        const int G = u[0].ghost();
        const double dx = grid_.dx;
        const int nx = grid_.nx, ny = grid_.ny;
        // x-sides: left (i = 0 face) and right (i = nx face)
        for (int side = 0; side < 2; ++side)
        {
            const SideCondition& c = bc_[side == 0 ? Side::Left : Side::Right];
            const int fb = side == 0 ? 0 : nx;       // boundary face index of u
            const int dir = side == 0 ? -1 : 1;      // outward index direction
            const double xb = side == 0 ? grid_.origin.x : grid_.upper().x;
            for (int j = 0; j < ny; ++j)
            {
                const double y = grid_.origin.y + (j + 0.5) * dx;
                if (c.type == BoundaryType::Velocity)
                {
                    const double g = c.value({xb, y}, t).x;
                    u[0](fb, j) = g;
                    for (int k = 1; k <= G; ++k) u[0](fb + dir * k, j) = 2.0 * g - u[0](fb - dir * k, j);
                }
                else
                    for (int k = 1; k <= G; ++k) u[0](fb + dir * k, j) = u[0](fb - dir * k, j);
            }
            // tangential v: ghost cells i = -k (left) or nx - 1 + k (right)
            const int ci = side == 0 ? 0 : nx - 1;
            for (int j = 0; j <= ny; ++j)
            {
                const double y = grid_.origin.y + j * dx;
                const double g = c.type == BoundaryType::Velocity ? c.value({xb, y}, t).y : 0.0;
                for (int k = 1; k <= G; ++k) u[1](ci + dir * k, j) = 2.0 * g - u[1](ci - dir * (k - 1), j);
            }
        }
        // y-sides over the extended x range so corner ghosts are defined
        for (int side = 0; side < 2; ++side)
        {
            const SideCondition& c = bc_[side == 0 ? Side::Bottom : Side::Top];
            const int fb = side == 0 ? 0 : ny;
            const int dir = side == 0 ? -1 : 1;
            const double yb = side == 0 ? grid_.origin.y : grid_.upper().y;
            for (int i = -G; i < nx + G; ++i)
            {
                const double x = grid_.origin.x + (i + 0.5) * dx;
                if (c.type == BoundaryType::Velocity)
                {
                    const double g = c.value({x, yb}, t).y;
                    if (i >= 0 && i < nx) u[1](i, fb) = g;
                    for (int k = 1; k <= G; ++k) u[1](i, fb + dir * k) = 2.0 * g - u[1](i, fb - dir * k);
                }
                else
                    for (int k = 1; k <= G; ++k) u[1](i, fb + dir * k) = u[1](i, fb - dir * k);
            }
            const int cj = side == 0 ? 0 : ny - 1;
            for (int i = -G; i <= nx + G; ++i)
            {
                const double x = grid_.origin.x + i * dx;
                const double g = c.type == BoundaryType::Velocity ? c.value({x, yb}, t).x : 0.0;
                for (int k = 1; k <= G; ++k) u[0](i, cj + dir * k) = 2.0 * g - u[0](i, cj - dir * (k - 1));
            }
        }
    }

    /// Pressure ghosts: Neumann on velocity sides, Dirichlet -sigma_nn on traction sides.
    void fill_pressure_ghosts(CellField& p) const
    {
        const int G = p.ghost();
        const int nx = grid_.nx, ny = grid_.ny;
        for (int side = 0; side < 2; ++side)
        {
            const SideCondition& c = bc_[side == 0 ? Side::Left : Side::Right];
            const int ci = side == 0 ? 0 : nx - 1;
            const int dir = side == 0 ? -1 : 1;
            for (int j = 0; j < ny; ++j)
                for (int k = 1; k <= G; ++k)
                {
                    const double inner = p(ci - dir * (k - 1), j);
                    p(ci + dir * k, j) = c.type == BoundaryType::Traction ? 2.0 * (-c.normal_traction) - inner : inner;
                }
        }
        for (int side = 0; side < 2; ++side)
        {
            const SideCondition& c = bc_[side == 0 ? Side::Bottom : Side::Top];
            const int cj = side == 0 ? 0 : ny - 1;
            const int dir = side == 0 ? -1 : 1;
            for (int i = -G; i < nx + G; ++i)
                for (int k = 1; k <= G; ++k)
                {
                    const double inner = p(i, cj - dir * (k - 1));
                    p(i, cj + dir * k) = c.type == BoundaryType::Traction ? 2.0 * (-c.normal_traction) - inner : inner;
                }
        }
    }

    /// MAC divergence per cell (boundary faces included as stored).
    CellField divergence(const StaggeredField& u) const
    {
        CellField div = make_cell_field(grid_);
        const double s = 1.0 / grid_.dx;
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i)
                div(i, j) = s * (u[0](i + 1, j) - u[0](i, j) + u[1](i, j + 1) - u[1](i, j));
        return div;
    }

    /// MAC gradient of a ghost-filled cell field on the unknown faces; other faces are zero.
    StaggeredField gradient(const CellField& p) const
    {
        StaggeredField g(grid_);
        const double s = 1.0 / grid_.dx;
        const auto [i0, i1] = unknown_range(0);
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = i0; i <= i1; ++i) g[0](i, j) = s * (p(i, j) - p(i - 1, j));
        const auto [j0, j1] = unknown_range(1);
        for (int j = j0; j <= j1; ++j)
            for (int i = 0; i < grid_.nx; ++i) g[1](i, j) = s * (p(i, j) - p(i, j - 1));
        return g;
    }

    /// Removes the discrete divergence: u -= (dt / rho) grad phi with
    /// D G phi = (rho / dt) D u, and p += phi. Pass dt = rho = 1 for a plain
    /// projection.
    void project(StaggeredField& u, CellField& p, double dt, double t) const
    {
        const int nx = grid_.nx, ny = grid_.ny;
        const double scale = params_.rho / dt;
        const CellField div = divergence(u);
        std::vector<double> rhs(static_cast<std::size_t>(nx) * ny), phi;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) rhs[static_cast<std::size_t>(j) * nx + i] = scale * div(i, j);
        poisson_->solve(rhs, phi);

        CellField ph = make_cell_field(grid_);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) ph(i, j) = phi[static_cast<std::size_t>(j) * nx + i];
        fill_increment_ghosts(ph);

        const double g = dt / (params_.rho * grid_.dx);
        const auto [ux0, ux1] = unknown_range(0);
        for (int j = 0; j < ny; ++j)
            for (int i = ux0; i <= ux1; ++i) u[0](i, j) -= g * (ph(i, j) - ph(i - 1, j));
        const auto [vy0, vy1] = unknown_range(1);
        for (int j = vy0; j <= vy1; ++j)
            for (int i = 0; i < nx; ++i) u[1](i, j) -= g * (ph(i, j) - ph(i, j - 1));
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) p(i, j) += ph(i, j);
        apply_boundary_conditions(u, t);
        fill_pressure_ghosts(p);
    }

    /// Right-hand side of rho du/dt = -rho (u . grad) u + mu lap u - grad p + f,
    /// divided by rho, at unknown faces. `u` and `p` must have ghosts filled.
    void momentum_rhs(const StaggeredField& u, const CellField& p, const StaggeredField* f, StaggeredField& out) const
    {
        const double dx = grid_.dx, inv_dx = 1.0 / dx, inv_dx2 = inv_dx * inv_dx;
        const double nu = params_.mu / params_.rho, inv_rho = 1.0 / params_.rho;
        const double blend = params_.upwind_blend;
        auto derivative = [&](double a, double m, double c, double pl) {
            const double central = 0.5 * (pl - m) * inv_dx;
            if (blend <= 0.0) return central;
            const double pe = std::abs(a) * dx / std::max(nu, 1e-300);
            if (pe <= 2.0) return central;
            const double upwind = (a > 0 ? (c - m) : (pl - c)) * inv_dx;
            const double beta = blend * (1.0 - 2.0 / pe);
            return (1.0 - beta) * central + beta * upwind;
        };
        out = StaggeredField(grid_, u[0].ghost());
        const GridArray& U = u[0];
        const GridArray& V = u[1];
        {
            const auto [i0, i1] = unknown_range(0);
            for (int j = 0; j < grid_.ny; ++j)
                for (int i = i0; i <= i1; ++i)
                {
                    const double c = U(i, j);
                    const double vbar = 0.25 * (V(i - 1, j) + V(i, j) + V(i - 1, j + 1) + V(i, j + 1));
                    const double adv = c * derivative(c, U(i - 1, j), c, U(i + 1, j)) +
                                       vbar * derivative(vbar, U(i, j - 1), c, U(i, j + 1));
                    const double lap = (U(i + 1, j) + U(i - 1, j) + U(i, j + 1) + U(i, j - 1) - 4.0 * c) * inv_dx2;
                    const double gp = (p(i, j) - p(i - 1, j)) * inv_dx;
                    out[0](i, j) = -adv + nu * lap + inv_rho * ((f ? (*f)[0](i, j) : 0.0) - gp);
                }
        }
        {
            const auto [j0, j1] = unknown_range(1);
            for (int j = j0; j <= j1; ++j)
                for (int i = 0; i < grid_.nx; ++i)
                {
                    const double c = V(i, j);
                    const double ubar = 0.25 * (U(i, j - 1) + U(i + 1, j - 1) + U(i, j) + U(i + 1, j));
                    const double adv = ubar * derivative(ubar, V(i - 1, j), c, V(i + 1, j)) +
                                       c * derivative(c, V(i, j - 1), c, V(i, j + 1));
                    const double lap = (V(i + 1, j) + V(i - 1, j) + V(i, j + 1) + V(i, j - 1) - 4.0 * c) * inv_dx2;
                    const double gp = (p(i, j) - p(i, j - 1)) * inv_dx;
                    out[1](i, j) = -adv + nu * lap + inv_rho * ((f ? (*f)[1](i, j) : 0.0) - gp);
                }
        }
    }

    /// out = base + dt * R(eval), then projected; p is updated incrementally.
    void stage(const StaggeredField& base, const StaggeredField& eval, CellField& p, const StaggeredField* f, double dt,
               double t_end, StaggeredField& out) const
    {
        StaggeredField rhs;
        momentum_rhs(eval, p, f, rhs);
        out = base;
        for (int d = 0; d < 2; ++d)
        {
            const auto [lo, hi] = unknown_range(d);
            const int n_other = d == 0 ? grid_.ny : grid_.nx;
            for (int a = lo; a <= hi; ++a)
                for (int b = 0; b < n_other; ++b)
                {
                    const int i = d == 0 ? a : b, j = d == 0 ? b : a;
                    out[d](i, j) += dt * rhs[d](i, j);
                }
        }
        apply_boundary_conditions(out, t_end);
        project(out, p, dt, t_end);
        check_finite(out, p);
    }

    /// One midpoint step with a force density held fixed over the step.
    void step(FluidState& s, const StaggeredField* f, double dt) const
    {
        check_time_step(s.u, dt);
        StaggeredField half;
        stage(s.u, s.u, s.p, f, 0.5 * dt, s.t + 0.5 * dt, half);
        StaggeredField next;
        stage(s.u, half, s.p, f, dt, s.t + dt, next);
        s.u = std::move(next);
        s.t += dt;
    }

    /// Largest stable explicit step for viscosity and advection at velocity u.
    double max_stable_dt(const StaggeredField& u) const
    {
        const double nu = params_.mu / params_.rho;
        double lim = nu > 0 ? 0.25 * grid_.dx * grid_.dx / nu : 1e300;
        const double umax = u.max_abs();
        if (umax > 0) lim = std::min(lim, grid_.dx / umax);
        return lim;
    }

    void check_time_step(const StaggeredField& u, double dt) const
    {
        IFED_REQUIRE(dt > 0.0, "time step must be positive");
        if (dt > max_stable_dt(u) * (1 + 1e-12))
            throw ContractViolation("time step " + std::to_string(dt) + " exceeds the explicit stability limit " +
                                    std::to_string(max_stable_dt(u)));
    }

private:
    void fill_increment_ghosts(CellField& ph) const
    {
        const int nx = grid_.nx, ny = grid_.ny;
        for (int j = 0; j < ny; ++j)
        {
            ph(-1, j) = bc_[Side::Left].type == BoundaryType::Traction ? -ph(0, j) : ph(0, j);
            ph(nx, j) = bc_[Side::Right].type == BoundaryType::Traction ? -ph(nx - 1, j) : ph(nx - 1, j);
        }
        for (int i = 0; i < nx; ++i)
        {
            ph(i, -1) = bc_[Side::Bottom].type == BoundaryType::Traction ? -ph(i, 0) : ph(i, 0);
            ph(i, ny) = bc_[Side::Top].type == BoundaryType::Traction ? -ph(i, ny - 1) : ph(i, ny - 1);
        }
    }

    static void check_finite(const StaggeredField& u, const CellField& p)
    {
        for (int d = 0; d < 2; ++d)
            for (double v : u[d].raw())
                if (!std::isfinite(v)) throw BlowUpError("non-finite fluid velocity", 0);
        for (double v : p.raw())
            if (!std::isfinite(v)) throw BlowUpError("non-finite pressure", 0);
    }

    MACGrid grid_;
    BoundarySpec bc_;
    FluidParameters params_;
    std::unique_ptr<PoissonSolver> poisson_;
};

} // namespace ifed
