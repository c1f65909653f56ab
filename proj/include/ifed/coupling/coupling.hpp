#pragma once

#include "ifed/coupling/kernels.hpp"
#include "ifed/fluid/mac_grid.hpp"
#include "ifed/mechanics/mass.hpp"
#include "ifed/quadrature/mesh_quadrature.hpp"

#include <span>
#include <string>
#include <vector>

namespace ifed {

enum class CouplingScheme
{
    Nodal,    // interaction at nodes, lumped mass
    Elemental // interaction at adaptive quadrature points, consistent mass
};

inline std::string_view to_string(CouplingScheme s) { return s == CouplingScheme::Nodal ? "nodal" : "elemental"; }

inline CouplingScheme parse_coupling_scheme(std::string_view s)
{
    if (s == "nodal") return CouplingScheme::Nodal;
    if (s == "elemental") return CouplingScheme::Elemental;
    throw UnsupportedConfiguration("unknown coupling scheme '" + std::string(s) + "'");
}

/// What happens when a kernel stencil leaves the stored face range.
enum class SupportPolicy
{
    Strict,  // CouplingDomainError
    Truncate // drop the faces outside the grid
};

/// Index-space stencil of one point for face component d.
struct FaceStencil
{
    Stencil1D sx, sy;
    bool clipped = false;
};

inline FaceStencil face_stencil(const MACGrid& g, KernelKind k, int d, const Vec2& x)
{
    // u faces sit at (i, j + 1/2), v faces at (i + 1/2, j) in cell units
    const double s = (x.x - g.origin.x) / g.dx - (d == 0 ? 0.0 : 0.5);
    const double t = (x.y - g.origin.y) / g.dx - (d == 1 ? 0.0 : 0.5);
    FaceStencil fs{kernel_stencil(k, s), kernel_stencil(k, t)};
    fs.clipped = fs.sx.first < 0 || fs.sx.first + fs.sx.count > g.face_nx(d) || fs.sy.first < 0 ||
                 fs.sy.first + fs.sy.count > g.face_ny(d);
    return fs;
}

namespace detail {

inline void check_stencil(const FaceStencil& fs, SupportPolicy policy, std::size_t point, const Vec2& x)
{
    if (fs.clipped && policy == SupportPolicy::Strict)
        throw CouplingDomainError(point, x.x, x.y);
}

} // namespace detail

namespace detail {

// Visits the in-range rows of a stencil as (row start, first x offset, x range, y weight);
// face i of the row is row[i], x weight a belongs to face first + a.
template <class Array, class RowFn>
void for_stencil_rows(Array& a, int nx, int ny, const FaceStencil& fs, RowFn&& row)
{
    int a0 = 0, a1 = fs.sx.count;
    while (a0 < a1 && fs.sx.first + a0 < 0) ++a0;
    while (a1 > a0 && fs.sx.first + a1 - 1 >= nx) --a1;
    if (a0 == a1) return;
    for (int b = 0; b < fs.sy.count; ++b)
    {
        const int j = fs.sy.first + b;
        if (j < 0 || j >= ny) continue;
        row(a.row(j) + fs.sx.first, a0, a1, fs.sy.w[b]);
    }
}

} // namespace detail

/// f_face += sum_q value_q delta_h(x_face - x_q) weight_q. Weights may be empty (all 1).
inline void spread_values(const MACGrid& g, KernelKind k, std::span<const Vec2> x, std::span<const Vec2> values,
                          std::span<const double> weights, StaggeredField& f, SupportPolicy policy = SupportPolicy::Strict)
{
    IFED_REQUIRE(x.size() == values.size(), "one value per interaction point");
    IFED_REQUIRE(weights.empty() || weights.size() == x.size(), "one weight per interaction point");
    const double inv_area = 1.0 / (g.dx * g.dx);
    for (std::size_t q = 0; q < x.size(); ++q)
    {
        const double wq = (weights.empty() ? 1.0 : weights[q]) * inv_area;
        for (int d = 0; d < 2; ++d)
        {
            const FaceStencil fs = face_stencil(g, k, d, x[q]);
            detail::check_stencil(fs, policy, q, x[q]);
            const double v = values[q][d] * wq;
            detail::for_stencil_rows(f[d], g.face_nx(d), g.face_ny(d), fs,
                                     [&](double* row, int a0, int a1, double wy) {
                                         const double vy = v * wy;
                                         for (int a = a0; a < a1; ++a) row[a] += vy * fs.sx.w[a];
                                     });
        }
    }
}

/// U(x_q) = sum_faces u delta_h(x_face - x_q) dx^2
inline std::vector<Vec2> interpolate_values(const MACGrid& g, KernelKind k, const StaggeredField& u,
                                            std::span<const Vec2> x, SupportPolicy policy = SupportPolicy::Strict)
{
    std::vector<Vec2> out(x.size());
    for (std::size_t q = 0; q < x.size(); ++q)
        for (int d = 0; d < 2; ++d)
        {
            const FaceStencil fs = face_stencil(g, k, d, x[q]);
            detail::check_stencil(fs, policy, q, x[q]);
            double s = 0.0;
            detail::for_stencil_rows(u[d], g.face_nx(d), g.face_ny(d), fs,
                                     [&](const double* row, int a0, int a1, double wy) {
                                         double r = 0.0;
                                         for (int a = a0; a < a1; ++a) r += row[a] * fs.sx.w[a];
                                         s += r * wy;
                                     });
            out[q][d] = s;
        }
    return out;
}

/// Physical positions chi_h(X_q) of the points of a rule.
inline std::vector<Vec2> interaction_positions(const FEField& chi, const MeshQuadrature& rule)
{
    std::vector<Vec2> x(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
        const auto& p = rule[q];
        x[q] = p.node != no_node ? chi[p.node] : chi.evaluate(p.element, *p.shape);
    }
    return x;
}

/// F_h(X_q) at the points of an element rule.
inline std::vector<Vec2> sample_field(const FEField& F, const MeshQuadrature& rule)
{
    std::vector<Vec2> v(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
        const auto& p = rule[q];
        v[q] = p.node != no_node ? F[p.node] : F.evaluate(p.element, *p.shape);
    }
    return v;
}

inline std::vector<double> rule_weights(const MeshQuadrature& rule)
{
    std::vector<double> w(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) w[q] = rule[q].weight;
    return w;
}

/// Spreads the force density F_h sampled on `rule` with its weights.
inline StaggeredField spread_force_density(const MACGrid& g, KernelKind k, const FEField& chi, const FEField& F,
                                           const MeshQuadrature& rule, SupportPolicy policy = SupportPolicy::Strict)
{
    StaggeredField f(g);
    const auto x = interaction_positions(chi, rule);
    const auto v = sample_field(F, rule);
    const auto w = rule_weights(rule);
    spread_values(g, k, x, v, w, f, policy);
    return f;
}

/// Nodal spreading of the raw load vector: f = sum_k L_k delta_h(x - chi_k).
inline StaggeredField spread_nodal_load(const MACGrid& g, KernelKind k, const FEField& chi, std::span<const Vec2> load,
                                        SupportPolicy policy = SupportPolicy::Strict)
{
    IFED_REQUIRE(load.size() == chi.size(), "one load entry per node");
    StaggeredField f(g);
    spread_values(g, k, chi.values(), load, {}, f, policy);
    return f;
}

/// Grid moments sum dx^2 f and sum dx^2 (f^1 x^1 + f^2 x^2) over all stored faces.
struct GridMoments
{
    Vec2 total;
    double first = 0.0;
};

inline GridMoments grid_moments(const MACGrid& g, const StaggeredField& f)
{
    GridMoments m;
    const double a = g.dx * g.dx;
    for (int d = 0; d < 2; ++d)
        for (int j = 0; j < g.face_ny(d); ++j)
            for (int i = 0; i < g.face_nx(d); ++i)
            {
                const double v = f[d](i, j) * a;
                m.total[d] += v;
                m.first += v * g.face_center(d, i, j)[d];
            }
    return m;
}

/// Interaction-point set, mass operator and transfer operators of one scheme.
/// The elemental scheme rebuilds its adaptive rule whenever the configuration
/// changes (call update()).
class Coupling
{
public:
    struct Config
    {
        CouplingScheme scheme = CouplingScheme::Nodal;
        KernelKind kernel = KernelKind::BSpline3;
        double c_a = 0.5;
        SupportPolicy policy = SupportPolicy::Strict;
        int adaptive_cap = default_adaptive_cap;
        double mass_tolerance = 1e-10;
    };

    Coupling(const StructuralMesh& mesh, const MACGrid& grid, Config cfg)
        : mesh_(&mesh), grid_(grid), cfg_(cfg),
          mass_(cfg.scheme == CouplingScheme::Nodal
                    ? assemble_lumped_mass(nodal_rule(mesh))
                    : assemble_consistent_mass(mesh, consistent_rule(mesh), cfg.mass_tolerance))
    {
        IFED_REQUIRE(cfg.c_a > 0.0, "C_A must be positive");
        if (cfg.scheme == CouplingScheme::Nodal) rule_ = nodal_rule(mesh);
    }

    const Config& config() const noexcept { return cfg_; }
    CouplingScheme scheme() const noexcept { return cfg_.scheme; }
    const MassOperator& mass() const noexcept { return mass_; }
    const MACGrid& grid() const noexcept { return grid_; }
    const StructuralMesh& mesh() const noexcept { return *mesh_; }

    /// Rebuilds configuration-dependent data (adaptive rule, positions).
    void update(const FEField& chi)
    {
        if (cfg_.scheme == CouplingScheme::Elemental)
        {
            // points sit at fixed reference locations, so the rule only changes with the levels
            std::vector<int> levels = adaptive_levels(*mesh_, chi.values(), grid_.dx, cfg_.c_a, cfg_.adaptive_cap);
            if (levels != levels_ || rule_.size() == 0)
            {
                rule_ = adaptive_rule_from_levels(*mesh_, levels);
                levels_ = std::move(levels);
            }
        }
        positions_ = interaction_positions(chi, rule_);
        ++updates_;
    }

    const MeshQuadrature& interaction_rule() const noexcept { return rule_; }
    std::span<const Vec2> positions() const noexcept { return positions_; }
    std::size_t update_count() const noexcept { return updates_; }

    /// Nodal: spread L directly. Elemental: F = M^-1 L, then spread F_h on A_q.
    StaggeredField spread(std::span<const Vec2> load) const
    {
        IFED_REQUIRE(!positions_.empty() || mesh_->num_nodes() == 0, "coupling not updated to a configuration");
        StaggeredField f(grid_);
        if (cfg_.scheme == CouplingScheme::Nodal)
        {
            spread_values(grid_, cfg_.kernel, positions_, load, {}, f, cfg_.policy);
            return f;
        }
        return spread_field(project_force(load));
    }

    /// F = M^-1 L with this scheme's mass operator.
    FEField project_force(std::span<const Vec2> load) const
    {
        std::vector<Vec2> F = mass_.solve(load, force_guess_);
        if (mass_.kind() == MassKind::Consistent) force_guess_ = F;
        return FEField(*mesh_, FieldRole::Force, std::move(F));
    }

    /// Spreads a projected force density on the interaction rule with its weights.
    StaggeredField spread_field(const FEField& F) const
    {
        StaggeredField f(grid_);
        spread_values(grid_, cfg_.kernel, positions_, sample_field(F, rule_), rule_weights(rule_), f, cfg_.policy);
        return f;
    }

    /// U^IB at the interaction points.
    std::vector<Vec2> interpolate(const StaggeredField& u) const
    {
        return interpolate_values(grid_, cfg_.kernel, u, positions_, cfg_.policy);
    }

    /// Structural velocity from U^IB. Nodal: U_k = U^IB(chi_k), no solve.
    /// Elemental: M U = L^IB with L^IB_i = sum_q U^IB(X_q) phi_i(X_q) w_q.
    FEField project_velocity(std::span<const Vec2> u_ib) const
    {
        IFED_REQUIRE(u_ib.size() == rule_.size(), "one sample per interaction point");
        if (cfg_.scheme == CouplingScheme::Nodal)
        {
            std::vector<Vec2> U(mesh_->num_nodes());
            for (std::size_t q = 0; q < rule_.size(); ++q) U[rule_[q].node] = u_ib[q];
            return FEField(*mesh_, FieldRole::Velocity, std::move(U));
        }
        std::vector<Vec2> rhs(mesh_->num_nodes());
        for (std::size_t q = 0; q < rule_.size(); ++q)
        {
            const auto& p = rule_[q];
            const auto conn = mesh_->element(p.element);
            for (int a = 0; a < p.shape->count; ++a) rhs[conn[a]] += (p.shape->value[a] * p.weight) * u_ib[q];
        }
        std::vector<Vec2> U = mass_.solve(rhs, velocity_guess_);
        velocity_guess_ = U;
        return FEField(*mesh_, FieldRole::Velocity, std::move(U));
    }

    FEField velocity(const StaggeredField& u) const { return project_velocity(interpolate(u)); }

private:
    const StructuralMesh* mesh_;
    MACGrid grid_;
    Config cfg_;
    MassOperator mass_;
    MeshQuadrature rule_;
    std::vector<int> levels_;
    // previous consistent solutions, used as initial iterates
    mutable std::vector<Vec2> force_guess_, velocity_guess_;
    std::vector<Vec2> positions_;
    std::size_t updates_ = 0;
};

/// Mesh factor M_FAC = dX / (E_FAC dx).
inline double mesh_factor(double dX, ElementKind kind, double dx) { return dX / (element_factor(kind) * dx); }

} // namespace ifed
