#pragma once

#include "ifed/bench/config.hpp"
#include "ifed/coupling/coupling.hpp"
#include "ifed/mechanics/loads.hpp"
#include "ifed/mesh/mesh_generators.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace ifed::bench {

/// Outcome of one property check. `value` is the measured quantity and
/// `threshold` the bound it is compared against; `passed` already accounts for
/// the direction of the comparison.
struct CheckResult
{
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
    double seconds = 0.0;
};

using CheckReport = std::vector<CheckResult>;

inline bool all_passed(const CheckReport& r)
{
    for (const auto& c : r)
        if (!c.passed) return false;
    return true;
}

namespace detail {

inline constexpr ElementKind check_kinds[] = {ElementKind::P1, ElementKind::Q1, ElementKind::P2, ElementKind::Q2};
inline constexpr KernelKind check_kernels[] = {KernelKind::PiecewiseLinear, KernelKind::BSpline3};

template <class Fn>
CheckResult timed_check(Fn&& fn)
{
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r = fn();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

/// Smooth shear plus nodal jitter of a small block near the middle of the unit
/// square; keeps every kernel stencil inside a 16 x 16 grid.
inline FEField random_deformation(const StructuralMesh& mesh, std::mt19937_64& rng, double jitter = 0.01)
{
    std::uniform_real_distribution<double> r(-1, 1);
    const double a = 0.1 * r(rng), b = 0.1 * r(rng), c = 0.05 * r(rng);
    FEField chi = FEField::identity(mesh);
    for (std::size_t k = 0; k < mesh.num_nodes(); ++k)
    {
        const Vec2 X = mesh.node(k);
        chi[k] = X + Vec2{a * (X.y - 0.5) + c * std::sin(2 * std::numbers::pi * X.x), b * (X.x - 0.5)} +
                 Vec2{jitter * r(rng), jitter * r(rng)};
    }
    return chi;
}

/// Elastic load of the deformed state plus a random smooth body load.
inline std::vector<Vec2> random_load(const FEField& chi, std::mt19937_64& rng)
{
    const StructuralMesh& mesh = chi.mesh();
    const Material mat{MaterialModel::ModifiedNeoHookean, 2.0, 5.0};
    const MeshQuadrature rule = consistent_rule(mesh);
    std::vector<Vec2> L = assemble_load_vector(chi, mat, rule);
    std::uniform_real_distribution<double> r(0.5, 1.5);
    const Vec2 g{r(rng), -r(rng)};
    add_body_load(L, mesh, rule, [&](std::size_t, const Vec2& X, const ShapeEval&) { return (1.0 + X.x * X.y) * g; });
    return L;
}

inline double max_abs(const MACGrid& g, const StaggeredField& f)
{
    double s = 0.0;
    for (int d = 0; d < 2; ++d)
        for (int j = 0; j < g.face_ny(d); ++j)
            for (int i = 0; i < g.face_nx(d); ++i) s = std::max(s, std::abs(f[d](i, j)));
    return s;
}

inline double max_abs_diff(const MACGrid& g, const StaggeredField& a, const StaggeredField& b)
{
    double s = 0.0;
    for (int d = 0; d < 2; ++d)
        for (int j = 0; j < g.face_ny(d); ++j)
            for (int i = 0; i < g.face_nx(d); ++i) s = std::max(s, std::abs(a[d](i, j) - b[d](i, j)));
    return s;
}

/// Relative violation of the zeroth and first moment identities of a spread field.
inline double moment_violation(const MACGrid& g, const StaggeredField& f, const FEField& chi, std::span<const Vec2> L)
{
    const GridMoments m = grid_moments(g, f);
    Vec2 total;
    double first = 0.0;
    for (std::size_t i = 0; i < L.size(); ++i)
    {
        total += L[i];
        first += dot(chi[i], L[i]);
    }
    const double e0 = norm(m.total - total) / std::max(norm(total), 1e-300);
    const double e1 = std::abs(m.first - first) / std::max(std::abs(first), 1e-300);
    return std::max(e0, e1);
}

inline std::string describe(ElementKind e, CouplingScheme s, KernelKind k)
{
    return std::string(to_string(e)) + "/" + std::string(to_string(s)) + "/" + std::string(to_string(k));
}

} // namespace detail

/// Spreading D^-1 L with weights D gives the same field for any positive D.
inline CheckResult check_lumped_weight_invariance(std::uint64_t seed)
{
    return detail::timed_check([&] {
        const MACGrid g(16, 16, 1.0 / 16);
        const StructuralMesh mesh = generate_block_mesh(0.4, 0.4, 2, 2, ElementKind::P2, {0.3, 0.3});
        std::mt19937_64 rng(seed);
        const FEField chi = detail::random_deformation(mesh, rng);
        const std::vector<Vec2> L = detail::random_load(chi, rng);
        std::uniform_real_distribution<double> r(1e-3, 10.0);
        std::vector<StaggeredField> fields;
        for (int run = 0; run < 2; ++run)
        {
            std::vector<double> D(L.size());
            std::vector<Vec2> F(L.size());
            for (std::size_t i = 0; i < L.size(); ++i)
            {
                D[i] = r(rng);
                F[i] = (1.0 / D[i]) * L[i];
            }
            fields.emplace_back(g);
            spread_values(g, KernelKind::BSpline3, chi.values(), F, D, fields.back());
        }
        // the scheme itself spreads L without any weights
        Coupling nodal(mesh, g, {CouplingScheme::Nodal, KernelKind::BSpline3});
        nodal.update(chi);
        const StaggeredField literal = nodal.spread(L);
        const double scale = detail::max_abs(g, literal);
        const double rel = std::max(detail::max_abs_diff(g, fields[0], fields[1]),
                                    std::max(detail::max_abs_diff(g, fields[0], literal),
                                             detail::max_abs_diff(g, fields[1], literal))) /
                           scale;
        CheckResult c{"lumped-weight invariance", rel <= 1e-13, rel, 1e-13};
        c.detail = "16x16 grid, 2x2 P2 mesh, two random positive diagonals";
        return c;
    });
}

/// Zeroth and first moments of the spread force match the Lagrangian ones for
/// matched quadrature and mass.
inline CheckResult check_conservation(std::uint64_t seed)
{
    return detail::timed_check([&] {
        const MACGrid g(16, 16, 1.0 / 16);
        std::mt19937_64 rng(seed);
        double worst = 0.0;
        std::string where;
        for (ElementKind kind : detail::check_kinds)
        {
            const StructuralMesh mesh = generate_block_mesh(0.4, 0.4, 3, 3, kind, {0.3, 0.3});
            for (CouplingScheme scheme : {CouplingScheme::Nodal, CouplingScheme::Elemental})
                for (KernelKind k : detail::check_kernels)
                {
                    const FEField chi = detail::random_deformation(mesh, rng);
                    const std::vector<Vec2> L = detail::random_load(chi, rng);
                    Coupling c(mesh, g, {scheme, k, 0.5, SupportPolicy::Strict, default_adaptive_cap, 1e-14});
                    c.update(chi);
                    const double v = detail::moment_violation(g, c.spread(L), chi, L);
                    if (v >= worst)
                    {
                        worst = v;
                        where = detail::describe(kind, scheme, k);
                    }
                }
        }
        CheckResult r{"moment conservation", worst <= 1e-10, worst, 1e-10};
        r.detail = "16 cases, worst " + where;
        return r;
    });
}

/// Negative control: nodal interaction points with the consistent mass do not
/// conserve moments. Passes when every element kind shows the violation.
inline CheckResult check_mismatched_pairing(std::uint64_t seed)
{
    return detail::timed_check([&] {
        const MACGrid g(16, 16, 1.0 / 16);
        std::mt19937_64 rng(seed);
        double smallest = std::numeric_limits<double>::infinity();
        std::string where;
        for (ElementKind kind : detail::check_kinds)
        {
            const StructuralMesh mesh = generate_block_mesh(0.4, 0.4, 3, 3, kind, {0.3, 0.3});
            const FEField chi = detail::random_deformation(mesh, rng, 0.02);
            const std::vector<Vec2> L = detail::random_load(chi, rng);
            const MassOperator M = assemble_consistent_mass(mesh, consistent_rule(mesh), 1e-14);
            const FEField F(mesh, FieldRole::Force, M.solve(L));
            const StaggeredField f = spread_force_density(g, KernelKind::BSpline3, chi, F, nodal_rule(mesh));
            const double v = detail::moment_violation(g, f, chi, L);
            if (v < smallest)
            {
                smallest = v;
                where = std::string(to_string(kind));
            }
        }
        CheckResult r{"mismatched pairing detected", smallest >= 1e-6, smallest, 1e-6};
        r.detail = "nodal points + consistent mass, smallest violation " + where;
        return r;
    });
}

/// Worst zeroth and first discrete moment error of a 1D weight rule over random
/// shifts. `truncate` drops the last stencil weight to break the conditions.
inline double kernel_moment_error(KernelKind k, std::mt19937_64& rng, int shifts, bool truncate = false)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < shifts; ++t)
    {
        const double s = 10.0 + u(rng);
        Stencil1D st = kernel_stencil(k, s);
        if (truncate) st.w[st.count - 1] = 0.0;
        double m0 = 0.0, m1 = 0.0;
        for (int m = 0; m < st.count; ++m)
        {
            m0 += st.w[m];
            m1 += (st.first + m - s) * st.w[m];
        }
        worst = std::max({worst, std::abs(m0 - 1.0), std::abs(m1)});
    }
    return worst;
}

inline CheckResult check_kernel_moments(std::uint64_t seed)
{
    return detail::timed_check([&] {
        std::mt19937_64 rng(seed);
        double worst = 0.0;
        for (KernelKind k : detail::check_kernels) worst = std::max(worst, kernel_moment_error(k, rng, 64));
        CheckResult r{"kernel moments", worst <= 1e-13, worst, 1e-13};
        r.detail = "both kernels, 64 random shifts";
        return r;
    });
}

/// Negative control: a kernel with its outermost weight removed fails the moment test.
inline CheckResult check_truncated_kernel(std::uint64_t seed)
{
    return detail::timed_check([&] {
        std::mt19937_64 rng(seed);
        double smallest = std::numeric_limits<double>::infinity();
        for (KernelKind k : detail::check_kernels) smallest = std::min(smallest, kernel_moment_error(k, rng, 64, true));
        CheckResult r{"truncated kernel detected", smallest > 1e-13, smallest, 1e-13};
        r.detail = "outermost stencil weight dropped";
        return r;
    });
}

/// <S F, u> = sum_q F_q . (J u)_q w_q on random fields, same quadrature both ways.
inline CheckResult check_adjointness(std::uint64_t seed, int trials = 20)
{
    return detail::timed_check([&] {
        const MACGrid g(20, 20, 1.0 / 20);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> r(-1, 1);
        double worst = 0.0;
        for (int trial = 0; trial < trials; ++trial)
        {
            const ElementKind kind = detail::check_kinds[trial % 4];
            const KernelKind k = detail::check_kernels[trial % 2];
            const StructuralMesh mesh = generate_block_mesh(0.4, 0.4, 3, 3, kind, {0.3, 0.3});
            const FEField chi = detail::random_deformation(mesh, rng);
            const MeshQuadrature rule =
                trial % 3 == 0 ? nodal_rule(mesh) : adaptive_rule(mesh, chi.values(), g.dx, 0.5);
            const auto x = interaction_positions(chi, rule);
            const auto w = rule_weights(rule);
            std::vector<Vec2> F(rule.size());
            for (auto& v : F) v = {r(rng), r(rng)};
            StaggeredField u(g), f(g);
            for (int d = 0; d < 2; ++d)
                for (int j = 0; j < g.face_ny(d); ++j)
                    for (int i = 0; i < g.face_nx(d); ++i) u[d](i, j) = r(rng);
            spread_values(g, k, x, F, w, f);
            const auto U = interpolate_values(g, k, u, x);
            double grid = 0.0, lag = 0.0, scale = 0.0;
            for (int d = 0; d < 2; ++d)
                for (int j = 0; j < g.face_ny(d); ++j)
                    for (int i = 0; i < g.face_nx(d); ++i)
                    {
                        grid += f[d](i, j) * u[d](i, j) * g.dx * g.dx;
                        scale += std::abs(f[d](i, j) * u[d](i, j)) * g.dx * g.dx;
                    }
            for (std::size_t q = 0; q < x.size(); ++q) lag += dot(F[q], U[q]) * w[q];
            worst = std::max(worst, std::abs(grid - lag) / scale);
        }
        CheckResult c{"spread/interpolate adjointness", worst <= 1e-12, worst, 1e-12};
        c.detail = std::to_string(trials) + " random trials";
        return c;
    });
}

/// Nodal velocity projection of interpolated samples is nodal sampling, bit for bit.
inline CheckResult check_nodal_identity(std::uint64_t seed)
{
    return detail::timed_check([&] {
        const MACGrid g(16, 16, 1.0 / 16);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> r(-1, 1);
        std::size_t mismatches = 0, total = 0;
        for (ElementKind kind : detail::check_kinds)
        {
            const StructuralMesh mesh = generate_block_mesh(0.4, 0.4, 3, 3, kind, {0.3, 0.3});
            const FEField chi = detail::random_deformation(mesh, rng);
            StaggeredField u(g);
            for (int d = 0; d < 2; ++d)
                for (int j = 0; j < g.face_ny(d); ++j)
                    for (int i = 0; i < g.face_nx(d); ++i) u[d](i, j) = r(rng);
            Coupling c(mesh, g, {CouplingScheme::Nodal, KernelKind::BSpline3});
            c.update(chi);
            const FEField U = c.velocity(u);
            const std::vector<Vec2> sampled = interpolate_values(g, KernelKind::BSpline3, u, chi.values());
            for (std::size_t k = 0; k < mesh.num_nodes(); ++k, ++total)
                if (std::memcmp(&U[k], &sampled[k], sizeof(Vec2)) != 0) ++mismatches;
        }
        CheckResult c{"nodal projection identity", mismatches == 0, double(mismatches), 0.0};
        c.detail = std::to_string(total) + " nodes compared bitwise";
        return c;
    });
}

/// Manufactured stress with nonzero boundary values and its exact divergence.
inline Mat2 manufactured_stress(const Vec2& X)
{
    return Mat2{std::sin(2 * X.x + X.y), X.x * X.y * X.y, std::exp(0.5 * X.x) * std::cos(X.y), X.x - X.y * X.y};
}

inline Vec2 manufactured_divergence(const Vec2& X)
{
    return {2 * std::cos(2 * X.x + X.y) + 2 * X.x * X.y, 0.5 * std::exp(0.5 * X.x) * std::cos(X.y) - 2 * X.y};
}

struct ConvergenceLevel
{
    int n = 0;
    double h = 0.0;
    std::size_t nodes = 0;
    double error = 0.0; // max over interior nodes
    double order = std::numeric_limits<double>::quiet_NaN(); // against the previous level
};

/// Lumped projection F = D^-1 L of the manufactured stress on n x n P1 blocks
/// of the unit square, refined by halving.
inline std::vector<ConvergenceLevel> force_projection_study(int n0 = 8, int levels = 3)
{
    std::vector<ConvergenceLevel> out;
    for (int l = 0; l < levels; ++l)
    {
        const int n = n0 << l;
        const StructuralMesh mesh = generate_block_mesh(1, 1, n, n, ElementKind::P1);
        std::vector<Vec2> load(mesh.num_nodes());
        add_stress_load(load, FEField::identity(mesh), gauss_rule(mesh, 5, QuadratureFamily::HigherOrder),
                        [](std::size_t, const Vec2& X, const Mat2&) { return manufactured_stress(X); });
        const FEField F = project_force(mesh, load, assemble_mass(mesh, MassKind::Lumped));
        ConvergenceLevel lv{n, 1.0 / n, mesh.num_nodes()};
        for (std::size_t k = 0; k < mesh.num_nodes(); ++k)
            if (!mesh.is_boundary_node(k))
                lv.error = std::max(lv.error, norm(F[k] - manufactured_divergence(mesh.node(k))));
        if (!out.empty()) lv.order = std::log2(out.back().error / lv.error);
        out.push_back(lv);
    }
    return out;
}

inline CheckResult check_force_projection_order()
{
    return detail::timed_check([&] {
        const auto study = force_projection_study();
        double order = std::numeric_limits<double>::infinity();
        std::string errs;
        for (const auto& lv : study)
        {
            if (!std::isnan(lv.order)) order = std::min(order, lv.order);
            errs += (errs.empty() ? "" : " ") + format_number(lv.error);
        }
        CheckResult r{"lumped projection order", order >= 0.9, order, 0.9};
        r.detail = "P1 blocks 8/16/32, interior max errors " + errs;
        return r;
    });
}

inline constexpr std::uint64_t default_check_seed = 20240611;

/// Every property check with its negative controls, in a fixed order.
inline CheckReport run_property_checks(std::uint64_t seed = default_check_seed)
{
    return {check_lumped_weight_invariance(seed),
            check_conservation(seed + 1),
            check_mismatched_pairing(seed + 2),
            check_kernel_moments(seed + 3),
            check_truncated_kernel(seed + 4),
            check_adjointness(seed + 5),
            check_force_projection_order(),
            check_nodal_identity(seed + 6)};
}

} // namespace ifed::bench
