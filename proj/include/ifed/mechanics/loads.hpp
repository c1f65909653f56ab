#pragma once

#include "ifed/mechanics/fe_field.hpp"
#include "ifed/mechanics/material.hpp"
#include "ifed/quadrature/mesh_quadrature.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ifed {

/// Physical basis gradients at an element quadrature point, from its stored
/// reference Jacobian.
inline PhysicalGradients physical_gradients(const QuadraturePoint& p)
{
    PhysicalGradients out;
    for (int i = 0; i < p.shape->count; ++i) out.grad[i] = p.jit * p.shape->grad[i];
    out.det = 1.0 / p.jit.det();
    return out;
}

/// L_i -= sum_q P(X_q) : grad_X phi_i(X_q) w_q, with P supplied per point as
/// stress(element, X_q, F_q).
template <class StressFn>
void add_stress_load(std::vector<Vec2>& load, const FEField& chi, const MeshQuadrature& rule, const StressFn& stress)
{
    const auto& mesh = chi.mesh();
    IFED_REQUIRE(load.size() == mesh.num_nodes(), "load vector size mismatch");
    IFED_REQUIRE(rule.family() != QuadratureFamily::Nodal, "stress loads need an element quadrature");
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    {
        const auto conn = mesh.element(e);
        for (const auto& p : rule.element_points(e))
        {
            const auto g = physical_gradients(p);
            const Mat2 F = deformation_gradient(chi, e, *p.shape, g);
            const Mat2 P = stress(e, p.X, F);
            for (int i = 0; i < p.shape->count; ++i) load[conn[i]] -= p.weight * (P * g.grad[i]);
        }
    }
}

/// Elastic load vector L(chi) for a material, integrated with the given rule.
inline std::vector<Vec2> assemble_load_vector(const FEField& chi, const Material& material, const MeshQuadrature& rule)
{
    std::vector<Vec2> load(chi.size());
    if (material.model == MaterialModel::RigidPenalty) return load;
    add_stress_load(load, chi, rule, [&](std::size_t e, const Vec2&, const Mat2& F) { return pk1_stress(F, material, e); });
    return load;
}

/// L_i += sum_q b(X_q) phi_i(X_q) w_q for a reference-configuration body force density.
template <class DensityFn>
void add_body_load(std::vector<Vec2>& load, const StructuralMesh& mesh, const MeshQuadrature& rule,
                   const DensityFn& density)
{
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    {
        const auto conn = mesh.element(e);
        for (const auto& p : rule.element_points(e))
        {
            const Vec2 b = density(e, p.X, *p.shape);
            for (int i = 0; i < p.shape->count; ++i) load[conn[i]] += (p.shape->value[i] * p.weight) * b;
        }
    }
}

/// Gauss points on one boundary facet, with basis values and the length element.
struct FacetPoint
{
    ShapeEval shape;
    Vec2 X;
    double weight; // reference arc-length weight
};

inline std::vector<FacetPoint> facet_rule(const StructuralMesh& mesh, const BoundaryFacet& f)
{
    const ElementKind kind = mesh.kind();
    const LineRule& line = cached_gauss_legendre(polynomial_degree(kind) + 1);
    const auto ref = reference_nodes(kind);
    const Vec2 a = ref[f.side], b = ref[(f.side + 1) % vertex_count(kind)];
    const auto conn = mesh.element(f.element);
    std::vector<FacetPoint> out;
    for (std::size_t q = 0; q < line.points.size(); ++q)
    {
        const double t = 0.5 * (line.points[q] + 1.0);
        const Vec2 xi = a + t * (b - a);
        FacetPoint fp{evaluate_shapes(kind, xi), {}, 0.0};
        Vec2 tangent;
        for (int i = 0; i < fp.shape.count; ++i)
        {
            fp.X += fp.shape.value[i] * mesh.node(conn[i]);
            tangent += dot(fp.shape.grad[i], b - a) * mesh.node(conn[i]);
        }
        fp.weight = 0.5 * line.weights[q] * norm(tangent);
        out.push_back(fp);
    }
    return out;
}

/// Dead-load traction (force per reference length) on facets with the given marker.
struct TractionLoad
{
    int marker = 0;
    Vec2 value;
};

/// Spring-damper tether T = kappa (target - chi) - eta U, applied per component
/// where the mask is set. Targets are nodal values; empty means the reference
/// positions.
struct Tether
{
    double kappa = 0.0;
    double eta = 0.0;
    bool mask_x = true;
    bool mask_y = true;
    std::vector<Vec2> target;

    Vec2 masked(const Vec2& v) const { return {mask_x ? v.x : 0.0, mask_y ? v.y : 0.0}; }
};

struct SurfaceTether : Tether
{
    int marker = 0;
};

namespace detail {

inline Vec2 tether_target(const Tether& t, const StructuralMesh& mesh, std::size_t e, const ShapeEval& s)
{
    const auto conn = mesh.element(e);
    Vec2 x;
    for (int i = 0; i < s.count; ++i) x += s.value[i] * (t.target.empty() ? mesh.node(conn[i]) : t.target[conn[i]]);
    return x;
}

} // namespace detail

inline void add_traction_load(std::vector<Vec2>& load, const StructuralMesh& mesh, const TractionLoad& tr,
                              double scale = 1.0)
{
    for (const auto& f : mesh.boundary_facets())
    {
        if (f.marker != tr.marker) continue;
        const auto conn = mesh.element(f.element);
        for (const auto& p : facet_rule(mesh, f))
            for (int i = 0; i < p.shape.count; ++i) load[conn[i]] += (scale * p.shape.value[i] * p.weight) * tr.value;
    }
}

/// Surface tether integrated over the marked facets.
inline void add_surface_tether(std::vector<Vec2>& load, const FEField& chi, const FEField* velocity,
                               const SurfaceTether& t)
{
    const auto& mesh = chi.mesh();
    for (const auto& f : mesh.boundary_facets())
    {
        if (f.marker != t.marker) continue;
        const auto conn = mesh.element(f.element);
        for (const auto& p : facet_rule(mesh, f))
        {
            Vec2 force = t.kappa * (detail::tether_target(t, mesh, f.element, p.shape) - chi.evaluate(f.element, p.shape));
            if (velocity && t.eta != 0.0) force -= t.eta * velocity->evaluate(f.element, p.shape);
            force = t.masked(force);
            for (int i = 0; i < p.shape.count; ++i) load[conn[i]] += (p.shape.value[i] * p.weight) * force;
        }
    }
}

/// Body tether integrated over the whole structure with an element rule.
inline void add_body_tether(std::vector<Vec2>& load, const FEField& chi, const FEField* velocity,
                            const MeshQuadrature& rule, const Tether& t)
{
    const auto& mesh = chi.mesh();
    add_body_load(load, mesh, rule, [&](std::size_t e, const Vec2&, const ShapeEval& s) {
        Vec2 force;
        if (t.kappa != 0.0) force = t.kappa * (detail::tether_target(t, mesh, e, s) - chi.evaluate(e, s));
        if (velocity && t.eta != 0.0) force -= t.eta * velocity->evaluate(e, s);
        return t.masked(force);
    });
}

/// Linear load ramp min(t / T_l, 1); T_l <= 0 means full load immediately.
inline double load_ramp(double t, double ramp_time)
{
    if (ramp_time <= 0.0) return 1.0;
    return std::clamp(t / ramp_time, 0.0, 1.0);
}

} // namespace ifed
