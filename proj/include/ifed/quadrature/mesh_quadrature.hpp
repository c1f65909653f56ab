#pragma once

#include "ifed/mesh/structural_mesh.hpp"
#include "ifed/quadrature/reference_rules.hpp"

#include <cmath>
#include <memory>
#include <span>
#include <vector>

namespace ifed {

enum class QuadratureFamily
{
    Consistent,
    HigherOrder,
    Adaptive,
    Nodal
};

inline std::string_view to_string(QuadratureFamily f)
{
    switch (f)
    {
    case QuadratureFamily::Consistent: return "consistent";
    case QuadratureFamily::HigherOrder: return "higher-order";
    case QuadratureFamily::Adaptive: return "adaptive";
    case QuadratureFamily::Nodal: return "nodal";
    }
    return "?";
}

inline constexpr std::size_t no_node = static_cast<std::size_t>(-1);

struct QuadraturePoint
{
    std::size_t element = 0;   // owning element (for nodal points: any element containing the node)
    std::size_t node = no_node; // mesh node for nodal points
    Vec2 xi;                    // reference-element coordinate
    Vec2 X;                     // reference-configuration position
    double weight = 0.0;        // reference-area weight (w~ for nodal points)
    const ShapeEval* shape = nullptr; // basis at xi; null for nodal points
    Mat2 jit;                   // J^{-T} of the reference map at xi (element points only)
};

/// Mesh-global set of (point, weight) pairs. Element rules are contiguous:
/// points of element e are [element_offset(e), element_offset(e + 1)).
class MeshQuadrature
{
public:
    MeshQuadrature() = default;

    QuadratureFamily family() const noexcept { return family_; }
    std::size_t size() const noexcept { return points_.size(); }
    std::span<const QuadraturePoint> points() const noexcept { return points_; }
    const QuadraturePoint& operator[](std::size_t q) const { return points_[q]; }

    /// Number of elements covered (0 for nodal rules).
    std::size_t num_elements() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t element_offset(std::size_t e) const { return offsets_[e]; }
    std::span<const QuadraturePoint> element_points(std::size_t e) const
    {
        return std::span<const QuadraturePoint>(points_).subspan(offsets_[e], offsets_[e + 1] - offsets_[e]);
    }

    /// Raw nodal weights before the positivity fallback (nodal rules only).
    std::span<const double> raw_weights() const noexcept { return raw_weights_; }

    double total_weight() const
    {
        double s = 0.0;
        for (const auto& p : points_) s += p.weight;
        return s;
    }

private:
    friend MeshQuadrature gauss_rule(const StructuralMesh&, int, QuadratureFamily);
    friend MeshQuadrature adaptive_rule_from_levels(const StructuralMesh&, std::span<const int>);
    friend class NodalRuleBuilder;

    QuadratureFamily family_ = QuadratureFamily::Consistent;
    std::vector<QuadraturePoint> points_;
    std::vector<std::size_t> offsets_;
    std::vector<double> raw_weights_;
    std::vector<std::shared_ptr<const ReferenceRule>> rules_; // keep shape tables alive
};

namespace detail {

inline void append_element(std::vector<QuadraturePoint>& out, const StructuralMesh& mesh, std::size_t e,
                           const ReferenceRule& rule)
{
    const auto conn = mesh.element(e);
    const int npe = mesh.nodes_per_element();
    for (std::size_t q = 0; q < rule.points.size(); ++q)
    {
        const ShapeEval& s = rule.shapes[q];
        Vec2 X;
        Mat2 J;
        for (int a = 0; a < npe; ++a)
        {
            X += s.value[a] * mesh.node(conn[a]);
            J = J + outer(mesh.node(conn[a]), s.grad[a]);
        }
        const double det = J.det();
        if (!(det > 0.0)) throw GeometryError("non-positive Jacobian in element " + std::to_string(e));
        out.push_back({e, no_node, rule.points[q], X, rule.weights[q] * det, &s, J.inverse_transpose()});
    }
}

} // namespace detail

/// Per-element Gauss rule of the given polynomial degree.
inline MeshQuadrature gauss_rule(const StructuralMesh& mesh, int degree,
                                 QuadratureFamily family = QuadratureFamily::Consistent)
{
    IFED_REQUIRE(family != QuadratureFamily::Nodal, "use nodal_rule for nodal quadrature");
    MeshQuadrature mq;
    mq.family_ = family;
    auto rule = cached_reference_rule(mesh.kind(), degree);
    mq.rules_.push_back(rule);
    mq.points_.reserve(mesh.num_elements() * rule->points.size());
    mq.offsets_.reserve(mesh.num_elements() + 1);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    {
        mq.offsets_.push_back(mq.points_.size());
        detail::append_element(mq.points_, mesh, e, *rule);
    }
    mq.offsets_.push_back(mq.points_.size());
    return mq;
}

/// Rule that integrates the mass matrix exactly.
inline MeshQuadrature consistent_rule(const StructuralMesh& mesh)
{
    return gauss_rule(mesh, consistent_degree(mesh.kind()), QuadratureFamily::Consistent);
}

/// Rule used for load vectors: degree 2p Gauss on each element.
inline MeshQuadrature higher_order_rule(const StructuralMesh& mesh)
{
    return gauss_rule(mesh, consistent_degree(mesh.kind()), QuadratureFamily::HigherOrder);
}

enum class NodalWeights
{
    /// P1/Q1: integral of the basis; P2/Q2: composite trapezoid on linear sub-elements.
    Standard,
    /// Integral of the basis for every element kind (zero P2 vertex weights fall back to 1).
    BasisIntegral
};

namespace detail {

// Linear sub-elements (local node indices) of a quadratic element, all counter-clockwise.
inline std::span<const std::array<int, 4>> linear_subelements(ElementKind kind)
{
    static constexpr std::array<std::array<int, 4>, 4> p2{{{0, 3, 5, -1}, {3, 1, 4, -1}, {5, 4, 2, -1}, {3, 4, 5, -1}}};
    static constexpr std::array<std::array<int, 4>, 4> q2{{{0, 4, 8, 7}, {4, 1, 5, 8}, {8, 5, 2, 6}, {7, 8, 6, 3}}};
    return kind == ElementKind::P2 ? std::span<const std::array<int, 4>>(p2) : std::span<const std::array<int, 4>>(q2);
}

// Integral of each linear basis function over one P1 / Q1 element with given vertices.
inline std::array<double, 4> linear_basis_integrals(ElementKind lin, const std::array<Vec2, 4>& v)
{
    std::array<double, 4> w{};
    if (lin == ElementKind::P1)
    {
        const double area = 0.5 * ((v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (v[1].y - v[0].y));
        w[0] = w[1] = w[2] = area / 3.0;
        return w;
    }
    const auto rule = cached_reference_rule(ElementKind::Q1, 2);
    for (std::size_t q = 0; q < rule->points.size(); ++q)
    {
        const auto& s = rule->shapes[q];
        Mat2 J;
        for (int a = 0; a < 4; ++a) J = J + outer(v[a], s.grad[a]);
        for (int a = 0; a < 4; ++a) w[a] += s.value[a] * rule->weights[q] * J.det();
    }
    return w;
}

} // namespace detail

class NodalRuleBuilder
{
public:
    static MeshQuadrature build(const StructuralMesh& mesh, NodalWeights mode)
    {
        MeshQuadrature mq;
        mq.family_ = QuadratureFamily::Nodal;
        const std::size_t m = mesh.num_nodes();
        std::vector<double> w(m, 0.0);
        std::vector<std::size_t> owner(m, no_node);
        std::vector<int> local(m, -1);
        const int npe = mesh.nodes_per_element();

        const bool trapezoid = mode == NodalWeights::Standard && is_quadratic(mesh.kind());
        if (trapezoid)
        {
            const ElementKind lin = linear_counterpart(mesh.kind());
            const int nv = vertex_count(lin);
            for (std::size_t e = 0; e < mesh.num_elements(); ++e)
            {
                const auto conn = mesh.element(e);
                for (const auto& sub : detail::linear_subelements(mesh.kind()))
                {
                    std::array<Vec2, 4> v{};
                    for (int a = 0; a < nv; ++a) v[a] = mesh.node(conn[sub[a]]);
                    const auto wi = detail::linear_basis_integrals(lin, v);
                    for (int a = 0; a < nv; ++a) w[conn[sub[a]]] += wi[a];
                }
            }
        }
        else
        {
            const auto gauss = consistent_rule(mesh);
            for (const auto& p : gauss.points())
            {
                const auto conn = mesh.element(p.element);
                for (int a = 0; a < npe; ++a) w[conn[a]] += p.shape->value[a] * p.weight;
            }
        }
        for (std::size_t e = 0; e < mesh.num_elements(); ++e)
        {
            const auto conn = mesh.element(e);
            for (int a = 0; a < npe; ++a)
                if (owner[conn[a]] == no_node)
                {
                    owner[conn[a]] = e;
                    local[conn[a]] = a;
                }
        }

        mq.raw_weights_ = w;
        mq.points_.reserve(m);
        const auto ref = reference_nodes(mesh.kind());
        const double scale = max_abs(w);
        for (std::size_t k = 0; k < m; ++k)
        {
            // relative threshold: round-off leaves P2 vertex integrals near, not at, zero
            const double wk = w[k] > 1e-12 * scale ? w[k] : 1.0;
            mq.points_.push_back({owner[k], k, ref[local[k]], mesh.node(k), wk, nullptr, {}});
        }
        return mq;
    }

private:
    static double max_abs(const std::vector<double>& w)
    {
        double s = 0.0;
        for (double x : w) s = std::max(s, std::abs(x));
        return s;
    }
};

/// One point per mesh node with lumped weights w~ (non-positive weights replaced by 1).
inline MeshQuadrature nodal_rule(const StructuralMesh& mesh, NodalWeights mode = NodalWeights::Standard)
{
    return NodalRuleBuilder::build(mesh, mode);
}

/// Longest deformed side of element e; quadratic sides are measured along their
/// two halves (vertex, mid node, vertex).
inline double deformed_side_length(const StructuralMesh& mesh, std::size_t e, std::span<const Vec2> chi)
{
    const auto conn = mesh.element(e);
    const int nv = vertex_count(mesh.kind());
    double h = 0.0;
    for (int s = 0; s < nv; ++s)
    {
        const auto sn = side_nodes(mesh.kind(), s);
        const Vec2 a = chi[conn[sn[0]]], b = chi[conn[sn[1]]];
        const double len = sn[2] >= 0 ? norm(chi[conn[sn[2]]] - a) + norm(b - chi[conn[sn[2]]]) : norm(b - a);
        h = std::max(h, len);
    }
    return h;
}

inline constexpr int default_adaptive_cap = 64;

namespace detail {

// Level 1 is the consistent rule. Triangles use a k x k composite of the base
// rule; quadrilaterals add k - 1 Gauss points per direction.
inline std::shared_ptr<const ReferenceRule> adaptive_level_rule(ElementKind kind, int k)
{
    const int base_degree = consistent_degree(kind);
    const int n0 = std::max(1, (base_degree + 2) / 2);
    return is_simplex(kind) ? cached_reference_rule(kind, base_degree, k)
                            : cached_reference_rule(kind, 2 * (n0 + k - 1) - 1, 1);
}

} // namespace detail

/// Refinement level per element: the smallest k whose deformed point spacing,
/// estimated as (longest deformed side) x (relative point spacing of the rule),
/// is at most C_A dx.
inline std::vector<int> adaptive_levels(const StructuralMesh& mesh, std::span<const Vec2> chi, double dx, double c_a,
                                        int max_points_per_direction = default_adaptive_cap)
{
    IFED_REQUIRE(chi.size() == mesh.num_nodes(), "deformation must have one value per node");
    IFED_REQUIRE(dx > 0.0 && c_a > 0.0, "dx and C_A must be positive");
    const ElementKind kind = mesh.kind();
    const double target = c_a * dx;
    std::vector<std::shared_ptr<const ReferenceRule>> rules(2);
    auto rule = [&](int k) -> const ReferenceRule& {
        if (static_cast<int>(rules.size()) <= k) rules.resize(k + 1);
        if (!rules[k]) rules[k] = detail::adaptive_level_rule(kind, k);
        return *rules[k];
    };

    std::vector<int> levels(mesh.num_elements(), 1);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    {
        const double h = deformed_side_length(mesh, e, chi);
        int k = 1;
        while (h * rule(k).relative_spacing > target)
        {
            ++k;
            if (rule(k).points_per_direction > max_points_per_direction)
                throw RefinementCapError("element " + std::to_string(e) + " needs more than " +
                                         std::to_string(max_points_per_direction) +
                                         " quadrature points per direction (deformed side " + std::to_string(h) +
                                         ", C_A dx " + std::to_string(target) + ")");
        }
        levels[e] = k;
    }
    return levels;
}

/// Adaptive rule with the given per-element refinement levels.
inline MeshQuadrature adaptive_rule_from_levels(const StructuralMesh& mesh, std::span<const int> levels)
{
    IFED_REQUIRE(levels.size() == mesh.num_elements(), "one refinement level per element");
    MeshQuadrature mq;
    mq.family_ = QuadratureFamily::Adaptive;
    mq.offsets_.reserve(mesh.num_elements() + 1);
    std::vector<std::shared_ptr<const ReferenceRule>> rules;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    {
        const int k = levels[e];
        IFED_REQUIRE(k >= 1, "refinement levels start at 1");
        if (static_cast<int>(rules.size()) <= k) rules.resize(k + 1);
        if (!rules[k])
        {
            rules[k] = detail::adaptive_level_rule(mesh.kind(), k);
            mq.rules_.push_back(rules[k]);
        }
        mq.offsets_.push_back(mq.points_.size());
        detail::append_element(mq.points_, mesh, e, *rules[k]);
    }
    mq.offsets_.push_back(mq.points_.size());
    return mq;
}

/// Per-element Gauss rule refined until the deformed point spacing is at most
/// C_A dx. Never coarser than the consistent rule.
inline MeshQuadrature adaptive_rule(const StructuralMesh& mesh, std::span<const Vec2> chi, double dx, double c_a,
                                    int max_points_per_direction = default_adaptive_cap)
{
    return adaptive_rule_from_levels(mesh, adaptive_levels(mesh, chi, dx, c_a, max_points_per_direction));
}

} // namespace ifed
