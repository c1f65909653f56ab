#pragma once

#include "ifed/core/errors.hpp"
#include "ifed/core/vec2.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace ifed {

enum class ElementKind
{
    P1,
    P2,
    Q1,
    Q2
};

inline constexpr int max_element_nodes = 9;

constexpr int node_count(ElementKind kind)
{
    switch (kind)
    {
    case ElementKind::P1: return 3;
    case ElementKind::P2: return 6;
    case ElementKind::Q1: return 4;
    case ElementKind::Q2: return 9;
    }
    return 0;
}

constexpr int vertex_count(ElementKind kind) { return (kind == ElementKind::P1 || kind == ElementKind::P2) ? 3 : 4; }
constexpr bool is_simplex(ElementKind kind) { return vertex_count(kind) == 3; }
constexpr bool is_quadratic(ElementKind kind) { return kind == ElementKind::P2 || kind == ElementKind::Q2; }
constexpr int polynomial_degree(ElementKind kind) { return is_quadratic(kind) ? 2 : 1; }
constexpr ElementKind linear_counterpart(ElementKind kind) { return is_simplex(kind) ? ElementKind::P1 : ElementKind::Q1; }

/// Element factor: nodes of quadratic elements sit about half an element apart.
constexpr double element_factor(ElementKind kind) { return is_quadratic(kind) ? 2.0 : 1.0; }

/// Area of the reference domain: unit right triangle or [-1, 1]^2.
constexpr double reference_area(ElementKind kind) { return is_simplex(kind) ? 0.5 : 4.0; }

inline std::string_view to_string(ElementKind kind)
{
    switch (kind)
    {
    case ElementKind::P1: return "p1";
    case ElementKind::P2: return "p2";
    case ElementKind::Q1: return "q1";
    case ElementKind::Q2: return "q2";
    }
    return "?";
}

inline ElementKind parse_element_kind(std::string_view s)
{
    if (s == "p1" || s == "P1") return ElementKind::P1;
    if (s == "p2" || s == "P2") return ElementKind::P2;
    if (s == "q1" || s == "Q1") return ElementKind::Q1;
    if (s == "q2" || s == "Q2") return ElementKind::Q2;
    throw UnsupportedConfiguration("unknown element kind '" + std::string(s) + "'");
}

// Node ordering: vertices first (counter-clockwise), then mid-edge nodes with
// mid node (nv + s) on side s = (vertex s, vertex s+1), then the Q2 center.
inline std::span<const Vec2> reference_nodes(ElementKind kind)
{
    static constexpr std::array<Vec2, 3> p1{{{0, 0}, {1, 0}, {0, 1}}};
    static constexpr std::array<Vec2, 6> p2{{{0, 0}, {1, 0}, {0, 1}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}}};
    static constexpr std::array<Vec2, 4> q1{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
    static constexpr std::array<Vec2, 9> q2{
        {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {0, -1}, {1, 0}, {0, 1}, {-1, 0}, {0, 0}}};
    switch (kind)
    {
    case ElementKind::P1: return p1;
    case ElementKind::P2: return p2;
    case ElementKind::Q1: return q1;
    case ElementKind::Q2: return q2;
    }
    return {};
}

/// Local node indices on side s, ordered (start vertex, end vertex[, mid node]).
inline std::array<int, 3> side_nodes(ElementKind kind, int side)
{
    const int nv = vertex_count(kind);
    return {side, (side + 1) % nv, is_quadratic(kind) ? nv + side : -1};
}

/// Reference point on side s at edge parameter t in [0, 1].
inline Vec2 side_point(ElementKind kind, int side, double t)
{
    const auto nodes = reference_nodes(kind);
    const Vec2 a = nodes[side];
    const Vec2 b = nodes[(side + 1) % vertex_count(kind)];
    return a + t * (b - a);
}

namespace detail {

// 1D quadratic Lagrange basis on {-1, 0, 1}, indexed by node position.
constexpr double lagrange2(int node, double s)
{
    switch (node)
    {
    case -1: return 0.5 * s * (s - 1.0);
    case 0: return 1.0 - s * s;
    default: return 0.5 * s * (s + 1.0);
    }
}
constexpr double lagrange2_d(int node, double s)
{
    switch (node)
    {
    case -1: return s - 0.5;
    case 0: return -2.0 * s;
    default: return s + 0.5;
    }
}

} // namespace detail

/// Basis value phi_i(xi) on the reference element.
inline double shape_value(ElementKind kind, int i, const Vec2& xi)
{
    const int n = node_count(kind);
    if (i < 0 || i >= n) throw ContractViolation("shape_value: basis index " + std::to_string(i) + " out of range");
    const double l1 = xi.x, l2 = xi.y, l0 = 1.0 - xi.x - xi.y;
    switch (kind)
    {
    case ElementKind::P1: return i == 0 ? l0 : (i == 1 ? l1 : l2);
    case ElementKind::P2:
        switch (i)
        {
        case 0: return l0 * (2.0 * l0 - 1.0);
        case 1: return l1 * (2.0 * l1 - 1.0);
        case 2: return l2 * (2.0 * l2 - 1.0);
        case 3: return 4.0 * l0 * l1;
        case 4: return 4.0 * l1 * l2;
        default: return 4.0 * l2 * l0;
        }
    case ElementKind::Q1: {
        const Vec2 node = reference_nodes(kind)[i];
        return 0.25 * (1.0 + node.x * xi.x) * (1.0 + node.y * xi.y);
    }
    case ElementKind::Q2: {
        const Vec2 node = reference_nodes(kind)[i];
        return detail::lagrange2(static_cast<int>(node.x), xi.x) * detail::lagrange2(static_cast<int>(node.y), xi.y);
    }
    }
    return 0.0;
}

/// Reference-space gradient of phi_i at xi.
inline Vec2 shape_gradient(ElementKind kind, int i, const Vec2& xi)
{
    const int n = node_count(kind);
    if (i < 0 || i >= n) throw ContractViolation("shape_gradient: basis index " + std::to_string(i) + " out of range");
    const double l1 = xi.x, l2 = xi.y, l0 = 1.0 - xi.x - xi.y;
    // barycentric gradients: grad l0 = (-1,-1), grad l1 = (1,0), grad l2 = (0,1)
    switch (kind)
    {
    case ElementKind::P1: return i == 0 ? Vec2{-1, -1} : (i == 1 ? Vec2{1, 0} : Vec2{0, 1});
    case ElementKind::P2:
        switch (i)
        {
        case 0: return Vec2{-1, -1} * (4.0 * l0 - 1.0);
        case 1: return Vec2{1, 0} * (4.0 * l1 - 1.0);
        case 2: return Vec2{0, 1} * (4.0 * l2 - 1.0);
        case 3: return 4.0 * (Vec2{-1, -1} * l1 + Vec2{1, 0} * l0);
        case 4: return 4.0 * (Vec2{1, 0} * l2 + Vec2{0, 1} * l1);
        default: return 4.0 * (Vec2{0, 1} * l0 + Vec2{-1, -1} * l2);
        }
    case ElementKind::Q1: {
        const Vec2 node = reference_nodes(kind)[i];
        return {0.25 * node.x * (1.0 + node.y * xi.y), 0.25 * node.y * (1.0 + node.x * xi.x)};
    }
    case ElementKind::Q2: {
        const Vec2 node = reference_nodes(kind)[i];
        const int a = static_cast<int>(node.x), b = static_cast<int>(node.y);
        return {detail::lagrange2_d(a, xi.x) * detail::lagrange2(b, xi.y),
                detail::lagrange2(a, xi.x) * detail::lagrange2_d(b, xi.y)};
    }
    }
    return {};
}

/// All basis values and reference gradients at one reference point.
struct ShapeEval
{
    int count = 0;
    std::array<double, max_element_nodes> value{};
    std::array<Vec2, max_element_nodes> grad{};
};

inline ShapeEval evaluate_shapes(ElementKind kind, const Vec2& xi)
{
    ShapeEval s;
    s.count = node_count(kind);
    for (int i = 0; i < s.count; ++i)
    {
        s.value[i] = shape_value(kind, i, xi);
        s.grad[i] = shape_gradient(kind, i, xi);
    }
    return s;
}

inline bool inside_reference(ElementKind kind, const Vec2& xi, double tol = 1e-12)
{
    if (is_simplex(kind)) return xi.x >= -tol && xi.y >= -tol && xi.x + xi.y <= 1.0 + tol;
    return std::abs(xi.x) <= 1.0 + tol && std::abs(xi.y) <= 1.0 + tol;
}

} // namespace ifed
