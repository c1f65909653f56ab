#pragma once

#include "ifed/mesh/structural_mesh.hpp"

#include <array>
#include <cmath>
#include <map>

namespace ifed {

/// Facet markers assigned by the structured generators, by parametric side.
enum SideMarker : int
{
    interior_marker = 0,
    bottom_side = 1,
    right_side = 2,
    top_side = 3,
    left_side = 4,
};

namespace detail {

struct LinearPatch
{
    std::vector<Vec2> nodes;
    std::vector<Vec2> params; // (s, t) in [0, 1]^2 for each node
    std::vector<int> connectivity;
};

inline LinearPatch linear_patch(const std::array<Vec2, 4>& corners, int nx, int ny, bool triangles)
{
    LinearPatch p;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
        {
            const double s = static_cast<double>(i) / nx, t = static_cast<double>(j) / ny;
            p.params.push_back({s, t});
            p.nodes.push_back((1 - s) * (1 - t) * corners[0] + s * (1 - t) * corners[1] + s * t * corners[2] +
                              (1 - s) * t * corners[3]);
        }
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
        {
            const int n00 = id(i, j), n10 = id(i + 1, j), n11 = id(i + 1, j + 1), n01 = id(i, j + 1);
            if (triangles)
                p.connectivity.insert(p.connectivity.end(), {n00, n10, n11, n00, n11, n01});
            else
                p.connectivity.insert(p.connectivity.end(), {n00, n10, n11, n01});
        }
    return p;
}

/// Adds mid-edge nodes at geometric edge midpoints (and the bilinear center for
/// quadrilaterals), turning a P1/Q1 connectivity into P2/Q2.
inline void elevate(std::vector<Vec2>& nodes, std::vector<Vec2>& params, std::vector<int>& conn, bool triangles)
{
    const int nv = triangles ? 3 : 4;
    const int nq = triangles ? 6 : 9;
    std::map<std::pair<int, int>, int> midpoints;
    std::vector<int> out;
    out.reserve(conn.size() / nv * nq);
    for (std::size_t e = 0; e < conn.size() / nv; ++e)
    {
        std::array<int, 9> local{};
        for (int k = 0; k < nv; ++k) local[k] = conn[e * nv + k];
        for (int s = 0; s < nv; ++s)
        {
            const int a = local[s], b = local[(s + 1) % nv];
            const auto key = std::minmax(a, b);
            auto [it, inserted] = midpoints.try_emplace({key.first, key.second}, static_cast<int>(nodes.size()));
            if (inserted)
            {
                nodes.push_back(0.5 * (nodes[a] + nodes[b]));
                params.push_back(0.5 * (params[a] + params[b]));
            }
            local[nv + s] = it->second;
        }
        if (!triangles)
        {
            local[8] = static_cast<int>(nodes.size());
            nodes.push_back(0.25 * (nodes[local[0]] + nodes[local[1]] + nodes[local[2]] + nodes[local[3]]));
            params.push_back(0.25 * (params[local[0]] + params[local[1]] + params[local[2]] + params[local[3]]));
        }
        out.insert(out.end(), local.begin(), local.begin() + nq);
    }
    conn = std::move(out);
}

} // namespace detail

/// Structured mesh of the bilinear patch spanned by `corners` (counter-clockwise,
/// starting bottom-left), with nx x ny cells. Triangular kinds split each cell
/// along its (0,0)-(1,1) diagonal. Boundary facets carry SideMarker values.
inline StructuralMesh generate_patch_mesh(const std::array<Vec2, 4>& corners, int nx, int ny, ElementKind kind)
{
    IFED_REQUIRE(nx >= 1 && ny >= 1, "nx and ny must be at least 1");
    const bool tri = is_simplex(kind);
    auto patch = detail::linear_patch(corners, nx, ny, tri);
    if (is_quadratic(kind)) detail::elevate(patch.nodes, patch.params, patch.connectivity, tri);

    StructuralMesh plain(kind, patch.nodes, patch.connectivity);
    std::vector<BoundaryFacet> marked;
    constexpr double eps = 1e-12;
    for (const auto& f : plain.boundary_facets())
    {
        const auto conn = plain.element(f.element);
        const auto sn = side_nodes(kind, f.side);
        const Vec2 a = patch.params[conn[sn[0]]], b = patch.params[conn[sn[1]]];
        int marker = interior_marker;
        if (a.y < eps && b.y < eps)
            marker = bottom_side;
        else if (a.x > 1 - eps && b.x > 1 - eps)
            marker = right_side;
        else if (a.y > 1 - eps && b.y > 1 - eps)
            marker = top_side;
        else if (a.x < eps && b.x < eps)
            marker = left_side;
        marked.push_back({f.element, f.side, marker});
    }
    return StructuralMesh(kind, std::move(patch.nodes), std::move(patch.connectivity), marked);
}

/// Axis-aligned width x height block with lower-left corner at `origin`.
inline StructuralMesh generate_block_mesh(double width, double height, int nx, int ny, ElementKind kind,
                                          const Vec2& origin = {0.0, 0.0})
{
    IFED_REQUIRE(width > 0.0 && height > 0.0, "block dimensions must be positive");
    return generate_patch_mesh(
        {origin, origin + Vec2{width, 0.0}, origin + Vec2{width, height}, origin + Vec2{0.0, height}}, nx, ny, kind);
}

/// Classical Cook's membrane corners (0,0), (48,44), (48,60), (0,44), scaled so the
/// longest side (the lower, tapered edge) has length `longest_side`, then shifted by
/// `origin`. Left side is marked left_side (clamped), right side right_side (loaded).
inline std::array<Vec2, 4> cooks_membrane_corners(double longest_side = 6.5, const Vec2& origin = {0.0, 0.0})
{
    const double scale = longest_side / std::hypot(48.0, 44.0);
    return {origin + scale * Vec2{0, 0}, origin + scale * Vec2{48, 44}, origin + scale * Vec2{48, 60},
            origin + scale * Vec2{0, 44}};
}

inline StructuralMesh generate_cooks_membrane(int nx, int ny, ElementKind kind, double longest_side = 6.5,
                                              const Vec2& origin = {0.0, 0.0})
{
    return generate_patch_mesh(cooks_membrane_corners(longest_side, origin), nx, ny, kind);
}

/// Disjoint union of two meshes of the same kind; facet markers are kept.
inline StructuralMesh merge_meshes(const StructuralMesh& a, const StructuralMesh& b)
{
    IFED_REQUIRE(a.kind() == b.kind(), "merged meshes must use the same element kind");
    std::vector<Vec2> nodes(a.nodes().begin(), a.nodes().end());
    nodes.insert(nodes.end(), b.nodes().begin(), b.nodes().end());
    std::vector<int> conn(a.connectivity().begin(), a.connectivity().end());
    const int shift = static_cast<int>(a.num_nodes());
    for (int c : b.connectivity()) conn.push_back(c + shift);
    std::vector<BoundaryFacet> facets(a.boundary_facets().begin(), a.boundary_facets().end());
    for (BoundaryFacet f : b.boundary_facets())
    {
        f.element += a.num_elements();
        facets.push_back(f);
    }
    return StructuralMesh(a.kind(), std::move(nodes), std::move(conn), facets);
}

} // namespace ifed
