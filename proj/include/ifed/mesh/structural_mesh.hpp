#pragma once

#include "ifed/core/errors.hpp"
#include "ifed/core/vec2.hpp"
#include "ifed/mesh/reference_element.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace ifed {

/// One side of one element lying on the mesh boundary.
struct BoundaryFacet
{
    std::size_t element = 0;
    int side = 0;
    int marker = 0;

    friend bool operator==(const BoundaryFacet&, const BoundaryFacet&) = default;
};

/// Unstructured 2D finite element mesh in the reference configuration.
///
/// Immutable after construction. Construction checks connectivity, that every
/// node is used, and that the Jacobian determinant is positive on every element.
/// Boundary facets are found topologically (sides shared by exactly one element);
/// markers passed in override the default marker 0 of the matching facet.
class StructuralMesh
{
public:
    StructuralMesh(ElementKind kind, std::vector<Vec2> nodes, std::vector<int> connectivity,
                   const std::vector<BoundaryFacet>& marked_facets = {})
        : kind_(kind), nodes_(std::move(nodes)), connectivity_(std::move(connectivity))
    {
        const std::size_t npe = node_count(kind_);
        if (connectivity_.empty() || connectivity_.size() % npe != 0)
            throw GeometryError("connectivity size is not a multiple of the element node count");
        std::vector<char> used(nodes_.size(), 0);
        for (int idx : connectivity_)
        {
            if (idx < 0 || static_cast<std::size_t>(idx) >= nodes_.size())
                throw GeometryError("connectivity references node " + std::to_string(idx) + " which does not exist");
            used[idx] = 1;
        }
        for (std::size_t i = 0; i < used.size(); ++i)
            if (!used[i]) throw GeometryError("node " + std::to_string(i) + " is not referenced by any element");

        check_orientation();
        find_boundary(marked_facets);
    }

    ElementKind kind() const noexcept { return kind_; }
    std::size_t num_nodes() const noexcept { return nodes_.size(); }
    std::size_t num_elements() const noexcept { return connectivity_.size() / node_count(kind_); }
    int nodes_per_element() const noexcept { return node_count(kind_); }

    std::span<const Vec2> nodes() const noexcept { return nodes_; }
    const Vec2& node(std::size_t i) const { return nodes_[i]; }
    std::span<const int> connectivity() const noexcept { return connectivity_; }
    std::span<const int> element(std::size_t e) const
    {
        const std::size_t npe = node_count(kind_);
        return std::span<const int>(connectivity_).subspan(e * npe, npe);
    }

    std::span<const BoundaryFacet> boundary_facets() const noexcept { return facets_; }
    bool is_boundary_node(std::size_t i) const { return boundary_node_[i] != 0; }
    std::span<const char> boundary_node_flags() const noexcept { return boundary_node_; }

    /// Returns a copy whose facet markers are assigned by `classify(facet midpoint)`.
    StructuralMesh with_markers(const std::function<int(const Vec2&)>& classify) const
    {
        StructuralMesh copy = *this;
        for (auto& f : copy.facets_)
        {
            const auto sn = side_nodes(kind_, f.side);
            const auto conn = element(f.element);
            f.marker = classify(0.5 * (nodes_[conn[sn[0]]] + nodes_[conn[sn[1]]]));
        }
        return copy;
    }

    Vec2 map_to_physical(std::size_t e, const Vec2& xi) const
    {
        const auto conn = element(e);
        Vec2 x;
        for (int i = 0; i < nodes_per_element(); ++i) x += shape_value(kind_, i, xi) * nodes_[conn[i]];
        return x;
    }

    /// dX/dxi with columns the xi- and eta-derivatives.
    Mat2 jacobian(std::size_t e, const Vec2& xi) const
    {
        const auto conn = element(e);
        Mat2 j;
        for (int i = 0; i < nodes_per_element(); ++i) j = j + outer(nodes_[conn[i]], shape_gradient(kind_, i, xi));
        return j;
    }

    /// Longest vertex-to-vertex element edge, the structural mesh spacing.
    double max_edge_length() const
    {
        double h = 0.0;
        const int nv = vertex_count(kind_);
        for (std::size_t e = 0; e < num_elements(); ++e)
        {
            const auto conn = element(e);
            for (int s = 0; s < nv; ++s) h = std::max(h, norm(nodes_[conn[(s + 1) % nv]] - nodes_[conn[s]]));
        }
        return h;
    }

private:
    void check_orientation() const
    {
        const auto ref = reference_nodes(kind_);
        const Vec2 center = is_simplex(kind_) ? Vec2{1.0 / 3.0, 1.0 / 3.0} : Vec2{0.0, 0.0};
        for (std::size_t e = 0; e < num_elements(); ++e)
        {
            // Affine and bilinear maps have detJ affine in xi, so nodes plus center suffice.
            double worst = jacobian(e, center).det();
            for (const Vec2& xi : ref) worst = std::min(worst, jacobian(e, xi).det());
            if (!(worst > 0.0))
                throw GeometryError("element " + std::to_string(e) + " is degenerate or inverted (det J = " +
                                    std::to_string(worst) + ")");
        }
    }

    void find_boundary(const std::vector<BoundaryFacet>& marked)
    {
        const int nv = vertex_count(kind_);
        std::map<std::pair<int, int>, std::pair<BoundaryFacet, int>> sides;
        for (std::size_t e = 0; e < num_elements(); ++e)
        {
            const auto conn = element(e);
            for (int s = 0; s < nv; ++s)
            {
                const int a = conn[s], b = conn[(s + 1) % nv];
                auto key = std::minmax(a, b);
                auto [it, inserted] = sides.try_emplace({key.first, key.second}, BoundaryFacet{e, s, 0}, 0);
                ++it->second.second;
            }
        }
        for (const auto& [key, entry] : sides)
            if (entry.second == 1) facets_.push_back(entry.first);
        std::sort(facets_.begin(), facets_.end(), [](const BoundaryFacet& a, const BoundaryFacet& b) {
            return a.element != b.element ? a.element < b.element : a.side < b.side;
        });
        for (const auto& m : marked)
        {
            auto it = std::find_if(facets_.begin(), facets_.end(), [&](const BoundaryFacet& f) {
                return f.element == m.element && f.side == m.side;
            });
            if (it == facets_.end())
                throw GeometryError("marked facet (" + std::to_string(m.element) + ", " + std::to_string(m.side) +
                                    ") is not on the mesh boundary");
            it->marker = m.marker;
        }

        boundary_node_.assign(nodes_.size(), 0);
        for (const auto& f : facets_)
        {
            const auto conn = element(f.element);
            for (int ln : side_nodes(kind_, f.side))
                if (ln >= 0) boundary_node_[conn[ln]] = 1;
        }
    }

    ElementKind kind_;
    std::vector<Vec2> nodes_;
    std::vector<int> connectivity_;
    std::vector<BoundaryFacet> facets_;
    std::vector<char> boundary_node_;
};

} // namespace ifed
