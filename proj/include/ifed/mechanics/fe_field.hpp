#pragma once

#include "ifed/mesh/structural_mesh.hpp"

#include <span>
#include <vector>

namespace ifed {

enum class FieldRole
{
    Deformation,
    Velocity,
    Force
};

/// Vector-valued field in the nodal basis of a mesh: one 2-vector coefficient per
/// node. The mesh must outlive the field.
class FEField
{
public:
    FEField(const StructuralMesh& mesh, FieldRole role) : mesh_(&mesh), role_(role), values_(mesh.num_nodes()) {}
    FEField(const StructuralMesh& mesh, FieldRole role, std::vector<Vec2> values)
        : mesh_(&mesh), role_(role), values_(std::move(values))
    {
        IFED_REQUIRE(values_.size() == mesh.num_nodes(), "field needs one coefficient per node");
    }

    /// chi(X) = X
    static FEField identity(const StructuralMesh& mesh)
    {
        return FEField(mesh, FieldRole::Deformation, {mesh.nodes().begin(), mesh.nodes().end()});
    }

    const StructuralMesh& mesh() const noexcept { return *mesh_; }
    FieldRole role() const noexcept { return role_; }
    std::size_t size() const noexcept { return values_.size(); }
    /// Number of scalar degrees of freedom (two per node).
    std::size_t dof_count() const noexcept { return 2 * values_.size(); }

    std::span<Vec2> values() noexcept { return values_; }
    std::span<const Vec2> values() const noexcept { return values_; }
    Vec2& operator[](std::size_t k) { return values_[k]; }
    const Vec2& operator[](std::size_t k) const { return values_[k]; }

    Vec2 evaluate(std::size_t e, const Vec2& xi) const
    {
        const auto conn = mesh_->element(e);
        Vec2 v;
        for (int i = 0; i < mesh_->nodes_per_element(); ++i) v += shape_value(mesh_->kind(), i, xi) * values_[conn[i]];
        return v;
    }

    Vec2 evaluate(std::size_t e, const ShapeEval& s) const
    {
        const auto conn = mesh_->element(e);
        Vec2 v;
        for (int i = 0; i < s.count; ++i) v += s.value[i] * values_[conn[i]];
        return v;
    }

private:
    const StructuralMesh* mesh_;
    FieldRole role_;
    std::vector<Vec2> values_;
};

/// Physical gradients grad_X phi_i at one point, plus the reference-to-physical
/// Jacobian determinant.
struct PhysicalGradients
{
    std::array<Vec2, max_element_nodes> grad{};
    double det = 0.0;
};

inline PhysicalGradients physical_gradients(const StructuralMesh& mesh, std::size_t e, const ShapeEval& s)
{
    const auto conn = mesh.element(e);
    Mat2 J;
    for (int i = 0; i < s.count; ++i) J = J + outer(mesh.node(conn[i]), s.grad[i]);
    PhysicalGradients out;
    out.det = J.det();
    if (!(out.det > 0.0)) throw GeometryError("singular reference Jacobian in element " + std::to_string(e));
    const Mat2 jit = J.inverse_transpose();
    for (int i = 0; i < s.count; ++i) out.grad[i] = jit * s.grad[i];
    return out;
}

/// F_h = sum_l chi_l (x) grad_X phi_l at a point with pre-evaluated basis.
inline Mat2 deformation_gradient(const FEField& chi, std::size_t e, const ShapeEval& s, const PhysicalGradients& g)
{
    const auto conn = chi.mesh().element(e);
    Mat2 F;
    for (int i = 0; i < s.count; ++i) F = F + outer(chi[conn[i]], g.grad[i]);
    return F;
}

inline Mat2 deformation_gradient(const FEField& chi, std::size_t e, const Vec2& xi)
{
    const ShapeEval s = evaluate_shapes(chi.mesh().kind(), xi);
    return deformation_gradient(chi, e, s, physical_gradients(chi.mesh(), e, s));
}

} // namespace ifed
