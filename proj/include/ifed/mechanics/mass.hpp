#pragma once

#include "ifed/mechanics/fe_field.hpp"
#include "ifed/mechanics/sparse.hpp"
#include "ifed/quadrature/mesh_quadrature.hpp"

#include <span>
#include <vector>

namespace ifed {

enum class MassKind
{
    Consistent,
    Lumped
};

/// Scalar mass operator applied to each vector component independently.
class MassOperator
{
public:
    static MassOperator consistent(CsrMatrix m, double rel_tol = 1e-10)
    {
        MassOperator op;
        op.kind_ = MassKind::Consistent;
        op.diag_ = m.diagonal();
        op.matrix_ = std::move(m);
        op.inv_diag_.resize(op.diag_.size());
        for (std::size_t i = 0; i < op.diag_.size(); ++i) op.inv_diag_[i] = 1.0 / op.diag_[i];
        op.rel_tol_ = rel_tol;
        return op;
    }

    static MassOperator lumped(std::vector<double> diagonal)
    {
        MassOperator op;
        op.kind_ = MassKind::Lumped;
        for (double d : diagonal) IFED_REQUIRE(d > 0.0, "lumped mass entries must be positive");
        op.diag_ = std::move(diagonal);
        return op;
    }

    MassKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return diag_.size(); }
    /// Lumped entries, or the diagonal of the consistent matrix.
    std::span<const double> diagonal() const noexcept { return diag_; }
    const CsrMatrix& matrix() const { return matrix_; }

    std::vector<Vec2> apply(std::span<const Vec2> x) const
    {
        IFED_REQUIRE(x.size() == size(), "size mismatch");
        std::vector<Vec2> y(size());
        if (kind_ == MassKind::Lumped)
        {
            for (std::size_t i = 0; i < size(); ++i) y[i] = diag_[i] * x[i];
            return y;
        }
        for (int d = 0; d < 2; ++d)
        {
            std::vector<double> xs(size()), ys;
            for (std::size_t i = 0; i < size(); ++i) xs[i] = x[i][d];
            matrix_.multiply(xs, ys);
            for (std::size_t i = 0; i < size(); ++i) y[i][d] = ys[i];
        }
        return y;
    }

    /// Solves (mass) x = b componentwise. Lumped: pointwise division. A
    /// non-empty `guess` starts the consistent iteration there.
    std::vector<Vec2> solve(std::span<const Vec2> b, std::span<const Vec2> guess = {}) const
    {
        IFED_REQUIRE(b.size() == size(), "size mismatch");
        IFED_REQUIRE(guess.empty() || guess.size() == size(), "initial guess size mismatch");
        std::vector<Vec2> x(size());
        if (kind_ == MassKind::Lumped)
        {
            for (std::size_t i = 0; i < size(); ++i) x[i] = b[i] / diag_[i];
            return x;
        }
        ++solves_;
        auto apply = [this](const std::vector<double>& v, std::vector<double>& out) { matrix_.multiply(v, out); };
        for (int d = 0; d < 2; ++d)
        {
            std::vector<double> bs(size()), xs(size(), 0.0);
            for (std::size_t i = 0; i < size(); ++i) bs[i] = b[i][d];
            if (!guess.empty())
                for (std::size_t i = 0; i < size(); ++i) xs[i] = guess[i][d];
            const auto st = preconditioned_cg(apply, inv_diag_, bs, xs, rel_tol_, 1e-300, 10 * static_cast<int>(size()) + 100,
                                              "mass solve");
            iterations_ += st.iterations;
            for (std::size_t i = 0; i < size(); ++i) x[i][d] = xs[i];
        }
        return x;
    }

    /// Number of consistent solves and total CG iterations since construction.
    std::size_t solve_count() const noexcept { return solves_; }
    std::size_t iteration_count() const noexcept { return iterations_; }
    void reset_counters() const noexcept { solves_ = iterations_ = 0; }

private:
    MassKind kind_ = MassKind::Lumped;
    CsrMatrix matrix_;
    std::vector<double> diag_;
    std::vector<double> inv_diag_;
    double rel_tol_ = 1e-10;
    mutable std::size_t solves_ = 0;
    mutable std::size_t iterations_ = 0;
};

/// M_ij = sum_q phi_i(X_q) phi_j(X_q) w_q over an element quadrature.
inline MassOperator assemble_consistent_mass(const StructuralMesh& mesh, const MeshQuadrature& rule,
                                             double rel_tol = 1e-10)
{
    IFED_REQUIRE(rule.family() != QuadratureFamily::Nodal, "consistent mass needs an element quadrature");
    TripletBuilder tb(mesh.num_nodes());
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    {
        const auto conn = mesh.element(e);
        for (const auto& p : rule.element_points(e))
            for (int i = 0; i < p.shape->count; ++i)
                for (int j = 0; j < p.shape->count; ++j)
                    tb.add(conn[i], conn[j], p.shape->value[i] * p.shape->value[j] * p.weight);
    }
    return MassOperator::consistent(tb.build(), rel_tol);
}

/// D = diag(w~_k) from a nodal rule.
inline MassOperator assemble_lumped_mass(const MeshQuadrature& nodal)
{
    IFED_REQUIRE(nodal.family() == QuadratureFamily::Nodal, "lumped mass needs a nodal rule");
    std::vector<double> d(nodal.size());
    for (std::size_t k = 0; k < nodal.size(); ++k) d[nodal[k].node] = nodal[k].weight;
    return MassOperator::lumped(std::move(d));
}

inline MassOperator assemble_mass(const StructuralMesh& mesh, MassKind kind)
{
    return kind == MassKind::Consistent ? assemble_consistent_mass(mesh, consistent_rule(mesh))
                                        : assemble_lumped_mass(nodal_rule(mesh));
}

/// F = M^-1 L (consistent) or F_i = L_i / D_ii (lumped).
inline FEField project_force(const StructuralMesh& mesh, std::span<const Vec2> load, const MassOperator& mass)
{
    return FEField(mesh, FieldRole::Force, mass.solve(load));
}

} // namespace ifed
