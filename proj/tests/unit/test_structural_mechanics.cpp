#include "ifed/mechanics/loads.hpp"
#include "ifed/mechanics/mass.hpp"
#include "ifed/mesh/mesh_generators.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace ifed;

namespace {

constexpr ElementKind all_kinds[] = {ElementKind::P1, ElementKind::P2, ElementKind::Q1, ElementKind::Q2};
constexpr double pi = std::numbers::pi;

Mat2 random_matrix(std::mt19937_64& rng, double lo_det, double hi_det)
{
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (;;)
    {
        Mat2 F{1 + u(rng), u(rng), u(rng), 1 + u(rng)};
        if (F.det() >= lo_det && F.det() <= hi_det) return F;
    }
}

// Smooth stress vanishing on the boundary of the unit square, and its divergence.
Mat2 bubble_stress(const Vec2& X)
{
    const double s = std::sin(pi * X.x) * std::sin(pi * X.y);
    return Mat2{s * (1 + X.y), s * X.x, s * std::cos(X.x), 2 * s};
}

Vec2 bubble_divergence(const Vec2& X)
{
    const double h = 1e-5;
    auto P = bubble_stress;
    const Mat2 dx = (1.0 / (2 * h)) * (P(X + Vec2{h, 0}) - P(X - Vec2{h, 0}));
    const Mat2 dy = (1.0 / (2 * h)) * (P(X + Vec2{0, h}) - P(X - Vec2{0, h}));
    return {dx(0, 0) + dy(0, 1), dx(1, 0) + dy(1, 1)};
}

// Nonzero on the boundary; used for the interior-node statement.
Mat2 smooth_stress(const Vec2& X)
{
    return Mat2{std::sin(2 * X.x + X.y), X.x * X.y * X.y, std::exp(0.5 * X.x) * std::cos(X.y), X.x - X.y * X.y};
}

Vec2 smooth_divergence(const Vec2& X)
{
    return {2 * std::cos(2 * X.x + X.y) + 2 * X.x * X.y, 0.5 * std::exp(0.5 * X.x) * std::cos(X.y) - 2 * X.y};
}

std::vector<Vec2> manufactured_load(const StructuralMesh& mesh, Mat2 (*stress)(const Vec2&))
{
    std::vector<Vec2> load(mesh.num_nodes());
    const auto chi = FEField::identity(mesh);
    add_stress_load(load, chi, gauss_rule(mesh, 5, QuadratureFamily::HigherOrder),
                    [&](std::size_t, const Vec2& X, const Mat2&) { return stress(X); });
    return load;
}

} // namespace

TEST(DeformationGradient, IdentityAndAffine)
{
    for (auto kind : all_kinds)
    {
        const auto mesh = generate_patch_mesh({Vec2{0, 0}, Vec2{2, 0.3}, Vec2{2.4, 1.9}, Vec2{-0.2, 1.5}}, 2, 2, kind);
        const auto id = FEField::identity(mesh);
        const Mat2 A{1.3, -0.2, 0.4, 0.8};
        const Vec2 b{0.5, -1.0};
        FEField aff(mesh, FieldRole::Deformation);
        for (std::size_t k = 0; k < mesh.num_nodes(); ++k) aff[k] = A * mesh.node(k) + b;
        for (std::size_t e = 0; e < mesh.num_elements(); ++e)
        {
            const Vec2 xi = is_simplex(kind) ? Vec2{0.2, 0.3} : Vec2{-0.3, 0.6};
            const Mat2 F0 = deformation_gradient(id, e, xi);
            const Mat2 F1 = deformation_gradient(aff, e, xi);
            EXPECT_LE((F0 - Mat2::identity()).frobenius2(), 1e-26);
            EXPECT_LE((F1 - A).frobenius2(), 1e-26);
        }
    }
}

TEST(DeformationGradient, QuadraticFiniteDifference)
{
    StructuralMesh mesh(ElementKind::P2, {{0, 0}, {1, 0}, {0, 1}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}}, {0, 1, 2, 3, 4, 5});
    auto map = [](const Vec2& X) { return Vec2{X.x + 0.3 * X.x * X.y, X.y + 0.2 * X.x * X.x - 0.1 * X.y * X.y}; };
    FEField chi(mesh, FieldRole::Deformation);
    for (std::size_t k = 0; k < 6; ++k) chi[k] = map(mesh.node(k));
    const Vec2 xi{0.25, 0.4};
    const Mat2 F = deformation_gradient(chi, 0, xi);
    const double h = 1e-6;
    // reference element equals physical element, so xi-derivatives are X-derivatives
    const Vec2 dx = (chi.evaluate(0, xi + Vec2{h, 0}) - chi.evaluate(0, xi - Vec2{h, 0})) / (2 * h);
    const Vec2 dy = (chi.evaluate(0, xi + Vec2{0, h}) - chi.evaluate(0, xi - Vec2{0, h})) / (2 * h);
    EXPECT_NEAR(F(0, 0), dx.x, 1e-6);
    EXPECT_NEAR(F(1, 0), dx.y, 1e-6);
    EXPECT_NEAR(F(0, 1), dy.x, 1e-6);
    EXPECT_NEAR(F(1, 1), dy.y, 1e-6);
}

TEST(Material, ZeroStressAtIdentity)
{
    for (auto model : {MaterialModel::ModifiedNeoHookean, MaterialModel::IncompressibleNeoHookean})
    {
        const Mat2 P = pk1_stress(Mat2::identity(), Material{model, 80.194, 374.239});
        EXPECT_LE(P.frobenius2(), 1e-26);
    }
    // volumetric term alone vanishes at J = 1
    const Material stab_only{MaterialModel::ModifiedNeoHookean, 0.0, 374.239};
    EXPECT_EQ(pk1_stress(Mat2::diag(2.0, 0.5), stab_only).frobenius2(), 0.0);
}

TEST(Material, StressIsEnergyGradient)
{
    std::mt19937_64 rng(17);
    for (auto model : {MaterialModel::ModifiedNeoHookean, MaterialModel::IncompressibleNeoHookean})
    {
        const Material m{model, 80.194, 374.239};
        for (int trial = 0; trial < 100; ++trial)
        {
            const Mat2 F = random_matrix(rng, 0.5, 2.0);
            const Mat2 P = pk1_stress(F, m);
            double scale = std::sqrt(P.frobenius2()) + m.shear_modulus;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                {
                    const double h = 1e-6;
                    Mat2 Fp = F, Fm = F;
                    Fp(i, j) += h;
                    Fm(i, j) -= h;
                    const double fd = (strain_energy(Fp, m) - strain_energy(Fm, m)) / (2 * h);
                    EXPECT_NEAR(P(i, j), fd, 1e-6 * scale) << to_string(model);
                }
        }
    }
    // simple shear
    const Mat2 F{1, 0.1, 0, 1};
    const Material m{MaterialModel::ModifiedNeoHookean, 80.194, 374.239};
    const double h = 1e-6;
    Mat2 Fp = F, Fm = F;
    Fp(0, 1) += h;
    Fm(0, 1) -= h;
    const double fd = (strain_energy(Fp, m) - strain_energy(Fm, m)) / (2 * h);
    EXPECT_NEAR(pk1_stress(F, m)(0, 1), fd, 1e-6 * std::abs(fd));
}

TEST(Material, StabilizationPressureSignAndInversion)
{
    EXPECT_GT(stabilization_pressure(0.8, 10.0), 0.0);
    EXPECT_LT(stabilization_pressure(1.2, 10.0), 0.0);
    EXPECT_EQ(stabilization_pressure(1.0, 10.0), 0.0);
    try
    {
        pk1_stress(Mat2{-1, 0, 0, 1}, Material{MaterialModel::ModifiedNeoHookean, 1, 1}, 42);
        FAIL();
    }
    catch (const InvertedElementError& e)
    {
        EXPECT_EQ(e.element(), 42u);
    }
    EXPECT_EQ(pk1_stress(Mat2{-1, 0, 0, 1}, Material{MaterialModel::RigidPenalty, 0, 0}).frobenius2(), 0.0);
}

TEST(LoadVector, IdentityGivesZero)
{
    for (auto kind : all_kinds)
    {
        const auto mesh = generate_block_mesh(1, 1, 3, 3, kind);
        const auto L = assemble_load_vector(FEField::identity(mesh), Material{MaterialModel::ModifiedNeoHookean, 80, 370},
                                            higher_order_rule(mesh));
        for (const auto& v : L) EXPECT_LE(norm(v), 1e-12);
    }
}

TEST(LoadVector, ConstantStressEquilibrium)
{
    const Mat2 P0{1.5, -0.7, 0.3, 2.2};
    for (auto kind : all_kinds)
    {
        const auto mesh = generate_patch_mesh({Vec2{0, 0}, Vec2{2, 0.3}, Vec2{2.4, 1.9}, Vec2{-0.2, 1.5}}, 4, 3, kind);
        std::vector<Vec2> L(mesh.num_nodes());
        add_stress_load(L, FEField::identity(mesh), higher_order_rule(mesh),
                        [&](std::size_t, const Vec2&, const Mat2&) { return P0; });
        const auto F = project_force(mesh, L, assemble_mass(mesh, MassKind::Lumped));
        for (std::size_t k = 0; k < mesh.num_nodes(); ++k)
            if (!mesh.is_boundary_node(k))
            {
                EXPECT_LE(norm(L[k]), 1e-12) << to_string(kind);
                EXPECT_LE(norm(F[k]), 1e-12) << to_string(kind);
            }
    }
}

TEST(MassOperator, SingleTriangle)
{
    StructuralMesh mesh(ElementKind::P1, {{0, 0}, {1, 0}, {0, 1}}, {0, 1, 2});
    const auto M = assemble_mass(mesh, MassKind::Consistent);
    const auto D = assemble_mass(mesh, MassKind::Lumped);
    for (std::size_t i = 0; i < 3; ++i)
    {
        EXPECT_NEAR(D.diagonal()[i], 1.0 / 6.0, 1e-15);
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(M.matrix()(i, j), (i == j ? 2.0 : 1.0) / 24.0, 1e-15);
    }
}

TEST(MassOperator, SymmetricAndRowSumsMatchLumped)
{
    for (auto kind : all_kinds)
    {
        const auto mesh = generate_patch_mesh({Vec2{0, 0}, Vec2{2, 0.3}, Vec2{2.4, 1.9}, Vec2{-0.2, 1.5}}, 3, 3, kind);
        const auto M = assemble_mass(mesh, MassKind::Consistent);
        for (std::size_t i = 0; i < M.size(); ++i)
            for (std::size_t j = 0; j < M.size(); ++j) EXPECT_EQ(M.matrix()(i, j), M.matrix()(j, i));
        const auto rs = M.matrix().row_sums();
        const auto basis = nodal_rule(mesh, NodalWeights::BasisIntegral);
        for (std::size_t i = 0; i < M.size(); ++i) EXPECT_NEAR(rs[i], basis.raw_weights()[i], 1e-12);
        if (kind == ElementKind::P1 || kind == ElementKind::Q1)
        {
            const auto D = assemble_mass(mesh, MassKind::Lumped);
            for (std::size_t i = 0; i < M.size(); ++i) EXPECT_NEAR(rs[i], D.diagonal()[i], 1e-12);
        }
    }
}

TEST(ProjectForce, TrivialCases)
{
    const auto mesh = generate_block_mesh(1, 1, 3, 3, ElementKind::P2);
    std::vector<Vec2> zero(mesh.num_nodes());
    for (auto kind : {MassKind::Consistent, MassKind::Lumped})
    {
        const auto F0 = project_force(mesh, zero, assemble_mass(mesh, kind));
        for (const auto& v : F0.values()) EXPECT_EQ(norm(v), 0.0);
    }
    std::vector<Vec2> L(mesh.num_nodes());
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    for (auto& v : L) v = {n(rng), n(rng)};
    const auto F = project_force(mesh, L, MassOperator::lumped(std::vector<double>(mesh.num_nodes(), 1.0)));
    for (std::size_t k = 0; k < L.size(); ++k) EXPECT_EQ(F[k], L[k]);

    const auto M = assemble_mass(mesh, MassKind::Consistent);
    const auto x = M.solve(L);
    const auto back = M.apply(x);
    for (std::size_t k = 0; k < L.size(); ++k) EXPECT_LE(norm(back[k] - L[k]), 1e-9 * (1 + norm(L[k])));
    EXPECT_EQ(M.solve_count(), 1u);
    EXPECT_GT(M.iteration_count(), 0u);
}

TEST(ProjectForce, ConsistentConvergesSecondOrderInL2)
{
    std::vector<double> err;
    for (int n : {8, 16, 32})
    {
        const auto mesh = generate_block_mesh(1, 1, n, n, ElementKind::P1);
        const auto F = project_force(mesh, manufactured_load(mesh, bubble_stress), assemble_mass(mesh, MassKind::Consistent));
        const auto rule = gauss_rule(mesh, 5);
        double e2 = 0.0;
        for (const auto& p : rule.points())
        {
            const Vec2 d = F.evaluate(p.element, *p.shape) - bubble_divergence(p.X);
            e2 += dot(d, d) * p.weight;
        }
        err.push_back(std::sqrt(e2));
    }
    EXPECT_GE(std::log2(err[0] / err[1]), 1.9);
    EXPECT_GE(std::log2(err[1] / err[2]), 1.9);
}

TEST(ProjectForce, LumpedFirstOrderAtInteriorNodes)
{
    std::vector<double> err;
    for (int n : {8, 16, 32})
    {
        // a skewed patch keeps the meshes from being accidentally superconvergent
        const auto mesh = generate_patch_mesh({Vec2{0, 0}, Vec2{1.2, 0.1}, Vec2{1.1, 1.0}, Vec2{0.1, 0.9}}, n, n,
                                              ElementKind::P1);
        const auto F = project_force(mesh, manufactured_load(mesh, smooth_stress), assemble_mass(mesh, MassKind::Lumped));
        double e = 0.0;
        for (std::size_t k = 0; k < mesh.num_nodes(); ++k)
            if (!mesh.is_boundary_node(k)) e = std::max(e, norm(F[k] - smooth_divergence(mesh.node(k))));
        err.push_back(e);
    }
    EXPECT_GE(std::log2(err[0] / err[1]), 0.9);
    EXPECT_GE(std::log2(err[1] / err[2]), 0.9);
}

TEST(ProjectForce, LumpedAndConsistentAgreeUnderRefinement)
{
    std::vector<double> diff;
    for (int n : {8, 16, 32})
    {
        const auto mesh = generate_block_mesh(1, 1, n, n, ElementKind::P1);
        const auto L = manufactured_load(mesh, bubble_stress);
        const auto Fl = project_force(mesh, L, assemble_mass(mesh, MassKind::Lumped));
        const auto Fc = project_force(mesh, L, assemble_mass(mesh, MassKind::Consistent));
        double d = 0.0;
        for (std::size_t k = 0; k < mesh.num_nodes(); ++k)
            if (!mesh.is_boundary_node(k)) d = std::max(d, norm(Fl[k] - Fc[k]));
        diff.push_back(d);
    }
    EXPECT_GE(std::log2(diff[0] / diff[1]), 0.9);
    EXPECT_GE(std::log2(diff[1] / diff[2]), 0.9);
}

TEST(Tethers, ZeroAtTargetAndPureDamping)
{
    const auto mesh = generate_block_mesh(1, 1, 3, 3, ElementKind::Q2);
    const auto chi = FEField::identity(mesh);
    FEField U(mesh, FieldRole::Velocity);
    std::vector<Vec2> L(mesh.num_nodes());
    Tether body{5.0, 0.0};
    SurfaceTether surf{{5.0, 0.0}, left_side};
    add_body_tether(L, chi, &U, higher_order_rule(mesh), body);
    add_surface_tether(L, chi, &U, surf);
    for (const auto& v : L) EXPECT_EQ(norm(v), 0.0);

    const Vec2 u0{0.3, -1.1};
    for (auto& v : U.values()) v = u0;
    Tether damp{0.0, 2.5};
    add_body_tether(L, chi, &U, higher_order_rule(mesh), damp);
    const auto F = project_force(mesh, L, assemble_mass(mesh, MassKind::Consistent));
    for (const auto& v : F.values()) EXPECT_LE(norm(v + 2.5 * u0), 1e-9);
    const auto Fl = project_force(mesh, L, MassOperator::lumped(assemble_consistent_mass(mesh, consistent_rule(mesh)).matrix().row_sums()));
    for (const auto& v : Fl.values()) EXPECT_LE(norm(v + 2.5 * u0), 1e-12);
}

TEST(Tethers, SingleFacetHandAssembly)
{
    // one P1 triangle; the tethered facet is side 0 from (0,0) to (l,0)
    const double l = 0.7, dt = 1e-3, dx = 0.05;
    const double kappa = 2.5 * dx / dt;
    StructuralMesh mesh(ElementKind::P1, {{0, 0}, {l, 0}, {0, 0.4}}, {0, 1, 2}, {{0, 0, 9}});
    auto chi = FEField::identity(mesh);
    chi[0] += Vec2{1.0, 0.0};
    std::vector<Vec2> L(3);
    add_surface_tether(L, chi, nullptr, SurfaceTether{{kappa, 0.0}, 9});
    EXPECT_NEAR(L[0].x, -kappa * l / 3.0, 1e-9);
    EXPECT_NEAR(L[1].x, -kappa * l / 6.0, 1e-9);
    EXPECT_EQ(norm(L[2]), 0.0);
    EXPECT_EQ(L[0].y, 0.0);

    // masked component is ignored
    std::vector<Vec2> M(3);
    SurfaceTether only_y{{kappa, 0.0, false, true}, 9};
    add_surface_tether(M, chi, nullptr, only_y);
    for (const auto& v : M) EXPECT_EQ(norm(v), 0.0);
}

TEST(Tractions, TotalForceAndRamp)
{
    for (auto kind : all_kinds)
    {
        const auto mesh = generate_block_mesh(2, 1, 3, 2, kind);
        std::vector<Vec2> L(mesh.num_nodes());
        add_traction_load(L, mesh, TractionLoad{top_side, {0.0, -3.0}}, load_ramp(20.0, 40.0));
        Vec2 total;
        for (const auto& v : L) total += v;
        EXPECT_NEAR(total.y, -3.0 * 2.0 * 0.5, 1e-12);
        EXPECT_NEAR(total.x, 0.0, 1e-14);
    }
    EXPECT_EQ(load_ramp(20.0, 40.0), 0.5);
    EXPECT_EQ(load_ramp(80.0, 40.0), 1.0);
    EXPECT_EQ(load_ramp(0.0, 0.0), 1.0);
}
