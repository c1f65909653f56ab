#include "ifed/fluid/navier_stokes.hpp"
#include "ifed/fluid/snapshot.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

using namespace ifed;

namespace {

constexpr double pi = std::numbers::pi;

double kinetic_energy(const MACGrid& g, const StaggeredField& u)
{
    double e = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) e += u[0](i, j) * u[0](i, j);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) e += u[1](i, j) * u[1](i, j);
    return 0.5 * e * g.dx * g.dx;
}

double max_interior_divergence(const NavierStokesSolver& ns, const StaggeredField& u)
{
    const CellField d = ns.divergence(u);
    return d.max_abs();
}

void fill_random(const MACGrid& g, StaggeredField& u, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> r(-1, 1);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) u[0](i, j) = r(rng);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u[1](i, j) = r(rng);
}

// Samples the velocity of the stream function psi at faces by differencing
// node values, which makes the field exactly discrete-divergence free.
template<class Psi>
StaggeredField from_stream_function(const MACGrid& g, Psi psi)
{
    StaggeredField u(g);
    auto node = [&](int i, int j) { return psi(g.origin.x + i * g.dx, g.origin.y + j * g.dx); };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) u[0](i, j) = (node(i, j + 1) - node(i, j)) / g.dx;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u[1](i, j) = -(node(i + 1, j) - node(i, j)) / g.dx;
    return u;
}

std::vector<double> dense(const MACGrid& g, const CellField& p)
{
    std::vector<double> v(static_cast<std::size_t>(g.nx) * g.ny);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v[static_cast<std::size_t>(j) * g.nx + i] = p(i, j);
    return v;
}

} // namespace

TEST(MacGrid, StorageShapesAndLocations)
{
    const MACGrid g(8, 4, 0.25, {1.0, -1.0});
    StaggeredField u(g);
    EXPECT_EQ(u[0].nx(), 9);
    EXPECT_EQ(u[0].ny(), 4);
    EXPECT_EQ(u[1].nx(), 8);
    EXPECT_EQ(u[1].ny(), 5);
    const Vec2 fu = g.face_center(0, 0, 0), fv = g.face_center(1, 0, 0), c = g.cell_center(0, 0);
    EXPECT_DOUBLE_EQ(fu.x, 1.0);
    EXPECT_DOUBLE_EQ(fu.y, -0.875);
    EXPECT_DOUBLE_EQ(fv.x, 1.125);
    EXPECT_DOUBLE_EQ(fv.y, -1.0);
    EXPECT_DOUBLE_EQ(c.x, 1.125);
    EXPECT_THROW(MACGrid(0, 4, 0.1), ContractViolation);
}

TEST(Divergence, UniformAndLinearFields)
{
    const MACGrid g(16, 12, 0.1);
    NavierStokesSolver ns(g, BoundarySpec::no_slip_box(), {});
    StaggeredField u(g);
    u[0].fill(2.0);
    u[1].fill(-3.0);
    EXPECT_LT(ns.divergence(u).max_abs(), 1e-14);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) u[0](i, j) = g.face_center(0, i, j).x;
    u[1].fill(0.0);
    const CellField d = ns.divergence(u);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) EXPECT_NEAR(d(i, j), 1.0, 1e-12);
}

TEST(Divergence, GradientIsNegativeAdjoint)
{
    const MACGrid g(20, 14, 0.07);
    NavierStokesSolver ns(g, BoundarySpec::no_slip_box(), {});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> r(-1, 1);
    for (int trial = 0; trial < 5; ++trial)
    {
        StaggeredField u(g);
        fill_random(g, u, rng);
        ns.apply_boundary_conditions(u, 0.0); // zero normal velocity on the walls
        CellField p = make_cell_field(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) p(i, j) = r(rng);
        ns.fill_pressure_ghosts(p);
        const StaggeredField gp = ns.gradient(p);
        const CellField du = ns.divergence(u);
        double lhs = 0.0, rhs = 0.0, scale = 0.0;
        for (int d = 0; d < 2; ++d)
            for (int j = 0; j < g.face_ny(d); ++j)
                for (int i = 0; i < g.face_nx(d); ++i)
                {
                    lhs += gp[d](i, j) * u[d](i, j);
                    scale += std::abs(gp[d](i, j) * u[d](i, j));
                }
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) rhs += p(i, j) * du(i, j);
        EXPECT_NEAR(lhs, -rhs, 1e-12 * scale);
    }
}

TEST(Poisson, FftMatchesCgForEveryBoundaryMix)
{
    const MACGrid g(24, 18, 0.05);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> r(-1, 1);
    const std::array<PoissonBoundary, 5> mixes{
        PoissonBoundary{{false, false, false, false}}, PoissonBoundary{{true, true, true, true}},
        PoissonBoundary{{true, false, false, false}}, PoissonBoundary{{false, true, false, true}},
        PoissonBoundary{{true, true, false, false}}};
    for (const auto& bc : mixes)
    {
        std::vector<double> rhs(static_cast<std::size_t>(g.nx) * g.ny);
        for (double& v : rhs) v = r(rng);
        PoissonSolver fft(g, bc, PoissonBackend::FFT), cg(g, bc, PoissonBackend::CG);
        std::vector<double> a, b, lap;
        fft.solve(rhs, a);
        cg.solve(rhs, b, 1e-12);
        double amax = 0.0, diff = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k)
        {
            amax = std::max(amax, std::abs(a[k]));
            diff = std::max(diff, std::abs(a[k] - b[k]));
        }
        EXPECT_LT(diff, 1e-8 * amax);
        EXPECT_GT(cg.last_iterations(), 0);

        // The FFT solution satisfies the discrete equation (up to the removed mean).
        apply_cell_laplacian(g, bc, a, lap);
        double mean = 0.0;
        if (bc.all_neumann())
        {
            for (double v : rhs) mean += v;
            mean /= static_cast<double>(rhs.size());
        }
        for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(lap[k], rhs[k] - mean, 1e-9);
    }
}

TEST(Projection, RemovesDivergenceAndIsIdempotent)
{
    const MACGrid g(32, 24, 1.0 / 32);
    for (bool traction : {false, true})
    {
        BoundarySpec bc;
        if (traction)
        {
            bc[Side::Left] = SideCondition::traction(0.0);
            bc[Side::Right] = SideCondition::traction(0.0);
        }
        NavierStokesSolver ns(g, bc, {});
        std::mt19937_64 rng(11);
        StaggeredField u(g);
        fill_random(g, u, rng);
        ns.apply_boundary_conditions(u, 0.0);
        CellField p = make_cell_field(g);
        ns.project(u, p, 1.0, 0.0);
        EXPECT_LT(max_interior_divergence(ns, u), 1e-8);

        StaggeredField again = u;
        CellField p2 = make_cell_field(g);
        ns.project(again, p2, 1.0, 0.0);
        double change = 0.0;
        for (int d = 0; d < 2; ++d)
            for (int j = 0; j < g.face_ny(d); ++j)
                for (int i = 0; i < g.face_nx(d); ++i) change = std::max(change, std::abs(again[d](i, j) - u[d](i, j)));
        EXPECT_LT(change, 1e-10);
    }
}

TEST(BoundaryConditions, ZeroWallsGiveZeroGhosts)
{
    const MACGrid g(6, 5, 0.2);
    NavierStokesSolver ns(g, BoundarySpec::no_slip_box(), {});
    StaggeredField u(g);
    u.fill(7.0);
    for (int d = 0; d < 2; ++d)
        for (int j = 0; j < g.face_ny(d); ++j)
            for (int i = 0; i < g.face_nx(d); ++i) u[d](i, j) = 0.0;
    ns.apply_boundary_conditions(u, 0.0);
    for (int d = 0; d < 2; ++d)
        for (double v : u[d].raw()) EXPECT_EQ(v, 0.0);
}

TEST(BoundaryConditions, PrescribedProfileOnFacesAndWallAverage)
{
    const MACGrid g(10, 8, 0.125, {0.0, 0.0});
    auto profile = [](const Vec2& x, double t) { return Vec2{x.y * (1 - x.y) * (1 + t), 0.3 * x.y}; };
    BoundarySpec bc;
    bc[Side::Left] = SideCondition::prescribed(profile);
    NavierStokesSolver ns(g, bc, {});
    StaggeredField u(g);
    std::mt19937_64 rng(5);
    fill_random(g, u, rng);
    ns.apply_boundary_conditions(u, 0.5);
    for (int j = 0; j < g.ny; ++j)
    {
        EXPECT_DOUBLE_EQ(u[0](0, j), profile(g.face_center(0, 0, j), 0.5).x);
        EXPECT_NEAR(0.5 * (u[0](-1, j) + u[0](1, j)), u[0](0, j), 1e-14);
    }
    // tangential: mean of the ghost and first interior v equals the wall value
    // (corner faces belong to the no-slip bottom and top walls)
    for (int j = 1; j < g.ny; ++j)
        EXPECT_NEAR(0.5 * (u[1](-1, j) + u[1](0, j)), profile({0.0, j * g.dx}, 0.5).y, 1e-14);
    // no-slip sides still vanish on average at the wall
    for (int i = 0; i <= g.nx; ++i) EXPECT_NEAR(u[0](i, -1) + u[0](i, 0), 0.0, 1e-14);
}

TEST(NavierStokes, QuiescentStaysAtRest)
{
    const MACGrid g(16, 16, 1.0 / 16);
    NavierStokesSolver ns(g, BoundarySpec::no_slip_box(), {1.0, 0.01});
    FluidState s = ns.make_state();
    for (int k = 0; k < 5; ++k) ns.step(s, nullptr, 1e-3);
    EXPECT_EQ(s.u.max_abs(), 0.0);
    const double p0 = s.p(0, 0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) EXPECT_NEAR(s.p(i, j), p0, 1e-12);
    EXPECT_NEAR(s.t, 5e-3, 1e-15);
}

TEST(NavierStokes, RejectsUnstableTimeStep)
{
    const MACGrid g(16, 16, 1.0 / 16);
    NavierStokesSolver ns(g, BoundarySpec::no_slip_box(), {1.0, 1.0});
    FluidState s = ns.make_state();
    EXPECT_THROW(ns.step(s, nullptr, 1e-2), ContractViolation);
}

TEST(NavierStokes, NonFiniteForceRaisesBlowUp)
{
    const MACGrid g(8, 8, 1.0 / 8);
    NavierStokesSolver ns(g, BoundarySpec::no_slip_box(), {1.0, 0.01});
    FluidState s = ns.make_state();
    StaggeredField f(g);
    f[0](3, 3) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(ns.step(s, &f, 1e-3), BlowUpError);
}

namespace {

// Steady channel flow on [0, 2] x [0, 1]; returns the max face error of u
// against the parabola and leaves the final state in `out`.
double poiseuille_error(int ny, bool traction_driven, FluidState* out = nullptr)
{
    const double mu = 1.0, G = 2.0; // -dp/dx
    const MACGrid g(2 * ny, ny, 1.0 / ny);
    auto exact = [&](double y) { return G / (2 * mu) * y * (1 - y); };
    BoundarySpec bc;
    if (traction_driven)
    {
        bc[Side::Left] = SideCondition::traction(-G * 2.0); // p = 4 at x = 0
        bc[Side::Right] = SideCondition::traction(0.0);
    }
    else
    {
        auto inflow = [&](const Vec2& x, double) { return Vec2{exact(x.y), 0.0}; };
        bc[Side::Left] = SideCondition::prescribed(inflow);
        bc[Side::Right] = SideCondition::prescribed(inflow);
    }
    NavierStokesSolver ns(g, bc, {1.0, mu, 0.0});
    FluidState s = ns.make_state();
    const double dt = 0.2 * g.dx * g.dx / mu;
    const int steps = static_cast<int>(std::ceil(2.5 / dt));
    for (int k = 0; k < steps; ++k) ns.step(s, nullptr, dt);
    double err = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) err = std::max(err, std::abs(s.u[0](i, j) - exact(g.face_center(0, i, j).y)));
    if (out) *out = std::move(s);
    return err;
}

} // namespace

TEST(NavierStokes, PoiseuilleSteadyStateSecondOrder)
{
    for (bool traction : {false, true})
    {
        const double e1 = poiseuille_error(16, traction);
        const double e2 = poiseuille_error(32, traction);
        EXPECT_LT(e2, 0.02 * 0.25) << "traction=" << traction; // umax = 0.25
        EXPECT_GT(std::log2(e1 / e2), 1.8) << "traction=" << traction << " e1=" << e1 << " e2=" << e2;
    }
}

TEST(NavierStokes, TractionSidesSetPressureDrop)
{
    // pressure-driven channel with no structure: sigma_nn = -5 on the left and
    // +5 on the right gives a linear pressure falling by 10 across the domain
    const MACGrid g(64, 32, 1.0 / 32);
    BoundarySpec bc;
    bc[Side::Left] = SideCondition::traction(-5.0);
    bc[Side::Right] = SideCondition::traction(5.0);
    NavierStokesSolver ns(g, bc, {1.0, 0.01});
    FluidState s = ns.make_state();
    for (int k = 0; k < 200; ++k) ns.step(s, nullptr, 1e-3 * g.dx);
    for (int j = 0; j < g.ny; ++j)
        EXPECT_NEAR(s.p(0, j) - s.p(g.nx - 1, j), 10.0 - 5.0 * g.dx, 1e-6);
}

TEST(NavierStokes, TaylorGreenEnergyDecayRate)
{
    const double mu = 0.01, rho = 1.0, k = pi;
    const int n = 128;
    const MACGrid g(n, n, 1.0 / n);
    auto exact = [&](const Vec2& x, double t) {
        const double e = std::exp(-2 * mu / rho * k * k * t);
        return Vec2{std::sin(k * x.x) * std::cos(k * x.y) * e, -std::cos(k * x.x) * std::sin(k * x.y) * e};
    };
    BoundarySpec bc;
    for (Side s : all_sides) bc[s] = SideCondition::prescribed(exact);
    NavierStokesSolver ns(g, bc, {rho, mu});
    FluidState s = ns.make_state();
    for (int d = 0; d < 2; ++d)
        for (int j = 0; j < g.face_ny(d); ++j)
            for (int i = 0; i < g.face_nx(d); ++i) s.u[d](i, j) = exact(g.face_center(d, i, j), 0.0)[d];
    ns.apply_boundary_conditions(s.u, 0.0);
    ns.project(s.u, s.p, 1.0, 0.0);
    s.p.fill(0.0);
    const double e0 = kinetic_energy(g, s.u);
    const double T = 1.0, dt = 1e-3;
    for (int step = 0; step < static_cast<int>(std::lround(T / dt)); ++step) ns.step(s, nullptr, dt);
    const double rate = -std::log(kinetic_energy(g, s.u) / e0) / T;
    const double expected = 4 * mu * k * k / rho;
    EXPECT_NEAR(rate / expected, 1.0, 0.02) << "rate " << rate << " expected " << expected;
}

TEST(NavierStokes, KineticEnergyNonIncreasingWithWalls)
{
    const MACGrid g(32, 32, 1.0 / 32);
    NavierStokesSolver ns(g, BoundarySpec::no_slip_box(), {1.0, 0.02});
    FluidState s = ns.make_state();
    s.u = from_stream_function(g, [](double x, double y) {
        const double a = std::sin(pi * x) * std::sin(pi * y), b = std::sin(2 * pi * x) * std::sin(3 * pi * y);
        return 0.3 * a * a + 0.05 * b * b;
    });
    ns.apply_boundary_conditions(s.u, 0.0);
    ASSERT_LT(max_interior_divergence(ns, s.u), 1e-12);
    double e = kinetic_energy(g, s.u);
    for (int k = 0; k < 300; ++k)
    {
        ns.step(s, nullptr, 2e-3);
        const double e_new = kinetic_energy(g, s.u);
        ASSERT_LE(e_new, e * (1 + 1e-13)) << "step " << k;
        e = e_new;
    }
    EXPECT_LT(max_interior_divergence(ns, s.u), 1e-8);
}

TEST(NavierStokes, UpwindBlendOnlyAboveCellPeclet)
{
    // at low Peclet the blend has no effect on the right-hand side
    const MACGrid g(16, 16, 1.0 / 16);
    NavierStokesSolver a(g, BoundarySpec::no_slip_box(), {1.0, 1.0, 0.0});
    NavierStokesSolver b(g, BoundarySpec::no_slip_box(), {1.0, 1.0, 0.9});
    StaggeredField u(g);
    std::mt19937_64 rng(2);
    fill_random(g, u, rng);
    a.apply_boundary_conditions(u, 0.0);
    CellField p = make_cell_field(g);
    StaggeredField ra, rb;
    a.momentum_rhs(u, p, nullptr, ra);
    b.momentum_rhs(u, p, nullptr, rb);
    for (int d = 0; d < 2; ++d)
        for (std::size_t k = 0; k < ra[d].raw().size(); ++k) EXPECT_EQ(ra[d].raw()[k], rb[d].raw()[k]);
}

TEST(Snapshot, TextAndBinaryRoundTrip)
{
    const MACGrid g(5, 3, 0.3, {-1.0, 2.0});
    StaggeredField u(g);
    std::mt19937_64 rng(9);
    fill_random(g, u, rng);
    CellField p = make_cell_field(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) p(i, j) = i - 0.25 * j;
    for (bool binary : {false, true})
    {
        std::stringstream ss;
        if (binary)
            write_snapshot_binary(ss, g, 1.5, u, p);
        else
            write_snapshot_text(ss, g, 1.5, u, p);
        const Snapshot s = binary ? read_snapshot_binary(ss) : read_snapshot_text(ss);
        EXPECT_EQ(s.grid.nx, 5);
        EXPECT_EQ(s.grid.ny, 3);
        EXPECT_DOUBLE_EQ(s.grid.dx, 0.3);
        EXPECT_DOUBLE_EQ(s.grid.origin.x, -1.0);
        EXPECT_DOUBLE_EQ(s.time, 1.5);
        for (int d = 0; d < 2; ++d)
            for (int j = 0; j < g.face_ny(d); ++j)
                for (int i = 0; i < g.face_nx(d); ++i) EXPECT_EQ(s.u[d](i, j), u[d](i, j));
        EXPECT_EQ(dense(g, s.p), dense(g, p));
    }
    std::stringstream bad("NOTASNAP");
    EXPECT_THROW(read_snapshot_binary(bad), Error);
}

TEST(Snapshot, BinaryHeaderIsLittleEndian)
{
    const MACGrid g(2, 1, 1.0);
    StaggeredField u(g);
    CellField p = make_cell_field(g);
    std::stringstream ss;
    write_snapshot_binary(ss, g, 0.0, u, p);
    const std::string bytes = ss.str();
    ASSERT_EQ(bytes.size(), 8u + 12u + 32u + 8u * (3 + 4 + 2));
    EXPECT_EQ(bytes.substr(0, 8), "IFEDSNAP");
    EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 2); // nx low byte
    EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 1); // ny low byte
}
