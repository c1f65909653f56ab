#pragma once

#include "ifed/fluid/mac_grid.hpp"
#include "ifed/mechanics/sparse.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

namespace ifed {

/// Boundary behaviour of the cell-centered Poisson operator on each side:
/// Neumann (ghost = interior) or Dirichlet zero on the boundary face
/// (ghost = -interior).
struct PoissonBoundary
{
    std::array<bool, 4> dirichlet{}; // indexed by Side

    bool operator[](Side s) const { return dirichlet[static_cast<int>(s)]; }
    bool all_neumann() const { return !dirichlet[0] && !dirichlet[1] && !dirichlet[2] && !dirichlet[3]; }
};

/// Applies the five-point Laplacian with the boundary rules above to the
/// interior of `phi` (ghosts are ignored), writing into `out`.
inline void apply_cell_laplacian(const MACGrid& g, const PoissonBoundary& bc, const std::vector<double>& phi,
                                 std::vector<double>& out)
{
    const int nx = g.nx, ny = g.ny;
    const double s = 1.0 / (g.dx * g.dx);
    out.assign(phi.size(), 0.0);
    auto at = [&](int i, int j) { return phi[static_cast<std::size_t>(j) * nx + i]; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
        {
            const double c = at(i, j);
            const double w = i > 0 ? at(i - 1, j) : (bc[Side::Left] ? -c : c);
            const double e = i < nx - 1 ? at(i + 1, j) : (bc[Side::Right] ? -c : c);
            const double sb = j > 0 ? at(i, j - 1) : (bc[Side::Bottom] ? -c : c);
            const double n = j < ny - 1 ? at(i, j + 1) : (bc[Side::Top] ? -c : c);
            out[static_cast<std::size_t>(j) * nx + i] = s * (w + e + sb + n - 4.0 * c);
        }
}

enum class PoissonBackend
{
    FFT,
    CG
};

/// Solves L phi = rhs for the cell-centered Laplacian with per-side Neumann or
/// homogeneous Dirichlet conditions. With all-Neumann boundaries the mean of
/// rhs is removed and the zero-mean solution is returned.
class PoissonSolver
{
public:
    PoissonSolver(const MACGrid& g, PoissonBoundary bc, PoissonBackend backend = PoissonBackend::FFT)
        : grid_(g), bc_(bc), backend_(backend)
    {
        const int nx = g.nx, ny = g.ny;
        buffer_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * nx * ny)));
        lambda_x_ = eigenvalues(nx, bc[Side::Left], bc[Side::Right]);
        lambda_y_ = eigenvalues(ny, bc[Side::Bottom], bc[Side::Top]);
        if (backend_ == PoissonBackend::FFT)
        {
            std::lock_guard lock(planner_mutex());
            // row-major with j slow: first dimension is y
            forward_ = fftw_plan_r2r_2d(ny, nx, buffer_.get(), buffer_.get(), forward_kind(bc[Side::Bottom], bc[Side::Top]),
                                        forward_kind(bc[Side::Left], bc[Side::Right]), FFTW_ESTIMATE);
            backward_ = fftw_plan_r2r_2d(ny, nx, buffer_.get(), buffer_.get(),
                                         backward_kind(bc[Side::Bottom], bc[Side::Top]),
                                         backward_kind(bc[Side::Left], bc[Side::Right]), FFTW_ESTIMATE);
            if (!forward_ || !backward_) throw Error("FFTW could not create Poisson transform plans");
        }
    }

    PoissonSolver(const PoissonSolver&) = delete;
    PoissonSolver& operator=(const PoissonSolver&) = delete;

    ~PoissonSolver()
    {
        std::lock_guard lock(planner_mutex());
        if (forward_) fftw_destroy_plan(forward_);
        if (backward_) fftw_destroy_plan(backward_);
    }

    const PoissonBoundary& boundary() const noexcept { return bc_; }
    PoissonBackend backend() const noexcept { return backend_; }
    int last_iterations() const noexcept { return last_iterations_; }

    /// rhs and phi are dense nx*ny arrays (row-major in j).
    void solve(const std::vector<double>& rhs, std::vector<double>& phi, double cg_tol = 1e-10)
    {
        const int nx = grid_.nx, ny = grid_.ny;
        const std::size_t n = static_cast<std::size_t>(nx) * ny;
        IFED_REQUIRE(rhs.size() == n, "rhs size mismatch");
        std::vector<double> b = rhs;
        if (bc_.all_neumann())
        {
            double mean = 0.0;
            for (double v : b) mean += v;
            mean /= static_cast<double>(n);
            for (double& v : b) v -= mean;
        }
        if (backend_ == PoissonBackend::FFT)
            solve_fft(b, phi);
        else
            solve_cg(b, phi, cg_tol);
        if (bc_.all_neumann())
        {
            double mean = 0.0;
            for (double v : phi) mean += v;
            mean /= static_cast<double>(n);
            for (double& v : phi) v -= mean;
        }
    }

private:
    struct FftwFree
    {
        void operator()(double* p) const { fftw_free(p); }
    };

    static std::mutex& planner_mutex()
    {
        static std::mutex m;
        return m;
    }

    static fftw_r2r_kind forward_kind(bool lo_dirichlet, bool hi_dirichlet)
    {
        if (!lo_dirichlet && !hi_dirichlet) return FFTW_REDFT10;
        if (lo_dirichlet && hi_dirichlet) return FFTW_RODFT10;
        return lo_dirichlet ? FFTW_RODFT11 : FFTW_REDFT11;
    }
    static fftw_r2r_kind backward_kind(bool lo_dirichlet, bool hi_dirichlet)
    {
        if (!lo_dirichlet && !hi_dirichlet) return FFTW_REDFT01;
        if (lo_dirichlet && hi_dirichlet) return FFTW_RODFT01;
        return lo_dirichlet ? FFTW_RODFT11 : FFTW_REDFT11;
    }

    // Eigenvalues of the negative 1D second difference (times dx^2).
    static std::vector<double> eigenvalues(int n, bool lo_dirichlet, bool hi_dirichlet)
    {
        std::vector<double> lam(n);
        const double pi = std::numbers::pi;
        for (int k = 0; k < n; ++k)
        {
            double theta;
            if (!lo_dirichlet && !hi_dirichlet)
                theta = pi * k / n;
            else if (lo_dirichlet && hi_dirichlet)
                theta = pi * (k + 1) / n;
            else
                theta = pi * (k + 0.5) / n;
            lam[k] = 2.0 - 2.0 * std::cos(theta);
        }
        return lam;
    }

    void solve_fft(const std::vector<double>& b, std::vector<double>& phi)
    {
        const int nx = grid_.nx, ny = grid_.ny;
        double* buf = buffer_.get();
        std::copy(b.begin(), b.end(), buf);
        fftw_execute(forward_);
        const double h2 = grid_.dx * grid_.dx;
        const double norm = 1.0 / (4.0 * nx * ny);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
            {
                const double lam = lambda_x_[i] + lambda_y_[j];
                double& v = buf[static_cast<std::size_t>(j) * nx + i];
                v = lam > 1e-14 ? -v * h2 * norm / lam : 0.0;
            }
        fftw_execute(backward_);
        phi.assign(buf, buf + static_cast<std::size_t>(nx) * ny);
        last_iterations_ = 0;
    }

    void solve_cg(const std::vector<double>& b, std::vector<double>& phi, double tol)
    {
        // SPD form: -L phi = -b
        const std::size_t n = b.size();
        std::vector<double> nb(n);
        for (std::size_t i = 0; i < n; ++i) nb[i] = -b[i];
        const bool singular = bc_.all_neumann();
        auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
            apply_cell_laplacian(grid_, bc_, x, y);
            for (double& v : y) v = -v;
            if (singular)
            {
                // shift the constant mode so the operator is definite
                double mean = 0.0;
                for (double v : x) mean += v;
                mean /= static_cast<double>(n);
                for (double& v : y) v += mean / (grid_.dx * grid_.dx);
            }
        };
        std::vector<double> inv_diag(n, grid_.dx * grid_.dx / 4.0);
        phi.assign(n, 0.0);
        const auto st =
            preconditioned_cg(apply, inv_diag, nb, phi, 0.0, tol, 20 * static_cast<int>(n) + 100, "pressure Poisson solve");
        last_iterations_ = st.iterations;
    }

    MACGrid grid_;
    PoissonBoundary bc_;
    PoissonBackend backend_;
    std::unique_ptr<double, FftwFree> buffer_;
    std::vector<double> lambda_x_, lambda_y_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
    int last_iterations_ = 0;
};

} // namespace ifed
