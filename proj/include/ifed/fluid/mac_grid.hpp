#pragma once

#include "ifed/core/errors.hpp"
#include "ifed/core/vec2.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace ifed {

/// Cell-indexed 2D array with `ghost` padding layers on every side;
/// (i, j) with -ghost <= i < nx + ghost, stored row-major in j.
class GridArray
{
public:
    GridArray() = default;
    GridArray(int nx, int ny, int ghost = 2, double value = 0.0)
        : nx_(nx), ny_(ny), g_(ghost), stride_(nx + 2 * ghost), data_(static_cast<std::size_t>(stride_) * (ny + 2 * ghost), value)
    {
    }

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    int ghost() const noexcept { return g_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(j + g_) * stride_ + (i + g_)]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(j + g_) * stride_ + (i + g_)]; }

    /// Pointer to entry (0, j); ghost entries are at negative offsets.
    double* row(int j) { return data_.data() + static_cast<std::size_t>(j + g_) * stride_ + g_; }
    const double* row(int j) const { return data_.data() + static_cast<std::size_t>(j + g_) * stride_ + g_; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
    std::span<double> raw() noexcept { return data_; }
    std::span<const double> raw() const noexcept { return data_; }

    /// Largest |value| over the interior.
    double max_abs() const
    {
        double m = 0.0;
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }

private:
    int nx_ = 0, ny_ = 0, g_ = 0, stride_ = 0;
    std::vector<double> data_;
};

/// Uniform square-cell staggered grid on [origin, origin + (nx, ny) dx].
struct MACGrid
{
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    Vec2 origin;

    MACGrid() = default;
    MACGrid(int nx_, int ny_, double dx_, Vec2 origin_ = {}) : nx(nx_), ny(ny_), dx(dx_), origin(origin_)
    {
        IFED_REQUIRE(nx > 0 && ny > 0, "grid needs at least one cell per direction");
        IFED_REQUIRE(dx > 0.0, "grid spacing must be positive");
    }

    double width() const { return nx * dx; }
    double height() const { return ny * dx; }
    Vec2 upper() const { return origin + Vec2{width(), height()}; }

    /// Location of velocity component d at face index (i, j).
    Vec2 face_center(int d, int i, int j) const
    {
        return d == 0 ? origin + Vec2{i * dx, (j + 0.5) * dx} : origin + Vec2{(i + 0.5) * dx, j * dx};
    }
    Vec2 cell_center(int i, int j) const { return origin + Vec2{(i + 0.5) * dx, (j + 0.5) * dx}; }

    /// Face-array extents of component d.
    int face_nx(int d) const { return d == 0 ? nx + 1 : nx; }
    int face_ny(int d) const { return d == 0 ? ny : ny + 1; }
};

/// u on x-faces ((nx+1) x ny), v on y-faces (nx x (ny+1)).
struct StaggeredField
{
    std::array<GridArray, 2> comp;

    StaggeredField() = default;
    explicit StaggeredField(const MACGrid& g, int ghost = 2)
        : comp{GridArray(g.nx + 1, g.ny, ghost), GridArray(g.nx, g.ny + 1, ghost)}
    {
    }

    GridArray& operator[](int d) { return comp[d]; }
    const GridArray& operator[](int d) const { return comp[d]; }

    void fill(double v)
    {
        comp[0].fill(v);
        comp[1].fill(v);
    }

    double max_abs() const { return std::max(comp[0].max_abs(), comp[1].max_abs()); }
};

/// Pressure-like scalar at cell centers.
using CellField = GridArray;

inline CellField make_cell_field(const MACGrid& g, int ghost = 2) { return CellField(g.nx, g.ny, ghost); }

enum class Side
{
    Left,
    Right,
    Bottom,
    Top
};

inline constexpr std::array<Side, 4> all_sides{Side::Left, Side::Right, Side::Bottom, Side::Top};

inline std::string_view to_string(Side s)
{
    switch (s)
    {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
    }
    return "?";
}

enum class BoundaryType
{
    Velocity,
    Traction
};

/// Condition on one side of the box. Velocity: prescribed u (no-slip when the
/// profile is empty). Traction: normal stress sigma_nn = n . sigma n with zero
/// tangential velocity.
struct SideCondition
{
    BoundaryType type = BoundaryType::Velocity;
    std::function<Vec2(const Vec2&, double)> velocity;
    double normal_traction = 0.0;

    static SideCondition no_slip() { return {}; }
    static SideCondition prescribed(std::function<Vec2(const Vec2&, double)> profile)
    {
        return {BoundaryType::Velocity, std::move(profile), 0.0};
    }
    static SideCondition traction(double sigma_nn) { return {BoundaryType::Traction, {}, sigma_nn}; }

    Vec2 value(const Vec2& x, double t) const { return velocity ? velocity(x, t) : Vec2{}; }
};

struct BoundarySpec
{
    std::array<SideCondition, 4> side{};

    SideCondition& operator[](Side s) { return side[static_cast<int>(s)]; }
    const SideCondition& operator[](Side s) const { return side[static_cast<int>(s)]; }

    static BoundarySpec no_slip_box() { return {}; }
};

} // namespace ifed
