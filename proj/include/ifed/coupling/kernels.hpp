#pragma once

#include "ifed/core/errors.hpp"
#include "ifed/core/vec2.hpp"

#include <cmath>
#include <string>
#include <string_view>

namespace ifed {

enum class KernelKind
{
    PiecewiseLinear, // two-point hat
    BSpline3         // three-point quadratic B-spline
};

inline std::string_view to_string(KernelKind k)
{
    return k == KernelKind::PiecewiseLinear ? "piecewise_linear" : "bspline3";
}

inline KernelKind parse_kernel_kind(std::string_view s)
{
    if (s == "piecewise_linear" || s == "pwl" || s == "linear") return KernelKind::PiecewiseLinear;
    if (s == "bspline3" || s == "bs3") return KernelKind::BSpline3;
    throw UnsupportedConfiguration("unknown kernel '" + std::string(s) + "'");
}

/// Support radius of the 1D kernel in cell units.
constexpr double kernel_radius(KernelKind k) { return k == KernelKind::PiecewiseLinear ? 1.0 : 1.5; }

/// 1D kernel phi(r), r in cell units.
inline double kernel_eval(KernelKind k, double r)
{
    const double a = std::abs(r);
    if (k == KernelKind::PiecewiseLinear) return a < 1.0 ? 1.0 - a : 0.0;
    if (a <= 0.5) return 0.75 - a * a;
    if (a < 1.5)
    {
        const double b = 1.5 - a;
        return 0.5 * b * b;
    }
    return 0.0;
}

/// delta_h(v) = phi(v1 / dx) phi(v2 / dx) / dx^2
inline double delta2(KernelKind k, const Vec2& v, double dx)
{
    return kernel_eval(k, v.x / dx) * kernel_eval(k, v.y / dx) / (dx * dx);
}

/// Indices and weights of the 1D stencil of a point at index-space position s
/// (grid node i sits at s = i).
struct Stencil1D
{
    int first = 0;
    int count = 0;
    double w[4] = {};
};

inline Stencil1D kernel_stencil(KernelKind k, double s)
{
    Stencil1D st;
    if (k == KernelKind::PiecewiseLinear)
    {
        const double c = std::floor(s);
        const double r = s - c;
        st.first = static_cast<int>(c);
        st.count = 2;
        st.w[0] = 1.0 - r;
        st.w[1] = r;
    }
    else
    {
        const double c = std::floor(s + 0.5); // nearest node
        const double r = s - c;                // in [-1/2, 1/2)
        st.first = static_cast<int>(c) - 1;
        st.count = 3;
        st.w[0] = 0.5 * (0.5 - r) * (0.5 - r);
        st.w[1] = 0.75 - r * r;
        st.w[2] = 0.5 * (0.5 + r) * (0.5 + r);
    }
    // the endpoint where phi vanishes is dropped
    if (st.w[st.count - 1] == 0.0) --st.count;
    if (st.w[0] == 0.0)
    {
        for (int m = 1; m < st.count; ++m) st.w[m - 1] = st.w[m];
        ++st.first;
        --st.count;
    }
    return st;
}

} // namespace ifed
