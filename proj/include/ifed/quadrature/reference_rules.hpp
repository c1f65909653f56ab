#pragma once

#include "ifed/core/errors.hpp"
#include "ifed/core/vec2.hpp"
#include "ifed/mesh/reference_element.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

namespace ifed {

/// Points and weights on a reference element, with the basis of one element kind
/// pre-evaluated at every point.
struct ReferenceRule
{
    ElementKind kind = ElementKind::P1;
    std::vector<Vec2> points;
    std::vector<double> weights;
    std::vector<ShapeEval> shapes;
    /// Nominal number of points per coordinate direction (drives adaptive refinement).
    int points_per_direction = 1;
    /// Largest gap between neighbouring points along one direction as a fraction of
    /// the element edge, counting the half gaps at both ends twice.
    double relative_spacing = 1.0;
};

struct LineRule
{
    std::vector<double> points; // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], exact for degree 2n - 1.
inline LineRule gauss_legendre(int n)
{
    IFED_REQUIRE(n >= 1, "Gauss-Legendre needs at least one point");
    LineRule r;
    r.points.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i)
    {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it)
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k)
            {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k)
        {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.points[i] = -x;
        r.points[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.points[n / 2] = 0.0;
    return r;
}

namespace detail {

inline double line_relative_spacing(const LineRule& line)
{
    // map to [0, 1]; end gaps count double because the neighbour's points mirror them
    std::vector<double> t(line.points.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.5 * (line.points[i] + 1.0);
    double gap = std::max(2.0 * t.front(), 2.0 * (1.0 - t.back()));
    for (std::size_t i = 1; i < t.size(); ++i) gap = std::max(gap, t[i] - t[i - 1]);
    return gap;
}

struct TriangleBase
{
    std::vector<Vec2> points;
    std::vector<double> weights;
    int ppd;
};

// Symmetric rules on the unit right triangle (weights sum to 1/2):
// centroid (degree 1), three interior points (degree 2), and the seven-point
// degree-5 rule with closed-form coordinates.
inline TriangleBase triangle_base(int degree)
{
    if (degree <= 1) return {{{1.0 / 3.0, 1.0 / 3.0}}, {0.5}, 1};
    if (degree == 2)
        return {{{1.0 / 6.0, 1.0 / 6.0}, {2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0}}, {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0},
                2};
    if (degree <= 5)
    {
        const double s15 = std::sqrt(15.0);
        const double a = (6.0 - s15) / 21.0, b = (6.0 + s15) / 21.0;
        const double wa = (155.0 - s15) / 2400.0, wb = (155.0 + s15) / 2400.0;
        return {{{1.0 / 3.0, 1.0 / 3.0},
                 {a, a},
                 {1.0 - 2.0 * a, a},
                 {a, 1.0 - 2.0 * a},
                 {b, b},
                 {1.0 - 2.0 * b, b},
                 {b, 1.0 - 2.0 * b}},
                {9.0 / 80.0, wa, wa, wa, wb, wb, wb},
                3};
    }
    throw UnsupportedConfiguration("triangle quadrature of degree " + std::to_string(degree) + " is not available");
}

inline void finish(ReferenceRule& r)
{
    r.shapes.reserve(r.points.size());
    for (const auto& p : r.points) r.shapes.push_back(evaluate_shapes(r.kind, p));
}

} // namespace detail

/// Base rule exact for polynomials of the given total degree (triangles) or
/// per-direction degree (quadrilaterals), repeated on a subdivision with
/// `refine` pieces per direction.
inline ReferenceRule make_reference_rule(ElementKind kind, int degree, int refine = 1)
{
    IFED_REQUIRE(degree >= 0, "quadrature degree must be non-negative");
    IFED_REQUIRE(refine >= 1, "refinement factor must be at least 1");
    ReferenceRule r;
    r.kind = kind;
    if (is_simplex(kind))
    {
        const auto base = detail::triangle_base(degree);
        const double h = 1.0 / refine;
        const double scale = h * h;
        auto emit = [&](const Vec2& origin, const Vec2& e1, const Vec2& e2) {
            for (std::size_t q = 0; q < base.points.size(); ++q)
            {
                r.points.push_back(origin + base.points[q].x * e1 + base.points[q].y * e2);
                r.weights.push_back(base.weights[q] * scale);
            }
        };
        for (int j = 0; j < refine; ++j)
            for (int i = 0; i + j < refine; ++i)
            {
                const Vec2 o{i * h, j * h};
                emit(o, {h, 0}, {0, h});
                if (i + j + 1 < refine) emit(o + Vec2{h, h}, {-h, 0}, {0, -h});
            }
        r.points_per_direction = base.ppd * refine;
        r.relative_spacing = 1.0 / r.points_per_direction;
    }
    else
    {
        const int n = std::max(1, (degree + 2) / 2) * refine;
        const auto line = gauss_legendre(n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
            {
                r.points.push_back({line.points[i], line.points[j]});
                r.weights.push_back(line.weights[i] * line.weights[j]);
            }
        r.points_per_direction = n;
        r.relative_spacing = detail::line_relative_spacing(line);
    }
    detail::finish(r);
    return r;
}

/// Tensor Gauss rule with exactly n points per direction on a quadrilateral.
inline ReferenceRule make_tensor_rule(ElementKind kind, int n)
{
    IFED_REQUIRE(!is_simplex(kind), "tensor rules are for quadrilaterals");
    return make_reference_rule(kind, 2 * n - 1, 1);
}

/// Process-wide cache of reference rules keyed by (kind, degree, refine).
/// Shared Gauss-Legendre rules; the returned reference stays valid for the program lifetime.
inline const LineRule& cached_gauss_legendre(int n)
{
    static std::mutex mutex;
    static std::map<int, LineRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
    return it->second;
}

inline std::shared_ptr<const ReferenceRule> cached_reference_rule(ElementKind kind, int degree, int refine = 1)
{
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int>, std::shared_ptr<const ReferenceRule>> cache;
    if (!is_simplex(kind))
    {
        // normalise so equal point sets share an entry
        const int n = std::max(1, (degree + 2) / 2) * refine;
        degree = 2 * n - 1;
        refine = 1;
    }
    const auto key = std::make_tuple(static_cast<int>(kind), degree, refine);
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto rule = std::make_shared<const ReferenceRule>(make_reference_rule(kind, degree, refine));
    cache.emplace(key, rule);
    return rule;
}

/// Degree that integrates every product phi_i phi_j exactly on affine elements
/// (and on bilinear quadrilaterals, where the Jacobian adds one per direction).
constexpr int consistent_degree(ElementKind kind) { return 2 * polynomial_degree(kind); }

} // namespace ifed
