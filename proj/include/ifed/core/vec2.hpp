#pragma once

#include <cmath>

namespace ifed {

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    constexpr double& operator[](int d) { return d == 0 ? x : y; }
    constexpr double operator[](int d) const { return d == 0 ? x : y; }

    constexpr Vec2& operator+=(const Vec2& o)
    {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr Vec2& operator-=(const Vec2& o)
    {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    constexpr Vec2& operator*=(double s)
    {
        x *= s;
        y *= s;
        return *this;
    }

    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend constexpr Vec2 operator/(const Vec2& a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// Row-major 2x2 matrix; a(i, j) is row i, column j.
struct Mat2
{
    double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 diag(double d0, double d1) { return {d0, 0.0, 0.0, d1}; }

    constexpr double operator()(int i, int j) const { return i == 0 ? (j == 0 ? a00 : a01) : (j == 0 ? a10 : a11); }
    constexpr double& operator()(int i, int j) { return i == 0 ? (j == 0 ? a00 : a01) : (j == 0 ? a10 : a11); }

    constexpr double det() const { return a00 * a11 - a01 * a10; }
    constexpr double trace() const { return a00 + a11; }
    constexpr Mat2 transpose() const { return {a00, a10, a01, a11}; }
    constexpr Mat2 inverse() const
    {
        const double d = det();
        return {a11 / d, -a01 / d, -a10 / d, a00 / d};
    }
    /// F^{-T}
    constexpr Mat2 inverse_transpose() const
    {
        const double d = det();
        return {a11 / d, -a10 / d, -a01 / d, a00 / d};
    }
    /// Frobenius inner product A : A.
    constexpr double frobenius2() const { return a00 * a00 + a01 * a01 + a10 * a10 + a11 * a11; }

    friend constexpr Mat2 operator+(const Mat2& a, const Mat2& b)
    {
        return {a.a00 + b.a00, a.a01 + b.a01, a.a10 + b.a10, a.a11 + b.a11};
    }
    friend constexpr Mat2 operator-(const Mat2& a, const Mat2& b)
    {
        return {a.a00 - b.a00, a.a01 - b.a01, a.a10 - b.a10, a.a11 - b.a11};
    }
    friend constexpr Mat2 operator*(double s, const Mat2& a) { return {s * a.a00, s * a.a01, s * a.a10, s * a.a11}; }
    friend constexpr Mat2 operator*(const Mat2& a, double s) { return s * a; }
    friend constexpr Mat2 operator*(const Mat2& a, const Mat2& b)
    {
        return {a.a00 * b.a00 + a.a01 * b.a10, a.a00 * b.a01 + a.a01 * b.a11, a.a10 * b.a00 + a.a11 * b.a10,
                a.a10 * b.a01 + a.a11 * b.a11};
    }
    friend constexpr Vec2 operator*(const Mat2& a, const Vec2& v)
    {
        return {a.a00 * v.x + a.a01 * v.y, a.a10 * v.x + a.a11 * v.y};
    }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

/// Outer product a (x) b.
constexpr Mat2 outer(const Vec2& a, const Vec2& b) { return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y}; }

/// Double contraction A : B.
constexpr double contract(const Mat2& a, const Mat2& b)
{
    return a.a00 * b.a00 + a.a01 * b.a01 + a.a10 * b.a10 + a.a11 * b.a11;
}

} // namespace ifed
