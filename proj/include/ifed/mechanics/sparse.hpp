#pragma once

#include "ifed/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace ifed {

/// Compressed sparse row matrix.
struct CsrMatrix
{
    std::size_t rows = 0;
    std::vector<std::size_t> row_start{0};
    std::vector<std::size_t> col;
    std::vector<double> val;

    void multiply(const std::vector<double>& x, std::vector<double>& y) const
    {
        y.assign(rows, 0.0);
        for (std::size_t i = 0; i < rows; ++i)
        {
            double s = 0.0;
            for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) s += val[k] * x[col[k]];
            y[i] = s;
        }
    }

    double operator()(std::size_t i, std::size_t j) const
    {
        const auto b = col.begin() + row_start[i], e = col.begin() + row_start[i + 1];
        const auto it = std::lower_bound(b, e, j);
        return (it != e && *it == j) ? val[it - col.begin()] : 0.0;
    }

    std::vector<double> diagonal() const
    {
        std::vector<double> d(rows);
        for (std::size_t i = 0; i < rows; ++i) d[i] = (*this)(i, i);
        return d;
    }

    std::vector<double> row_sums() const
    {
        std::vector<double> s(rows, 0.0);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) s[i] += val[k];
        return s;
    }
};

/// Accumulates (i, j, v) triplets; duplicates are summed in insertion order.
class TripletBuilder
{
public:
    explicit TripletBuilder(std::size_t n) : rows_(n) {}
    void add(std::size_t i, std::size_t j, double v) { rows_[i][j] += v; }

    CsrMatrix build() const
    {
        CsrMatrix m;
        m.rows = rows_.size();
        for (const auto& row : rows_)
        {
            for (const auto& [j, v] : row)
            {
                m.col.push_back(j);
                m.val.push_back(v);
            }
            m.row_start.push_back(m.col.size());
        }
        return m;
    }

private:
    std::vector<std::map<std::size_t, double>> rows_;
};

struct SolveStats
{
    int iterations = 0;
    double residual = 0.0; // final residual norm, relative to |b| when b != 0
};

/// Jacobi-preconditioned conjugate gradients for a symmetric positive definite
/// operator. Converged when |r| <= max(rel_tol |b|, abs_tol).
template <class Apply>
SolveStats preconditioned_cg(const Apply& apply, const std::vector<double>& inv_diag, const std::vector<double>& b,
                             std::vector<double>& x, double rel_tol, double abs_tol, int max_iter,
                             const char* what = "conjugate gradients")
{
    const std::size_t n = b.size();
    if (x.size() != n) x.assign(n, 0.0);
    std::vector<double> r(n), z(n), p(n), ap(n);
    apply(x, ap);
    double bnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        r[i] = b[i] - ap[i];
        bnorm += b[i] * b[i];
    }
    bnorm = std::sqrt(bnorm);
    const double tol = std::max(rel_tol * bnorm, abs_tol);
    auto norm2 = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (double a : v) s += a * a;
        return std::sqrt(s);
    };
    SolveStats st;
    double rn = norm2(r);
    if (rn <= tol)
    {
        st.residual = bnorm > 0 ? rn / bnorm : rn;
        return st;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];
    for (int it = 1; it <= max_iter; ++it)
    {
        apply(p, ap);
        double pap = 0.0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (!(pap > 0.0)) throw SolverError(std::string(what) + ": operator is not positive definite", rn);
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i)
        {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rn = norm2(r);
        st.iterations = it;
        if (rn <= tol)
        {
            st.residual = bnorm > 0 ? rn / bnorm : rn;
            return st;
        }
        double rz_new = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            z[i] = inv_diag[i] * r[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw SolverError(std::string(what) + " did not converge in " + std::to_string(max_iter) + " iterations",
                      bnorm > 0 ? rn / bnorm : rn);
}

} // namespace ifed
