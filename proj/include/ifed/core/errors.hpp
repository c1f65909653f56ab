#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ifed {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
class ContractViolation : public Error
{
public:
    using Error::Error;
};

/// Requested rule order, element kind or boundary combination is not provided.
class UnsupportedConfiguration : public Error
{
public:
    using Error::Error;
};

/// Mesh construction or geometric mapping failed (degenerate or inverted element).
class GeometryError : public Error
{
public:
    using Error::Error;
};

/// det F <= 0 at some evaluation point of a deformed element.
class InvertedElementError : public GeometryError
{
public:
    InvertedElementError(std::size_t element, double det)
        : GeometryError("inverted element " + std::to_string(element) + " (det F = " + std::to_string(det) + ")"),
          element_(element), det_(det)
    {
    }

    std::size_t element() const noexcept { return element_; }
    double det() const noexcept { return det_; }

private:
    std::size_t element_;
    double det_;
};

/// Iterative solver did not reach its tolerance within the iteration cap.
class SolverError : public Error
{
public:
    SolverError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual)
    {
    }

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A kernel stencil of an interaction point reaches outside the Cartesian grid.
class CouplingDomainError : public Error
{
public:
    CouplingDomainError(std::size_t point, double x, double y)
        : Error("interaction point " + std::to_string(point) + " at (" + std::to_string(x) + ", " + std::to_string(y) +
                ") has kernel support outside the grid"),
          point_(point)
    {
    }

    std::size_t point() const noexcept { return point_; }

private:
    std::size_t point_;
};

/// Adaptive quadrature needed more points per direction than the configured cap.
class RefinementCapError : public Error
{
public:
    using Error::Error;
};

/// Non-finite values appeared during time stepping.
class BlowUpError : public Error
{
public:
    BlowUpError(const std::string& what, std::size_t step)
        : Error(what + " at step " + std::to_string(step)), step_(step)
    {
    }

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

#define IFED_REQUIRE(cond, msg)                                                                                        \
    do                                                                                                                 \
    {                                                                                                                  \
        if (!(cond)) throw ::ifed::ContractViolation(std::string(__func__) + ": " + (msg));                            \
    } while (false)

} // namespace ifed
