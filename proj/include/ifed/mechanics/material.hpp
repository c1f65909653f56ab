#pragma once

#include "ifed/core/errors.hpp"
#include "ifed/core/vec2.hpp"

#include <cmath>
#include <string>
#include <string_view>

namespace ifed {

enum class MaterialModel
{
    /// Psi = G/2 (I1bar - 3) + kappa/2 (ln J)^2 with I1bar = J^(-2/3) (tr C + 1)
    ModifiedNeoHookean,
    /// Psi = G/2 (tr C + 1 - 3) - G ln J + kappa/2 (ln J)^2
    IncompressibleNeoHookean,
    /// No elastic stress; rigidity comes from tether forces.
    RigidPenalty
};

inline std::string_view to_string(MaterialModel m)
{
    switch (m)
    {
    case MaterialModel::ModifiedNeoHookean: return "modified-neo-hookean";
    case MaterialModel::IncompressibleNeoHookean: return "incompressible-neo-hookean";
    case MaterialModel::RigidPenalty: return "rigid";
    }
    return "?";
}

/// Plane strain: F is the in-plane block of a 3D gradient with F33 = 1.
struct Material
{
    MaterialModel model = MaterialModel::ModifiedNeoHookean;
    double shear_modulus = 0.0;     // G
    double bulk_modulus = 0.0;      // kappa_stab, the numerical bulk modulus

    void validate() const
    {
        if (model == MaterialModel::RigidPenalty) return;
        IFED_REQUIRE(shear_modulus > 0.0, "shear modulus must be positive");
        IFED_REQUIRE(bulk_modulus >= 0.0, "bulk modulus must be non-negative");
    }
};

/// pi_stab = -(kappa / J) ln J; positive in compression.
inline double stabilization_pressure(double J, double kappa) { return -(kappa / J) * std::log(J); }

inline double strain_energy(const Mat2& F, const Material& m)
{
    const double J = F.det();
    if (!(J > 0.0)) throw InvertedElementError(0, J);
    const double lnJ = std::log(J);
    const double trC = F.frobenius2();
    switch (m.model)
    {
    case MaterialModel::ModifiedNeoHookean:
        return 0.5 * m.shear_modulus * (std::pow(J, -2.0 / 3.0) * (trC + 1.0) - 3.0) + 0.5 * m.bulk_modulus * lnJ * lnJ;
    case MaterialModel::IncompressibleNeoHookean:
        return 0.5 * m.shear_modulus * (trC - 2.0) - m.shear_modulus * lnJ + 0.5 * m.bulk_modulus * lnJ * lnJ;
    case MaterialModel::RigidPenalty: return 0.0;
    }
    return 0.0;
}

/// First Piola-Kirchhoff stress dPsi/dF. Throws InvertedElementError (element
/// id `element`) when det F <= 0.
inline Mat2 pk1_stress(const Mat2& F, const Material& m, std::size_t element = 0)
{
    if (m.model == MaterialModel::RigidPenalty) return {};
    const double J = F.det();
    if (!(J > 0.0)) throw InvertedElementError(element, J);
    const Mat2 Fit = F.inverse_transpose();
    // volumetric part -J pi_stab F^-T = kappa ln J F^-T
    const Mat2 p_stab = (m.bulk_modulus * std::log(J)) * Fit;
    if (m.model == MaterialModel::ModifiedNeoHookean)
    {
        const double trC = F.frobenius2();
        return m.shear_modulus * std::pow(J, -2.0 / 3.0) * (F - ((trC + 1.0) / 3.0) * Fit) + p_stab;
    }
    return m.shear_modulus * (F - Fit) + p_stab;
}

} // namespace ifed
