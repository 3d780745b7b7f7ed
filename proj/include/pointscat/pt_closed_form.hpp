#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "core_model.hpp"
#include "errors.hpp"
#include "solver.hpp"

namespace pointscat
{
/*!
 * Pieces of the closed-form PT double-delta amplitude.
 *
 * amplitude = (term_interaction + term_geometry) / (2π D)
 */
struct ClosedFormBreakdown
{
    complex_type determinant;
    complex_type term_interaction;
    complex_type term_geometry;
    complex_type amplitude;
};

//! det A = (2π - ik³𝔰)/(2πk⁴(𝔰²+𝔤²)) - (4k²r₀² + e^{4ikr₀})/(64π²r₀²)
inline complex_type determinant_D(PTDoubleDeltaParams const& p)
{
    real_type const k = p.k();
    real_type const r0 = p.r0();
    real_type const s = p.real_strength();
    real_type const g = p.gain_loss_strength();
    real_type const q = s * s + g * g;
    if (!(q > 0))
    {
        throw InvalidInput("closed form undefined for s = g = 0");
    }
    real_type const k2 = k * k;
    complex_type const first = complex_type(2 * pi, -k2 * k * s)
                               / (2 * pi * k2 * k2 * q);
    complex_type const second = (4 * k2 * r0 * r0
                                 + std::polar(real_type(1), 4 * k * r0))
                                / (64 * pi * pi * r0 * r0);
    return first - second;
}

//! Scale of the 2×2 coefficient matrix, max |A_ij|, for the singularity test.
inline real_type closed_form_matrix_scale(PTDoubleDeltaParams const& p)
{
    real_type const k = p.k();
    real_type const s = p.real_strength();
    real_type const g = p.gain_loss_strength();
    real_type const q = s * s + g * g;
    // A₁₁ = -(𝔰 - i𝔤)/(k²(𝔰²+𝔤²)) + ik/4π, |A₁₁| = |A₂₂|
    complex_type const diag(-s / (k * k * q), g / (k * k * q) + k / (4 * pi));
    return std::max(std::abs(diag), 1 / (8 * pi * p.r0()));
}

inline ClosedFormBreakdown closed_form_breakdown(PTDoubleDeltaParams const& p,
                                                 Direction const& a_hat,
                                                 Direction const& s_hat)
{
    real_type const k = p.k();
    real_type const r0 = p.r0();
    real_type const s = p.real_strength();
    real_type const g = p.gain_loss_strength();
    auto const xi = xi_pm(p, a_hat, s_hat);

    ClosedFormBreakdown out;
    out.determinant = determinant_D(p);

    // A 2×2 matrix is singular when D is small on the scale of its entries
    // squared; same pivot criterion as the generic solver.
    real_type const scale = closed_form_matrix_scale(p);
    if (!(std::abs(out.determinant) >= singular_pivot_ratio * scale * scale))
    {
        throw SpectralSingularity(std::abs(out.determinant) / scale, scale);
    }

    out.term_interaction = (s * std::cos(xi.minus) - g * std::sin(xi.minus))
                           / (k * k * (s * s + g * g));
    out.term_geometry = (std::polar(real_type(1), 2 * k * r0) * std::cos(xi.plus)
                         - complex_type(0, 2 * k * r0) * std::cos(xi.minus))
                        / (8 * pi * r0);
    out.amplitude = (out.term_interaction + out.term_geometry)
                    / (2 * pi * out.determinant);
    return out;
}

inline AmplitudeResult amplitude_closed_form(PTDoubleDeltaParams const& p,
                                             Direction const& a_hat,
                                             Direction const& s_hat)
{
    return {closed_form_breakdown(p, a_hat, s_hat).amplitude,
            Scheme::closed_form};
}

}  // namespace pointscat
