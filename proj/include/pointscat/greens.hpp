#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "core_model.hpp"
#include "errors.hpp"
#include "quadrature.hpp"

namespace pointscat
{
//---------------------------------------------------------------------------//
//! Outgoing free-space Helmholtz Green function G(x) = exp(ikx) / (4πx).
inline complex_type green(real_type x, real_type k)
{
    if (x == 0)
    {
        throw OnsiteSingularity();
    }
    if (!(x > 0) || !std::isfinite(x))
    {
        throw InvalidInput("green function distance must be positive");
    }
    if (!(k > 0) || !std::isfinite(k))
    {
        throw InvalidInput("wavenumber must be positive and finite");
    }
    return std::polar(1 / (4 * pi * x), k * x);
}

//---------------------------------------------------------------------------//
/*!
 * Far-zone surrogate for G(|r - r'|):
 * exp(ik|r|) / (4π|r|) · exp(-ik ŝ·r'), with ŝ = r / |r|.
 *
 * Only valid for |r| >> |r'|.
 */
inline complex_type far_zone_green(Vec3 r, Vec3 r_prime, real_type k)
{
    real_type rn = norm(r);
    if (!(rn > 0) || !is_finite(r))
    {
        throw InvalidInput("far-zone green requires a nonzero field point");
    }
    if (!(k > 0) || !std::isfinite(k))
    {
        throw InvalidInput("wavenumber must be positive and finite");
    }
    real_type s_dot_rp = dot(r, r_prime) / rn;
    return std::polar(1 / (4 * pi * rn), k * rn - k * s_dot_rp);
}

//! Relative error of the far-zone surrogate against the exact kernel.
inline real_type far_zone_error(Vec3 r, Vec3 r_prime, real_type k)
{
    real_type sep = norm(r - r_prime);
    if (!(sep > 0))
    {
        throw InvalidInput("far-zone error undefined for coincident points");
    }
    complex_type exact = green(sep, k);
    return std::abs(exact - far_zone_green(r, r_prime, k)) / std::abs(exact);
}

//---------------------------------------------------------------------------//
/*!
 * Sharp-cutoff regularized on-site Green value.
 *
 * G_Λ(0) = (1/2π²) PV ∫₀^Λ p²/(p² - k²) dp + ik/4π
 *
 * The principal value is taken by excising a symmetric window around the
 * pole p = k, folding that window into a regular integrand, and integrating
 * all pieces adaptively. The imaginary part is set analytically.
 */
inline complex_type regularized_onsite(real_type k, real_type cutoff)
{
    if (!(k > 0) || !std::isfinite(k))
    {
        throw InvalidInput("wavenumber must be positive and finite");
    }
    if (!(cutoff > k) || !std::isfinite(cutoff))
    {
        throw InvalidInput("momentum cutoff must exceed the wavenumber");
    }
    constexpr real_type abs_tol = 1e-12;

    // p²/(p² - k²) = g(p) / (p - k)
    auto g = [k](real_type p) { return p * p / (p + k); };
    auto integrand = [k](real_type p) { return p * p / ((p - k) * (p + k)); };

    real_type const half_width = 0.5 * std::min(k, cutoff - k);
    real_type const lo = k - half_width;
    real_type const hi = k + half_width;

    // PV over [k - δ, k + δ] = ∫₀^δ [g(k+t) - g(k-t)] / t dt
    auto folded = [&g, k](real_type t) { return (g(k + t) - g(k - t)) / t; };

    real_type pv = integrate_adaptive(integrand, 0, lo, abs_tol / 3)
                   + integrate_adaptive(folded, 0, half_width, abs_tol / 3)
                   + integrate_adaptive(integrand, hi, cutoff, abs_tol / 3);

    return {pv / (2 * pi * pi), k / (4 * pi)};
}

}  // namespace pointscat
