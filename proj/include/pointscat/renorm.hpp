#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "core_model.hpp"
#include "errors.hpp"
#include "greens.hpp"

namespace pointscat
{
//---------------------------------------------------------------------------//
//! Sharp momentum cutoff Λ with the bare coupling used at that cutoff.
struct CutoffScheme
{
    real_type lambda;
    complex_type bare_coupling;
};

/*!
 * Quantity that replaces 1/z̃ on the matrix diagonal at finite cutoff:
 * 1/z + G_Λ(0) - ik/4π.
 */
inline complex_type effective_inverse_coupling(CutoffScheme const& s,
                                               real_type k)
{
    if (!(std::abs(s.bare_coupling) > 0))
    {
        throw InvalidInput("bare coupling must be nonzero");
    }
    return complex_type(1) / s.bare_coupling + regularized_onsite(k, s.lambda)
           - complex_type(0, k / (4 * pi));
}

//! How the bare coupling is tuned against the cutoff.
enum class CounterTerm
{
    //! 1/z(Λ) = 1/z̃ - Re G_Λ(0); cutoff-independent at every Λ.
    exact,
    //! 1/z(Λ) = 1/z̃ - Λ/(2π²); leaves the finite O(k²/Λ) remainder.
    linear_divergence
};

inline complex_type bare_inverse_coupling(complex_type z_tilde,
                                          real_type k,
                                          real_type lambda,
                                          CounterTerm ct)
{
    if (!(std::abs(z_tilde) > 0))
    {
        throw InvalidInput("renormalized coupling must be nonzero");
    }
    real_type shift = ct == CounterTerm::exact
                          ? regularized_onsite(k, lambda).real()
                          : lambda / (2 * pi * pi);
    return complex_type(1) / z_tilde - shift;
}

//! Single-scatterer amplitude -(1/4π) / (inverse_coupling + ik/4π).
inline complex_type single_scatterer_amplitude(complex_type inverse_coupling,
                                               real_type k)
{
    return -1.0 / (4 * pi)
           / (inverse_coupling + complex_type(0, k / (4 * pi)));
}

struct FlowPoint
{
    real_type lambda;
    complex_type bare_inverse;
    complex_type f_cutoff;
    complex_type f_renormalized;
    //! |f_cutoff - f_renormalized| / |f_renormalized|
    real_type deviation;
};

/*!
 * Compare the finite-cutoff single-scatterer amplitude with the renormalized
 * one over a sequence of cutoffs.
 *
 * The default counterterm removes only the linear divergence Λ/(2π²), so the
 * deviation measures the approach to the Λ → ∞ limit.
 */
inline std::vector<FlowPoint>
renormalization_flow_check(complex_type z_tilde,
                           real_type k,
                           std::span<real_type const> lambdas,
                           CounterTerm ct = CounterTerm::linear_divergence)
{
    complex_type const f_ren
        = single_scatterer_amplitude(complex_type(1) / z_tilde, k);
    std::vector<FlowPoint> out;
    out.reserve(lambdas.size());
    for (real_type lambda : lambdas)
    {
        complex_type bare_inv = bare_inverse_coupling(z_tilde, k, lambda, ct);
        CutoffScheme scheme{lambda, complex_type(1) / bare_inv};
        complex_type f_cut = single_scatterer_amplitude(
            effective_inverse_coupling(scheme, k), k);
        out.push_back({lambda,
                       bare_inv,
                       f_cut,
                       f_ren,
                       std::abs(f_cut - f_ren) / std::abs(f_ren)});
    }
    return out;
}

}  // namespace pointscat
