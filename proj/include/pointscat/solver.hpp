#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

#include "core_model.hpp"
#include "errors.hpp"
#include "greens.hpp"
#include "linalg.hpp"

namespace pointscat
{
//---------------------------------------------------------------------------//
//! Which computation produced an amplitude.
enum class Scheme
{
    exact,
    closed_form,
    neumann,
    rb_far_zone,
    first_born
};

constexpr std::string_view to_string(Scheme s)
{
    switch (s)
    {
        case Scheme::exact:
            return "exact";
        case Scheme::closed_form:
            return "closed_form";
        case Scheme::neumann:
            return "neumann";
        case Scheme::rb_far_zone:
            return "rb_far_zone";
        case Scheme::first_born:
            return "first_born";
    }
    return "unknown";
}

//! Coefficient of exp(ikr)/r in the far field.
struct AmplitudeResult
{
    complex_type value;
    Scheme scheme;
};

//! Smallest LU pivot below this fraction of max|A| is a spectral singularity.
inline constexpr real_type singular_pivot_ratio = 1e-10;

//---------------------------------------------------------------------------//
/*!
 * Coefficient matrix of the renormalized point-scatterer system.
 *
 * A_nn = 1/z̃_n + ik/4π and A_mn = G(|a_m - a_n|) for m ≠ n. Scatterers with
 * absent coupling are dropped; \c active() maps matrix rows back to
 * positions in the configuration.
 */
class CoefficientMatrix
{
  public:
    CoefficientMatrix(ComplexMatrix entries,
                      std::vector<std::size_t> active,
                      real_type k)
        : entries_(std::move(entries)), active_(std::move(active)), k_(k)
    {
    }

    std::size_t size() const noexcept { return entries_.size(); }
    ComplexMatrix const& entries() const noexcept { return entries_; }
    complex_type operator()(std::size_t m, std::size_t n) const
    {
        return entries_(m, n);
    }
    std::vector<std::size_t> const& active() const noexcept { return active_; }
    real_type k() const noexcept { return k_; }

    //! det A via LU; no singularity check.
    complex_type determinant() const
    {
        return LUFactorization(entries_).determinant();
    }

  private:
    ComplexMatrix entries_;
    std::vector<std::size_t> active_;
    real_type k_;
};

inline CoefficientMatrix build_matrix(ScattererConfig const& config, real_type k)
{
    if (!(k > 0) || !std::isfinite(k))
    {
        throw InvalidInput("wavenumber must be positive and finite");
    }
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < config.size(); ++i)
    {
        if (!is_absent(config[i]))
        {
            active.push_back(i);
        }
    }

    std::size_t const n = active.size();
    ComplexMatrix a(n);
    complex_type const outgoing(0, k / (4 * pi));
    for (std::size_t m = 0; m < n; ++m)
    {
        auto const& sm = config[active[m]];
        a(m, m) = complex_type(1) / sm.coupling + outgoing;
        for (std::size_t j = m + 1; j < n; ++j)
        {
            auto const& sj = config[active[j]];
            complex_type g = green(norm(sm.position - sj.position), k);
            a(m, j) = g;
            a(j, m) = g;
        }
    }
    return {std::move(a), std::move(active), k};
}

//---------------------------------------------------------------------------//
//! Solution X_n = z̃_n u(a_n) of the linear system for one incident wave.
struct SolveResult
{
    //! One entry per configured scatterer; zero for absent ones.
    std::vector<complex_type> x;
    ScattererConfig config;
    IncidentWave wave;
    //! max_m |Σ_n A_mn X_n - b_m|
    real_type residual{0};
    //! ‖A‖∞ ‖X‖∞, scale for the residual bound
    real_type residual_scale{0};
};

/*!
 * Factorized system for a fixed configuration and wavenumber.
 *
 * The matrix does not depend on the incident or outgoing direction, so one
 * factorization serves every direction scan. Immutable after construction.
 */
class ScatteringSystem
{
  public:
    ScatteringSystem(ScattererConfig config, real_type k)
        : config_(std::move(config)), matrix_(build_matrix(config_, k))
    {
        lu_ = LUFactorization(matrix_.entries());
        if (matrix_.size() > 0)
        {
            real_type scale = matrix_.entries().max_abs();
            if (!(lu_.smallest_pivot() >= singular_pivot_ratio * scale))
            {
                throw SpectralSingularity(lu_.smallest_pivot(), scale);
            }
        }
    }

    ScattererConfig const& config() const noexcept { return config_; }
    CoefficientMatrix const& matrix() const noexcept { return matrix_; }
    real_type k() const noexcept { return matrix_.k(); }

    SolveResult solve(IncidentWave const& wave) const
    {
        if (wave.k() != k())
        {
            throw InvalidInput("incident wavenumber differs from the system's");
        }
        auto const& active = matrix_.active();
        std::vector<complex_type> b(active.size());
        for (std::size_t m = 0; m < active.size(); ++m)
        {
            b[m] = wave(config_[active[m]].position);
        }
        auto xa = lu_.solve(b);

        auto ax = matrix_.entries().apply(xa);
        real_type residual = 0;
        real_type xnorm = 0;
        for (std::size_t m = 0; m < active.size(); ++m)
        {
            residual = std::max(residual, std::abs(ax[m] - b[m]));
            xnorm = std::max(xnorm, std::abs(xa[m]));
        }

        std::vector<complex_type> x(config_.size());
        for (std::size_t m = 0; m < active.size(); ++m)
        {
            x[active[m]] = xa[m];
        }
        return {std::move(x),
                config_,
                wave,
                residual,
                matrix_.entries().norm_inf() * xnorm};
    }

  private:
    ScattererConfig config_;
    CoefficientMatrix matrix_;
    LUFactorization lu_;
};

//! Solve A X = b with b_m = exp(ik a_m·â).
inline SolveResult solve_system(CoefficientMatrix const& a,
                                IncidentWave const& wave,
                                ScattererConfig const& config)
{
    if (a.k() != wave.k())
    {
        throw InvalidInput("matrix and incident wave use different k");
    }
    return ScatteringSystem(config, a.k()).solve(wave);
}

//---------------------------------------------------------------------------//
//! ũ_s(ŝ) = -(1/4π) Σ_m X_m exp(-ik a_m·ŝ)
inline AmplitudeResult
amplitude_exact(SolveResult const& sol, Direction const& s_hat)
{
    real_type const k = sol.wave.k();
    complex_type acc = 0;
    for (std::size_t m = 0; m < sol.config.size(); ++m)
    {
        if (sol.x[m] == complex_type(0))
        {
            continue;
        }
        acc += sol.x[m]
               * std::polar(real_type(1), -k * dot(s_hat, sol.config[m].position));
    }
    return {-acc / (4 * pi), Scheme::exact};
}

inline AmplitudeResult amplitude_exact(ScattererConfig const& config,
                                       IncidentWave const& wave,
                                       Direction const& s_hat)
{
    return amplitude_exact(ScatteringSystem(config, wave.k()).solve(wave),
                           s_hat);
}

/*!
 * Amplitude from the explicit inverse:
 * -(1/4π) Σ_{m,n} (A⁻¹)_mn exp(ik(a_n·â - a_m·ŝ)).
 *
 * Costs N solves; kept as an independent route to the X-summation.
 */
inline AmplitudeResult amplitude_inverse_sum(ScattererConfig const& config,
                                             IncidentWave const& wave,
                                             Direction const& s_hat)
{
    ScatteringSystem system(config, wave.k());
    auto const& active = system.matrix().active();
    std::size_t const n = active.size();
    LUFactorization lu(system.matrix().entries());
    real_type const k = wave.k();

    complex_type acc = 0;
    std::vector<complex_type> unit(n);
    for (std::size_t col = 0; col < n; ++col)
    {
        std::fill(unit.begin(), unit.end(), complex_type(0));
        unit[col] = 1;
        auto inv_col = lu.solve(unit);
        Vec3 const& an = config[active[col]].position;
        for (std::size_t row = 0; row < n; ++row)
        {
            Vec3 const& am = config[active[row]].position;
            acc += inv_col[row]
                   * std::polar(real_type(1),
                                k * (dot(wave.direction(), an) - dot(s_hat, am)));
        }
    }
    return {-acc / (4 * pi), Scheme::exact};
}

//---------------------------------------------------------------------------//
//! u(r) - u₀(r) = -Σ_n G(|r - a_n|) X_n
inline complex_type scattered_field(SolveResult const& sol, Vec3 r)
{
    complex_type acc = 0;
    for (std::size_t n = 0; n < sol.config.size(); ++n)
    {
        real_type d = norm(r - sol.config[n].position);
        if (!(d > 0))
        {
            throw InvalidInput("field point coincides with scatterer "
                               + std::to_string(n));
        }
        if (sol.x[n] == complex_type(0))
        {
            continue;
        }
        acc -= green(d, sol.wave.k()) * sol.x[n];
    }
    return acc;
}

//! Lippmann-Schwinger total field u(r) = u₀(r) - Σ_n z̃_n G(|r - a_n|) u(a_n).
inline complex_type total_field(SolveResult const& sol, Vec3 r)
{
    return sol.wave(r) + scattered_field(sol, r);
}

inline complex_type total_field(ScattererConfig const& config,
                                IncidentWave const& wave,
                                Vec3 r)
{
    return total_field(ScatteringSystem(config, wave.k()).solve(wave), r);
}

}  // namespace pointscat
