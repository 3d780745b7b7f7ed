#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "core_model.hpp"
#include "errors.hpp"
#include "greens.hpp"
#include "solver.hpp"

namespace pointscat
{
//---------------------------------------------------------------------------//
//! 2×2 complex matrix [[a11, a12], [a21, a22]].
struct Matrix2
{
    complex_type a11, a12, a21, a22;

    std::array<complex_type, 2> operator*(std::array<complex_type, 2> v) const
    {
        return {a11 * v[0] + a12 * v[1], a21 * v[0] + a22 * v[1]};
    }
};

//! Largest eigenvalue modulus from the characteristic polynomial.
inline real_type spectral_radius(Matrix2 const& m)
{
    complex_type const half_trace = 0.5 * (m.a11 + m.a22);
    complex_type const det = m.a11 * m.a22 - m.a12 * m.a21;
    complex_type const root = std::sqrt(half_trace * half_trace - det);
    return std::max(std::abs(half_trace + root), std::abs(half_trace - root));
}

/*!
 * Power-iteration estimate of the spectral radius of a dense matrix.
 *
 * Uses the geometric mean of two successive growth factors so that
 * eigenvalue pairs ±λ (common for mirrored scatterers) do not stall the
 * estimate.
 */
inline real_type spectral_radius_power(ComplexMatrix const& m,
                                       int max_steps = 200,
                                       real_type tol = 1e-10)
{
    std::size_t const n = m.size();
    if (n == 0)
    {
        return 0;
    }
    std::vector<complex_type> v(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        // Deterministic start with generic phases
        v[i] = std::polar(1.0, 0.7 * static_cast<double>(i) + 0.3);
    }
    auto normalize = [](std::vector<complex_type>& w) {
        real_type s = 0;
        for (auto const& c : w)
        {
            s += std::norm(c);
        }
        s = std::sqrt(s);
        if (s > 0)
        {
            for (auto& c : w)
            {
                c /= s;
            }
        }
        return s;
    };
    normalize(v);

    real_type prev_growth = std::numeric_limits<real_type>::quiet_NaN();
    real_type estimate = 0;
    std::vector<real_type> log_growth;
    log_growth.reserve(static_cast<std::size_t>(std::max(max_steps, 0)));
    for (int step = 0; step < max_steps; ++step)
    {
        v = m.apply(v);
        real_type growth = normalize(v);
        if (growth == 0)
        {
            return 0;
        }
        log_growth.push_back(std::log(growth));
        if (std::isnan(prev_growth))
        {
            prev_growth = growth;
            continue;
        }
        real_type next = std::sqrt(growth * prev_growth);
        prev_growth = growth;
        if (std::abs(next - estimate) <= tol * next)
        {
            return next;
        }
        estimate = next;
    }
    if (log_growth.size() < 4)
    {
        return estimate;
    }
    // Not converged: several eigenvalues share (nearly) the top modulus and
    // the step growth beats. Average the growth over the second half.
    real_type acc = 0;
    std::size_t const half = log_growth.size() / 2;
    for (std::size_t i = half; i < log_growth.size(); ++i)
    {
        acc += log_growth[i];
    }
    return std::exp(acc / static_cast<real_type>(log_growth.size() - half));
}

//---------------------------------------------------------------------------//
//! Outcome of summing a scattering series term by term.
struct SeriesResult
{
    std::vector<complex_type> partial_sums;
    //! Norm of the vector carried by each term (same length as
    //! partial_sums); free of the cancellation that the amplitude
    //! projection can suffer.
    std::vector<real_type> term_norms;
    //! Limit value, present only for a non-divergent series whose partial
    //! sums met the stopping rule.
    std::optional<complex_type> converged_value;
    real_type spectral_radius_estimate{0};
    std::size_t terms_used{0};
    bool diverged{false};
    //! Closed geometric sum when the spectral radius is below one.
    std::optional<complex_type> geometric_sum;
};

namespace detail
{
//! Stop once |S_n - S_{n-1}| < tol max(1, |S_n|) holds three times running.
class ConvergenceMonitor
{
  public:
    explicit ConvergenceMonitor(real_type tol) : tol_(tol) {}

    bool update(complex_type prev, complex_type next)
    {
        if (std::abs(next - prev) < tol_ * std::max(1.0, std::abs(next)))
        {
            ++streak_;
        }
        else
        {
            streak_ = 0;
        }
        return streak_ >= 3;
    }

  private:
    real_type tol_;
    int streak_{0};
};

inline void check_series_args(std::size_t max_terms, real_type tol)
{
    if (max_terms < 1)
    {
        throw InvalidInput("max_terms must be at least 1");
    }
    if (!(tol > 0))
    {
        throw InvalidInput("series tolerance must be positive");
    }
}
}  // namespace detail

//---------------------------------------------------------------------------//
// FAR-ZONE BORN RECURSION
//---------------------------------------------------------------------------//
/*!
 * Bare parameters of the far-zone iterated Born scheme for a PT pair.
 *
 * The field is expanded as u = Σ u_n αⁿ with couplings α(σ ± iγ) at ±r₀.
 */
struct RBSeriesParams
{
    real_type alpha;
    real_type sigma;
    real_type gamma;
    Vec3 r0;
    real_type k;

    void validate() const
    {
        if (!(norm(r0) > 0))
        {
            throw InvalidInput("r0 must be nonzero");
        }
        if (!(k > 0) || !std::isfinite(k))
        {
            throw InvalidInput("wavenumber must be positive and finite");
        }
        if (!std::isfinite(alpha) || !std::isfinite(sigma)
            || !std::isfinite(gamma))
        {
            throw InvalidInput("series parameters must be finite");
        }
    }
};

/*!
 * Transfer matrix of the far-zone recursion evaluated at r = ±r₀.
 *
 * Setting r = ±r₀ (so ŝ = ±r̂₀) in the far-zone recursion gives
 * (p_n, q_n) = M (p_{n-1}, q_{n-1}) with p_n = u_n(r₀), q_n = u_n(-r₀). This
 * reproduces the iteration being criticized: the far-zone kernel is used at
 * |r| = |r₀|, where it is not valid.
 */
inline Matrix2 rb_transfer_matrix(RBSeriesParams const& p)
{
    p.validate();
    real_type const r0 = norm(p.r0);
    real_type const pref = p.k * p.k / (4 * pi * r0);
    complex_type const plus(p.sigma, p.gamma);
    complex_type const minus(p.sigma, -p.gamma);
    complex_type const phase = std::polar(1.0, 2 * p.k * r0);
    return {pref * plus, pref * minus * phase, pref * plus * phase, pref * minus};
}

//! Iterates (p_n, q_n) = M (p_{n-1}, q_{n-1}) from the plane-wave source.
class RBIterationState
{
  public:
    RBIterationState(RBSeriesParams const& p, Direction const& a_hat)
        : transfer_(rb_transfer_matrix(p))
    {
        real_type const phase = p.k * dot(a_hat, p.r0);
        source_ = {std::polar(1.0, phase), std::polar(1.0, -phase)};
        current_ = source_;
    }

    //! u_n(+r₀)
    complex_type p() const noexcept { return current_[0]; }
    //! u_n(-r₀)
    complex_type q() const noexcept { return current_[1]; }
    std::size_t n() const noexcept { return n_; }
    Matrix2 const& transfer() const noexcept { return transfer_; }
    std::array<complex_type, 2> const& source() const noexcept
    {
        return source_;
    }

    void advance()
    {
        current_ = transfer_ * current_;
        ++n_;
    }

  private:
    Matrix2 transfer_;
    std::array<complex_type, 2> source_;
    std::array<complex_type, 2> current_;
    std::size_t n_{0};
};

/*!
 * Sum of the far-zone iterated Born series for the amplitude.
 *
 * Term n contributes
 * αⁿ (k²/4π) [(σ+iγ) p_{n-1} e^{-ikŝ·r₀} + (σ-iγ) q_{n-1} e^{ikŝ·r₀}].
 */
inline SeriesResult rb_far_zone_amplitude(RBSeriesParams const& p,
                                          Direction const& a_hat,
                                          Direction const& s_hat,
                                          std::size_t max_terms,
                                          real_type tol)
{
    detail::check_series_args(max_terms, tol);
    RBIterationState state(p, a_hat);

    real_type const out_phase = p.k * dot(s_hat, p.r0);
    real_type const pref = p.k * p.k / (4 * pi);
    std::array<complex_type, 2> const projector
        = {pref * complex_type(p.sigma, p.gamma) * std::polar(1.0, -out_phase),
           pref * complex_type(p.sigma, -p.gamma) * std::polar(1.0, out_phase)};

    SeriesResult result;
    result.spectral_radius_estimate
        = std::abs(p.alpha) * spectral_radius(state.transfer());
    result.diverged = !(result.spectral_radius_estimate < 1);

    detail::ConvergenceMonitor monitor(tol);
    complex_type sum = 0;
    real_type alpha_pow = 1;
    bool met = false;
    for (std::size_t n = 1; n <= max_terms; ++n)
    {
        alpha_pow *= p.alpha;
        complex_type term = alpha_pow
                            * (projector[0] * state.p()
                               + projector[1] * state.q());
        complex_type next = sum + term;
        result.partial_sums.push_back(next);
        result.term_norms.push_back(
            std::abs(alpha_pow) * std::hypot(std::abs(state.p()), std::abs(state.q())));
        met = n > 1 && monitor.update(sum, next);
        sum = next;
        state.advance();
        if (met)
        {
            break;
        }
    }
    result.terms_used = result.partial_sums.size();

    if (!result.diverged)
    {
        // α c (I - αM)⁻¹ v₀
        Matrix2 const& m = state.transfer();
        complex_type const i11 = 1.0 - p.alpha * m.a11;
        complex_type const i12 = -p.alpha * m.a12;
        complex_type const i21 = -p.alpha * m.a21;
        complex_type const i22 = 1.0 - p.alpha * m.a22;
        complex_type const det = i11 * i22 - i12 * i21;
        auto const& v0 = state.source();
        complex_type const w0 = (i22 * v0[0] - i12 * v0[1]) / det;
        complex_type const w1 = (-i21 * v0[0] + i11 * v0[1]) / det;
        result.geometric_sum = p.alpha * (projector[0] * w0 + projector[1] * w1);
        if (met)
        {
            result.converged_value = result.geometric_sum;
        }
    }
    return result;
}

//---------------------------------------------------------------------------//
// MULTIPLE-SCATTERING NEUMANN SERIES
//---------------------------------------------------------------------------//
/*!
 * Neumann expansion of the exact linear system.
 *
 * With A = Δ + Γ (Δ the diagonal, Γ the inter-scatterer Green couplings),
 * X = Σ_m (-Δ⁻¹Γ)^m Δ⁻¹ b. Partial sums are of the amplitude.
 */
inline SeriesResult neumann_amplitude(ScattererConfig const& config,
                                      IncidentWave const& wave,
                                      Direction const& s_hat,
                                      std::size_t max_terms,
                                      real_type tol)
{
    detail::check_series_args(max_terms, tol);
    auto const a = build_matrix(config, wave.k());
    auto const& active = a.active();
    std::size_t const n = a.size();
    real_type const k = wave.k();

    // K = Δ⁻¹Γ
    ComplexMatrix kernel(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < n; ++j)
        {
            if (i != j)
            {
                kernel(i, j) = a(i, j) / a(i, i);
            }
        }
    }

    SeriesResult result;
    if (n == 2)
    {
        result.spectral_radius_estimate = spectral_radius(
            Matrix2{kernel(0, 0), kernel(0, 1), kernel(1, 0), kernel(1, 1)});
    }
    else if (n > 2)
    {
        result.spectral_radius_estimate = spectral_radius_power(kernel);
    }
    result.diverged = !(result.spectral_radius_estimate < 1);

    std::vector<complex_type> y(n);
    std::vector<complex_type> out_phase(n);
    for (std::size_t m = 0; m < n; ++m)
    {
        Vec3 const& pos = config[active[m]].position;
        y[m] = wave(pos) / a(m, m);
        out_phase[m] = std::polar(1.0, -k * dot(s_hat, pos));
    }
    auto project = [&](std::vector<complex_type> const& v) {
        complex_type acc = 0;
        for (std::size_t m = 0; m < n; ++m)
        {
            acc += v[m] * out_phase[m];
        }
        return -acc / (4 * pi);
    };

    auto vec_norm = [](std::vector<complex_type> const& v) {
        real_type acc = 0;
        for (auto const& c : v)
        {
            acc += std::norm(c);
        }
        return std::sqrt(acc);
    };

    detail::ConvergenceMonitor monitor(tol);
    complex_type sum = project(y);
    result.partial_sums.push_back(sum);
    result.term_norms.push_back(vec_norm(y));
    bool met = false;
    bool terminated = n <= 1;
    for (std::size_t term = 1; term < max_terms && !met && !terminated; ++term)
    {
        auto ky = kernel.apply(y);
        bool all_zero = true;
        for (std::size_t m = 0; m < n; ++m)
        {
            y[m] = -ky[m];
            all_zero = all_zero && y[m] == complex_type(0);
        }
        complex_type next = sum + project(y);
        result.partial_sums.push_back(next);
        result.term_norms.push_back(vec_norm(y));
        met = monitor.update(sum, next);
        terminated = all_zero;
        sum = next;
    }
    result.terms_used = result.partial_sums.size();
    if (!result.diverged && (met || terminated))
    {
        result.converged_value = sum;
    }
    return result;
}

/*!
 * Geometric decay rate of a sequence of term magnitudes.
 *
 * Least-squares slope of log|t_m| against m over the second half of the
 * positive entries, exponentiated. Robust to eigenvalue pairs ±λ that make
 * successive ratios oscillate.
 */
inline real_type geometric_rate(std::span<real_type const> magnitudes)
{
    std::vector<real_type> xs, ys;
    for (std::size_t m = magnitudes.size() / 2; m < magnitudes.size(); ++m)
    {
        if (magnitudes[m] > 0)
        {
            xs.push_back(static_cast<real_type>(m));
            ys.push_back(std::log(magnitudes[m]));
        }
    }
    if (xs.size() < 2)
    {
        return 0;
    }
    real_type mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= xs.size();
    real_type sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return std::exp(sxy / sxx);
}

//! Observed decay rate of the series terms.
inline real_type empirical_rate(SeriesResult const& r)
{
    return geometric_rate(r.term_norms);
}

//---------------------------------------------------------------------------//
//! First Born amplitude -(1/4π) Σ_n z̃_n exp(ik a_n·(â - ŝ)).
inline AmplitudeResult first_born(ScattererConfig const& config,
                                  IncidentWave const& wave,
                                  Direction const& s_hat)
{
    complex_type acc = 0;
    Vec3 const q = wave.direction().vec() - s_hat.vec();
    for (auto const& s : config)
    {
        if (is_absent(s))
        {
            continue;
        }
        acc += s.coupling * std::polar(1.0, wave.k() * dot(s.position, q));
    }
    return {-acc / (4 * pi), Scheme::first_born};
}

//---------------------------------------------------------------------------//
//! Least-squares slope of log|y| against log x, skipping nonpositive data.
inline real_type log_log_slope(std::span<real_type const> x,
                               std::span<real_type const> y)
{
    std::vector<real_type> lx, ly;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
    {
        if (x[i] > 0 && y[i] > 0 && std::isfinite(y[i]))
        {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    if (lx.size() < 2)
    {
        return std::numeric_limits<real_type>::quiet_NaN();
    }
    real_type mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= lx.size();
    real_type sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

struct DiscrepancyPoint
{
    real_type alpha;
    complex_type f_rb;
    complex_type f_exact;
    //! |f_rb - f_exact|; NaN when the far-zone series diverges.
    real_type abs_diff;
    bool rb_converged;
};

/*!
 * Pointwise gap between the summed far-zone series and the exact amplitude.
 *
 * The exact reference identifies the renormalized strengths with the bare
 * ones: 𝔰 = ασ, 𝔤 = αγ.
 */
inline std::vector<DiscrepancyPoint>
rb_discrepancy_scan(RBSeriesParams const& base,
                    Direction const& a_hat,
                    Direction const& s_hat,
                    std::span<real_type const> alphas,
                    std::size_t max_terms = 500,
                    real_type tol = 1e-15)
{
    std::vector<DiscrepancyPoint> out;
    out.reserve(alphas.size());
    for (real_type alpha : alphas)
    {
        RBSeriesParams p = base;
        p.alpha = alpha;
        PTDoubleDeltaParams pt(p.r0, alpha, p.sigma, p.gamma, p.k);
        complex_type exact
            = amplitude_exact(pt_to_config(pt), pt_wave(pt, a_hat), s_hat).value;

        auto rb = rb_far_zone_amplitude(p, a_hat, s_hat, max_terms, tol);
        DiscrepancyPoint pt_out{alpha, {}, exact, 0, false};
        if (rb.geometric_sum)
        {
            pt_out.f_rb = *rb.geometric_sum;
            pt_out.abs_diff = std::abs(pt_out.f_rb - exact);
            pt_out.rb_converged = true;
        }
        else
        {
            pt_out.f_rb = {std::numeric_limits<real_type>::quiet_NaN(),
                           std::numeric_limits<real_type>::quiet_NaN()};
            pt_out.abs_diff = std::numeric_limits<real_type>::quiet_NaN();
        }
        out.push_back(pt_out);
    }
    return out;
}

}  // namespace pointscat
