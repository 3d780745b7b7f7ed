#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pointscat/pointscat.hpp"
#include "scene.hpp"
#include "table.hpp"

namespace pointscat::cli
{
inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

//! Runtime options that apply to every subcommand.
struct RunOptions
{
    unsigned threads{1};
};

namespace detail
{
//! Rethrow numerical failures with the parameters that caused them.
template<class F>
auto with_context(std::string const& context, F&& fn) -> decltype(fn())
{
    try
    {
        return fn();
    }
    catch (NumericalError const& e)
    {
        throw NumericalError(std::string(e.what()) + " [" + context + "]");
    }
}

inline std::string context_string(real_type k,
                                  std::optional<real_type> alpha = {},
                                  std::optional<Vec3> s = {})
{
    std::ostringstream os;
    os.precision(17);
    os << "k=" << k;
    if (alpha)
    {
        os << " alpha=" << *alpha;
    }
    if (s)
    {
        os << " s=(" << s->x << "," << s->y << "," << s->z << ")";
    }
    return os.str();
}

struct DirectionCells
{
    double theta, phi, sx, sy, sz;
};

inline DirectionCells describe(PolarFrame const& frame, Direction const& s)
{
    auto [theta, phi] = frame.angles(s);
    return {theta, phi, s.x(), s.y(), s.z()};
}

inline RBSeriesParams rb_params(PTDoubleDeltaParams const& p)
{
    return {p.alpha(), p.sigma(), p.gamma(), p.r0_vec(), p.k()};
}
}  // namespace detail

//---------------------------------------------------------------------------//
//! Scattering amplitude over the outgoing grid (and k sweep).
inline Table run_amplitude(Scene const& scene, RunOptions const& opts)
{
    Table t;
    t.columns = {"k", "theta", "phi", "s_x", "s_y", "s_z", "f_re", "f_im",
                 "abs_f2", "scheme", "solve_residual", "spectral_radius",
                 "terms_used"};
    t.units = {"1/L", "rad", "rad", "1", "1", "1", "L", "L",
               "L^2/sr", "-", "1", "1", "1"};

    auto const ks = scene.wavenumbers();
    auto const dirs = scene.outgoing_directions();
    Direction const a_hat = scene.incident_direction();
    PolarFrame const frame(a_hat);

    // One factorization per wavenumber, shared by all directions
    std::vector<std::optional<SolveResult>> solutions(ks.size());
    if (scene.scheme == Scheme::exact)
    {
        solutions = parallel_map(
            ks.size(), opts.threads, [&](std::size_t i) {
                return detail::with_context(
                    detail::context_string(ks[i]), [&] {
                        return std::optional<SolveResult>(
                            ScatteringSystem(scene.config_at(ks[i]), ks[i])
                                .solve(IncidentWave(ks[i], a_hat)));
                    });
            });
    }

    t.rows = parallel_map(
        ks.size() * dirs.size(), opts.threads, [&](std::size_t idx) {
            std::size_t const ik = idx / dirs.size();
            Direction const& s_hat = dirs[idx % dirs.size()];
            real_type const k = ks[ik];
            IncidentWave const wave(k, a_hat);

            complex_type f;
            double residual = nan_value;
            double radius = nan_value;
            double terms = nan_value;
            detail::with_context(
                detail::context_string(k, {}, s_hat.vec()), [&] {
                    switch (scene.scheme)
                    {
                        case Scheme::exact: {
                            auto const& sol = *solutions[ik];
                            f = amplitude_exact(sol, s_hat).value;
                            residual = sol.residual_scale > 0
                                           ? sol.residual / sol.residual_scale
                                           : 0;
                            break;
                        }
                        case Scheme::closed_form:
                            f = amplitude_closed_form(
                                    scene.pt->with_k(k), a_hat, s_hat)
                                    .value;
                            break;
                        case Scheme::first_born:
                            f = first_born(scene.config_at(k), wave, s_hat).value;
                            break;
                        case Scheme::neumann: {
                            auto r = neumann_amplitude(scene.config_at(k),
                                                       wave,
                                                       s_hat,
                                                       scene.max_terms,
                                                       scene.tol);
                            if (!r.converged_value)
                            {
                                throw SeriesDivergence(
                                    r.spectral_radius_estimate);
                            }
                            f = *r.converged_value;
                            radius = r.spectral_radius_estimate;
                            terms = static_cast<double>(r.terms_used);
                            break;
                        }
                        case Scheme::rb_far_zone: {
                            auto r = rb_far_zone_amplitude(
                                detail::rb_params(scene.pt->with_k(k)),
                                a_hat,
                                s_hat,
                                scene.max_terms,
                                scene.tol);
                            if (!r.geometric_sum)
                            {
                                throw SeriesDivergence(
                                    r.spectral_radius_estimate);
                            }
                            f = *r.geometric_sum;
                            radius = r.spectral_radius_estimate;
                            terms = static_cast<double>(r.terms_used);
                            break;
                        }
                    }
                });

            auto d = detail::describe(frame, s_hat);
            return Row{k, d.theta, d.phi, d.sx, d.sy, d.sz, f.real(), f.imag(),
                       std::norm(f), std::string(to_string(scene.scheme)),
                       residual, radius, terms};
        });
    return t;
}

//---------------------------------------------------------------------------//
//! Differential cross section table plus total cross section diagnostics.
inline Table run_cross_section(Scene const& scene, RunOptions const& opts)
{
    Table t;
    t.columns = {"k", "theta", "phi", "s_x", "s_y", "s_z", "f_re", "f_im",
                 "dcs", "sigma_total", "optical_residual", "scheme"};
    t.units = {"1/L", "rad", "rad", "1", "1", "1", "L", "L",
               "L^2/sr", "L^2", "L^2", "-"};

    auto const ks = scene.wavenumbers();
    auto const dirs = scene.outgoing_directions();
    Direction const a_hat = scene.incident_direction();
    PolarFrame const frame(a_hat);
    AngularGrid const grid(a_hat, scene.grid_polar, scene.grid_azimuthal);

    struct PerK
    {
        SolveResult sol;
        real_type sigma;
        real_type residual;
    };
    auto per_k = parallel_map(ks.size(), opts.threads, [&](std::size_t i) {
        return detail::with_context(detail::context_string(ks[i]), [&] {
            auto sol = ScatteringSystem(scene.config_at(ks[i]), ks[i])
                           .solve(IncidentWave(ks[i], a_hat));
            real_type sigma = total_cross_section(sol, grid);
            real_type forward = amplitude_exact(sol, a_hat).value.imag();
            return std::optional<PerK>(
                PerK{sol, sigma, sigma - 4 * pi / ks[i] * forward});
        });
    });

    t.rows = parallel_map(
        ks.size() * dirs.size(), opts.threads, [&](std::size_t idx) {
            auto const& pk = *per_k[idx / dirs.size()];
            Direction const& s_hat = dirs[idx % dirs.size()];
            auto f = amplitude_exact(pk.sol, s_hat);
            auto d = detail::describe(frame, s_hat);
            return Row{pk.sol.wave.k(), d.theta, d.phi, d.sx, d.sy, d.sz,
                       f.value.real(), f.value.imag(),
                       differential_cross_section(f), pk.sigma, pk.residual,
                       std::string(to_string(Scheme::exact))};
        });
    return t;
}

//---------------------------------------------------------------------------//
//! Total field on a line or plane of sample points.
inline Table run_field(Scene const& scene, RunOptions const& opts)
{
    Table t;
    t.columns = {"k", "x", "y", "z", "u_re", "u_im", "us_re", "us_im",
                 "abs_u2", "scheme"};
    t.units = {"1/L", "L", "L", "L", "1", "1", "1", "1", "1", "-"};

    std::vector<Vec3> points;
    if (scene.line)
    {
        auto const& l = *scene.line;
        for (std::size_t i = 0; i < l.points; ++i)
        {
            real_type s = l.points > 1 ? static_cast<real_type>(i) / (l.points - 1)
                                       : 0;
            points.push_back(l.start + s * (l.end - l.start));
        }
    }
    else if (scene.plane)
    {
        auto const& p = *scene.plane;
        for (std::size_t i = 0; i < p.nu; ++i)
        {
            real_type su = p.nu > 1 ? static_cast<real_type>(i) / (p.nu - 1) : 0;
            for (std::size_t j = 0; j < p.nv; ++j)
            {
                real_type sv = p.nv > 1 ? static_cast<real_type>(j) / (p.nv - 1)
                                        : 0;
                points.push_back(p.origin + su * p.u + sv * p.v);
            }
        }
    }
    else
    {
        throw InvalidInput("field: scene needs a \"field\" block with a line "
                           "or plane");
    }

    auto const ks = scene.wavenumbers();
    Direction const a_hat = scene.incident_direction();
    auto sols = parallel_map(ks.size(), opts.threads, [&](std::size_t i) {
        return detail::with_context(detail::context_string(ks[i]), [&] {
            return std::optional<SolveResult>(
                ScatteringSystem(scene.config_at(ks[i]), ks[i])
                    .solve(IncidentWave(ks[i], a_hat)));
        });
    });

    t.rows = parallel_map(
        ks.size() * points.size(), opts.threads, [&](std::size_t idx) {
            auto const& sol = *sols[idx / points.size()];
            Vec3 const& r = points[idx % points.size()];
            complex_type us = scattered_field(sol, r);
            complex_type u = sol.wave(r) + us;
            return Row{sol.wave.k(), r.x, r.y, r.z, u.real(), u.imag(),
                       us.real(), us.imag(), std::norm(u),
                       std::string(to_string(Scheme::exact))};
        });
    return t;
}

//---------------------------------------------------------------------------//
/*!
 * Exact amplitude against the far-zone iterated Born series, the Neumann
 * series, and the first Born term over an alpha and/or k sweep.
 */
inline Table run_compare_rb(Scene const& scene, RunOptions const& opts)
{
    if (!scene.pt)
    {
        throw InvalidInput("compare-rb: requires a pt_double_delta block");
    }
    Table t;
    t.columns = {"alpha", "k", "theta", "phi", "s_x", "s_y", "s_z",
                 "f_exact_re", "f_exact_im", "f_rb_re", "f_rb_im",
                 "f_neumann_re", "f_neumann_im", "f_born_re", "f_born_im",
                 "abs_diff", "abs_diff_neumann", "abs_diff_born",
                 "rb_spectral_radius", "neumann_spectral_radius",
                 "rb_converged", "scheme"};
    t.units = {"1", "1/L", "rad", "rad", "1", "1", "1", "L", "L", "L", "L",
               "L", "L", "L", "L", "L", "L", "L", "1", "1", "bool", "-"};

    auto const ks = scene.wavenumbers();
    auto const dirs = scene.outgoing_directions();
    std::vector<real_type> const alphas
        = scene.alpha_sweep ? scene.alpha_sweep->values()
                            : std::vector<real_type>{scene.pt->alpha()};
    Direction const a_hat = scene.incident_direction();
    PolarFrame const frame(a_hat);

    // Row order: k, then direction, then alpha
    std::size_t const per_k = dirs.size() * alphas.size();
    t.rows = parallel_map(
        ks.size() * per_k, opts.threads, [&](std::size_t idx) {
            real_type const k = ks[idx / per_k];
            Direction const& s_hat = dirs[(idx % per_k) / alphas.size()];
            real_type const alpha = alphas[idx % alphas.size()];

            return detail::with_context(
                detail::context_string(k, alpha, s_hat.vec()), [&] {
                    PTDoubleDeltaParams const p
                        = scene.pt->with_k(k).with_alpha(alpha);
                    auto const config = pt_to_config(p);
                    IncidentWave const wave(k, a_hat);

                    complex_type fe = amplitude_exact(config, wave, s_hat).value;
                    auto rb = rb_far_zone_amplitude(detail::rb_params(p),
                                                    a_hat,
                                                    s_hat,
                                                    scene.max_terms,
                                                    scene.tol);
                    complex_type frb = rb.geometric_sum.value_or(
                        complex_type(nan_value, nan_value));
                    auto nm = neumann_amplitude(
                        config, wave, s_hat, scene.max_terms, scene.tol);
                    complex_type fn = nm.converged_value.value_or(
                        complex_type(nan_value, nan_value));
                    complex_type fb = first_born(config, wave, s_hat).value;

                    auto d = detail::describe(frame, s_hat);
                    return Row{alpha, k, d.theta, d.phi, d.sx, d.sy, d.sz,
                               fe.real(), fe.imag(), frb.real(), frb.imag(),
                               fn.real(), fn.imag(), fb.real(), fb.imag(),
                               std::abs(frb - fe), std::abs(fn - fe),
                               std::abs(fb - fe), rb.spectral_radius_estimate,
                               nm.spectral_radius_estimate,
                               rb.geometric_sum ? 1.0 : 0.0,
                               std::string("exact/rb_far_zone/neumann/"
                                           "first_born")};
                });
        });

    // Fitted slope of log|f_rb - f_exact| against log alpha per (k, ŝ)
    if (alphas.size() >= 2)
    {
        for (std::size_t ik = 0; ik < ks.size(); ++ik)
        {
            for (std::size_t id = 0; id < dirs.size(); ++id)
            {
                std::vector<real_type> xs, ys;
                for (std::size_t ia = 0; ia < alphas.size(); ++ia)
                {
                    auto const& row
                        = t.rows[ik * per_k + id * alphas.size() + ia];
                    xs.push_back(std::abs(std::get<double>(row[0])));
                    ys.push_back(std::get<double>(row[15]));
                }
                std::ostringstream key;
                key << "fitted_slope k_index=" << ik << " direction_index=" << id;
                t.footer.emplace_back(key.str(), log_log_slope(xs, ys));
            }
        }
    }
    return t;
}

//---------------------------------------------------------------------------//
//! Single-scatterer amplitude at finite cutoff over a Λ sweep.
inline Table run_renorm_flow(Scene const& scene, RunOptions const& opts)
{
    if (!scene.renorm)
    {
        throw InvalidInput("renorm-flow: scene needs a \"renorm\" block");
    }
    std::optional<complex_type> z = scene.renorm->coupling;
    if (!z && scene.scatterers && scene.scatterers->size() == 1)
    {
        z = scene.scatterers->front().coupling;
    }
    if (!z || !(std::abs(*z) > 0))
    {
        throw InvalidInput("renorm-flow: needs renorm.coupling or a single "
                           "scatterer with nonzero coupling");
    }

    Table t;
    t.columns = {"k", "lambda", "lambda_over_k", "bare_inv_re", "bare_inv_im",
                 "f_cutoff_re", "f_cutoff_im", "f_renorm_re", "f_renorm_im",
                 "deviation", "scheme"};
    t.units = {"1/L", "1/L", "1", "1/L", "1/L", "L", "L", "L", "L", "1", "-"};

    auto const ks = scene.wavenumbers();
    auto const& lambdas = scene.renorm->lambdas;
    t.rows = parallel_map(
        ks.size() * lambdas.size(), opts.threads, [&](std::size_t idx) {
            real_type const k = ks[idx / lambdas.size()];
            real_type const lam = lambdas[idx % lambdas.size()];
            std::vector<real_type> one{lam};
            auto fp = renormalization_flow_check(
                          *z, k, one, scene.renorm->counterterm)
                          .front();
            return Row{k, lam, lam / k, fp.bare_inverse.real(),
                       fp.bare_inverse.imag(), fp.f_cutoff.real(),
                       fp.f_cutoff.imag(), fp.f_renormalized.real(),
                       fp.f_renormalized.imag(), fp.deviation,
                       std::string("cutoff")};
        });
    return t;
}

}  // namespace pointscat::cli
