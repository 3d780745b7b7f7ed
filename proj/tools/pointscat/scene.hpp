#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pointscat/pointscat.hpp"

namespace pointscat::cli
{
using json = nlohmann::json;

//---------------------------------------------------------------------------//
//! Evenly spaced (linear or logarithmic) parameter sweep.
struct Sweep
{
    real_type min{0};
    real_type max{0};
    std::size_t points{1};
    bool log_spacing{false};

    std::vector<real_type> values() const
    {
        std::vector<real_type> out(points);
        for (std::size_t i = 0; i < points; ++i)
        {
            real_type t = points > 1 ? static_cast<real_type>(i) / (points - 1)
                                     : 0;
            out[i] = log_spacing
                         ? std::exp(std::log(min)
                                    + t * (std::log(max) - std::log(min)))
                         : min + t * (max - min);
        }
        // Pin endpoints exactly
        if (points > 0)
        {
            out.front() = min;
        }
        if (points > 1)
        {
            out.back() = max;
        }
        return out;
    }
};

struct OutgoingSpec
{
    std::size_t n_theta{19};
    std::size_t n_phi{1};
    std::vector<Vec3> explicit_directions;
};

struct LineSpec
{
    Vec3 start;
    Vec3 end;
    std::size_t points{2};
};

struct PlaneSpec
{
    Vec3 origin;
    Vec3 u;
    Vec3 v;
    std::size_t nu{2};
    std::size_t nv{2};
};

struct RenormSpec
{
    std::optional<complex_type> coupling;
    std::vector<real_type> lambdas;
    CounterTerm counterterm{CounterTerm::linear_divergence};
};

/*!
 * Validated scene description.
 *
 * Exactly one of \c scatterers and \c pt is set.
 */
struct Scene
{
    std::optional<std::vector<PointScatterer>> scatterers;
    std::optional<PTDoubleDeltaParams> pt;
    real_type k{1};
    Vec3 incident{0, 0, 1};

    OutgoingSpec outgoing;
    std::optional<Sweep> k_sweep;
    std::optional<Sweep> alpha_sweep;

    Scheme scheme{Scheme::exact};
    std::size_t grid_polar{AngularGrid::default_polar};
    std::size_t grid_azimuthal{AngularGrid::default_azimuthal};
    real_type tol{1e-10};
    std::size_t max_terms{500};

    std::optional<LineSpec> line;
    std::optional<PlaneSpec> plane;
    std::optional<RenormSpec> renorm;

    //! Source document, echoed into JSON output.
    json source;

    Direction incident_direction() const { return Direction(incident); }

    //! Scatterers at wavenumber k (PT couplings depend on k).
    ScattererConfig config_at(real_type k_value) const
    {
        if (pt)
        {
            return pt_to_config(pt->with_k(k_value));
        }
        return ScattererConfig(*scatterers);
    }

    std::vector<real_type> wavenumbers() const
    {
        return k_sweep ? k_sweep->values() : std::vector<real_type>{k};
    }

    std::vector<Direction> outgoing_directions() const
    {
        std::vector<Direction> out;
        if (!outgoing.explicit_directions.empty())
        {
            for (auto const& v : outgoing.explicit_directions)
            {
                out.emplace_back(v);
            }
            return out;
        }
        PolarFrame frame(incident_direction());
        for (std::size_t i = 0; i < outgoing.n_theta; ++i)
        {
            real_type theta = outgoing.n_theta > 1
                                  ? pi * static_cast<real_type>(i)
                                        / (outgoing.n_theta - 1)
                                  : 0;
            for (std::size_t j = 0; j < outgoing.n_phi; ++j)
            {
                real_type phi = 2 * pi * static_cast<real_type>(j)
                                / outgoing.n_phi;
                out.push_back(frame.direction(std::cos(theta), phi));
            }
        }
        return out;
    }
};

//---------------------------------------------------------------------------//
namespace detail
{
class Reporter
{
  public:
    void add(std::string msg) { issues_.push_back(std::move(msg)); }
    std::vector<std::string> const& issues() const { return issues_; }

  private:
    std::vector<std::string> issues_;
};

inline std::optional<real_type>
get_number(json const& j, char const* key, std::string const& where, Reporter& r)
{
    if (!j.contains(key))
    {
        r.add(where + "." + key + ": missing");
        return std::nullopt;
    }
    auto const& v = j.at(key);
    if (!v.is_number())
    {
        r.add(where + "." + key + ": expected a number");
        return std::nullopt;
    }
    real_type x = v.get<real_type>();
    if (!std::isfinite(x))
    {
        r.add(where + "." + key + ": not finite");
        return std::nullopt;
    }
    return x;
}

inline std::optional<std::size_t> get_count(json const& j,
                                            char const* key,
                                            std::string const& where,
                                            Reporter& r,
                                            std::size_t minimum = 1)
{
    if (!j.contains(key))
    {
        r.add(where + "." + key + ": missing");
        return std::nullopt;
    }
    auto const& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0
        || static_cast<std::size_t>(v.get<long long>()) < minimum)
    {
        r.add(where + "." + key + ": expected an integer >= "
              + std::to_string(minimum));
        return std::nullopt;
    }
    return static_cast<std::size_t>(v.get<long long>());
}

inline std::optional<Vec3>
to_vec3(json const& v, std::string const& where, Reporter& r)
{
    if (!v.is_array() || v.size() != 3 || !v[0].is_number()
        || !v[1].is_number() || !v[2].is_number())
    {
        r.add(where + ": expected [x, y, z]");
        return std::nullopt;
    }
    Vec3 out{v[0].get<real_type>(), v[1].get<real_type>(), v[2].get<real_type>()};
    if (!is_finite(out))
    {
        r.add(where + ": not finite");
        return std::nullopt;
    }
    return out;
}

inline std::optional<Vec3>
get_vec3(json const& j, char const* key, std::string const& where, Reporter& r)
{
    if (!j.contains(key))
    {
        r.add(where + "." + key + ": missing");
        return std::nullopt;
    }
    return to_vec3(j.at(key), where + "." + key, r);
}

inline std::optional<complex_type>
to_complex(json const& v, std::string const& where, Reporter& r)
{
    if (v.is_number())
    {
        return complex_type(v.get<real_type>(), 0);
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    {
        complex_type c(v[0].get<real_type>(), v[1].get<real_type>());
        if (std::isfinite(c.real()) && std::isfinite(c.imag()))
        {
            return c;
        }
    }
    r.add(where + ": expected a number or [re, im]");
    return std::nullopt;
}

inline bool check_unit(Vec3 v, std::string const& where, Reporter& r)
{
    real_type n = norm(v);
    if (!(std::abs(n - 1) <= Direction::accept_tolerance))
    {
        r.add(where + ": non-unit direction (norm " + std::to_string(n) + ")");
        return false;
    }
    return true;
}

inline std::optional<Sweep>
parse_sweep(json const& j, std::string const& where, Reporter& r)
{
    if (!j.is_object())
    {
        r.add(where + ": expected an object");
        return std::nullopt;
    }
    Sweep s;
    auto lo = get_number(j, "min", where, r);
    auto hi = get_number(j, "max", where, r);
    auto n = get_count(j, "points", where, r);
    if (j.contains("spacing"))
    {
        auto sp = j.at("spacing");
        if (sp == "log")
        {
            s.log_spacing = true;
        }
        else if (sp != "linear")
        {
            r.add(where + ".spacing: expected \"linear\" or \"log\"");
        }
    }
    if (!lo || !hi || !n)
    {
        return std::nullopt;
    }
    s.min = *lo;
    s.max = *hi;
    s.points = *n;
    if (s.log_spacing && !(s.min > 0 && s.max > 0))
    {
        r.add(where + ": log spacing requires positive bounds");
        return std::nullopt;
    }
    return s;
}

inline std::optional<Scheme> parse_scheme(std::string const& name)
{
    for (Scheme s : {Scheme::exact,
                     Scheme::closed_form,
                     Scheme::neumann,
                     Scheme::rb_far_zone,
                     Scheme::first_born})
    {
        if (to_string(s) == name)
        {
            return s;
        }
    }
    return std::nullopt;
}
}  // namespace detail

//---------------------------------------------------------------------------//
struct ParseOutcome
{
    std::optional<Scene> scene;
    std::vector<std::string> issues;
};

/*!
 * Parse a scene document, collecting every violated invariant.
 *
 * A document produced as JSON output (with an "inputs" object) is accepted
 * and its echoed inputs are used.
 */
inline ParseOutcome analyze_scene(json const& doc)
{
    using namespace detail;
    Reporter r;
    ParseOutcome out;

    json const& j = (doc.is_object() && doc.contains("inputs")
                     && doc.at("inputs").is_object())
                        ? doc.at("inputs")
                        : doc;
    if (!j.is_object())
    {
        out.issues.push_back("scene: expected a JSON object");
        return out;
    }

    Scene scene;
    scene.source = j;
    bool ok = true;

    // wave
    if (!j.contains("wave") || !j.at("wave").is_object())
    {
        r.add("wave: missing");
        ok = false;
    }
    else
    {
        auto const& w = j.at("wave");
        auto k = get_number(w, "k", "wave", r);
        if (k && !(*k > 0))
        {
            r.add("wave.k: must be positive");
            k.reset();
        }
        ok = ok && k.has_value();
        if (k)
        {
            scene.k = *k;
        }
        if (w.contains("direction"))
        {
            auto d = to_vec3(w.at("direction"), "wave.direction", r);
            if (d && check_unit(*d, "wave.direction", r))
            {
                scene.incident = *d;
            }
            else
            {
                ok = false;
            }
        }
    }

    // scatterers / pt_double_delta
    bool has_list = j.contains("scatterers");
    bool has_pt = j.contains("pt_double_delta");
    if (has_list == has_pt)
    {
        r.add("scene: exactly one of \"scatterers\" and \"pt_double_delta\" "
              "must be present");
        ok = false;
    }
    if (has_list)
    {
        auto const& list = j.at("scatterers");
        if (!list.is_array() || list.empty())
        {
            r.add("scatterers: expected a non-empty array");
            ok = false;
        }
        else
        {
            std::vector<PointScatterer> sc;
            bool list_ok = true;
            for (std::size_t i = 0; i < list.size(); ++i)
            {
                std::string where = "scatterers[" + std::to_string(i) + "]";
                auto const& e = list[i];
                if (!e.is_object())
                {
                    r.add(where + ": expected an object");
                    list_ok = false;
                    continue;
                }
                auto pos = get_vec3(e, "position", where, r);
                std::optional<complex_type> c;
                if (!e.contains("coupling"))
                {
                    r.add(where + ".coupling: missing");
                }
                else
                {
                    c = to_complex(e.at("coupling"), where + ".coupling", r);
                }
                if (pos && c)
                {
                    sc.push_back({*pos, *c});
                }
                else
                {
                    list_ok = false;
                }
            }
            if (list_ok)
            {
                for (std::size_t a = 0; a < sc.size(); ++a)
                {
                    for (std::size_t b = a + 1; b < sc.size(); ++b)
                    {
                        if (!(norm(sc[a].position - sc[b].position) > 0))
                        {
                            r.add("scatterers: coincident scatterers "
                                  + std::to_string(a) + " and "
                                  + std::to_string(b));
                            list_ok = false;
                        }
                    }
                }
            }
            ok = ok && list_ok;
            if (list_ok)
            {
                scene.scatterers = std::move(sc);
            }
        }
    }
    if (has_pt)
    {
        auto const& p = j.at("pt_double_delta");
        if (!p.is_object())
        {
            r.add("pt_double_delta: expected an object");
            ok = false;
        }
        else
        {
            auto r0 = get_vec3(p, "r0", "pt_double_delta", r);
            auto alpha = get_number(p, "alpha", "pt_double_delta", r);
            auto sigma = get_number(p, "sigma", "pt_double_delta", r);
            auto gamma = get_number(p, "gamma", "pt_double_delta", r);
            bool pt_ok = r0 && alpha && sigma && gamma;
            if (r0 && !(norm(*r0) > 0))
            {
                r.add("pt_double_delta.r0: coincident scatterers (r0 = 0)");
                pt_ok = false;
            }
            if (alpha && sigma && gamma && *alpha * *sigma == 0
                && *alpha * *gamma == 0)
            {
                r.add("pt_double_delta: alpha*sigma and alpha*gamma both "
                      "vanish");
                pt_ok = false;
            }
            ok = ok && pt_ok;
            if (pt_ok && scene.k > 0)
            {
                scene.pt.emplace(*r0, *alpha, *sigma, *gamma, scene.k);
            }
        }
    }

    // scan
    if (j.contains("scan"))
    {
        auto const& s = j.at("scan");
        if (!s.is_object())
        {
            r.add("scan: expected an object");
            ok = false;
        }
        else
        {
            if (s.contains("outgoing"))
            {
                auto const& o = s.at("outgoing");
                if (o.contains("directions"))
                {
                    auto const& ds = o.at("directions");
                    if (!ds.is_array() || ds.empty())
                    {
                        r.add("scan.outgoing.directions: expected a "
                              "non-empty array");
                        ok = false;
                    }
                    else
                    {
                        for (std::size_t i = 0; i < ds.size(); ++i)
                        {
                            std::string where = "scan.outgoing.directions["
                                                + std::to_string(i) + "]";
                            auto v = to_vec3(ds[i], where, r);
                            if (v && check_unit(*v, where, r))
                            {
                                scene.outgoing.explicit_directions.push_back(*v);
                            }
                            else
                            {
                                ok = false;
                            }
                        }
                    }
                }
                else
                {
                    for (auto [key, slot] :
                         {std::pair{"n_theta", &scene.outgoing.n_theta},
                          std::pair{"n_phi", &scene.outgoing.n_phi}})
                    {
                        if (o.contains(key))
                        {
                            auto n = get_count(o, key, "scan.outgoing", r);
                            ok = ok && n;
                            *slot = n.value_or(*slot);
                        }
                    }
                }
            }
            if (s.contains("k_sweep"))
            {
                scene.k_sweep = parse_sweep(s.at("k_sweep"), "scan.k_sweep", r);
                ok = ok && scene.k_sweep.has_value();
                if (scene.k_sweep
                    && !(scene.k_sweep->min > 0 && scene.k_sweep->max > 0))
                {
                    r.add("scan.k_sweep: wavenumbers must be positive");
                    ok = false;
                }
            }
            if (s.contains("alpha_sweep"))
            {
                scene.alpha_sweep
                    = parse_sweep(s.at("alpha_sweep"), "scan.alpha_sweep", r);
                ok = ok && scene.alpha_sweep.has_value();
                if (!has_pt)
                {
                    r.add("scan.alpha_sweep: requires a pt_double_delta block");
                    ok = false;
                }
            }
        }
    }

    // scheme
    if (j.contains("scheme"))
    {
        auto const& sv = j.at("scheme");
        auto s = sv.is_string() ? parse_scheme(sv.get<std::string>())
                                : std::nullopt;
        if (!s)
        {
            r.add("scheme: unknown scheme");
            ok = false;
        }
        else
        {
            scene.scheme = *s;
            if ((*s == Scheme::closed_form || *s == Scheme::rb_far_zone)
                && !has_pt)
            {
                r.add("scheme: " + std::string(to_string(*s))
                      + " requires a pt_double_delta block");
                ok = false;
            }
        }
    }

    if (j.contains("quadrature"))
    {
        auto const& q = j.at("quadrature");
        if (q.contains("polar"))
        {
            auto n = get_count(q, "polar", "quadrature", r);
            ok = ok && n;
            scene.grid_polar = n.value_or(scene.grid_polar);
        }
        if (q.contains("azimuthal"))
        {
            auto n = get_count(q, "azimuthal", "quadrature", r);
            ok = ok && n;
            scene.grid_azimuthal = n.value_or(scene.grid_azimuthal);
        }
    }

    if (j.contains("tolerances"))
    {
        auto const& t = j.at("tolerances");
        if (t.contains("tol"))
        {
            auto v = get_number(t, "tol", "tolerances", r);
            if (v && !(*v > 0))
            {
                r.add("tolerances.tol: must be positive");
                v.reset();
            }
            ok = ok && v;
            scene.tol = v.value_or(scene.tol);
        }
        if (t.contains("max_terms"))
        {
            auto n = get_count(t, "max_terms", "tolerances", r);
            ok = ok && n;
            scene.max_terms = n.value_or(scene.max_terms);
        }
    }

    if (j.contains("field"))
    {
        auto const& f = j.at("field");
        if (f.contains("line"))
        {
            auto const& l = f.at("line");
            auto a = get_vec3(l, "start", "field.line", r);
            auto b = get_vec3(l, "end", "field.line", r);
            auto n = get_count(l, "points", "field.line", r);
            ok = ok && a && b && n;
            if (a && b && n)
            {
                scene.line = LineSpec{*a, *b, *n};
            }
        }
        else if (f.contains("plane"))
        {
            auto const& p = f.at("plane");
            auto o = get_vec3(p, "origin", "field.plane", r);
            auto u = get_vec3(p, "u", "field.plane", r);
            auto v = get_vec3(p, "v", "field.plane", r);
            auto nu = get_count(p, "nu", "field.plane", r);
            auto nv = get_count(p, "nv", "field.plane", r);
            ok = ok && o && u && v && nu && nv;
            if (o && u && v && nu && nv)
            {
                scene.plane = PlaneSpec{*o, *u, *v, *nu, *nv};
            }
        }
        else
        {
            r.add("field: expected a \"line\" or \"plane\" block");
            ok = false;
        }
    }

    if (j.contains("renorm"))
    {
        auto const& rn = j.at("renorm");
        RenormSpec spec;
        if (rn.contains("coupling"))
        {
            spec.coupling = to_complex(rn.at("coupling"), "renorm.coupling", r);
            if (spec.coupling && !(std::abs(*spec.coupling) > 0))
            {
                r.add("renorm.coupling: must be nonzero");
                spec.coupling.reset();
                ok = false;
            }
            ok = ok && spec.coupling.has_value();
        }
        if (rn.contains("lambdas"))
        {
            auto const& ls = rn.at("lambdas");
            if (!ls.is_array() || ls.empty())
            {
                r.add("renorm.lambdas: expected a non-empty array");
                ok = false;
            }
            else
            {
                for (auto const& l : ls)
                {
                    if (!l.is_number())
                    {
                        r.add("renorm.lambdas: expected numbers");
                        ok = false;
                        break;
                    }
                    spec.lambdas.push_back(l.get<real_type>());
                }
            }
        }
        else if (rn.contains("lambda_sweep"))
        {
            auto sw = parse_sweep(rn.at("lambda_sweep"), "renorm.lambda_sweep", r);
            ok = ok && sw;
            if (sw)
            {
                spec.lambdas = sw->values();
            }
        }
        else
        {
            r.add("renorm: expected \"lambdas\" or \"lambda_sweep\"");
            ok = false;
        }
        if (rn.contains("counterterm"))
        {
            auto const& ct = rn.at("counterterm");
            if (ct == "exact")
            {
                spec.counterterm = CounterTerm::exact;
            }
            else if (ct != "linear")
            {
                r.add("renorm.counterterm: expected \"linear\" or \"exact\"");
                ok = false;
            }
        }
        for (real_type lam : spec.lambdas)
        {
            if (!(lam > scene.k) || !std::isfinite(lam))
            {
                r.add("renorm: cutoff " + std::to_string(lam)
                      + " must exceed k = " + std::to_string(scene.k)
                      + " (lambda <= k)");
                ok = false;
            }
        }
        scene.renorm = std::move(spec);
    }

    out.issues = r.issues();
    if (ok && out.issues.empty())
    {
        out.scene = std::move(scene);
    }
    return out;
}

//! Parse or throw InvalidInput listing every violation.
inline Scene parse_scene(json const& doc)
{
    auto outcome = analyze_scene(doc);
    if (!outcome.scene)
    {
        std::string msg = "invalid scene:";
        for (auto const& i : outcome.issues)
        {
            msg += "\n  " + i;
        }
        throw InvalidInput(msg);
    }
    return std::move(*outcome.scene);
}

}  // namespace pointscat::cli
