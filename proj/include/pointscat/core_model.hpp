#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace pointscat
{
using real_type = double;
using complex_type = std::complex<double>;

inline constexpr real_type pi = 3.14159265358979323846;

//---------------------------------------------------------------------------//
//! Plain real 3-vector for positions and wave vectors.
struct Vec3
{
    real_type x{0}, y{0}, z{0};

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b)
    {
        return {a.x + b.x, a.y + b.y, a.z + b.z};
    }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b)
    {
        return {a.x - b.x, a.y - b.y, a.z - b.z};
    }
    friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(real_type s, Vec3 a)
    {
        return {s * a.x, s * a.y, s * a.z};
    }
    friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr real_type dot(Vec3 a, Vec3 b)
{
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Vec3 cross(Vec3 a, Vec3 b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline real_type norm(Vec3 a)
{
    return std::hypot(a.x, a.y, a.z);
}

inline bool is_finite(Vec3 a)
{
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

//---------------------------------------------------------------------------//
/*!
 * Unit vector: incident direction â or outgoing direction ŝ.
 *
 * Construction from a raw vector only accepts inputs already within 1e-6 of
 * unit length, then normalizes to full precision. Use \c along() to build a
 * direction from an arbitrary nonzero vector.
 */
class Direction
{
  public:
    static constexpr real_type accept_tolerance = 1e-6;

    //! Default: +z.
    Direction() = default;

    explicit Direction(Vec3 v)
    {
        real_type n = norm(v);
        if (!is_finite(v) || !(std::abs(n - 1) <= accept_tolerance))
        {
            throw InvalidInput("direction must have unit norm (got norm "
                               + std::to_string(n) + ")");
        }
        // Vectors already unit to rounding are kept as is, so that
        // renormalizing a Direction reproduces it exactly.
        if (std::abs(n - 1) > 4 * std::numeric_limits<real_type>::epsilon())
        {
            v_ = Vec3{v.x / n, v.y / n, v.z / n};
        }
        else
        {
            v_ = v;
        }
    }

    Direction(real_type x, real_type y, real_type z) : Direction(Vec3{x, y, z})
    {
    }

    //! Direction of an arbitrary nonzero finite vector.
    static Direction along(Vec3 v)
    {
        real_type n = norm(v);
        if (!is_finite(v) || !(n > 0))
        {
            throw InvalidInput("cannot take direction of a zero vector");
        }
        return Direction(Vec3{v.x / n, v.y / n, v.z / n});
    }

    //! Unit vector from spherical angles about the +z axis.
    static Direction from_angles(real_type theta, real_type phi)
    {
        real_type st = std::sin(theta);
        return Direction(
            Vec3{st * std::cos(phi), st * std::sin(phi), std::cos(theta)});
    }

    Vec3 const& vec() const noexcept { return v_; }
    real_type x() const noexcept { return v_.x; }
    real_type y() const noexcept { return v_.y; }
    real_type z() const noexcept { return v_.z; }

    Direction operator-() const
    {
        Direction d;
        d.v_ = -v_;
        return d;
    }

    friend bool operator==(Direction const&, Direction const&) = default;

  private:
    Vec3 v_{0, 0, 1};
};

inline real_type dot(Direction const& a, Vec3 b)
{
    return dot(a.vec(), b);
}

//---------------------------------------------------------------------------//
//! Plane wave u₀(r) = exp(i k â·r).
class IncidentWave
{
  public:
    IncidentWave(real_type k, Direction dir) : k_(k), dir_(dir)
    {
        if (!(k > 0) || !std::isfinite(k))
        {
            throw InvalidInput("wavenumber must be positive and finite");
        }
    }

    real_type k() const noexcept { return k_; }
    Direction const& direction() const noexcept { return dir_; }

    complex_type operator()(Vec3 r) const
    {
        return std::polar(real_type(1), k_ * dot(dir_, r));
    }

  private:
    real_type k_;
    Direction dir_;
};

//---------------------------------------------------------------------------//
//! Zero-range scatterer with renormalized coupling z̃.
struct PointScatterer
{
    Vec3 position;
    complex_type coupling;
};

//! Couplings this small are treated as an absent scatterer.
inline constexpr real_type absent_coupling_threshold = 1e-300;

inline bool is_absent(PointScatterer const& s)
{
    return std::abs(s.coupling) < absent_coupling_threshold;
}

/*!
 * Ordered collection of point scatterers at strictly distinct positions.
 *
 * Zero couplings are accepted and mean the scatterer is omitted from the
 * linear system.
 */
class ScattererConfig
{
  public:
    explicit ScattererConfig(std::vector<PointScatterer> scatterers)
        : scatterers_(std::move(scatterers))
    {
        if (scatterers_.empty())
        {
            throw InvalidInput("scatterer configuration must be non-empty");
        }
        for (std::size_t i = 0; i < scatterers_.size(); ++i)
        {
            auto const& s = scatterers_[i];
            if (!is_finite(s.position) || !std::isfinite(s.coupling.real())
                || !std::isfinite(s.coupling.imag()))
            {
                throw InvalidInput("scatterer " + std::to_string(i)
                                   + " has non-finite data");
            }
        }
        if (auto pair = find_coincident(scatterers_))
        {
            throw InvalidInput("coincident scatterers "
                               + std::to_string(pair->first) + " and "
                               + std::to_string(pair->second));
        }
    }

    //! First pair (i < j) of scatterers at the same position, if any.
    static std::optional<std::pair<std::size_t, std::size_t>>
    find_coincident(std::vector<PointScatterer> const& s)
    {
        for (std::size_t i = 0; i < s.size(); ++i)
        {
            for (std::size_t j = i + 1; j < s.size(); ++j)
            {
                if (!(norm(s[i].position - s[j].position) > 0))
                {
                    return std::make_pair(i, j);
                }
            }
        }
        return std::nullopt;
    }

    std::size_t size() const noexcept { return scatterers_.size(); }
    PointScatterer const& operator[](std::size_t i) const
    {
        return scatterers_[i];
    }
    std::vector<PointScatterer> const& scatterers() const noexcept
    {
        return scatterers_;
    }
    auto begin() const noexcept { return scatterers_.begin(); }
    auto end() const noexcept { return scatterers_.end(); }

  private:
    std::vector<PointScatterer> scatterers_;
};

//---------------------------------------------------------------------------//
/*!
 * PT-symmetric pair of point scatterers at ±r₀.
 *
 * Couplings are z̃₁ = z̃₂* = -k² α̃ (σ̃ + iγ̃). Only the products
 * 𝔰 = α̃σ̃ and 𝔤 = α̃γ̃ enter physical results.
 */
class PTDoubleDeltaParams
{
  public:
    PTDoubleDeltaParams(Vec3 r0,
                        real_type alpha,
                        real_type sigma,
                        real_type gamma,
                        real_type k)
        : r0_(r0), alpha_(alpha), sigma_(sigma), gamma_(gamma), k_(k)
    {
        if (!is_finite(r0) || !std::isfinite(alpha) || !std::isfinite(sigma)
            || !std::isfinite(gamma))
        {
            throw InvalidInput("PT parameters must be finite");
        }
        if (!(norm(r0) > 0))
        {
            throw InvalidInput("coincident scatterers: r0 must be nonzero");
        }
        if (!(k > 0) || !std::isfinite(k))
        {
            throw InvalidInput("wavenumber must be positive and finite");
        }
        real_type s = alpha * sigma;
        real_type g = alpha * gamma;
        if (!(s * s + g * g > 0))
        {
            throw InvalidInput("PT coupling degenerate: alpha*sigma and "
                               "alpha*gamma both vanish");
        }
    }

    Vec3 const& r0_vec() const noexcept { return r0_; }
    real_type r0() const { return norm(r0_); }
    real_type alpha() const noexcept { return alpha_; }
    real_type sigma() const noexcept { return sigma_; }
    real_type gamma() const noexcept { return gamma_; }
    real_type k() const noexcept { return k_; }

    //! 𝔰 = α̃σ̃
    real_type real_strength() const noexcept { return alpha_ * sigma_; }
    //! 𝔤 = α̃γ̃
    real_type gain_loss_strength() const noexcept { return alpha_ * gamma_; }

    //! z̃₁, the coupling at +r₀.
    complex_type coupling_plus() const
    {
        return -k_ * k_ * alpha_ * complex_type(sigma_, gamma_);
    }
    //! z̃₂ = conj(z̃₁), the coupling at -r₀.
    complex_type coupling_minus() const { return std::conj(coupling_plus()); }

    PTDoubleDeltaParams with_k(real_type k) const
    {
        return {r0_, alpha_, sigma_, gamma_, k};
    }
    PTDoubleDeltaParams with_alpha(real_type alpha) const
    {
        return {r0_, alpha, sigma_, gamma_, k_};
    }

  private:
    Vec3 r0_;
    real_type alpha_, sigma_, gamma_, k_;
};

//! Two-scatterer configuration: a₁ = +r₀ with z̃₁, a₂ = -r₀ with z̃₂ = z̃₁*.
inline ScattererConfig pt_to_config(PTDoubleDeltaParams const& p)
{
    return ScattererConfig({{p.r0_vec(), p.coupling_plus()},
                            {-p.r0_vec(), p.coupling_minus()}});
}

//! Plane wave carried by the PT parameters.
inline IncidentWave pt_wave(PTDoubleDeltaParams const& p, Direction a_hat)
{
    return IncidentWave(p.k(), a_hat);
}

struct XiPair
{
    real_type plus;  //!< k r₀·(â + ŝ)
    real_type minus;  //!< k r₀·(â - ŝ)
};

inline XiPair xi_pm(PTDoubleDeltaParams const& p,
                    Direction const& a_hat,
                    Direction const& s_hat)
{
    Vec3 const& r0 = p.r0_vec();
    return {p.k() * dot(r0, a_hat.vec() + s_hat.vec()),
            p.k() * dot(r0, a_hat.vec() - s_hat.vec())};
}

}  // namespace pointscat
