#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "core_model.hpp"
#include "quadrature.hpp"
#include "solver.hpp"

namespace pointscat
{
//---------------------------------------------------------------------------//
//! Orthonormal frame (e1, e2, axis) with the polar axis along a direction.
struct PolarFrame
{
    Vec3 e1;
    Vec3 e2;
    Vec3 axis;

    explicit PolarFrame(Direction const& polar_axis) : axis(polar_axis.vec())
    {
        Vec3 helper = std::abs(axis.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
        Vec3 t = helper - dot(helper, axis) * axis;
        e1 = (1 / norm(t)) * t;
        e2 = cross(axis, e1);
    }

    Direction direction(real_type cos_theta, real_type phi) const
    {
        real_type sin_theta = std::sqrt(std::max(0.0, 1 - cos_theta * cos_theta));
        Vec3 v = (sin_theta * std::cos(phi)) * e1 + (sin_theta * std::sin(phi)) * e2
                 + cos_theta * axis;
        return Direction::along(v);
    }

    //! Polar and azimuthal angles of a direction in this frame.
    std::pair<real_type, real_type> angles(Direction const& d) const
    {
        real_type c = std::clamp(dot(d, axis), -1.0, 1.0);
        real_type phi = std::atan2(dot(d, e2), dot(d, e1));
        if (phi < 0)
        {
            phi += 2 * pi;
        }
        return {std::acos(c), phi};
    }
};

//---------------------------------------------------------------------------//
struct GridNode
{
    Direction direction;
    real_type weight;
};

/*!
 * Product quadrature on the unit sphere.
 *
 * Gauss-Legendre in cos θ times the periodic trapezoid rule in φ, with the
 * polar axis along a chosen direction (normally the incident one).
 */
class AngularGrid
{
  public:
    static constexpr std::size_t default_polar = 64;
    static constexpr std::size_t default_azimuthal = 128;

    explicit AngularGrid(Direction const& polar_axis,
                         std::size_t n_polar = default_polar,
                         std::size_t n_azimuthal = default_azimuthal)
        : n_polar_(n_polar), n_azimuthal_(n_azimuthal)
    {
        if (n_polar == 0 || n_azimuthal == 0)
        {
            throw InvalidInput("angular grid orders must be positive");
        }
        PolarFrame frame(polar_axis);
        auto gl = gauss_legendre(n_polar);
        real_type const dphi = 2 * pi / static_cast<real_type>(n_azimuthal);
        nodes_.reserve(n_polar * n_azimuthal);
        for (std::size_t i = 0; i < n_polar; ++i)
        {
            for (std::size_t j = 0; j < n_azimuthal; ++j)
            {
                nodes_.push_back({frame.direction(gl.nodes[i], dphi * j),
                                  gl.weights[i] * dphi});
            }
        }
    }

    std::vector<GridNode> const& nodes() const noexcept { return nodes_; }
    std::size_t n_polar() const noexcept { return n_polar_; }
    std::size_t n_azimuthal() const noexcept { return n_azimuthal_; }

    real_type total_weight() const
    {
        real_type s = 0;
        for (auto const& n : nodes_)
        {
            s += n.weight;
        }
        return s;
    }

  private:
    std::size_t n_polar_;
    std::size_t n_azimuthal_;
    std::vector<GridNode> nodes_;
};

//---------------------------------------------------------------------------//
//! dσ/dΩ = |ũ_s|²
inline real_type differential_cross_section(AmplitudeResult const& f)
{
    return std::norm(f.value);
}

inline real_type total_cross_section(SolveResult const& sol,
                                     AngularGrid const& grid)
{
    real_type sigma = 0;
    for (auto const& node : grid.nodes())
    {
        sigma += differential_cross_section(amplitude_exact(sol, node.direction))
                 * node.weight;
    }
    return sigma;
}

inline real_type total_cross_section(ScattererConfig const& config,
                                     IncidentWave const& wave,
                                     AngularGrid const& grid)
{
    return total_cross_section(ScatteringSystem(config, wave.k()).solve(wave),
                               grid);
}

//! σ_total - (4π/k) Im ũ_s(â); zero for real couplings.
inline real_type optical_theorem_residual(SolveResult const& sol,
                                          AngularGrid const& grid)
{
    auto forward = amplitude_exact(sol, sol.wave.direction());
    return total_cross_section(sol, grid)
           - 4 * pi / sol.wave.k() * forward.value.imag();
}

inline real_type optical_theorem_residual(ScattererConfig const& config,
                                          IncidentWave const& wave,
                                          AngularGrid const& grid)
{
    return optical_theorem_residual(
        ScatteringSystem(config, wave.k()).solve(wave), grid);
}

}  // namespace pointscat
