#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace pointscat
{
namespace detail
{
inline std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
}
}  // namespace detail

//! Precondition or invariant violation in caller-supplied data.
class InvalidInput : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//! Attempt to evaluate the free Green function at zero separation.
class OnsiteSingularity : public InvalidInput
{
  public:
    OnsiteSingularity()
        : InvalidInput("green function evaluated at zero distance; use the "
                       "renormalized on-site path")
    {
    }
};

//! Base for failures of a numerical procedure on otherwise valid input.
class NumericalError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/*!
 * The coefficient matrix is singular to working precision.
 *
 * Zeros of det A are physical (spectral singularities), so they are reported
 * together with the pivot that tripped the threshold.
 */
class SpectralSingularity : public NumericalError
{
  public:
    SpectralSingularity(double smallest_pivot, double scale)
        : NumericalError("spectral singularity: smallest pivot "
                         + detail::sci(smallest_pivot)
                         + " below threshold relative to matrix scale "
                         + detail::sci(scale))
        , smallest_pivot_(smallest_pivot)
        , scale_(scale)
    {
    }

    double smallest_pivot() const noexcept { return smallest_pivot_; }
    double scale() const noexcept { return scale_; }

  private:
    double smallest_pivot_;
    double scale_;
};

//! A series was requested to converge but its spectral radius is >= 1.
class SeriesDivergence : public NumericalError
{
  public:
    explicit SeriesDivergence(double spectral_radius)
        : NumericalError("series diverges: spectral radius "
                         + detail::sci(spectral_radius) + " >= 1")
        , spectral_radius_(spectral_radius)
    {
    }

    double spectral_radius() const noexcept { return spectral_radius_; }

  private:
    double spectral_radius_;
};

}  // namespace pointscat
