#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pointscat/pt_closed_form.hpp"
#include "pointscat/solver.hpp"

using namespace pointscat;

namespace
{
test::cplx det_oracle(PTDoubleDeltaParams const& p)
{
    auto a = build_matrix(pt_to_config(p), p.k());
    return test::det2({{a(0, 0), a(0, 1)}, {a(1, 0), a(1, 1)}});
}
}  // namespace

TEST(DeterminantD, MatchesTwoByTwoDeterminant)
{
    std::mt19937_64 rng(21);
    for (int i = 0; i < 2000; ++i)
    {
        auto p = test::random_pt(rng);
        EXPECT_LT(test::rel_err(determinant_D(p), det_oracle(p)), 1e-13);
    }
}

TEST(DeterminantD, StrongCouplingLimit)
{
    double k = 1.7, r0 = 0.6;
    auto limit = -(4 * k * k * r0 * r0 + std::polar(1.0, 4 * k * r0))
                 / (64 * pi * pi * r0 * r0);
    // the first term falls off as 1/scale
    double prev = 0;
    for (double scale : {1e2, 1e4, 1e6, 1e8})
    {
        PTDoubleDeltaParams p({0, r0, 0}, scale, 0.6, 0.8, k);
        double gap = std::abs(determinant_D(p) - limit);
        if (prev > 0)
        {
            EXPECT_NEAR(prev / gap, 100.0, 1.0);
        }
        prev = gap;
    }
    EXPECT_LT(prev, 1e-7 * std::abs(limit));
}

TEST(DeterminantD, HermitianCaseIsNotReal)
{
    double k = 1.2, r0 = 0.35, s = 0.4;
    PTDoubleDeltaParams p({r0, 0, 0}, 1, s, 0, k);
    double expected_im = -1 / (2 * pi * k * s)
                         - std::sin(4 * k * r0) / (64 * pi * pi * r0 * r0);
    EXPECT_NEAR(determinant_D(p).imag(), expected_im, 1e-14 * std::abs(expected_im));
    EXPECT_NE(determinant_D(p).imag(), 0.0);
}

TEST(AmplitudeClosedForm, EqualsGenericSolver)
{
    std::mt19937_64 rng(22);
    for (int i = 0; i < 2000; ++i)
    {
        auto p = test::random_pt(rng);
        auto a_hat = test::random_direction(rng);
        auto s_hat = test::random_direction(rng);
        auto closed = amplitude_closed_form(p, a_hat, s_hat);
        auto exact = amplitude_exact(pt_to_config(p), pt_wave(p, a_hat), s_hat);
        EXPECT_LT(test::rel_err(closed.value, exact.value), 1e-12);
        EXPECT_EQ(closed.scheme, Scheme::closed_form);
    }
}

TEST(AmplitudeClosedForm, BreakdownRecombines)
{
    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i)
    {
        auto p = test::random_pt(rng);
        auto a_hat = test::random_direction(rng);
        auto s_hat = test::random_direction(rng);
        auto b = closed_form_breakdown(p, a_hat, s_hat);
        EXPECT_EQ(b.amplitude, (b.term_interaction + b.term_geometry)
                                   / (2 * pi * b.determinant));
    }
}

TEST(AmplitudeClosedForm, ForwardDirection)
{
    std::mt19937_64 rng(24);
    for (int i = 0; i < 100; ++i)
    {
        auto p = test::random_pt(rng);
        auto a_hat = test::random_direction(rng);
        double k = p.k(), r0 = p.r0();
        double s = p.real_strength(), g = p.gain_loss_strength();
        double xi_plus = 2 * k * dot(a_hat, p.r0_vec());
        auto bracket = s / (k * k * (s * s + g * g))
                       + (std::polar(1.0, 2 * k * r0) * std::cos(xi_plus)
                          - complex_type(0, 2 * k * r0))
                             / (8 * pi * r0);
        auto expected = bracket / (2 * pi * determinant_D(p));
        EXPECT_LT(test::rel_err(amplitude_closed_form(p, a_hat, a_hat).value,
                                expected),
                  1e-13);
    }
}

TEST(AmplitudeClosedForm, Reciprocity)
{
    std::mt19937_64 rng(25);
    for (int i = 0; i < 500; ++i)
    {
        auto p = test::random_pt(rng);
        auto a_hat = test::random_direction(rng);
        auto s_hat = test::random_direction(rng);
        auto fwd = amplitude_closed_form(p, a_hat, s_hat).value;
        auto rev = amplitude_closed_form(p, -s_hat, -a_hat).value;
        EXPECT_LT(test::rel_err(fwd, rev), 1e-13);
    }
}

TEST(AmplitudeClosedForm, DependsOnlyOnStrengthProducts)
{
    std::mt19937_64 rng(26);
    for (int i = 0; i < 200; ++i)
    {
        auto p = test::random_pt(rng);
        auto a_hat = test::random_direction(rng);
        auto s_hat = test::random_direction(rng);
        auto base = amplitude_closed_form(p, a_hat, s_hat).value;

        // power-of-two rescaling keeps 𝔰 and 𝔤 exact
        for (double c : {0.25, 2.0, 1024.0})
        {
            PTDoubleDeltaParams q(p.r0_vec(), c * p.alpha(), p.sigma() / c,
                                  p.gamma() / c, p.k());
            EXPECT_EQ(amplitude_closed_form(q, a_hat, s_hat).value, base);
        }
        // other factors round the products; equal products give equal output
        for (double c : {0.3, 3.7, -1.9})
        {
            PTDoubleDeltaParams q(p.r0_vec(), c * p.alpha(), p.sigma() / c,
                                  p.gamma() / c, p.k());
            PTDoubleDeltaParams unit(p.r0_vec(), 1, q.real_strength(),
                                     q.gain_loss_strength(), p.k());
            auto fq = amplitude_closed_form(q, a_hat, s_hat).value;
            EXPECT_EQ(fq, amplitude_closed_form(unit, a_hat, s_hat).value);
            EXPECT_LT(test::rel_err(fq, base), 1e-13);
        }
    }
}

TEST(AmplitudeClosedForm, SpectralSingularity)
{
    auto p = test::singular_pt();
    EXPECT_LT(std::abs(determinant_D(p)), 1e-15);
    EXPECT_THROW(amplitude_closed_form(p, Direction(), Direction(1, 0, 0)),
                 SpectralSingularity);
    auto q = test::singular_pt(1.001);
    EXPECT_NO_THROW(amplitude_closed_form(q, Direction(), Direction(1, 0, 0)));
}
