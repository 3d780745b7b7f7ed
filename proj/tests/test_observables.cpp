#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pointscat/observables.hpp"
#include "pointscat/pt_closed_form.hpp"

using namespace pointscat;

namespace
{
//! Rotation about a unit axis by angle t (Rodrigues).
Vec3 rotate(Vec3 v, Vec3 axis, double t)
{
    return std::cos(t) * v + std::sin(t) * cross(axis, v)
           + (1 - std::cos(t)) * dot(axis, v) * axis;
}
}  // namespace

TEST(AngularGrid, WeightsSumToFourPi)
{
    std::mt19937_64 rng(41);
    for (std::size_t np : {1u, 2u, 7u, 16u, 64u, 65u, 128u})
    {
        for (std::size_t na : {1u, 3u, 128u})
        {
            AngularGrid grid(test::random_direction(rng), np, na);
            EXPECT_NEAR(grid.total_weight(), 4 * pi, 1e-12);
            EXPECT_EQ(grid.nodes().size(), np * na);
            for (auto const& node : grid.nodes())
            {
                EXPECT_GT(node.weight, 0);
                EXPECT_NEAR(norm(node.direction.vec()), 1.0, 1e-14);
            }
        }
    }
    EXPECT_THROW(AngularGrid(Direction(), 0, 4), InvalidInput);
}

TEST(AngularGrid, IntegratesLowOrderPolynomials)
{
    AngularGrid grid(Direction::along({1, 2, 3}), 8, 16);
    double xx = 0, xy = 0, z4 = 0;
    for (auto const& n : grid.nodes())
    {
        xx += n.weight * n.direction.x() * n.direction.x();
        xy += n.weight * n.direction.x() * n.direction.y();
        z4 += n.weight * std::pow(n.direction.z(), 4);
    }
    EXPECT_NEAR(xx, 4 * pi / 3, 1e-13);
    EXPECT_NEAR(xy, 0, 1e-13);
    EXPECT_NEAR(z4, 4 * pi / 5, 1e-13);
}

TEST(PolarFrame, AnglesRoundTrip)
{
    std::mt19937_64 rng(42);
    for (int i = 0; i < 50; ++i)
    {
        PolarFrame frame(test::random_direction(rng));
        double c = std::uniform_real_distribution<double>(-0.99, 0.99)(rng);
        double phi = std::uniform_real_distribution<double>(0, 2 * pi)(rng);
        auto [theta, phi_back] = frame.angles(frame.direction(c, phi));
        EXPECT_NEAR(std::cos(theta), c, 1e-13);
        EXPECT_NEAR(phi_back, phi, 1e-12);
    }
}

TEST(DifferentialCrossSection, Basics)
{
    EXPECT_EQ(differential_cross_section({0, Scheme::exact}), 0.0);
    EXPECT_DOUBLE_EQ(differential_cross_section({{3, 4}, Scheme::exact}), 25.0);

    ScattererConfig one(std::vector<PointScatterer>{{{0.2, 0, 0}, {1.5, 0}}});
    IncidentWave wave(1.2, Direction());
    auto sol = ScatteringSystem(one, 1.2).solve(wave);
    double ref = differential_cross_section(amplitude_exact(sol, Direction()));
    std::mt19937_64 rng(43);
    for (int i = 0; i < 20; ++i)
    {
        EXPECT_NEAR(differential_cross_section(
                        amplitude_exact(sol, test::random_direction(rng))),
                    ref, 1e-15 * ref);
    }
}

TEST(DifferentialCrossSection, PtPairAsymmetricUnderGainLossFlip)
{
    PTDoubleDeltaParams p({0.3, 0.1, 0.5}, 1, 0.4, 0.3, 1.5);
    PTDoubleDeltaParams flipped({0.3, 0.1, 0.5}, 1, 0.4, -0.3, 1.5);
    auto a_hat = Direction();
    auto s_hat = Direction::along({1, 0.5, 0.2});
    double d1 = differential_cross_section(amplitude_closed_form(p, a_hat, s_hat));
    double d2 = differential_cross_section(amplitude_closed_form(flipped, a_hat, s_hat));
    EXPECT_GT(std::abs(d1 - d2), 1e-3 * std::max(d1, d2));
}

TEST(TotalCrossSection, ZeroCouplingIsZero)
{
    ScattererConfig cfg(std::vector<PointScatterer>{{{0, 0, 0}, 0.0}, {{1, 0, 0}, 0.0}});
    IncidentWave wave(1.0, Direction());
    EXPECT_EQ(total_cross_section(cfg, wave, AngularGrid(Direction())), 0.0);
}

TEST(TotalCrossSection, SingleScattererIsIsotropic)
{
    for (double z : {-3.0, 0.2, 5.0})
    {
        double k = 0.7;
        ScattererConfig cfg(std::vector<PointScatterer>{{{0.5, -0.5, 0.1}, z}});
        IncidentWave wave(k, Direction::along({1, 1, 1}));
        auto f = amplitude_exact(cfg, wave, wave.direction()).value;
        double sigma = total_cross_section(cfg, wave, AngularGrid(wave.direction()));
        EXPECT_NEAR(sigma, 4 * pi * std::norm(f), 1e-13 * sigma);
        // unitarity of the single renormalized scatterer
        EXPECT_NEAR(4 * pi * std::norm(f), 4 * pi / k * f.imag(), 1e-14 * sigma);
    }
}

TEST(TotalCrossSection, GridRefinementConverged)
{
    std::mt19937_64 rng(44);
    for (double kr : {0.5, 2.0, 5.0})
    {
        PTDoubleDeltaParams p(kr * test::random_direction(rng).vec(), 1, 0.5, 0.2, 1.0);
        auto cfg = pt_to_config(p);
        auto wave = pt_wave(p, Direction());
        auto sol = ScatteringSystem(cfg, 1.0).solve(wave);
        double coarse = total_cross_section(sol, AngularGrid(Direction()));
        double fine = total_cross_section(sol, AngularGrid(Direction(), 128, 256));
        EXPECT_LT(std::abs(coarse - fine), 1e-10 * fine) << "kr0=" << kr;
    }
}

TEST(TotalCrossSection, RotationInvariant)
{
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 10; ++trial)
    {
        double k = 1.1;
        auto cfg = test::random_config(rng, 4, k, 1.5);
        auto a_hat = test::random_direction(rng);
        Vec3 axis = test::random_direction(rng).vec();
        double t = std::uniform_real_distribution<double>(0, 2 * pi)(rng);

        std::vector<PointScatterer> rotated;
        for (auto const& s : cfg)
        {
            rotated.push_back({rotate(s.position, axis, t), s.coupling});
        }
        Direction a_rot = Direction::along(rotate(a_hat.vec(), axis, t));

        double base = total_cross_section(cfg, IncidentWave(k, a_hat), AngularGrid(a_hat));
        double rot = total_cross_section(ScattererConfig(rotated), IncidentWave(k, a_rot),
                                         AngularGrid(a_rot));
        EXPECT_LT(std::abs(base - rot), 1e-10 * base);
    }
}

TEST(OpticalTheorem, RealCouplings)
{
    std::mt19937_64 rng(46);
    for (std::size_t n : {1u, 2u, 5u})
    {
        for (int trial = 0; trial < 5; ++trial)
        {
            double k = test::log_uniform(rng, 0.5, 2);
            auto cfg = test::random_config(rng, n, k, 2.0 / k, true);
            IncidentWave wave(k, test::random_direction(rng));
            auto sol = ScatteringSystem(cfg, k).solve(wave);
            AngularGrid grid(wave.direction());
            double sigma = total_cross_section(sol, grid);
            EXPECT_LE(std::abs(optical_theorem_residual(sol, grid)), 1e-10 * sigma)
                << "n=" << n;
        }
    }
}

TEST(OpticalTheorem, GainLossBreaksFluxBalance)
{
    auto residual = [](double gamma) {
        PTDoubleDeltaParams p({0.2, 0.3, 0.4}, 1, 0.6, gamma, 1.3);
        return optical_theorem_residual(pt_to_config(p), pt_wave(p, Direction()),
                                        AngularGrid(Direction()));
    };
    double sigma_ref = total_cross_section(
        pt_to_config(PTDoubleDeltaParams({0.2, 0.3, 0.4}, 1, 0.6, 0.3, 1.3)),
        IncidentWave(1.3, Direction()), AngularGrid(Direction()));
    EXPECT_GT(std::abs(residual(0.3)), 1e-3 * sigma_ref);

    double prev = std::abs(residual(0.3));
    for (double g : {1e-1, 1e-2, 1e-3, 1e-4})
    {
        double r = std::abs(residual(g));
        EXPECT_LT(r, prev);
        prev = r;
    }
    EXPECT_LT(std::abs(residual(0.0)), 1e-10 * sigma_ref);
}
