#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pointscat/pt_closed_form.hpp"
#include "pointscat/series.hpp"
#include "pointscat/solver.hpp"

using namespace pointscat;

namespace
{
test::CMat to_rows(CoefficientMatrix const& a)
{
    test::CMat m(a.size(), std::vector<test::cplx>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        for (std::size_t j = 0; j < a.size(); ++j)
        {
            m[i][j] = a(i, j);
        }
    }
    return m;
}
}  // namespace

TEST(BuildMatrix, PtPairEntries)
{
    PTDoubleDeltaParams p({0.1, -0.3, 0.4}, 1.5, 0.2, -0.7, 1.3);
    auto a = build_matrix(pt_to_config(p), p.k());
    ASSERT_EQ(a.size(), 2u);
    double const r0 = p.r0();
    auto expected_off = std::polar(1.0, 2 * p.k() * r0) / (8 * pi * r0);
    EXPECT_LT(test::rel_err(a(0, 1), expected_off), 1e-14);
    EXPECT_EQ(a(0, 1), a(1, 0));
    complex_type const outgoing(0, p.k() / (4 * pi));
    EXPECT_EQ(a(0, 0), complex_type(1) / p.coupling_plus() + outgoing);
    EXPECT_EQ(a(1, 1), complex_type(1) / p.coupling_minus() + outgoing);
}

TEST(BuildMatrix, SingleScatterer)
{
    ScattererConfig cfg(std::vector<PointScatterer>{{{1, 2, 3}, {0.5, 0.1}}});
    auto a = build_matrix(cfg, 2.0);
    ASSERT_EQ(a.size(), 1u);
    auto expected = complex_type(1) / complex_type(0.5, 0.1) + complex_type(0, 2 / (4 * pi));
    EXPECT_LT(test::rel_err(a(0, 0), expected), 1e-15);
}

TEST(BuildMatrix, SymmetricAndOutgoingDiagonal)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial)
    {
        auto cfg = test::random_config(rng, 6, 1.7, 2.0, true);
        auto a = build_matrix(cfg, 1.7);
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            EXPECT_DOUBLE_EQ(a(i, i).imag(), 1.7 / (4 * pi));
            for (std::size_t j = 0; j < a.size(); ++j)
            {
                EXPECT_EQ(a(i, j), a(j, i));
            }
        }
    }
}

TEST(BuildMatrix, AbsentScatterersDropped)
{
    ScattererConfig cfg(std::vector<PointScatterer>{{{0, 0, 0}, 1.0}, {{1, 0, 0}, 0.0}, {{0, 1, 0}, 2.0}});
    auto a = build_matrix(cfg, 1.0);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a.active(), (std::vector<std::size_t>{0, 2}));
    EXPECT_THROW(build_matrix(cfg, 0.0), InvalidInput);
}

TEST(SolveSystem, SingleScattererAtOrigin)
{
    complex_type z(-0.8, 0.3);
    double k = 2.1;
    ScattererConfig cfg(std::vector<PointScatterer>{{{0, 0, 0}, z}});
    IncidentWave wave(k, Direction(0, 1, 0));
    auto sol = solve_system(build_matrix(cfg, k), wave, cfg);
    auto expected = 1.0 / (1.0 / z + complex_type(0, k / (4 * pi)));
    EXPECT_LT(test::rel_err(sol.x[0], expected), 1e-15);
}

TEST(SolveSystem, MatchesCramerOracleForPtPairs)
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 500; ++i)
    {
        auto p = test::random_pt(rng);
        auto a_hat = test::random_direction(rng);
        auto cfg = pt_to_config(p);
        auto wave = pt_wave(p, a_hat);
        auto a = build_matrix(cfg, p.k());
        auto sol = solve_system(a, wave, cfg);
        auto [x0, x1] = test::cramer2(to_rows(a), wave(cfg[0].position),
                                      wave(cfg[1].position));
        EXPECT_LT(test::rel_err(sol.x[0], x0), 1e-13);
        EXPECT_LT(test::rel_err(sol.x[1], x1), 1e-13);
    }
}

TEST(SolveSystem, ResidualBound)
{
    std::mt19937_64 rng(13);
    for (std::size_t n : {1u, 2u, 5u, 20u, 60u})
    {
        double k = test::log_uniform(rng, 0.3, 3);
        auto cfg = test::random_config(rng, n, k, 3.0);
        auto sol = ScatteringSystem(cfg, k).solve(IncidentWave(k, test::random_direction(rng)));
        EXPECT_LE(sol.residual, 1e-12 * sol.residual_scale) << "n=" << n;
    }
}

TEST(SolveSystem, SpectralSingularityIsReported)
{
    auto p = test::singular_pt();
    auto cfg = pt_to_config(p);
    try
    {
        ScatteringSystem sys(cfg, p.k());
        FAIL() << "expected a spectral singularity";
    }
    catch (SpectralSingularity const& e)
    {
        EXPECT_LT(e.smallest_pivot(), singular_pivot_ratio * e.scale());
        EXPECT_GT(e.scale(), 0);
    }
    EXPECT_THROW(amplitude_exact(cfg, pt_wave(p, Direction()), Direction()),
                 SpectralSingularity);
    // Away from the zero the same path is regular.
    auto q = test::singular_pt(1.001);
    EXPECT_NO_THROW(ScatteringSystem(pt_to_config(q), q.k()));
}

TEST(SolveSystem, PivotShrinksApproachingSingularity)
{
    double prev = 1e300;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5})
    {
        auto q = test::singular_pt(1 + eps);
        auto a = build_matrix(pt_to_config(q), q.k());
        double det = std::abs(a.determinant());
        EXPECT_LT(det, prev);
        prev = det;
    }
}

TEST(SolveSystem, MismatchedWavenumberRejected)
{
    ScattererConfig cfg(std::vector<PointScatterer>{{{0, 0, 0}, 1.0}});
    auto a = build_matrix(cfg, 1.0);
    EXPECT_THROW(solve_system(a, IncidentWave(2.0, Direction()), cfg), InvalidInput);
}

TEST(AmplitudeExact, SingleScattererIsIsotropic)
{
    complex_type z(1.2, -0.4);
    double k = 0.9;
    ScattererConfig cfg(std::vector<PointScatterer>{{{0, 0, 0}, z}});
    auto expected = -1 / (4 * pi) / (1.0 / z + complex_type(0, k / (4 * pi)));
    std::mt19937_64 rng(14);
    for (int i = 0; i < 50; ++i)
    {
        IncidentWave wave(k, test::random_direction(rng));
        auto f = amplitude_exact(cfg, wave, test::random_direction(rng));
        EXPECT_LT(test::rel_err(f.value, expected), 1e-15);
        EXPECT_EQ(f.scheme, Scheme::exact);
    }
}

TEST(AmplitudeExact, VanishingCouplings)
{
    ScattererConfig cfg(std::vector<PointScatterer>{{{0, 0, 0}, 1e-12}, {{1, 0, 0}, 1e-12}});
    IncidentWave wave(1.0, Direction());
    EXPECT_LT(std::abs(amplitude_exact(cfg, wave, Direction(1, 0, 0)).value), 1e-12);

    ScattererConfig absent(std::vector<PointScatterer>{{{0, 0, 0}, 0.0}, {{1, 0, 0}, 1e-301}});
    EXPECT_EQ(amplitude_exact(absent, wave, Direction(1, 0, 0)).value, complex_type(0));
    EXPECT_EQ(total_field(absent, wave, {0.3, 0.2, 5}), wave({0.3, 0.2, 5}));
}

TEST(AmplitudeExact, XSumMatchesInverseDoubleSum)
{
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::size_t n = 1 + trial % 4;
        double k = test::log_uniform(rng, 0.2, 5);
        auto cfg = test::random_config(rng, n, k, 2.0);
        IncidentWave wave(k, test::random_direction(rng));
        auto s_hat = test::random_direction(rng);
        auto via_x = amplitude_exact(cfg, wave, s_hat).value;
        auto via_inv = amplitude_inverse_sum(cfg, wave, s_hat).value;
        EXPECT_LT(test::rel_err(via_x, via_inv), 1e-13);

        // independent Gauss-Jordan inverse
        auto inv = test::gauss_jordan_inverse(to_rows(build_matrix(cfg, k)));
        test::cplx acc = 0;
        for (std::size_t m = 0; m < n; ++m)
        {
            for (std::size_t j = 0; j < n; ++j)
            {
                acc += inv[m][j]
                       * std::polar(1.0, k * (dot(wave.direction(), cfg[j].position)
                                              - dot(s_hat, cfg[m].position)));
            }
        }
        EXPECT_LT(test::rel_err(via_x, -acc / (4 * pi)), 1e-13);
    }
}

TEST(AmplitudeExact, Reciprocity)
{
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 200; ++trial)
    {
        double k = test::log_uniform(rng, 0.2, 5);
        auto cfg = test::random_config(rng, 1 + trial % 7, k, 2.0);
        auto a_hat = test::random_direction(rng);
        auto s_hat = test::random_direction(rng);
        auto fwd = amplitude_exact(cfg, IncidentWave(k, a_hat), s_hat).value;
        auto rev = amplitude_exact(cfg, IncidentWave(k, -s_hat), -a_hat).value;
        EXPECT_LT(test::rel_err(fwd, rev), 1e-12);
    }
}

TEST(AmplitudeExact, AgreesWithClosedForm)
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 300; ++i)
    {
        auto p = test::random_pt(rng);
        auto a_hat = test::random_direction(rng);
        auto s_hat = test::random_direction(rng);
        auto exact = amplitude_exact(pt_to_config(p), pt_wave(p, a_hat), s_hat);
        auto closed = amplitude_closed_form(p, a_hat, s_hat);
        EXPECT_LT(test::rel_err(closed.value, exact.value), 1e-12);
    }
}

TEST(TotalField, SingleScatterer)
{
    complex_type z(0.7, 0.2);
    Vec3 a{0.5, -0.5, 1};
    ScattererConfig cfg(std::vector<PointScatterer>{{a, z}});
    IncidentWave wave(1.4, Direction::along({1, 1, 0}));
    auto sol = ScatteringSystem(cfg, 1.4).solve(wave);
    Vec3 r{2, 3, -1};
    auto expected = wave(r) - z * green(norm(r - a), 1.4) * (sol.x[0] / z);
    EXPECT_LT(test::rel_err(total_field(sol, r), expected), 1e-15);
    EXPECT_THROW(total_field(sol, a), InvalidInput);
}

TEST(TotalField, SelfConsistentAtScatterers)
{
    // u(a_m) = X_m/z̃_m satisfies the Lippmann-Schwinger relation with the
    // renormalized self-term: X_m/z̃_m = u₀(a_m) - Σ_{n≠m} G_mn X_n - ik/4π X_m
    std::mt19937_64 rng(18);
    double k = 1.1;
    auto cfg = test::random_config(rng, 4, k, 1.5);
    IncidentWave wave(k, test::random_direction(rng));
    auto sol = ScatteringSystem(cfg, k).solve(wave);
    for (std::size_t m = 0; m < cfg.size(); ++m)
    {
        complex_type rhs = wave(cfg[m].position)
                           - complex_type(0, k / (4 * pi)) * sol.x[m];
        for (std::size_t n = 0; n < cfg.size(); ++n)
        {
            if (n != m)
            {
                rhs -= green(norm(cfg[m].position - cfg[n].position), k) * sol.x[n];
            }
        }
        EXPECT_LT(test::rel_err(sol.x[m] / cfg[m].coupling, rhs), 1e-12);
    }
}

TEST(TotalField, FarFieldApproachesAmplitudeAsInverseDistance)
{
    PTDoubleDeltaParams p({0.2, 0.3, -0.4}, 1, 0.8, 0.3, 2.0);
    auto cfg = pt_to_config(p);
    IncidentWave wave(p.k(), Direction::along({0, 1, 1}));
    auto sol = ScatteringSystem(cfg, p.k()).solve(wave);
    auto s_hat = Direction::along({1, -2, 0.5});
    auto f = amplitude_exact(sol, s_hat).value;

    std::vector<double> rs, devs;
    for (double scale : {1e2, 1e3, 1e4})
    {
        double R = scale * p.r0();
        auto us = scattered_field(sol, R * s_hat.vec());
        auto approx = us * R * std::polar(1.0, -p.k() * R);
        rs.push_back(R);
        devs.push_back(std::abs(approx - f));
    }
    double slope = log_log_slope(rs, devs);
    EXPECT_NEAR(-slope, 1.0, 0.02);
}

TEST(ScatteringSystem, ConcurrentAmplitudesMatchSerial)
{
    std::mt19937_64 rng(19);
    double k = 1.3;
    auto cfg = test::random_config(rng, 8, k, 2.0);
    auto sol = ScatteringSystem(cfg, k).solve(IncidentWave(k, Direction()));
    std::vector<Direction> dirs;
    for (int i = 0; i < 400; ++i)
    {
        dirs.push_back(test::random_direction(rng));
    }
    std::vector<complex_type> serial, parallel(dirs.size());
    for (auto const& d : dirs)
    {
        serial.push_back(amplitude_exact(sol, d).value);
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < 4; ++w)
    {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < dirs.size(); i += 4)
            {
                parallel[i] = amplitude_exact(sol, dirs[i]).value;
            }
        });
    }
    for (auto& t : pool)
    {
        t.join();
    }
    EXPECT_EQ(serial, parallel);
}
