#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace pointscat
{
namespace detail
{
// 7-point Gauss / 15-point Kronrod pair (QUADPACK qk15 abscissae/weights).
inline constexpr std::array<double, 8> kronrod15_nodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod15_weights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
// Gauss weights for kronrod15_nodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> gauss7_weights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelEstimate
{
    double value;
    double error;
};

template<class F>
PanelEstimate gauss_kronrod_panel(F const& f, double a, double b)
{
    double const center = 0.5 * (a + b);
    double const half = 0.5 * (b - a);

    double fc = f(center);
    double kronrod = fc * kronrod15_weights[7];
    double gauss = fc * gauss7_weights[3];
    for (std::size_t j = 0; j < 7; ++j)
    {
        double dx = half * kronrod15_nodes[j];
        double pair = f(center - dx) + f(center + dx);
        kronrod += kronrod15_weights[j] * pair;
        if (j % 2 == 1)
        {
            gauss += gauss7_weights[j / 2] * pair;
        }
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template<class F>
double adaptive_panel(
    F const& f, double a, double b, double tol, int depth, PanelEstimate whole)
{
    // Unreachable tolerances are capped at the panel's roundoff level
    double const roundoff = 50 * 2.220446049250313e-16 * std::abs(whole.value);
    if (whole.error <= tol || whole.error <= roundoff || depth <= 0)
    {
        return whole.value;
    }
    double mid = 0.5 * (a + b);
    auto left = gauss_kronrod_panel(f, a, mid);
    auto right = gauss_kronrod_panel(f, mid, b);
    return adaptive_panel(f, a, mid, 0.5 * tol, depth - 1, left)
           + adaptive_panel(f, mid, b, 0.5 * tol, depth - 1, right);
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Adaptive Gauss-Kronrod (G7/K15) integral of a smooth real function.
 *
 * Panels are bisected until the Kronrod-Gauss difference is below the
 * absolute tolerance share of that panel.
 */
template<class F>
double integrate_adaptive(F const& f,
                          double a,
                          double b,
                          double abs_tol = 1e-12,
                          int max_depth = 30)
{
    if (a == b)
    {
        return 0;
    }
    auto whole = detail::gauss_kronrod_panel(f, a, b);
    return detail::adaptive_panel(f, a, b, abs_tol, max_depth, whole);
}

//---------------------------------------------------------------------------//
//! Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussLegendreRule gauss_legendre(std::size_t order)
{
    if (order == 0)
    {
        throw InvalidInput("Gauss-Legendre order must be positive");
    }
    GaussLegendreRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);

    double const n = static_cast<double>(order);
    for (std::size_t i = 0; i < (order + 1) / 2; ++i)
    {
        // Tricomi initial guess followed by Newton on P_n
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter)
        {
            double p0 = 1;
            double p1 = x;
            for (std::size_t l = 2; l <= order; ++l)
            {
                double p2 = ((2.0 * l - 1) * x * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
            {
                break;
            }
        }
        // Recompute derivative at the converged node
        double p0 = 1;
        double p1 = x;
        for (std::size_t l = 2; l <= order; ++l)
        {
            double p2 = ((2.0 * l - 1) * x * p1 - (l - 1.0) * p0) / l;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        double w = 2 / ((1 - x * x) * dp * dp);

        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1)
    {
        rule.nodes[order / 2] = 0;
    }
    return rule;
}

}  // namespace pointscat
