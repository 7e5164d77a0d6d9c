// SPDX-License-Identifier: Apache-2.0
//
// nearcs - side-information-assisted channel estimation for dual-band XL-MIMO
// Copyright (C) 2026 The nearcs authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef NEARCS_QUADRATURE_HPP
#define NEARCS_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace nearcs
{

struct QuadratureResult
{
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = false;
    int evaluations = 0;
};

struct QuadratureOptions
{
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 4000;
};

namespace detail
{

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment
{
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment &other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_15(F &f, double a, double b)
{
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    for (int j = 0; j < 7; ++j)
    {
        const double dx = half * kronrod_nodes[j];
        const double fsum = f(centre - dx) + f(centre + dx);
        kronrod += kronrod_weights[j] * fsum;
        if (j % 2 == 1)
            gauss += gauss_weights[j / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

} // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
// Stops when the summed error estimate is below max(abs_tol, rel_tol * |I|).
template <class F>
QuadratureResult integrate(F &&f, double a, double b, const QuadratureOptions &opt = {})
{
    QuadratureResult result;
    if (a == b)
    {
        result.converged = true;
        return result;
    }
    const double sign = a < b ? 1.0 : -1.0;
    if (a > b)
        std::swap(a, b);

    std::priority_queue<detail::Segment> queue;
    auto first = detail::gauss_kronrod_15(f, a, b);
    double total = first.value;
    double error = first.error;
    queue.push(first);
    result.evaluations = 15;

    while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)))
    {
        if (static_cast<int>(queue.size()) >= opt.max_subdivisions)
            break;
        auto worst = queue.top();
        // Segment too small to split further.
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            break;
        queue.pop();
        auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        result.evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }

    // Re-sum to shed accumulated update round-off.
    total = 0.0;
    error = 0.0;
    while (!queue.empty())
    {
        total += queue.top().value;
        error += queue.top().error;
        queue.pop();
    }
    result.value = sign * total;
    result.abs_error = error;
    result.converged = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    return result;
}

// Integral over [a, +inf) through the map t = a + u / (1 - u), u in [0, 1).
template <class F>
QuadratureResult integrate_to_infinity(F &&f, double a, const QuadratureOptions &opt = {})
{
    auto mapped = [&](double u) {
        if (u >= 1.0)
            return 0.0;
        const double w = 1.0 - u;
        const double value = f(a + u / w);
        return value == 0.0 ? 0.0 : value / (w * w);
    };
    return integrate(mapped, 0.0, 1.0, opt);
}

} // namespace nearcs

#endif
