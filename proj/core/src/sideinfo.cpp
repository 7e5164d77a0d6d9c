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

#include "nearcs/sideinfo.hpp"
#include "nearcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nearcs
{

std::string to_string(CoefficientMode mode)
{
    return mode == CoefficientMode::exact ? "exact" : "simplified";
}

CoefficientMode coefficient_mode_from_string(const std::string &name)
{
    if (name == "exact")
        return CoefficientMode::exact;
    if (name == "simplified")
        return CoefficientMode::simplified;
    throw ParameterError("unknown coefficient mode '" + name + "' (expected exact or simplified)");
}

void DParams::validate() const
{
    if (pilots == 0 || nonzero_taps == 0 || block_length == 0 || effective_subcarriers == 0)
        throw ParameterError("coefficient parameters must be positive");
    if (!(tap_gain > 0.0) || !std::isfinite(tap_gain))
        throw ParameterError("tap_gain must be positive");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
        throw ParameterError("noise_variance must be non-negative");
}

std::vector<double> block_norms(const ComplexMatrix &x_sub, std::size_t block_length)
{
    const auto rows = static_cast<std::size_t>(x_sub.rows());
    if (block_length == 0 || rows % block_length != 0)
        throw ParameterError("rows of the Sub-6GHz channel must be a multiple of the block length");
    std::vector<double> norms(rows / block_length);
    for (std::size_t b = 0; b < norms.size(); ++b)
        norms[b] = x_sub.middleRows(static_cast<Eigen::Index>(b * block_length),
                                    static_cast<Eigen::Index>(block_length)).norm();
    return norms;
}

PriorVector probability_map_minmax(std::span<const double> norms)
{
    if (norms.size() < 2)
        throw ParameterError("probability map needs at least two blocks");
    const auto [lo, hi] = std::minmax_element(norms.begin(), norms.end());
    PriorVector out;
    out.p.resize(norms.size());
    const double span = *hi - *lo;
    for (std::size_t i = 0; i < norms.size(); ++i)
    {
        if (span == 0.0)
            out.p[i] = 0.5;
        else if (norms[i] == *hi)
            out.p[i] = 1.0;
        else
            out.p[i] = (norms[i] - *lo) / span;
    }
    return out;
}

PriorVector indicator_prior(const IndexSet &support, std::size_t antennas, std::size_t block_length)
{
    if (block_length == 0 || antennas % block_length != 0)
        throw ParameterError("antennas must be a multiple of the block length");
    PriorVector out;
    out.p.assign(antennas / block_length, 0.0);
    for (std::size_t n : support)
    {
        if (n >= antennas)
            throw ParameterError("support index out of range");
        out.p[n / block_length] = 1.0;
    }
    return out;
}

SingleTapVariances single_tap_variances(const DParams &params)
{
    params.validate();
    const double m = static_cast<double>(params.pilots);
    const double s = static_cast<double>(params.nonzero_taps);
    const double g2 = params.tap_gain * params.tap_gain;
    return {m / 2.0 * ((s - 1.0) * g2 + params.noise_variance), m / 2.0 * (s * g2 + params.noise_variance)};
}

double coefficient_single_measurement(const DParams &params)
{
    const auto var = single_tap_variances(params);
    const double m = static_cast<double>(params.pilots);
    const double mg2 = m * m * params.tap_gain * params.tap_gain;

    if (params.mode == CoefficientMode::simplified)
    {
        const double s0 = var.zero;
        return s0 / (-std::expm1(-mg2 / (4.0 * s0)));
    }

    const double s1 = var.nonzero;
    const double s2 = var.zero;
    const double a = 1.0 / s2;
    const double b = 0.5 * std::exp(-mg2 * s2 / (2.0 * s1 * (s1 + s2))) * (s1 + s2) / (s1 * s2);
    if (!(a > b))
        throw RegimeError("single-measurement coefficient undefined: A <= B");
    return 1.0 / (a - b);
}

double coefficient_single_measurement_asymptotic(const DParams &params)
{
    const double s0 = single_tap_variances(params).zero;
    const double m = static_cast<double>(params.pilots);
    return 4.0 * s0 * s0 / (m * m * params.tap_gain * params.tap_gain);
}

BlockVariances block_variances(const DParams &params)
{
    params.validate();
    const double m = static_cast<double>(params.pilots);
    const double s = static_cast<double>(params.nonzero_taps);
    const double g2 = params.tap_gain * params.tap_gain;
    BlockVariances out;
    out.zero = m * (s * g2 + params.noise_variance);
    out.nonzero = m * ((s - 1.0) * g2 + params.noise_variance);
    // (n + 2 lambda) / (n + lambda) with n = 2 d K and lambda = 2 d K M^2 g^2 / sigma_nz^2
    const double n = 2.0 * static_cast<double>(params.block_length * params.effective_subcarriers);
    const double lambda = n * m * m * g2 / out.nonzero;
    out.rho = (n + 2.0 * lambda) / (n + lambda);
    return out;
}

double coefficient_block(const DParams &params)
{
    const auto var = block_variances(params);
    const double m = static_cast<double>(params.pilots);
    const double mg2 = m * m * params.tap_gain * params.tap_gain;

    if (params.mode == CoefficientMode::simplified)
        return (var.zero + 2.0 * mg2) / mg2 * var.zero;

    const double beta_nonzero = 1.0 / (var.rho * var.nonzero);
    const double beta_zero = 1.0 / var.zero;
    if (!(beta_zero > beta_nonzero))
        throw RegimeError("block coefficient undefined: zero-block rate does not exceed nonzero-block rate");
    return 1.0 / (beta_zero - beta_nonzero);
}

double coefficient_simultaneous_tap(const DParams &params)
{
    DParams p = params;
    p.block_length = 1;
    return coefficient_block(p);
}

PriorWeights prior_factor(const PriorVector &p, double coefficient)
{
    if (!(coefficient > 0.0))
        throw ParameterError("prior coefficient must be positive");
    PriorWeights out;
    out.coefficient = coefficient;
    out.v.resize(p.p.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.p.size(); ++i)
    {
        const double pi = p.p[i];
        if (!(pi >= 0.0 && pi <= 1.0))
            throw ParameterError("probabilities must lie in [0, 1]");
        if (pi == 1.0)
            out.v[i] = inf;
        else if (pi == 0.0)
            out.v[i] = -inf;
        else
            out.v[i] = coefficient * std::log(pi / (1.0 - pi));
    }
    return out;
}

} // namespace nearcs
