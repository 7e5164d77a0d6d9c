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

#ifndef NEARCS_SIDEINFO_HPP
#define NEARCS_SIDEINFO_HPP

#include "nearcs/numerics.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nearcs
{

struct PriorVector
{
    std::vector<double> p; // one probability per aligned block, in [0, 1]
};

struct PriorWeights
{
    std::vector<double> v; // D * ln(p / (1 - p)), +-inf at p = 1 / p = 0
    double coefficient = 1.0;
};

enum class CoefficientMode
{
    exact,
    simplified
};

std::string to_string(CoefficientMode mode);
CoefficientMode coefficient_mode_from_string(const std::string &name);

// Inputs of the optimal prior coefficient D.
// nonzero_taps counts scalar taps (blocks times block length).
struct DParams
{
    std::size_t pilots = 25;
    std::size_t nonzero_taps = 20;
    std::size_t block_length = 1;
    std::size_t effective_subcarriers = 1;
    double tap_gain = 1.0;
    double noise_variance = 1.0;
    CoefficientMode mode = CoefficientMode::exact;

    void validate() const;
};

// Frobenius norm of each aligned row block of x_sub.
std::vector<double> block_norms(const ComplexMatrix &x_sub, std::size_t block_length);

// (x - min) / (max - min); all entries 1/2 when every norm is equal.
PriorVector probability_map_minmax(std::span<const double> norms);

// 1 on blocks touched by `support`, 0 elsewhere.
PriorVector indicator_prior(const IndexSet &support, std::size_t antennas, std::size_t block_length);

// Correlation variances for a single measurement vector with scalar taps.
struct SingleTapVariances
{
    double nonzero; // per real dimension, correlation with a supported column
    double zero;    // per real dimension, correlation with an unsupported column
};
SingleTapVariances single_tap_variances(const DParams &params);

// D for one measurement vector and scalar taps (CLW-OMP).
// Exact mode throws RegimeError when the first-order expansion has no positive solution.
double coefficient_single_measurement(const DParams &params);

// 4 sigma0^4 / (M^2 g^2), the large-noise limit of the simplified single-measurement form.
double coefficient_single_measurement_asymptotic(const DParams &params);

// Block / multi-subcarrier statistics behind the block coefficient.
struct BlockVariances
{
    double nonzero; // M ((S - 1) g^2 + sigma^2)
    double zero;    // M (S g^2 + sigma^2)
    double rho;     // Patnaik scale factor
};
BlockVariances block_variances(const DParams &params);

// D for blocks of block_length taps observed over effective_subcarriers columns
// (CSLW-BOMP, and CLW-BOMP with one column). Throws RegimeError when the
// Gamma rates are not ordered.
double coefficient_block(const DParams &params);

// Scalar taps over several subcarriers (CSLW-OMP): coefficient_block with block_length 1.
double coefficient_simultaneous_tap(const DParams &params);

// Elementwise D * logit(p).
PriorWeights prior_factor(const PriorVector &p, double coefficient);

} // namespace nearcs

#endif
