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

#ifndef NEARCS_ESTIMATORS_HPP
#define NEARCS_ESTIMATORS_HPP

#include "nearcs/numerics.hpp"
#include "nearcs/sideinfo.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nearcs
{

enum class EstimatorKind
{
    omp,
    bomp,
    clw_omp,
    clw_bomp,
    cslw_omp,
    cslw_bomp,
    ls,
    genie
};

std::string to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(const std::string &name);
bool uses_side_information(EstimatorKind kind);

// How the prior coefficient evolves over the iterations.
enum class CoefficientSchedule
{
    subcarrier_decrement, // K replaced by K - i + 1 (rho does not depend on K, so D stays constant)
    sparsity_decrement,   // nonzero_taps replaced by the taps still to be found
    fixed                 // D of the first iteration throughout
};

std::string to_string(CoefficientSchedule schedule);
CoefficientSchedule coefficient_schedule_from_string(const std::string &name);

struct EstimatorConfig
{
    EstimatorKind kind = EstimatorKind::bomp;
    // Forced to 1 for omp, clw_omp and cslw_omp. The harness replaces 0 by the
    // scenario block length.
    std::size_t block_length = 0;
    CoefficientMode coefficient_mode = CoefficientMode::exact;
    CoefficientSchedule schedule = CoefficientSchedule::subcarrier_decrement;
    std::size_t target_taps = 0;
    // Correlate against Y instead of the current residual in every iteration.
    bool correlate_with_measurements = false;
    // Block length per iteration; empty means constant block_length. Each entry is
    // reduced to gcd(entry, taps still missing) so the target is met exactly.
    std::vector<std::size_t> block_schedule;

    std::size_t effective_block_length() const;
    std::string name() const { return to_string(kind); }
};

struct IterationRecord
{
    std::size_t iteration = 0;   // 1-based
    std::size_t block = 0;       // block index at this iteration's block length
    std::size_t first_tap = 0;
    std::size_t length = 0;
    double correlation = 0.0;    // ||A_k^H R||_F^2
    double prior = 0.0;          // v of the chosen block (0 without side information)
    double coefficient = 0.0;    // D used (0 without side information)
    double residual_norm = 0.0;  // ||R||_F after the update
};

struct EstimateResult
{
    ComplexMatrix x_hat;
    IndexSet support;
    std::vector<IterationRecord> trace;
};

class EstimationError : public std::runtime_error
{
public:
    enum class Reason
    {
        rank_deficient,
        exhausted
    };

    EstimationError(Reason reason, const std::string &what, EstimateResult partial)
        : std::runtime_error(what), reason_(reason), partial_(std::move(partial))
    {
    }

    Reason reason() const noexcept { return reason_; }
    const EstimateResult &partial() const noexcept { return partial_; }

private:
    Reason reason_;
    EstimateResult partial_;
};

// Plain simultaneous OMP: per-tap energy ||a_k^H R||^2 summed over columns.
EstimateResult omp(const ComplexMatrix &y, const ComplexMatrix &a, const EstimatorConfig &cfg);

// Plain block OMP with aligned blocks of cfg.block_length.
EstimateResult bomp(const ComplexMatrix &y, const ComplexMatrix &a, const EstimatorConfig &cfg);

// Block OMP with block score ||A_k^H R||_F^2 + D ln(p_k / (1 - p_k)).
// p holds one probability per aligned block of cfg.block_length (or of the first
// block_schedule entry). Tap-level scores under a different iteration block length
// use the probability of the block containing the first tap.
EstimateResult cslw_bomp(const ComplexMatrix &y, const ComplexMatrix &a, const PriorVector &p,
                         const EstimatorConfig &cfg, const DParams &dparams);

// cslw_bomp with block length 1 and the simultaneous-tap coefficient.
EstimateResult cslw_omp(const ComplexMatrix &y, const ComplexMatrix &a, const PriorVector &p,
                        const EstimatorConfig &cfg, const DParams &dparams);

// Single measurement vector, scalar taps, single-measurement coefficient.
EstimateResult clw_omp(const ComplexMatrix &y, const ComplexMatrix &a, const PriorVector &p,
                       const EstimatorConfig &cfg, const DParams &dparams);

// Single measurement vector with blocks: cslw_bomp with one effective subcarrier.
EstimateResult clw_bomp(const ComplexMatrix &y, const ComplexMatrix &a, const PriorVector &p,
                        const EstimatorConfig &cfg, const DParams &dparams);

// A^+ Y.
ComplexMatrix ls_estimate(const ComplexMatrix &y, const ComplexMatrix &a);

// Least squares on the true support.
EstimateResult genie_bound(const ComplexMatrix &y, const ComplexMatrix &a, const IndexSet &true_support);

// Indices of the `count` rows of x with the largest energy, sorted (ties to the lower index).
IndexSet strongest_rows(const ComplexMatrix &x, std::size_t count);

// Dispatch on cfg.kind. `p` and `dparams` are ignored by kinds without side
// information and `true_support` is used only by genie. ls reports the
// cfg.target_taps strongest rows as its support.
EstimateResult run_estimator(const EstimatorConfig &cfg, const ComplexMatrix &y, const ComplexMatrix &a,
                             const PriorVector &p, const DParams &dparams, const IndexSet &true_support);

} // namespace nearcs

#endif
