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

#include "nearcs/estimators.hpp"
#include "nearcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace nearcs
{

namespace
{

constexpr std::size_t npos = static_cast<std::size_t>(-1);

enum class Weighting
{
    none,
    single_measurement,
    block
};

struct Prior
{
    Weighting weighting = Weighting::none;
    std::vector<double> logit; // ln(p / (1 - p)) per prior block
    std::size_t block_length = 1;
    DParams dparams;           // base parameters; block length / subcarriers set per iteration
};

void check_dimensions(const ComplexMatrix &y, const ComplexMatrix &a)
{
    if (y.rows() != a.rows())
        throw ParameterError("Y and A must have the same number of rows");
}

double iteration_coefficient(const Prior &prior, CoefficientSchedule schedule, std::size_t iteration,
                             std::size_t found, std::size_t block_length)
{
    DParams dp = prior.dparams;
    dp.block_length = block_length;
    switch (schedule)
    {
    case CoefficientSchedule::subcarrier_decrement:
        if (dp.effective_subcarriers + 1 > iteration)
            dp.effective_subcarriers = dp.effective_subcarriers - iteration + 1;
        else
            dp.effective_subcarriers = 1;
        break;
    case CoefficientSchedule::sparsity_decrement:
        dp.nonzero_taps = dp.nonzero_taps > found ? dp.nonzero_taps - found : 1;
        break;
    case CoefficientSchedule::fixed:
        break;
    }
    return prior.weighting == Weighting::single_measurement ? coefficient_single_measurement(dp)
                                                            : coefficient_block(dp);
}

EstimateResult pursuit(const ComplexMatrix &y, const ComplexMatrix &a, const EstimatorConfig &cfg,
                       std::size_t block_length, const Prior &prior)
{
    check_dimensions(y, a);
    const auto n = static_cast<std::size_t>(a.cols());
    const std::size_t target = cfg.target_taps;
    if (block_length == 0 || n % block_length != 0)
        throw ParameterError("block length must divide the number of columns of A");
    if (target > n)
        throw ParameterError("target sparsity exceeds the number of columns of A");
    if (cfg.block_schedule.empty() && target % block_length != 0)
        throw ParameterError("target sparsity must be a multiple of the block length");
    for (std::size_t d : cfg.block_schedule)
        if (d == 0 || n % d != 0)
            throw ParameterError("every block_schedule entry must divide the number of columns of A");
    if (prior.weighting != Weighting::none)
    {
        if (prior.logit.empty() || n % prior.logit.size() != 0)
            throw ParameterError("prior length must divide the number of columns of A");
    }

    EstimateResult result;
    result.x_hat = ComplexMatrix::Zero(a.cols(), y.cols());

    const ComplexMatrix a_h = a.adjoint();
    ComplexMatrix residual = y;
    ComplexMatrix corr;
    if (cfg.correlate_with_measurements)
        corr = a_h * y;

    std::vector<char> taken(n, 0);
    std::vector<double> tap_energy(n);
    IndexSet columns; // selection order
    ComplexMatrix x_s;
    std::optional<double> fixed_coefficient;

    for (std::size_t iteration = 1; columns.size() < target; ++iteration)
    {
        const std::size_t remaining = target - columns.size();
        std::size_t d = block_length;
        if (!cfg.block_schedule.empty())
            d = cfg.block_schedule[std::min(iteration - 1, cfg.block_schedule.size() - 1)];
        d = std::gcd(d, remaining);

        double coefficient = 0.0;
        if (prior.weighting != Weighting::none)
        {
            if (cfg.schedule == CoefficientSchedule::fixed && fixed_coefficient)
                coefficient = *fixed_coefficient;
            else
                coefficient = iteration_coefficient(prior, cfg.schedule, iteration, columns.size(), d);
            if (!fixed_coefficient)
                fixed_coefficient = coefficient;
        }

        if (!cfg.correlate_with_measurements)
            corr = a_h * residual;
        for (std::size_t t = 0; t < n; ++t)
            tap_energy[t] = corr.row(static_cast<Eigen::Index>(t)).squaredNorm();

        std::size_t best = npos;
        double best_score = 0.0;
        double best_energy = 0.0;
        double best_prior = 0.0;
        for (std::size_t b = 0; b < n / d; ++b)
        {
            const std::size_t first = b * d;
            bool free = true;
            double energy = 0.0;
            for (std::size_t t = first; t < first + d; ++t)
            {
                free = free && !taken[t];
                energy += tap_energy[t];
            }
            if (!free)
                continue;
            double score = energy;
            double v = 0.0;
            if (prior.weighting != Weighting::none)
            {
                v = coefficient * prior.logit[first / (n / prior.logit.size())];
                if (v == -std::numeric_limits<double>::infinity())
                    continue;
                score = energy + v;
            }
            if (best == npos || score > best_score)
            {
                best = b;
                best_score = score;
                best_energy = energy;
                best_prior = v;
            }
        }

        if (best == npos)
        {
            result.support.assign(columns.begin(), columns.end());
            std::sort(result.support.begin(), result.support.end());
            throw EstimationError(EstimationError::Reason::exhausted,
                                  "no admissible candidate left at iteration " + std::to_string(iteration),
                                  std::move(result));
        }

        for (std::size_t t = best * d; t < best * d + d; ++t)
        {
            taken[t] = 1;
            columns.push_back(t);
        }

        const ComplexMatrix a_s = select_columns(a, columns);
        try
        {
            x_s = least_squares(a_s, y);
        }
        catch (const RankDeficientError &e)
        {
            result.support.assign(columns.begin(), columns.end());
            std::sort(result.support.begin(), result.support.end());
            throw EstimationError(EstimationError::Reason::rank_deficient, e.what(), std::move(result));
        }
        residual = y - a_s * x_s;

        IterationRecord rec;
        rec.iteration = iteration;
        rec.block = best;
        rec.first_tap = best * d;
        rec.length = d;
        rec.correlation = best_energy;
        rec.prior = best_prior;
        rec.coefficient = coefficient;
        rec.residual_norm = residual.norm();
        result.trace.push_back(rec);
    }

    for (std::size_t i = 0; i < columns.size(); ++i)
        result.x_hat.row(static_cast<Eigen::Index>(columns[i])) = x_s.row(static_cast<Eigen::Index>(i));
    result.support = columns;
    std::sort(result.support.begin(), result.support.end());
    return result;
}

Prior make_prior(Weighting weighting, const PriorVector &p, const DParams &dparams, const EstimatorConfig &cfg,
                 std::size_t effective_subcarriers)
{
    Prior prior;
    prior.weighting = weighting;
    prior.logit = prior_factor(p, 1.0).v;
    prior.dparams = dparams;
    prior.dparams.mode = cfg.coefficient_mode;
    prior.dparams.effective_subcarriers = effective_subcarriers;
    prior.dparams.validate();
    return prior;
}

void require_single_column(const ComplexMatrix &y, const char *who)
{
    if (y.cols() != 1)
        throw ParameterError(std::string(who) + " needs a single measurement vector");
}

} // namespace

std::string to_string(EstimatorKind kind)
{
    switch (kind)
    {
    case EstimatorKind::omp: return "omp";
    case EstimatorKind::bomp: return "bomp";
    case EstimatorKind::clw_omp: return "clw_omp";
    case EstimatorKind::clw_bomp: return "clw_bomp";
    case EstimatorKind::cslw_omp: return "cslw_omp";
    case EstimatorKind::cslw_bomp: return "cslw_bomp";
    case EstimatorKind::ls: return "ls";
    case EstimatorKind::genie: return "genie";
    }
    return "unknown";
}

EstimatorKind estimator_kind_from_string(const std::string &name)
{
    for (auto k : {EstimatorKind::omp, EstimatorKind::bomp, EstimatorKind::clw_omp, EstimatorKind::clw_bomp,
                   EstimatorKind::cslw_omp, EstimatorKind::cslw_bomp, EstimatorKind::ls, EstimatorKind::genie})
        if (to_string(k) == name)
            return k;
    throw ParameterError("unknown estimator '" + name + "'");
}

bool uses_side_information(EstimatorKind kind)
{
    return kind == EstimatorKind::clw_omp || kind == EstimatorKind::clw_bomp || kind == EstimatorKind::cslw_omp ||
           kind == EstimatorKind::cslw_bomp;
}

std::string to_string(CoefficientSchedule schedule)
{
    switch (schedule)
    {
    case CoefficientSchedule::subcarrier_decrement: return "subcarrier_decrement";
    case CoefficientSchedule::sparsity_decrement: return "sparsity_decrement";
    case CoefficientSchedule::fixed: return "fixed";
    }
    return "unknown";
}

CoefficientSchedule coefficient_schedule_from_string(const std::string &name)
{
    for (auto s : {CoefficientSchedule::subcarrier_decrement, CoefficientSchedule::sparsity_decrement,
                   CoefficientSchedule::fixed})
        if (to_string(s) == name)
            return s;
    throw ParameterError("unknown coefficient schedule '" + name + "'");
}

std::size_t EstimatorConfig::effective_block_length() const
{
    switch (kind)
    {
    case EstimatorKind::omp:
    case EstimatorKind::clw_omp:
    case EstimatorKind::cslw_omp:
        return 1;
    default:
        return block_length;
    }
}

EstimateResult omp(const ComplexMatrix &y, const ComplexMatrix &a, const EstimatorConfig &cfg)
{
    EstimatorConfig c = cfg;
    c.block_schedule.clear();
    return pursuit(y, a, c, 1, Prior{});
}

EstimateResult bomp(const ComplexMatrix &y, const ComplexMatrix &a, const EstimatorConfig &cfg)
{
    return pursuit(y, a, cfg, cfg.block_length, Prior{});
}

EstimateResult cslw_bomp(const ComplexMatrix &y, const ComplexMatrix &a, const PriorVector &p,
                         const EstimatorConfig &cfg, const DParams &dparams)
{
    const auto prior = make_prior(Weighting::block, p, dparams, cfg, static_cast<std::size_t>(y.cols()));
    return pursuit(y, a, cfg, cfg.block_length, prior);
}

EstimateResult cslw_omp(const ComplexMatrix &y, const ComplexMatrix &a, const PriorVector &p,
                        const EstimatorConfig &cfg, const DParams &dparams)
{
    EstimatorConfig c = cfg;
    c.block_length = 1;
    c.block_schedule.clear();
    return cslw_bomp(y, a, p, c, dparams);
}

EstimateResult clw_omp(const ComplexMatrix &y, const ComplexMatrix &a, const PriorVector &p,
                       const EstimatorConfig &cfg, const DParams &dparams)
{
    require_single_column(y, "clw_omp");
    EstimatorConfig c = cfg;
    c.block_schedule.clear();
    const auto prior = make_prior(Weighting::single_measurement, p, dparams, c, 1);
    return pursuit(y, a, c, 1, prior);
}

EstimateResult clw_bomp(const ComplexMatrix &y, const ComplexMatrix &a, const PriorVector &p,
                        const EstimatorConfig &cfg, const DParams &dparams)
{
    require_single_column(y, "clw_bomp");
    const auto prior = make_prior(Weighting::block, p, dparams, cfg, 1);
    return pursuit(y, a, cfg, cfg.block_length, prior);
}

ComplexMatrix ls_estimate(const ComplexMatrix &y, const ComplexMatrix &a)
{
    check_dimensions(y, a);
    return pseudo_inverse_solve(a, y);
}

EstimateResult genie_bound(const ComplexMatrix &y, const ComplexMatrix &a, const IndexSet &true_support)
{
    check_dimensions(y, a);
    EstimateResult result;
    result.x_hat = ComplexMatrix::Zero(a.cols(), y.cols());
    result.support = true_support;
    std::sort(result.support.begin(), result.support.end());
    if (true_support.empty())
        return result;
    for (std::size_t t : true_support)
        if (t >= static_cast<std::size_t>(a.cols()))
            throw ParameterError("support index out of range");
    ComplexMatrix x_s;
    try
    {
        x_s = least_squares(select_columns(a, result.support), y);
    }
    catch (const RankDeficientError &e)
    {
        throw EstimationError(EstimationError::Reason::rank_deficient, e.what(), result);
    }
    for (std::size_t i = 0; i < result.support.size(); ++i)
        result.x_hat.row(static_cast<Eigen::Index>(result.support[i])) = x_s.row(static_cast<Eigen::Index>(i));
    return result;
}

IndexSet strongest_rows(const ComplexMatrix &x, std::size_t count)
{
    const auto n = static_cast<std::size_t>(x.rows());
    count = std::min(count, n);
    std::vector<double> energy(n);
    for (std::size_t i = 0; i < n; ++i)
        energy[i] = x.row(static_cast<Eigen::Index>(i)).squaredNorm();
    IndexSet order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return energy[l] > energy[r]; });
    order.resize(count);
    std::sort(order.begin(), order.end());
    return order;
}

EstimateResult run_estimator(const EstimatorConfig &cfg, const ComplexMatrix &y, const ComplexMatrix &a,
                             const PriorVector &p, const DParams &dparams, const IndexSet &true_support)
{
    switch (cfg.kind)
    {
    case EstimatorKind::omp: return omp(y, a, cfg);
    case EstimatorKind::bomp: return bomp(y, a, cfg);
    case EstimatorKind::clw_omp: return clw_omp(y, a, p, cfg, dparams);
    case EstimatorKind::clw_bomp: return clw_bomp(y, a, p, cfg, dparams);
    case EstimatorKind::cslw_omp: return cslw_omp(y, a, p, cfg, dparams);
    case EstimatorKind::cslw_bomp: return cslw_bomp(y, a, p, cfg, dparams);
    case EstimatorKind::genie: return genie_bound(y, a, true_support);
    case EstimatorKind::ls:
    {
        EstimateResult r;
        r.x_hat = ls_estimate(y, a);
        r.support = strongest_rows(r.x_hat, cfg.target_taps);
        return r;
    }
    }
    throw ParameterError("unknown estimator kind");
}

} // namespace nearcs
