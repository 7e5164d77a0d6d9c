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

#include "nearcs/harness.hpp"
#include "nearcs/errors.hpp"
#include "nearcs/sideinfo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace nearcs
{

namespace
{

enum Component : std::uint64_t
{
    support_stream = 1,
    phase_stream = 2,
    sub6_stream = 3,
    measurement_stream = 4
};

RngStream stream_for(const ExperimentConfig &cfg, std::size_t trial, Component c)
{
    return RngStream(cfg.master_seed, derive_stream_id({static_cast<std::uint64_t>(trial), c}));
}

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::size_t as_count(double v, const char *what)
{
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e9)
        throw ParameterError(std::string(what) + " sweep values must be non-negative integers");
    return static_cast<std::size_t>(v);
}

} // namespace

std::string to_string(SweepAxis axis)
{
    switch (axis)
    {
    case SweepAxis::snr: return "snr";
    case SweepAxis::sparsity_blocks: return "sparsity_blocks";
    case SweepAxis::compression_m: return "compression_m";
    case SweepAxis::amplitude_ratio: return "amplitude_ratio";
    }
    return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string &name)
{
    for (auto a : {SweepAxis::snr, SweepAxis::sparsity_blocks, SweepAxis::compression_m, SweepAxis::amplitude_ratio})
        if (to_string(a) == name)
            return a;
    throw ParameterError("unknown sweep axis '" + name + "'");
}

SystemParams ExperimentConfig::params_at(std::size_t index) const
{
    if (index >= sweep_values.size())
        throw ParameterError("sweep index out of range");
    SystemParams p = base;
    const double v = sweep_values[index];
    switch (axis)
    {
    case SweepAxis::snr: p.snr_db = v; break;
    case SweepAxis::sparsity_blocks: p.nonzero_taps = as_count(v, "sparsity") * p.block_length; break;
    case SweepAxis::compression_m: p.pilots = as_count(v, "pilot"); break;
    case SweepAxis::amplitude_ratio: p.amplitude_ratio = v; break;
    }
    return p;
}

void ExperimentConfig::validate() const
{
    if (trials == 0)
        throw ParameterError("trials must be at least 1");
    if (sweep_values.empty())
        throw ParameterError("sweep needs at least one value");
    if (estimators.empty())
        throw ParameterError("at least one estimator is required");
    if (!(accuracy_threshold > 0.0))
        throw ParameterError("accuracy threshold must be positive");
    base.validate();
    for (std::size_t i = 0; i < sweep_values.size(); ++i)
    {
        const SystemParams p = params_at(i);
        p.validate();
        for (const auto &e : estimators)
        {
            const std::size_t d = e.effective_block_length() == 0 ? p.block_length : e.effective_block_length();
            if (p.antennas % d != 0 || (e.block_schedule.empty() && p.nonzero_taps % d != 0))
                throw ParameterError("estimator " + e.name() + ": block length incompatible with the scenario");
        }
    }
}

double nmse(const ComplexMatrix &x_hat, const ComplexMatrix &x, NmseConvention convention)
{
    if (x_hat.rows() != x.rows() || x_hat.cols() != x.cols())
        throw ParameterError("nmse needs matrices of equal shape");
    const double err = (x_hat - x).squaredNorm();
    if (convention == NmseConvention::per_entry)
        return err / static_cast<double>(x.rows() * x.cols());
    const double energy = x.squaredNorm();
    if (energy == 0.0)
        throw UndefinedMetricError("energy-normalized NMSE of an all-zero channel");
    return err / energy;
}

double support_accuracy(const IndexSet &estimated, const IndexSet &truth)
{
    if (truth.empty())
        throw ParameterError("support accuracy needs a non-empty true support");
    IndexSet e = estimated;
    IndexSet t = truth;
    std::sort(e.begin(), e.end());
    std::sort(t.begin(), t.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    IndexSet common;
    std::set_intersection(e.begin(), e.end(), t.begin(), t.end(), std::back_inserter(common));
    return static_cast<double>(common.size()) / static_cast<double>(t.size());
}

double prob_accurate(std::span<const double> nmse_values, double theta)
{
    if (nmse_values.empty())
        throw ParameterError("prob_accurate needs at least one value");
    const auto hits = std::count_if(nmse_values.begin(), nmse_values.end(), [&](double v) { return v < theta; });
    return static_cast<double>(hits) / static_cast<double>(nmse_values.size());
}

TrialOutcome run_trial(const ExperimentConfig &cfg, std::size_t sweep_index, std::size_t trial_index)
{
    const SystemParams params = cfg.params_at(sweep_index);
    params.validate();

    auto rng_support = stream_for(cfg, trial_index, support_stream);
    auto rng_phase = stream_for(cfg, trial_index, phase_stream);
    auto rng_sub6 = stream_for(cfg, trial_index, sub6_stream);
    auto rng_meas = stream_for(cfg, trial_index, measurement_stream);

    const IndexSet support = gen_support(params, rng_support);
    const AngularChannel channel = gen_angular_channel(params, support, rng_phase);
    const SupportChannel sub6 = gen_sub6_channel(channel, params, rng_sub6);
    const Measurement meas = gen_measurement(channel, params, rng_meas);

    DParams dparams;
    dparams.pilots = params.pilots;
    dparams.nonzero_taps = std::max<std::size_t>(params.nonzero_taps, 1);
    dparams.tap_gain = params.tap_gain;
    dparams.noise_variance = meas.sigma2;

    std::map<std::size_t, PriorVector> priors;
    auto prior_for = [&](std::size_t d) -> const PriorVector & {
        auto it = priors.find(d);
        if (it == priors.end())
            it = priors.emplace(d, probability_map_minmax(block_norms(sub6.x_sub, d))).first;
        return it->second;
    };

    const bool has_energy = channel.x.squaredNorm() > 0.0;
    TrialOutcome out;
    out.estimators.reserve(cfg.estimators.size());
    for (const auto &base_cfg : cfg.estimators)
    {
        EstimatorConfig ecfg = base_cfg;
        if (ecfg.block_length == 0)
            ecfg.block_length = params.block_length;
        ecfg.target_taps = params.nonzero_taps;

        EstimatorOutcome eo;
        const auto start = std::chrono::steady_clock::now();
        try
        {
            static const PriorVector no_prior{};
            std::size_t prior_block = ecfg.effective_block_length();
            if (prior_block > 1 && !ecfg.block_schedule.empty())
                prior_block = ecfg.block_schedule.front();
            const PriorVector &p = uses_side_information(ecfg.kind) ? prior_for(prior_block) : no_prior;
            const EstimateResult r = run_estimator(ecfg, meas.y, meas.a, p, dparams, support);
            eo.nmse = nmse(r.x_hat, channel.x);
            eo.nmse_energy = has_energy ? nmse(r.x_hat, channel.x, NmseConvention::energy_normalized)
                                        : std::numeric_limits<double>::quiet_NaN();
            eo.support_accuracy = support.empty() ? 1.0 : support_accuracy(r.support, support);
        }
        catch (const std::exception &e)
        {
            eo.failed = true;
            eo.error = e.what();
        }
        eo.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.estimators.push_back(std::move(eo));
    }
    return out;
}

std::vector<MetricRecord> run_sweep(const ExperimentConfig &cfg)
{
    cfg.validate();
    const std::size_t points = cfg.sweep_values.size();
    const std::size_t jobs = points * cfg.trials;
    std::vector<TrialOutcome> outcomes(jobs);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;)
        {
            const std::size_t job = next.fetch_add(1);
            if (job >= jobs)
                return;
            try
            {
                outcomes[job] = run_trial(cfg, job / cfg.trials, job % cfg.trials);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = jobs;
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, jobs));
    if (workers == 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<MetricRecord> records;
    for (std::size_t s = 0; s < points; ++s)
        for (std::size_t e = 0; e < cfg.estimators.size(); ++e)
        {
            MetricRecord rec;
            rec.axis = cfg.axis;
            rec.sweep_value = cfg.sweep_values[s];
            rec.estimator = cfg.estimators[e].name();
            std::vector<double> values;
            double energy_sum = 0.0, acc_sum = 0.0, seconds = 0.0;
            for (std::size_t t = 0; t < cfg.trials; ++t)
            {
                const auto &eo = outcomes[s * cfg.trials + t].estimators[e];
                seconds += eo.seconds;
                if (eo.failed)
                {
                    ++rec.failures;
                    continue;
                }
                values.push_back(eo.nmse);
                energy_sum += eo.nmse_energy;
                acc_sum += eo.support_accuracy;
            }
            rec.trials = values.size();
            if (!values.empty())
            {
                const double n = static_cast<double>(values.size());
                double sum = 0.0;
                for (double v : values)
                    sum += v;
                rec.nmse_mean = sum / n;
                rec.nmse_db = 10.0 * std::log10(rec.nmse_mean);
                rec.nmse_energy_norm = energy_sum / n;
                rec.support_accuracy = acc_sum / n;
                rec.prob_accurate = prob_accurate(values, cfg.accuracy_threshold);
            }
            else
            {
                rec.nmse_mean = rec.nmse_db = rec.nmse_energy_norm = rec.support_accuracy =
                    std::numeric_limits<double>::quiet_NaN();
            }
            rec.wallclock_s = cfg.record_timing ? seconds : 0.0;
            records.push_back(std::move(rec));
        }

    std::stable_sort(records.begin(), records.end(), [](const MetricRecord &l, const MetricRecord &r) {
        if (l.sweep_value != r.sweep_value)
            return l.sweep_value < r.sweep_value;
        return l.estimator < r.estimator;
    });
    return records;
}

void write_csv(std::ostream &out, std::span<const MetricRecord> records)
{
    out << "sweep_axis,sweep_value,estimator,trials,failures,nmse_mean,nmse_db,nmse_energy_norm,"
           "support_accuracy,prob_accurate,wallclock_s\n";
    for (const auto &r : records)
        out << to_string(r.axis) << ',' << format_double(r.sweep_value) << ',' << r.estimator << ',' << r.trials << ','
            << r.failures << ',' << format_double(r.nmse_mean) << ',' << format_double(r.nmse_db) << ','
            << format_double(r.nmse_energy_norm) << ',' << format_double(r.support_accuracy) << ','
            << format_double(r.prob_accurate) << ',' << format_double(r.wallclock_s) << '\n';
}

std::string to_csv(std::span<const MetricRecord> records)
{
    std::ostringstream os;
    write_csv(os, records);
    return os.str();
}

std::vector<MetricRecord> run_sweep_to_csv(const ExperimentConfig &cfg, const std::string &path)
{
    auto records = run_sweep(cfg);
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw OutputError("cannot open '" + path + "' for writing", std::move(records));
    write_csv(f, records);
    f.flush();
    if (!f)
        throw OutputError("failed writing '" + path + "'", std::move(records));
    return records;
}

} // namespace nearcs
