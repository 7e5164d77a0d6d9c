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

#ifndef NEARCS_HARNESS_HPP
#define NEARCS_HARNESS_HPP

#include "nearcs/channel.hpp"
#include "nearcs/estimators.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nearcs
{

enum class SweepAxis
{
    snr,              // snr_db
    sparsity_blocks,  // number of nonzero blocks S / d
    compression_m,    // pilots M
    amplitude_ratio   // C
};

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string &name);

struct ExperimentConfig
{
    SystemParams base;
    std::vector<EstimatorConfig> estimators;
    SweepAxis axis = SweepAxis::snr;
    std::vector<double> sweep_values;
    std::size_t trials = 1000;
    std::uint64_t master_seed = 1;
    double accuracy_threshold = 1e-2;
    std::size_t workers = 1;
    bool record_timing = false;

    // Throws ParameterError; also validates every sweep point's SystemParams.
    void validate() const;

    // base with the sweep axis set to sweep_values[index].
    SystemParams params_at(std::size_t index) const;
};

enum class NmseConvention
{
    per_entry,        // ||X_hat - X||_F^2 / (N K)
    energy_normalized // ||X_hat - X||_F^2 / ||X||_F^2
};

double nmse(const ComplexMatrix &x_hat, const ComplexMatrix &x, NmseConvention convention = NmseConvention::per_entry);

double support_accuracy(const IndexSet &estimated, const IndexSet &truth);

// Fraction of values strictly below theta.
double prob_accurate(std::span<const double> nmse_values, double theta);

struct EstimatorOutcome
{
    bool failed = false;
    std::string error;
    double nmse = 0.0;
    double nmse_energy = 0.0;
    double support_accuracy = 0.0;
    double seconds = 0.0;
};

// One entry per cfg.estimators, in order.
struct TrialOutcome
{
    std::vector<EstimatorOutcome> estimators;
};

// Randomness is keyed by (master_seed, trial_index, component); the sweep index is
// not part of the key, so every sweep point sees the same underlying draws.
TrialOutcome run_trial(const ExperimentConfig &cfg, std::size_t sweep_index, std::size_t trial_index);

struct MetricRecord
{
    SweepAxis axis = SweepAxis::snr;
    double sweep_value = 0.0;
    std::string estimator;
    std::size_t trials = 0;   // successful trials
    std::size_t failures = 0;
    double nmse_mean = 0.0;
    double nmse_db = 0.0;
    double nmse_energy_norm = 0.0;
    double support_accuracy = 0.0;
    double prob_accurate = 0.0;
    double wallclock_s = 0.0;
};

// Aggregated records sorted by (sweep_value, estimator). No I/O.
std::vector<MetricRecord> run_sweep(const ExperimentConfig &cfg);

void write_csv(std::ostream &out, std::span<const MetricRecord> records);
std::string to_csv(std::span<const MetricRecord> records);

class OutputError : public std::runtime_error
{
public:
    OutputError(const std::string &what, std::vector<MetricRecord> records)
        : std::runtime_error(what), records_(std::move(records))
    {
    }
    const std::vector<MetricRecord> &records() const noexcept { return records_; }

private:
    std::vector<MetricRecord> records_;
};

// run_sweep followed by write_csv to `path`; throws OutputError carrying the records on I/O failure.
std::vector<MetricRecord> run_sweep_to_csv(const ExperimentConfig &cfg, const std::string &path);

} // namespace nearcs

#endif
