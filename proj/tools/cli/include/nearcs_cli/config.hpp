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
#ifndef NEARCS_CLI_CONFIG_HPP
#define NEARCS_CLI_CONFIG_HPP

#include "nearcs/harness.hpp"

#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace nearcs::cli
{

// Settings of the `theory` subcommands.
struct TheorySettings
{
    std::size_t pilots = 100;
    std::size_t nonzero_taps = 5;
    double tap_gain = 1.0;
    double noise_variance = 1.0;
    std::size_t block_length = 2;
    std::size_t subcarriers = 4;
    std::size_t samples = 1000000;
    std::size_t pipeline_samples = 200000;
    std::string regime = "single-tap"; // or "block"
    std::vector<double> p_values{0.5};
    std::vector<double> delta_p_values{1e-3, 1e-2};
};

// Shared settings applied to every estimator of an experiment.
struct EstimatorSettings
{
    CoefficientMode coefficient_mode = CoefficientMode::exact;
    CoefficientSchedule schedule = CoefficientSchedule::subcarrier_decrement;
    bool correlate_with_measurements = false;
    std::vector<std::size_t> block_schedule; // cslw_bomp only
};

struct Manifest
{
    std::string command;    // "simulate" or "theory"
    std::string subcommand; // e.g. "nmse-vs-snr"
    std::string version;
};

struct CliConfig
{
    SystemParams system;
    std::vector<EstimatorKind> estimators{EstimatorKind::omp,       EstimatorKind::bomp, EstimatorKind::cslw_omp,
                                          EstimatorKind::cslw_bomp, EstimatorKind::ls,   EstimatorKind::genie};
    EstimatorSettings estimator;
    SweepAxis axis = SweepAxis::snr;
    std::vector<double> sweep_values{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    double accuracy_threshold = 1e-2;
    std::size_t workers = 1;
    TheorySettings theory;
    Manifest manifest;

    // Keys explicitly assigned by the last load, as "section.key".
    std::set<std::string> assigned;

    ExperimentConfig experiment() const;
};

class ConfigError : public std::runtime_error
{
public:
    ConfigError(const std::string &detail, std::size_t line, const std::string &source = {})
        : std::runtime_error((source.empty() ? "" : source + ": ") +
                             (line == 0 ? "" : "line " + std::to_string(line) + ": ") + detail),
          detail_(detail), line_(line)
    {
    }
    const std::string &detail() const noexcept { return detail_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string detail_;
    std::size_t line_;
};

// Line-oriented format:
//   # comment
//   [section]
//   key = value
// Lists are comma separated. Unknown sections or keys are errors.
CliConfig parse_config(const std::string &text, CliConfig base = {});
CliConfig load_config(const std::string &path, CliConfig base = {});

// Canonical text form; parse_config(dump_config(c)) reproduces c.
// The [manifest] section is written only when with_manifest is set.
std::string dump_config(const CliConfig &cfg, bool with_manifest = false);

// One line per accepted key: "section.key  description".
std::string describe_keys();

std::string format_double(double v);

} // namespace nearcs::cli

#endif
