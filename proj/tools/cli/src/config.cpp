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
#include "nearcs_cli/config.hpp"
#include "nearcs/errors.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace nearcs::cli
{

namespace
{

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    if (trim(s).empty())
        return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (item.empty())
            throw ParameterError("empty list element in '" + s + "'");
        out.push_back(item);
    }
    return out;
}

double to_double(const std::string &s)
{
    const char *begin = s.c_str();
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (s.empty() || end != begin + s.size() || errno == ERANGE)
        throw ParameterError("not a number: '" + s + "'");
    return v;
}

std::uint64_t to_u64(const std::string &s)
{
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw ParameterError("not a non-negative integer: '" + s + "'");
    return v;
}

std::size_t to_size(const std::string &s)
{
    return static_cast<std::size_t>(to_u64(s));
}

bool to_bool(const std::string &s)
{
    if (s == "true" || s == "yes" || s == "1")
        return true;
    if (s == "false" || s == "no" || s == "0")
        return false;
    throw ParameterError("not a boolean: '" + s + "'");
}

template <class T, class F> std::string join(const std::vector<T> &v, F &&fmt)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        if (i)
            out += ", ";
        out += fmt(v[i]);
    }
    return out;
}

std::string fmt_size(std::size_t v)
{
    return std::to_string(v);
}

struct Key
{
    const char *section;
    const char *name;
    const char *help;
    std::function<void(CliConfig &, const std::string &)> set;
    std::function<std::string(const CliConfig &)> get;
};

#define SIZE_KEY(sec, key, field, help)                                                                                \
    Key{sec, key, help, [](CliConfig &c, const std::string &v) { c.field = to_size(v); },                              \
        [](const CliConfig &c) { return fmt_size(c.field); }}
#define DOUBLE_KEY(sec, key, field, help)                                                                              \
    Key{sec, key, help, [](CliConfig &c, const std::string &v) { c.field = to_double(v); },                            \
        [](const CliConfig &c) { return format_double(c.field); }}

const std::vector<Key> &keys()
{
    static const std::vector<Key> table = {
        SIZE_KEY("system", "antennas", system.antennas, "mmWave array size N"),
        SIZE_KEY("system", "antennas_sub6", system.antennas_sub6, "Sub-6GHz array size"),
        SIZE_KEY("system", "subcarriers", system.subcarriers, "subcarriers K"),
        SIZE_KEY("system", "pilots", system.pilots, "pilot transmissions M"),
        SIZE_KEY("system", "block_length", system.block_length, "block length d (must divide antennas)"),
        SIZE_KEY("system", "nonzero_taps", system.nonzero_taps, "nonzero angular taps S (multiple of block_length)"),
        DOUBLE_KEY("system", "tap_gain", system.tap_gain, "modulus g of every nonzero tap"),
        DOUBLE_KEY("system", "snr_db", system.snr_db, "SNR in dB"),
        Key{"system", "snr_reference", "per_tap: sigma^2 = g^2 10^(-snr/10); received: S times that",
            [](CliConfig &c, const std::string &v) { c.system.snr_reference = snr_reference_from_string(v); },
            [](const CliConfig &c) { return to_string(c.system.snr_reference); }},
        DOUBLE_KEY("system", "freq_mmwave_hz", system.freq_mmwave_hz, "mmWave carrier frequency"),
        DOUBLE_KEY("system", "freq_sub6_hz", system.freq_sub6_hz, "Sub-6GHz carrier frequency"),
        DOUBLE_KEY("system", "amplitude_ratio", system.amplitude_ratio, "amplitude ratio C of the Sub-6GHz perturbation"),
        Key{"system", "grid", "on or off",
            [](CliConfig &c, const std::string &v) { c.system.grid_mode = grid_mode_from_string(v); },
            [](const CliConfig &c) { return to_string(c.system.grid_mode); }},
        SIZE_KEY("system", "sub6_block_length", system.sub6_block_length,
                 "taps per run that keep the coupled Sub-6GHz structure (0 means block_length)"),

        Key{"experiment", "estimators", "comma list of omp, bomp, clw_omp, clw_bomp, cslw_omp, cslw_bomp, ls, genie",
            [](CliConfig &c, const std::string &v) {
                c.estimators.clear();
                for (const auto &s : split_list(v))
                    c.estimators.push_back(estimator_kind_from_string(s));
            },
            [](const CliConfig &c) { return join(c.estimators, [](EstimatorKind k) { return to_string(k); }); }},
        Key{"experiment", "sweep_axis", "snr, sparsity_blocks, compression_m or amplitude_ratio",
            [](CliConfig &c, const std::string &v) { c.axis = sweep_axis_from_string(v); },
            [](const CliConfig &c) { return to_string(c.axis); }},
        Key{"experiment", "sweep_values", "comma list of values along the sweep axis",
            [](CliConfig &c, const std::string &v) {
                c.sweep_values.clear();
                for (const auto &s : split_list(v))
                    c.sweep_values.push_back(to_double(s));
            },
            [](const CliConfig &c) { return join(c.sweep_values, format_double); }},
        SIZE_KEY("experiment", "trials", trials, "Monte Carlo trials per sweep point"),
        Key{"experiment", "seed", "master seed", [](CliConfig &c, const std::string &v) { c.seed = to_u64(v); },
            [](const CliConfig &c) { return std::to_string(c.seed); }},
        DOUBLE_KEY("experiment", "accuracy_threshold", accuracy_threshold, "NMSE threshold for prob_accurate"),
        SIZE_KEY("experiment", "workers", workers, "worker threads"),

        Key{"estimator", "coefficient_mode", "exact or simplified",
            [](CliConfig &c, const std::string &v) { c.estimator.coefficient_mode = coefficient_mode_from_string(v); },
            [](const CliConfig &c) { return to_string(c.estimator.coefficient_mode); }},
        Key{"estimator", "schedule", "subcarrier_decrement, sparsity_decrement or fixed",
            [](CliConfig &c, const std::string &v) { c.estimator.schedule = coefficient_schedule_from_string(v); },
            [](const CliConfig &c) { return to_string(c.estimator.schedule); }},
        Key{"estimator", "correlate_with_measurements", "true to correlate against Y instead of the residual",
            [](CliConfig &c, const std::string &v) { c.estimator.correlate_with_measurements = to_bool(v); },
            [](const CliConfig &c) { return std::string(c.estimator.correlate_with_measurements ? "true" : "false"); }},
        Key{"estimator", "block_schedule", "cslw_bomp block length per iteration, comma list (empty: constant)",
            [](CliConfig &c, const std::string &v) {
                c.estimator.block_schedule.clear();
                for (const auto &s : split_list(v))
                    c.estimator.block_schedule.push_back(to_size(s));
            },
            [](const CliConfig &c) { return join(c.estimator.block_schedule, fmt_size); }},

        SIZE_KEY("theory", "pilots", theory.pilots, "M"),
        SIZE_KEY("theory", "nonzero_taps", theory.nonzero_taps, "S"),
        DOUBLE_KEY("theory", "tap_gain", theory.tap_gain, "g"),
        DOUBLE_KEY("theory", "noise_variance", theory.noise_variance, "sigma^2"),
        SIZE_KEY("theory", "block_length", theory.block_length, "d"),
        SIZE_KEY("theory", "subcarriers", theory.subcarriers, "K"),
        SIZE_KEY("theory", "samples", theory.samples, "Monte Carlo samples"),
        SIZE_KEY("theory", "pipeline_samples", theory.pipeline_samples,
                 "samples drawn through the full measurement pipeline (0 skips it)"),
        Key{"theory", "regime", "single-tap or block",
            [](CliConfig &c, const std::string &v) {
                if (v != "single-tap" && v != "block")
                    throw ParameterError("regime must be single-tap or block");
                c.theory.regime = v;
            },
            [](const CliConfig &c) { return c.theory.regime; }},
        Key{"theory", "p", "comma list of prior probabilities",
            [](CliConfig &c, const std::string &v) {
                c.theory.p_values.clear();
                for (const auto &s : split_list(v))
                    c.theory.p_values.push_back(to_double(s));
            },
            [](const CliConfig &c) { return join(c.theory.p_values, format_double); }},
        Key{"theory", "delta_p", "comma list of probability increments",
            [](CliConfig &c, const std::string &v) {
                c.theory.delta_p_values.clear();
                for (const auto &s : split_list(v))
                    c.theory.delta_p_values.push_back(to_double(s));
            },
            [](const CliConfig &c) { return join(c.theory.delta_p_values, format_double); }},

        Key{"manifest", "command", "simulate or theory",
            [](CliConfig &c, const std::string &v) { c.manifest.command = v; },
            [](const CliConfig &c) { return c.manifest.command; }},
        Key{"manifest", "subcommand", "subcommand that produced the outputs",
            [](CliConfig &c, const std::string &v) { c.manifest.subcommand = v; },
            [](const CliConfig &c) { return c.manifest.subcommand; }},
        Key{"manifest", "version", "nearcs version", [](CliConfig &c, const std::string &v) { c.manifest.version = v; },
            [](const CliConfig &c) { return c.manifest.version; }},
    };
    return table;
}

#undef SIZE_KEY
#undef DOUBLE_KEY

const Key *find_key(const std::string &section, const std::string &name)
{
    for (const auto &k : keys())
        if (section == k.section && name == k.name)
            return &k;
    return nullptr;
}

bool known_section(const std::string &section)
{
    for (const auto &k : keys())
        if (section == k.section)
            return true;
    return false;
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    for (int precision = 15; precision <= 17; ++precision)
    {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v)
            break;
    }
    return buf;
}

ExperimentConfig CliConfig::experiment() const
{
    ExperimentConfig cfg;
    cfg.base = system;
    for (auto kind : estimators)
    {
        EstimatorConfig e;
        e.kind = kind;
        e.coefficient_mode = estimator.coefficient_mode;
        e.schedule = estimator.schedule;
        e.correlate_with_measurements = estimator.correlate_with_measurements;
        if (kind == EstimatorKind::cslw_bomp)
            e.block_schedule = estimator.block_schedule;
        cfg.estimators.push_back(e);
    }
    cfg.axis = axis;
    cfg.sweep_values = sweep_values;
    cfg.trials = trials;
    cfg.master_seed = seed;
    cfg.accuracy_threshold = accuracy_threshold;
    cfg.workers = workers;
    return cfg;
}

CliConfig parse_config(const std::string &text, CliConfig base)
{
    CliConfig cfg = std::move(base);
    cfg.assigned.clear();
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t number = 0;
    while (std::getline(in, line))
    {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[')
        {
            if (line.back() != ']')
                throw ConfigError("unterminated section header", number);
            section = trim(line.substr(1, line.size() - 2));
            if (!known_section(section))
                throw ConfigError("unknown section [" + section + "]", number);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", number);
        if (section.empty())
            throw ConfigError("key outside of a section", number);
        const std::string name = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const Key *key = find_key(section, name);
        if (key == nullptr)
            throw ConfigError("unknown key '" + name + "' in [" + section + "]", number);
        const std::string id = section + "." + name;
        if (cfg.assigned.count(id))
            throw ConfigError("duplicate key '" + name + "'", number);
        try
        {
            key->set(cfg, value);
        }
        catch (const std::exception &e)
        {
            throw ConfigError(name + ": " + e.what(), number);
        }
        cfg.assigned.insert(id);
    }
    return cfg;
}

CliConfig load_config(const std::string &path, CliConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file", 0, path);
    std::stringstream ss;
    ss << in.rdbuf();
    try
    {
        return parse_config(ss.str(), std::move(base));
    }
    catch (const ConfigError &e)
    {
        throw ConfigError(e.detail(), e.line(), path);
    }
}

std::string dump_config(const CliConfig &cfg, bool with_manifest)
{
    std::string out;
    std::string section;
    for (const auto &k : keys())
    {
        if (!with_manifest && std::string(k.section) == "manifest")
            continue;
        if (section != k.section)
        {
            if (!section.empty())
                out += "\n";
            section = k.section;
            out += "[" + section + "]\n";
        }
        out += std::string(k.name) + " = " + k.get(cfg) + "\n";
    }
    return out;
}

std::string describe_keys()
{
    std::string out;
    for (const auto &k : keys())
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, "  %-40s %s\n", (std::string(k.section) + "." + k.name).c_str(), k.help);
        out += buf;
    }
    return out;
}

} // namespace nearcs::cli
