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
#include "nearcs_cli/app.hpp"
#include "nearcs/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <optional>
#include <ostream>

namespace nearcs::cli
{

namespace
{

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct Flags
{
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> workers;
    std::vector<double> snr;
    std::vector<double> m;
    std::vector<double> c;
    std::string grid;
    bool timing = false;

    std::optional<std::size_t> pilots;
    std::optional<std::size_t> taps;
    std::optional<double> gain;
    std::optional<double> sigma2;
    std::optional<std::size_t> block;
    std::optional<std::size_t> subcarriers;
    std::optional<std::size_t> samples;
    std::string regime;
    std::vector<double> p;
    std::vector<double> dp;
};

// --seed, then the config file, then NEARCS_SEED, then the preset.
void resolve_seed(CliConfig &cfg, const Flags &f)
{
    if (f.seed)
    {
        cfg.seed = *f.seed;
        return;
    }
    if (cfg.assigned.count("experiment.seed"))
        return;
    if (const char *env = std::getenv("NEARCS_SEED"); env != nullptr && *env != '\0')
    {
        char *end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0' || errno == ERANGE || env[0] == '-')
            throw UsageError(std::string("NEARCS_SEED is not a non-negative integer: '") + env + "'");
        cfg.seed = v;
    }
}

std::size_t as_count(double v, const char *what)
{
    if (!(v >= 1.0) || v != std::floor(v))
        throw UsageError(std::string(what) + " must be a positive integer");
    return static_cast<std::size_t>(v);
}

// A list flag sweeps when it matches the sweep axis and otherwise sets one value.
void apply_axis_flag(CliConfig &cfg, SweepAxis axis, const std::vector<double> &values, const char *flag,
                     const std::function<void(double)> &set_base)
{
    if (values.empty())
        return;
    if (cfg.axis == axis)
        cfg.sweep_values = values;
    else if (values.size() == 1)
        set_base(values.front());
    else
        throw UsageError(std::string(flag) + " takes a single value unless it is the sweep axis");
}

CliConfig simulate_config(const std::string &name, const Flags &f)
{
    CliConfig cfg = simulate_preset(name);
    if (!f.config.empty())
        cfg = load_config(f.config, cfg);
    if (f.trials)
        cfg.trials = *f.trials;
    if (f.workers)
        cfg.workers = *f.workers;
    if (!f.grid.empty())
        cfg.system.grid_mode = grid_mode_from_string(f.grid);
    apply_axis_flag(cfg, SweepAxis::snr, f.snr, "--snr", [&](double v) { cfg.system.snr_db = v; });
    apply_axis_flag(cfg, SweepAxis::compression_m, f.m, "--m",
                    [&](double v) { cfg.system.pilots = as_count(v, "--m"); });
    apply_axis_flag(cfg, SweepAxis::amplitude_ratio, f.c, "--c", [&](double v) { cfg.system.amplitude_ratio = v; });
    resolve_seed(cfg, f);
    return cfg;
}

CliConfig theory_config(const std::string &name, const Flags &f)
{
    CliConfig cfg = theory_preset(name, f.regime.empty() ? "single-tap" : f.regime);
    if (!f.config.empty())
        cfg = load_config(f.config, cfg);
    if (!f.regime.empty())
        cfg.theory.regime = f.regime;
    if (f.pilots)
        cfg.theory.pilots = *f.pilots;
    if (f.taps)
        cfg.theory.nonzero_taps = *f.taps;
    if (f.gain)
        cfg.theory.tap_gain = *f.gain;
    if (f.sigma2)
        cfg.theory.noise_variance = *f.sigma2;
    if (f.block)
        cfg.theory.block_length = *f.block;
    if (f.subcarriers)
        cfg.theory.subcarriers = *f.subcarriers;
    if (f.samples)
        cfg.theory.samples = *f.samples;
    if (!f.p.empty())
        cfg.theory.p_values = f.p;
    if (!f.dp.empty())
        cfg.theory.delta_p_values = f.dp;
    resolve_seed(cfg, f);
    return cfg;
}

void common_flags(CLI::App *sub, Flags &f)
{
    sub->add_option("--config", f.config, "config file merged over the defaults")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "master seed (overrides the config file and NEARCS_SEED)");
    sub->add_option("--out", f.out, "output directory")->capture_default_str();
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"nearcs: side-information-assisted channel estimation experiments", "nearcs"};
    app.require_subcommand(1);
    app.footer("Config file keys ([section] then key = value, # comments):\n" + describe_keys() +
               "\nEnvironment: NEARCS_SEED sets the seed when neither --seed nor the config file does.\n"
               "Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.");
    app.set_version_flag("--version", std::string(NEARCS_VERSION));

    Flags f;
    std::string command, subcommand;

    auto *simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment");
    simulate->require_subcommand(1);
    for (const auto &name : simulate_names())
    {
        auto *sub = simulate->add_subcommand(name, "experiment preset " + name);
        common_flags(sub, f);
        sub->add_option("--trials", f.trials, "trials per sweep point");
        sub->add_option("--workers", f.workers, "worker threads");
        sub->add_option("--snr", f.snr, "SNR in dB (a list on the SNR axis)")->delimiter(',');
        sub->add_option("--m", f.m, "pilot count M (a list for compression-sweep)")->delimiter(',');
        sub->add_option("--c", f.c, "amplitude ratio C (a list for perturbation-sweep)")->delimiter(',');
        sub->add_option("--grid", f.grid, "on or off grid channel")->check(CLI::IsMember({"on", "off"}));
        sub->add_flag("--timing", f.timing, "record wall-clock seconds in the CSV (breaks byte-identical reruns)");
        sub->callback([&, name] {
            command = "simulate";
            subcommand = name;
        });
    }

    auto *theory = app.add_subcommand("theory", "validate the selection-statistics theory");
    theory->require_subcommand(1);
    for (const auto &name : theory_names())
    {
        auto *sub = theory->add_subcommand(name, "theory check " + name);
        common_flags(sub, f);
        sub->add_option("--m", f.pilots, "pilots M");
        sub->add_option("--s", f.taps, "nonzero taps S");
        sub->add_option("--g", f.gain, "tap modulus g");
        sub->add_option("--sigma2", f.sigma2, "noise variance");
        sub->add_option("--d", f.block, "block length d");
        sub->add_option("--k", f.subcarriers, "subcarriers K");
        sub->add_option("--samples", f.samples, "Monte Carlo samples");
        if (name == "optimal-prior")
        {
            sub->add_option("--regime", f.regime, "single-tap or block")
                ->check(CLI::IsMember({"single-tap", "block"}));
            sub->add_option("--p", f.p, "prior probabilities")->delimiter(',');
            sub->add_option("--dp", f.dp, "probability increments")->delimiter(',');
        }
        sub->callback([&, name] {
            command = "theory";
            subcommand = name;
        });
    }

    std::string manifest;
    auto *rerun = app.add_subcommand("rerun", "repeat the run recorded in a manifest");
    rerun->add_option("manifest", manifest, "manifest file written next to the outputs")
        ->required()
        ->check(CLI::ExistingFile);
    rerun->add_option("--out", f.out, "output directory")->capture_default_str();
    rerun->callback([&] { command = "rerun"; });

    std::string preset;
    auto *config = app.add_subcommand("config", "print a canonical config (preset merged with --config)");
    config->add_option("--preset", preset, "simulation preset")->check(CLI::IsMember(simulate_names()));
    config->add_option("--config", f.config, "config file")->check(CLI::ExistingFile);
    config->callback([&] { command = "config"; });

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try
    {
        if (command == "simulate")
            run_simulate(simulate_config(subcommand, f), subcommand, f.out, f.timing, out);
        else if (command == "theory")
            run_theory(theory_config(subcommand, f), subcommand, f.out, out);
        else if (command == "rerun")
            rerun_manifest(manifest, f.out, out);
        else if (command == "config")
        {
            CliConfig cfg = preset.empty() ? CliConfig{} : simulate_preset(preset);
            if (!f.config.empty())
                cfg = load_config(f.config, cfg);
            out << dump_config(cfg);
        }
        return 0;
    }
    catch (const ConfigError &e)
    {
        err << "nearcs: " << e.what() << "\n";
        return 2;
    }
    catch (const UsageError &e)
    {
        err << "nearcs: " << e.what() << "\n";
        return 2;
    }
    catch (const ParameterError &e)
    {
        err << "nearcs: invalid parameters: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        err << "nearcs: " << e.what() << "\n";
        return 1;
    }
}

} // namespace nearcs::cli
