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
#include "nearcs/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#ifndef NEARCS_VERSION
#define NEARCS_VERSION "0.0.0"
#endif

namespace nearcs::cli
{

namespace
{

std::vector<double> range(double first, double last, double step)
{
    std::vector<double> v;
    for (double x = first; x <= last + 1e-9; x += step)
        v.push_back(x);
    return v;
}

std::string line(const char *fmt, ...) __attribute__((format(printf, 1, 2)));

std::string line(const char *fmt, ...)
{
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

void write_file(const std::string &path, const std::string &content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write '" + path + "'");
    f << content;
    if (!f)
        throw std::runtime_error("write to '" + path + "' failed");
}

std::string join_path(const std::string &dir, const std::string &file)
{
    return (std::filesystem::path(dir) / file).string();
}

void prepare_dir(const std::string &dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

std::string write_manifest(CliConfig cfg, const std::string &command, const std::string &name,
                           const std::string &out_dir)
{
    cfg.manifest.command = command;
    cfg.manifest.subcommand = name;
    cfg.manifest.version = NEARCS_VERSION;
    const std::string path = join_path(out_dir, name + ".manifest");
    write_file(path, "# nearcs run manifest; rerun with `nearcs rerun " + name + ".manifest`\n" +
                         dump_config(cfg, true));
    return path;
}

SelectionDistParams selection_params(const TheorySettings &t)
{
    SelectionDistParams p;
    p.pilots = t.pilots;
    p.nonzero_taps = t.nonzero_taps;
    p.tap_gain = t.tap_gain;
    p.noise_variance = t.noise_variance;
    p.block_length = t.block_length;
    p.subcarriers = t.subcarriers;
    return p;
}

// Density table at histogram bin centres with a KS footer.
std::string density_table(const std::function<double(double)> &pdf, const std::vector<double> &samples, double lo,
                          double hi, double ks)
{
    const int bins = 400;
    const double width = (hi - lo) / bins;
    std::vector<std::size_t> counts(bins, 0);
    for (double x : samples)
    {
        const auto b = static_cast<long>(std::floor((x - lo) / width));
        if (b >= 0 && b < bins)
            ++counts[static_cast<std::size_t>(b)];
        else if (b == bins)
            ++counts[bins - 1];
    }
    const double n = static_cast<double>(samples.size());
    std::string out = "t,pdf_theoretical,pdf_empirical\n";
    for (int i = 0; i < bins; ++i)
    {
        const double t = lo + (i + 0.5) * width;
        out += line("%.10g,%.10g,%.10g\n", t, pdf(t), static_cast<double>(counts[static_cast<std::size_t>(i)]) / (n * width));
    }
    out += line("# ks = %.6g, samples = %zu\n", ks, samples.size());
    return out;
}

void print_summary(const std::vector<MetricRecord> &records, std::ostream &log)
{
    log << line("%-10s %-10s %10s %10s %10s %8s\n", "value", "estimator", "nmse_db", "support", "p_acc", "failed");
    for (const auto &r : records)
        log << line("%-10g %-10s %10.3f %10.4f %10.3f %8zu\n", r.sweep_value, r.estimator.c_str(), r.nmse_db,
                    r.support_accuracy, r.prob_accurate, r.failures);
}

} // namespace

const std::vector<std::string> &simulate_names()
{
    static const std::vector<std::string> names{"nmse-vs-snr", "support-accuracy", "sparsity-sweep",
                                                "compression-sweep", "perturbation-sweep"};
    return names;
}

const std::vector<std::string> &theory_names()
{
    static const std::vector<std::string> names{"validate-distributions", "pdf-t", "gamma-diff", "optimal-prior"};
    return names;
}

CliConfig simulate_preset(const std::string &name)
{
    using K = EstimatorKind;
    CliConfig c;
    c.system.pilots = 25;
    c.system.snr_db = 10.0;
    if (name == "nmse-vs-snr")
    {
        c.estimators = {K::omp, K::bomp, K::cslw_omp, K::cslw_bomp, K::ls, K::genie};
        c.axis = SweepAxis::snr;
        c.sweep_values = range(0, 20, 2);
        c.trials = 500;
    }
    else if (name == "support-accuracy")
    {
        c.estimators = {K::omp, K::bomp, K::cslw_omp, K::cslw_bomp};
        c.axis = SweepAxis::snr;
        c.sweep_values = range(0, 20, 2);
        c.trials = 500;
    }
    else if (name == "sparsity-sweep")
    {
        c.system.pilots = 50;
        c.estimators = {K::omp, K::bomp, K::cslw_omp, K::cslw_bomp, K::genie};
        c.axis = SweepAxis::sparsity_blocks;
        c.sweep_values = range(1, 12, 1);
        c.trials = 200;
    }
    else if (name == "compression-sweep")
    {
        c.estimators = {K::omp, K::bomp, K::cslw_omp, K::cslw_bomp, K::genie};
        c.axis = SweepAxis::compression_m;
        c.sweep_values = range(10, 80, 2);
        c.trials = 200;
    }
    else if (name == "perturbation-sweep")
    {
        c.estimators = {K::omp, K::bomp, K::cslw_omp, K::cslw_bomp};
        c.axis = SweepAxis::amplitude_ratio;
        c.sweep_values = range(1, 5, 1);
        c.trials = 500;
    }
    else
        throw ParameterError("unknown simulation '" + name + "'");
    return c;
}

CliConfig theory_preset(const std::string &name, const std::string &regime)
{
    CliConfig c;
    if (name == "optimal-prior")
    {
        c.theory.regime = regime;
        if (regime == "single-tap")
        {
            c.theory.pilots = 25;
            c.theory.nonzero_taps = 5;
        }
        else if (regime == "block")
        {
            c.theory.pilots = 10;
            c.theory.nonzero_taps = 20;
            c.theory.block_length = 2;
            c.theory.subcarriers = 2;
        }
        else
            throw ParameterError("regime must be single-tap or block");
    }
    else if (name == "pdf-t" || name == "gamma-diff")
        c.theory.samples = 100000;
    else if (name != "validate-distributions")
        throw ParameterError("unknown theory command '" + name + "'");
    return c;
}

RunOutputs run_simulate(const CliConfig &cfg, const std::string &name, const std::string &out_dir, bool timing,
                        std::ostream &log)
{
    ExperimentConfig ecfg = cfg.experiment();
    ecfg.record_timing = timing;
    ecfg.validate();
    prepare_dir(out_dir);
    RunOutputs paths;
    paths.csv_path = join_path(out_dir, name + ".csv");
    paths.manifest_path = write_manifest(cfg, "simulate", name, out_dir);
    const auto records = run_sweep_to_csv(ecfg, paths.csv_path);
    print_summary(records, log);
    log << "wrote " << paths.csv_path << "\n";
    return paths;
}

RunOutputs run_theory(const CliConfig &cfg, const std::string &name, const std::string &out_dir, std::ostream &log)
{
    const SelectionDistParams params = selection_params(cfg.theory);
    params.validate();
    prepare_dir(out_dir);
    RunOutputs paths;
    paths.csv_path = join_path(out_dir, name + ".csv");
    paths.manifest_path = write_manifest(cfg, "theory", name, out_dir);

    if (name == "validate-distributions")
    {
        const auto checks = validate_distributions(params, cfg.theory.samples, cfg.theory.pipeline_samples, cfg.seed);
        std::string csv = "family,check,samples,value\n";
        for (const auto &c : checks)
        {
            csv += line("%s,%s,%zu,%.6g\n", c.family.c_str(), c.name.c_str(), c.samples, c.value);
            log << line("%-12s %-18s %9zu %.4g\n", c.family.c_str(), c.name.c_str(), c.samples, c.value);
        }
        write_file(paths.csv_path, csv);
    }
    else if (name == "pdf-t")
    {
        RngStream rng(cfg.seed, derive_stream_id({1}));
        auto s = sample_single_tap_model(params, cfg.theory.samples, rng);
        std::vector<double> t(s.nonzero.size());
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] = s.nonzero[i] - s.zero[i];
        const auto [mn, mx] = std::minmax_element(t.begin(), t.end());
        const double lo = std::min(*mn, 0.0), hi = std::max(*mx, 0.0);
        const auto pdf = [&](double x) { return pdf_t_single(x, params); };
        const TabulatedCdf cdf(pdf, 0.0, cdf_t_single(0.0, params), lo, hi, 2000);
        const double ks = ks_statistic(t, cdf);
        write_file(paths.csv_path, density_table(pdf, t, lo, hi, ks));
        log << line("ks = %.4g over %zu samples\n", ks, t.size());
    }
    else if (name == "gamma-diff")
    {
        const auto g = block_gamma_params(params);
        RngStream rng(cfg.seed, derive_stream_id({4}));
        auto t = sample_gamma_diff(g.nonzero, g.zero, cfg.theory.samples, rng);
        const auto [mn, mx] = std::minmax_element(t.begin(), t.end());
        const double lo = std::min(*mn, 0.0), hi = std::max(*mx, 0.0);
        const auto pdf = [&](double x) { return gamma_diff_pdf(x, g.nonzero, g.zero); };
        const double at_zero =
            regularized_beta(g.nonzero.rate / (g.nonzero.rate + g.zero.rate), g.nonzero.shape, g.zero.shape);
        const TabulatedCdf cdf(pdf, 0.0, at_zero, lo, hi, 2000);
        const double ks = ks_statistic(t, cdf);
        write_file(paths.csv_path, density_table(pdf, t, lo, hi, ks));
        log << line("nonzero Gamma(%.6g, %.6g), zero Gamma(%.6g, %.6g); ks = %.4g over %zu samples\n",
                    g.nonzero.shape, g.nonzero.rate, g.zero.shape, g.zero.rate, ks, t.size());
    }
    else if (name == "optimal-prior")
    {
        const auto model = cfg.theory.regime == "block" ? SelectionModel::block : SelectionModel::single_tap;
        const auto rows = validate_optimal_prior(model, params, cfg.theory.p_values, cfg.theory.delta_p_values);
        std::string csv = "p,delta_p,coefficient,dv_theory,dv_best,pe_zero,pe_theory,pe_best,relative_gap,excess_lost\n";
        log << line("%-6s %-8s %12s %12s %12s %12s\n", "p", "delta_p", "dv_theory", "dv_best", "pe_best",
                    "rel_gap");
        for (const auto &r : rows)
        {
            csv += line("%.10g,%.10g,%.10g,%.10g,%.10g,%.12g,%.12g,%.12g,%.6g,%.6g\n", r.p, r.delta_p, r.coefficient,
                        r.dv_theory, r.dv_best, r.pe_zero, r.pe_theory, r.pe_best, r.relative_gap, r.excess_lost);
            log << line("%-6g %-8g %12.5g %12.5g %12.8g %12.3g\n", r.p, r.delta_p, r.dv_theory, r.dv_best, r.pe_best,
                        r.relative_gap);
        }
        write_file(paths.csv_path, csv);
    }
    else
        throw ParameterError("unknown theory command '" + name + "'");
    log << "wrote " << paths.csv_path << "\n";
    return paths;
}

RunOutputs rerun_manifest(const std::string &manifest_path, const std::string &out_dir, std::ostream &log)
{
    const CliConfig cfg = load_config(manifest_path);
    const auto &names = cfg.manifest.command == "simulate" ? simulate_names() : theory_names();
    if (cfg.manifest.command != "simulate" && cfg.manifest.command != "theory")
        throw ConfigError("manifest has no command", 0, manifest_path);
    if (std::find(names.begin(), names.end(), cfg.manifest.subcommand) == names.end())
        throw ConfigError("unknown subcommand '" + cfg.manifest.subcommand + "'", 0, manifest_path);
    if (cfg.manifest.command == "simulate")
        return run_simulate(cfg, cfg.manifest.subcommand, out_dir, false, log);
    return run_theory(cfg, cfg.manifest.subcommand, out_dir, log);
}

} // namespace nearcs::cli
