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
#include "nearcs/errors.hpp"
#include "nearcs_cli/app.hpp"
#include "nearcs_cli/config.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace nearcs;
using namespace nearcs::cli;
namespace fs = std::filesystem;

namespace
{

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "nearcs");
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string &name)
{
    const fs::path p = fs::temp_directory_path() / ("nearcs-cli-" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path &p, const std::string &text)
{
    std::ofstream(p, std::ios::binary) << text;
}

std::uint64_t manifest_seed(const fs::path &dir, const std::string &name)
{
    return load_config((dir / (name + ".manifest")).string()).seed;
}

} // namespace

TEST_CASE("an empty config gives the default scenario", "[cli][config]")
{
    const auto c = parse_config("");
    const SystemParams d;
    CHECK(c.system.antennas == 256);
    CHECK(c.system.antennas_sub6 == 32);
    CHECK(c.system.subcarriers == 32);
    CHECK(c.system.block_length == 4);
    CHECK(c.system.nonzero_taps == 20);
    CHECK(c.system.freq_mmwave_hz == 28e9);
    CHECK(c.system.freq_sub6_hz == 3.5e9);
    CHECK(c.system.amplitude_ratio == 3.0);
    CHECK(c.system.tap_gain == d.tap_gain);
    CHECK(c.assigned.empty());
    CHECK(c.experiment().estimators.size() == 6);
}

TEST_CASE("config parsing", "[cli][config]")
{
    const auto c = parse_config("# comment\n[system]\npilots = 40\n  snr_db=3.5 \n[experiment]\n"
                                "estimators = omp, cslw_bomp\nsweep_values = 1,2\n");
    CHECK(c.system.pilots == 40);
    CHECK(c.system.snr_db == 3.5);
    CHECK(c.estimators == std::vector<EstimatorKind>{EstimatorKind::omp, EstimatorKind::cslw_bomp});
    CHECK(c.sweep_values == std::vector<double>{1, 2});
    CHECK(c.assigned == std::set<std::string>{"system.pilots", "system.snr_db", "experiment.estimators",
                                              "experiment.sweep_values"});

    auto error_line = [](const std::string &text) -> std::size_t {
        try
        {
            parse_config(text);
        }
        catch (const ConfigError &e)
        {
            return e.line();
        }
        return 0;
    };
    CHECK(error_line("[system]\nantennas = 256\nbogus = 1\n") == 3);
    CHECK(error_line("[nowhere]\n") == 1);
    CHECK(error_line("pilots = 3\n") == 1);
    CHECK(error_line("[system]\npilots 3\n") == 2);
    CHECK(error_line("[system]\npilots = 3\npilots = 4\n") == 3);
    CHECK(error_line("[system]\npilots = three\n") == 2);
    CHECK(error_line("[system\n") == 1);
    CHECK(error_line("[experiment]\nestimators = omp, lasso\n") == 2);
    CHECK(error_line("[system]\ngrid = sideways\n") == 2);

    try
    {
        parse_config("[system]\n\nfoo = 1\n");
        FAIL("expected ConfigError");
    }
    catch (const ConfigError &e)
    {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(std::string(e.what()).find("foo") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/nearcs.cfg"), ConfigError);
}

TEST_CASE("block length must divide the array", "[cli][config]")
{
    const auto c = parse_config("[system]\nblock_length = 5\n");
    CHECK_THROWS_AS(c.experiment().validate(), ParameterError);
}

TEST_CASE("config dump round-trips", "[cli][config]")
{
    CliConfig c = simulate_preset("perturbation-sweep");
    c.system.tap_gain = 0.1;
    c.system.snr_db = -3.25;
    c.estimator.block_schedule = {4, 2};
    c.theory.p_values = {0.1, 0.3};
    c.manifest = {"simulate", "perturbation-sweep", "9.9"};
    const std::string text = dump_config(c, true);
    const auto back = parse_config(text);
    CHECK(dump_config(back, true) == text);
    CHECK(back.system.tap_gain == 0.1);
    CHECK(back.estimator.block_schedule == std::vector<std::size_t>{4, 2});
    CHECK(back.manifest.subcommand == "perturbation-sweep");
    CHECK(dump_config(c).find("[manifest]") == std::string::npos);

    for (double v : {0.1, 1.0 / 3.0, 1e-300, 1.7320508075688772, 28e9})
        CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.1) == "0.1");
    CHECK(describe_keys().find("system.pilots") != std::string::npos);
}

TEST_CASE("committed configs match the presets", "[cli][config]")
{
    const fs::path dir = fs::path(NEARCS_SOURCE_DIR) / "configs";
    for (const auto &name : simulate_names())
    {
        INFO(name);
        const auto loaded = load_config((dir / (name + ".cfg")).string());
        CHECK(dump_config(loaded) == dump_config(simulate_preset(name)));
    }
    for (const std::string regime : {"single-tap", "block"})
    {
        const auto preset = theory_preset("optimal-prior", regime);
        const auto loaded = load_config((dir / ("optimal-prior-" + regime + ".cfg")).string(), CliConfig{});
        CHECK(dump_config(loaded) == dump_config(preset));
    }
    CHECK(dump_config(load_config((dir / "validate-distributions.cfg").string())) ==
          dump_config(theory_preset("validate-distributions")));
}

TEST_CASE("help and usage errors", "[cli]")
{
    CHECK(invoke({"--help"}).code == 0);
    CHECK(invoke({"--help"}).out.find("NEARCS_SEED") != std::string::npos);
    CHECK(invoke({"--version"}).code == 0);
    for (const auto &name : simulate_names())
        CHECK(invoke({"simulate", name, "--help"}).code == 0);
    for (const auto &name : theory_names())
        CHECK(invoke({"theory", name, "--help"}).code == 0);
    CHECK(invoke({"rerun", "--help"}).code == 0);
    CHECK(invoke({"config", "--help"}).code == 0);

    CHECK(invoke({}).code == 2);
    CHECK(invoke({"simulate"}).code == 2);
    CHECK(invoke({"simulate", "nmse-vs-snr", "--bogus"}).code == 2);
    CHECK(invoke({"simulate", "nmse-vs-snr", "--grid", "diagonal"}).code == 2);
    CHECK(invoke({"simulate", "no-such-experiment"}).code == 2);
    CHECK(invoke({"theory", "optimal-prior", "--regime", "theorem"}).code == 2);
    CHECK(invoke({"rerun", "/nonexistent.manifest"}).code == 2);

    const auto dir = scratch("usage");
    // --m is a single value unless the sweep is over M
    CHECK(invoke({"simulate", "nmse-vs-snr", "--m", "20,30", "--out", dir.string()}).code == 2);
    const fs::path bad = dir / "bad.cfg";
    write(bad, "[system]\nantennas = 256\nbogus = 1\n");
    const auto r = invoke({"simulate", "nmse-vs-snr", "--config", bad.string(), "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
    write(bad, "[system]\nblock_length = 5\n");
    CHECK(invoke({"simulate", "nmse-vs-snr", "--config", bad.string(), "--out", dir.string()}).code == 2);
}

TEST_CASE("config subcommand prints canonical text", "[cli]")
{
    const auto r = invoke({"config", "--preset", "sparsity-sweep"});
    REQUIRE(r.code == 0);
    CHECK(r.out == dump_config(simulate_preset("sparsity-sweep")));
}

TEST_CASE("simulate writes a csv and a manifest, rerun repeats it", "[cli]")
{
    ::unsetenv("NEARCS_SEED");
    const auto dir = scratch("simulate");
    const auto r = invoke({"simulate", "nmse-vs-snr", "--trials", "3", "--snr", "0,10", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const std::string csv = slurp(dir / "nmse-vs-snr.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 6);
    const auto manifest = load_config((dir / "nmse-vs-snr.manifest").string());
    CHECK(manifest.manifest.command == "simulate");
    CHECK(manifest.trials == 3);
    CHECK(manifest.sweep_values == std::vector<double>{0, 10});

    const auto again = scratch("rerun");
    REQUIRE(invoke({"rerun", (dir / "nmse-vs-snr.manifest").string(), "--out", again.string()}).code == 0);
    CHECK(slurp(again / "nmse-vs-snr.csv") == csv);
    CHECK(slurp(again / "nmse-vs-snr.manifest") == slurp(dir / "nmse-vs-snr.manifest"));
}

TEST_CASE("seed precedence", "[cli]")
{
    const auto dir = scratch("seed");
    const std::vector<std::string> base{"simulate", "support-accuracy", "--trials", "1", "--snr", "10",
                                        "--out", dir.string()};
    auto with = [&](std::vector<std::string> extra) {
        auto args = base;
        args.insert(args.end(), extra.begin(), extra.end());
        REQUIRE(invoke(args).code == 0);
        return manifest_seed(dir, "support-accuracy");
    };

    ::unsetenv("NEARCS_SEED");
    CHECK(with({}) == 1);
    ::setenv("NEARCS_SEED", "9", 1);
    CHECK(with({}) == 9);
    const fs::path cfg = dir / "seed.cfg";
    write(cfg, "[experiment]\nseed = 3\n");
    CHECK(with({"--config", cfg.string()}) == 3);
    CHECK(with({"--config", cfg.string(), "--seed", "7"}) == 7);
    ::setenv("NEARCS_SEED", "x12", 1);
    CHECK(invoke(base).code == 2);
    ::unsetenv("NEARCS_SEED");
}

TEST_CASE("theory subcommands", "[cli]")
{
    ::unsetenv("NEARCS_SEED");
    const auto dir = scratch("theory");
    auto r = invoke({"theory", "pdf-t", "--samples", "5000", "--out", dir.string()});
    REQUIRE(r.code == 0);
    std::string csv = slurp(dir / "pdf-t.csv");
    CHECK(csv.rfind("t,pdf_theoretical,pdf_empirical\n", 0) == 0);
    CHECK(csv.find("# ks = ") != std::string::npos);
    CHECK(csv.find("samples = 5000") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 402);

    r = invoke({"theory", "gamma-diff", "--samples", "2000", "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "gamma-diff.csv").find("samples = 2000") != std::string::npos);

    r = invoke({"theory", "optimal-prior", "--regime", "block", "--p", "0.5", "--dp", "0.01", "--out", dir.string()});
    REQUIRE(r.code == 0);
    csv = slurp(dir / "optimal-prior.csv");
    CHECK(csv.rfind("p,delta_p,coefficient,dv_theory,dv_best,pe_zero,pe_theory,pe_best,relative_gap,excess_lost\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(load_config((dir / "optimal-prior.manifest").string()).theory.regime == "block");

    CHECK(invoke({"theory", "pdf-t", "--m", "0", "--out", dir.string()}).code == 2);
}
