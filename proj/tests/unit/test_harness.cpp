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
#include "nearcs/harness.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <sstream>

using namespace nearcs;
using Catch::Approx;

namespace
{

EstimatorConfig est(EstimatorKind kind)
{
    EstimatorConfig e;
    e.kind = kind;
    return e;
}

ExperimentConfig small_experiment()
{
    ExperimentConfig cfg;
    cfg.base.antennas = 64;
    cfg.base.subcarriers = 4;
    cfg.base.pilots = 24;
    cfg.base.block_length = 4;
    cfg.base.nonzero_taps = 8;
    cfg.base.snr_db = 10.0;
    cfg.estimators = {est(EstimatorKind::omp), est(EstimatorKind::bomp), est(EstimatorKind::cslw_omp),
                      est(EstimatorKind::cslw_bomp), est(EstimatorKind::ls), est(EstimatorKind::genie)};
    cfg.sweep_values = {0.0, 10.0};
    cfg.trials = 20;
    cfg.master_seed = 5;
    return cfg;
}

} // namespace

TEST_CASE("nmse conventions", "[harness]")
{
    RngStream rng(31, 1);
    const ComplexMatrix x = sample_complex_gaussian(16, 3, 1.0, rng);
    const ComplexMatrix xh = sample_complex_gaussian(16, 3, 1.0, rng);
    double err = 0.0, energy = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
    {
        err += std::norm(xh(i) - x(i));
        energy += std::norm(x(i));
    }
    CHECK(nmse(xh, x) == Approx(err / 48.0).epsilon(1e-13));
    CHECK(nmse(xh, x, NmseConvention::energy_normalized) == Approx(err / energy).epsilon(1e-13));
    CHECK(nmse(x, x) == 0.0);

    // a zero estimate of S taps of modulus g over N rows
    ComplexMatrix sparse = ComplexMatrix::Zero(64, 4);
    for (Eigen::Index i = 0; i < 8; ++i)
        sparse.row(i).setConstant(Complex(0.0, 1.5));
    CHECK(nmse(ComplexMatrix::Zero(64, 4), sparse) == Approx(8 * 2.25 / 64));
    CHECK(nmse(ComplexMatrix::Zero(64, 4), sparse, NmseConvention::energy_normalized) == Approx(1.0));

    CHECK_THROWS_AS(nmse(x, ComplexMatrix::Zero(16, 3), NmseConvention::energy_normalized), UndefinedMetricError);
    CHECK_THROWS_AS(nmse(x, sparse), ParameterError);
}

TEST_CASE("support accuracy and accuracy probability", "[harness]")
{
    CHECK(support_accuracy({1, 2, 3}, {2, 3, 4}) == Approx(2.0 / 3.0));
    CHECK(support_accuracy({3, 2, 2}, {2, 3}) == 1.0);
    CHECK(support_accuracy({}, {5}) == 0.0);
    CHECK_THROWS_AS(support_accuracy({1}, {}), ParameterError);

    const std::vector<double> v{0.1, 0.01, 0.001, 1e-5};
    CHECK(prob_accurate(v, 0.01) == 0.5);
    CHECK(prob_accurate(v, std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(prob_accurate(v, 1e-9) == 0.0);
    CHECK_THROWS_AS(prob_accurate(std::vector<double>{}, 0.1), ParameterError);
}

TEST_CASE("sweep axes", "[harness]")
{
    auto cfg = small_experiment();
    for (auto a : {SweepAxis::snr, SweepAxis::sparsity_blocks, SweepAxis::compression_m, SweepAxis::amplitude_ratio})
        CHECK(sweep_axis_from_string(to_string(a)) == a);
    CHECK_THROWS_AS(sweep_axis_from_string("bandwidth"), ParameterError);

    cfg.axis = SweepAxis::sparsity_blocks;
    cfg.sweep_values = {3};
    CHECK(cfg.params_at(0).nonzero_taps == 12);
    cfg.axis = SweepAxis::compression_m;
    cfg.sweep_values = {40};
    CHECK(cfg.params_at(0).pilots == 40);
    cfg.sweep_values = {40.5};
    CHECK_THROWS_AS(cfg.params_at(0), ParameterError);
    cfg.axis = SweepAxis::amplitude_ratio;
    cfg.sweep_values = {2.5};
    CHECK(cfg.params_at(0).amplitude_ratio == 2.5);
    CHECK_THROWS_AS(cfg.params_at(1), ParameterError);
}

TEST_CASE("experiment validation", "[harness]")
{
    auto cfg = small_experiment();
    CHECK_NOTHROW(cfg.validate());
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = small_experiment();
    cfg.sweep_values.clear();
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = small_experiment();
    cfg.estimators.clear();
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = small_experiment();
    cfg.estimators[1].block_length = 3;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = small_experiment();
    cfg.axis = SweepAxis::compression_m;
    cfg.sweep_values = {24, 100};
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("run_trial is deterministic", "[harness]")
{
    const auto cfg = small_experiment();
    const auto a = run_trial(cfg, 1, 7);
    const auto b = run_trial(cfg, 1, 7);
    REQUIRE(a.estimators.size() == 6);
    for (std::size_t e = 0; e < 6; ++e)
    {
        CHECK(a.estimators[e].failed == b.estimators[e].failed);
        CHECK(a.estimators[e].nmse == b.estimators[e].nmse);
        CHECK(a.estimators[e].support_accuracy == b.estimators[e].support_accuracy);
    }
    const auto c = run_trial(cfg, 1, 8);
    CHECK(c.estimators[0].nmse != a.estimators[0].nmse);
}

TEST_CASE("the genie bound dominates", "[harness]")
{
    auto cfg = small_experiment();
    std::size_t wins = 0, comparisons = 0;
    for (std::size_t t = 0; t < 500; ++t)
    {
        const auto out = run_trial(cfg, 1, t);
        const double genie = out.estimators[5].nmse;
        CHECK(out.estimators[5].support_accuracy == 1.0);
        for (std::size_t e = 0; e < 5; ++e)
        {
            ++comparisons;
            wins += genie <= out.estimators[e].nmse * (1 + 1e-12);
        }
    }
    CHECK(static_cast<double>(wins) / static_cast<double>(comparisons) >= 0.95);
}

TEST_CASE("sweep aggregation", "[harness]")
{
    auto cfg = small_experiment();
    const auto records = run_sweep(cfg);
    REQUIRE(records.size() == 12);
    for (std::size_t i = 0; i < records.size(); ++i)
    {
        const auto &r = records[i];
        CHECK(r.trials + r.failures == cfg.trials);
        CHECK(r.wallclock_s == 0.0);
        CHECK(r.nmse_db == Approx(10 * std::log10(r.nmse_mean)));
        if (i > 0)
        {
            const auto &p = records[i - 1];
            CHECK((p.sweep_value < r.sweep_value || (p.sweep_value == r.sweep_value && p.estimator < r.estimator)));
        }
    }

    // the aggregate is the mean of the per-trial outcomes
    const auto &cslw = records[6 + 1]; // bomp, cslw_bomp, cslw_omp, genie, ls, omp
    REQUIRE(cslw.estimator == "cslw_bomp");
    double sum = 0.0;
    std::vector<double> values;
    for (std::size_t t = 0; t < cfg.trials; ++t)
    {
        values.push_back(run_trial(cfg, 1, t).estimators[3].nmse);
        sum += values.back();
    }
    CHECK(cslw.nmse_mean == Approx(sum / cfg.trials).epsilon(1e-12));
    CHECK(cslw.prob_accurate == prob_accurate(values, cfg.accuracy_threshold));

    cfg.record_timing = true;
    for (const auto &r : run_sweep(cfg))
        CHECK(r.wallclock_s > 0.0);
}

TEST_CASE("failed trials are counted, not averaged", "[harness]")
{
    auto cfg = small_experiment();
    cfg.base.pilots = 6; // fewer rows than the 8 selected columns
    cfg.estimators = {est(EstimatorKind::bomp), est(EstimatorKind::ls)};
    cfg.sweep_values = {10.0};
    const auto records = run_sweep(cfg);
    REQUIRE(records.size() == 2);
    CHECK(records[0].estimator == "bomp");
    CHECK(records[0].failures == cfg.trials);
    CHECK(records[0].trials == 0);
    CHECK(std::isnan(records[0].nmse_mean));
    CHECK(records[1].failures == 0);
    CHECK(records[1].trials == cfg.trials);
}

TEST_CASE("plain estimators ignore the side information", "[harness]")
{
    auto cfg = small_experiment();
    cfg.axis = SweepAxis::amplitude_ratio;
    cfg.sweep_values = {1.0, 2.0, 5.0};
    cfg.trials = 200;
    const auto records = run_sweep(cfg);
    auto find = [&](double c, const std::string &name) {
        for (const auto &r : records)
            if (r.sweep_value == c && r.estimator == name)
                return r;
        FAIL("missing record");
        return MetricRecord{};
    };
    for (const char *name : {"omp", "bomp", "ls", "genie"})
    {
        CHECK(find(1.0, name).nmse_mean == find(5.0, name).nmse_mean);
        CHECK(find(2.0, name).support_accuracy == find(5.0, name).support_accuracy);
    }
    // a cleaner Sub-6GHz channel helps the weighted estimator
    CHECK(find(5.0, "cslw_bomp").support_accuracy >= find(1.0, "cslw_bomp").support_accuracy);
    CHECK(find(5.0, "cslw_bomp").nmse_mean <= find(1.0, "cslw_bomp").nmse_mean);
}

TEST_CASE("csv output is reproducible and worker independent", "[harness]")
{
    auto cfg = small_experiment();
    const std::string one = to_csv(run_sweep(cfg));
    CHECK(to_csv(run_sweep(cfg)) == one);
    cfg.workers = 3;
    CHECK(to_csv(run_sweep(cfg)) == one);
    CHECK(one.substr(0, one.find('\n')) ==
          "sweep_axis,sweep_value,estimator,trials,failures,nmse_mean,nmse_db,nmse_energy_norm,support_accuracy,"
          "prob_accurate,wallclock_s");
    CHECK(std::count(one.begin(), one.end(), '\n') == 13);
    CHECK(one.find("\nsnr,10,cslw_bomp,20,0,") != std::string::npos);

    cfg.master_seed = 6;
    CHECK(to_csv(run_sweep(cfg)) != one);
}

TEST_CASE("csv write failure keeps the records", "[harness]")
{
    auto cfg = small_experiment();
    cfg.trials = 2;
    try
    {
        run_sweep_to_csv(cfg, "/nonexistent-dir/out.csv");
        FAIL("expected OutputError");
    }
    catch (const OutputError &e)
    {
        CHECK(e.records().size() == 12);
    }
}
