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
#include "nearcs/channel.hpp"
#include "nearcs/estimators.hpp"
#include "nearcs/sideinfo.hpp"

#include <benchmark/benchmark.h>

using namespace nearcs;

namespace
{

struct Scenario
{
    SystemParams params;
    AngularChannel channel;
    Measurement meas;
    PriorVector prior;
    DParams dparams;
};

Scenario make_scenario(std::size_t pilots)
{
    Scenario s;
    s.params.pilots = pilots;
    RngStream rng(1, 1);
    const auto support = gen_support(s.params, rng);
    s.channel = gen_angular_channel(s.params, support, rng);
    const auto sub6 = gen_sub6_channel(s.channel, s.params, rng);
    s.meas = gen_measurement(s.channel, s.params, rng);
    s.prior = probability_map_minmax(block_norms(sub6.x_sub, s.params.block_length));
    s.dparams.pilots = pilots;
    s.dparams.nonzero_taps = s.params.nonzero_taps;
    s.dparams.tap_gain = s.params.tap_gain;
    s.dparams.noise_variance = s.meas.sigma2;
    return s;
}

EstimatorConfig config(const Scenario &s, EstimatorKind kind)
{
    EstimatorConfig c;
    c.kind = kind;
    c.block_length = s.params.block_length;
    c.target_taps = s.params.nonzero_taps;
    return c;
}

void BM_omp(benchmark::State &state)
{
    const auto s = make_scenario(static_cast<std::size_t>(state.range(0)));
    const auto cfg = config(s, EstimatorKind::omp);
    for (auto _ : state)
        benchmark::DoNotOptimize(omp(s.meas.y, s.meas.a, cfg));
}
BENCHMARK(BM_omp)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_bomp(benchmark::State &state)
{
    const auto s = make_scenario(static_cast<std::size_t>(state.range(0)));
    const auto cfg = config(s, EstimatorKind::bomp);
    for (auto _ : state)
        benchmark::DoNotOptimize(bomp(s.meas.y, s.meas.a, cfg));
}
BENCHMARK(BM_bomp)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_cslw_bomp(benchmark::State &state)
{
    const auto s = make_scenario(static_cast<std::size_t>(state.range(0)));
    const auto cfg = config(s, EstimatorKind::cslw_bomp);
    for (auto _ : state)
        benchmark::DoNotOptimize(cslw_bomp(s.meas.y, s.meas.a, s.prior, cfg, s.dparams));
}
BENCHMARK(BM_cslw_bomp)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_ls(benchmark::State &state)
{
    const auto s = make_scenario(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(ls_estimate(s.meas.y, s.meas.a));
}
BENCHMARK(BM_ls)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_channel_draw(benchmark::State &state)
{
    SystemParams p;
    RngStream rng(2, 1);
    for (auto _ : state)
    {
        const auto support = gen_support(p, rng);
        const auto ch = gen_angular_channel(p, support, rng);
        benchmark::DoNotOptimize(gen_sub6_channel(ch, p, rng));
        benchmark::DoNotOptimize(gen_measurement(ch, p, rng));
    }
}
BENCHMARK(BM_channel_draw)->Unit(benchmark::kMicrosecond);

} // namespace
