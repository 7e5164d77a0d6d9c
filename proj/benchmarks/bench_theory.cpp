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
#include "nearcs/theory.hpp"

#include <benchmark/benchmark.h>

using namespace nearcs;

namespace
{

void BM_noncentral_chi2_cdf(benchmark::State &state)
{
    const double lambda = static_cast<double>(state.range(0));
    double x = 0.5 * lambda;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(noncentral_chi2_cdf(x, 16.0, lambda));
        x += 1e-9;
    }
}
BENCHMARK(BM_noncentral_chi2_cdf)->Arg(10)->Arg(320)->Arg(4000);

void BM_marcum_q1(benchmark::State &state)
{
    double b = 5.0;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(marcum_q1(6.3, b));
        b += 1e-9;
    }
}
BENCHMARK(BM_marcum_q1);

void BM_pdf_t_single(benchmark::State &state)
{
    const SelectionDistParams p;
    double t = 2000.0;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(pdf_t_single(t, p));
        t += 1e-6;
    }
}
BENCHMARK(BM_pdf_t_single);

void BM_gamma_diff_pdf(benchmark::State &state)
{
    const auto g = block_gamma_params(SelectionDistParams{});
    double t = 50000.0;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(gamma_diff_pdf(t, g.nonzero, g.zero));
        t += 1e-6;
    }
}
BENCHMARK(BM_gamma_diff_pdf)->Unit(benchmark::kMicrosecond);

void BM_selection_error(benchmark::State &state)
{
    const SelectionDistParams p;
    for (auto _ : state)
        benchmark::DoNotOptimize(selection_error_probability(-3.2, 0.5, 0.51, SelectionModel::single_tap, p));
}
BENCHMARK(BM_selection_error)->Unit(benchmark::kMicrosecond);

} // namespace
