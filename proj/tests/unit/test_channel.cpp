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
#include "nearcs/errors.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

using namespace nearcs;
using Catch::Approx;

namespace
{

SystemParams small(std::size_t n, std::size_t d, std::size_t s, GridMode mode = GridMode::on_grid)
{
    SystemParams p;
    p.antennas = n;
    p.block_length = d;
    p.nonzero_taps = s;
    p.pilots = std::min<std::size_t>(n, 8);
    p.subcarriers = 4;
    p.grid_mode = mode;
    return p;
}

double wavelength(double f)
{
    return speed_of_light / f;
}

// Number of largest-magnitude coefficients needed to hold `fraction` of the energy.
std::size_t energy_support(const ComplexVector &v, double fraction)
{
    std::vector<double> e(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        e[static_cast<std::size_t>(i)] = std::norm(v(i));
    std::sort(e.rbegin(), e.rend());
    double total = 0.0;
    for (double x : e)
        total += x;
    double acc = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i)
    {
        acc += e[i];
        if (acc >= fraction * total)
            return i + 1;
    }
    return e.size();
}

} // namespace

TEST_CASE("system parameter validation", "[channel]")
{
    SystemParams p;
    CHECK_NOTHROW(p.validate());
    p.block_length = 5;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = SystemParams{};
    p.pilots = 300;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = SystemParams{};
    p.freq_sub6_hz = 30e9;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = SystemParams{};
    p.amplitude_ratio = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = SystemParams{};
    p.nonzero_taps = 18;
    CHECK_THROWS_AS(p.validate(), ParameterError);
}

TEST_CASE("noise variance follows the SNR reference", "[channel]")
{
    SystemParams p;
    p.tap_gain = 2.0;
    p.snr_db = 10.0;
    CHECK(p.noise_variance() == Approx(0.4));
    p.snr_reference = SnrReference::received;
    CHECK(p.noise_variance() == Approx(0.4 * 20));
    CHECK(snr_reference_from_string("received") == SnrReference::received);
    CHECK_THROWS_AS(snr_reference_from_string("total"), ParameterError);
}

TEST_CASE("gen_support on grid", "[channel]")
{
    RngStream rng(1, 1);
    const auto sat = gen_support(small(8, 4, 8), rng);
    CHECK(sat == IndexSet{0, 1, 2, 3, 4, 5, 6, 7});

    const auto p = small(256, 4, 20);
    for (int t = 0; t < 200; ++t)
    {
        const auto s = gen_support(p, rng);
        REQUIRE(s.size() == 20);
        REQUIRE(std::is_sorted(s.begin(), s.end()));
        const std::set<std::size_t> set(s.begin(), s.end());
        for (auto i : s)
            for (std::size_t j = (i / 4) * 4; j < (i / 4) * 4 + 4; ++j)
                REQUIRE(set.count(j) == 1);
    }
}

TEST_CASE("gen_support on grid is uniform over blocks", "[channel]")
{
    RngStream rng(1, 2);
    const auto p = small(32, 4, 8);
    std::vector<int> hits(8, 0);
    const int draws = 40000;
    for (int t = 0; t < draws; ++t)
        for (auto i : gen_support(p, rng))
            if (i % 4 == 0)
                ++hits[i / 4];
    for (int h : hits)
        CHECK(static_cast<double>(h) / draws == Approx(0.25).epsilon(0.03));
}

TEST_CASE("gen_support off grid", "[channel]")
{
    RngStream rng(2, 1);
    const auto p = small(64, 4, 8, GridMode::off_grid);
    std::size_t runs = 0, misaligned = 0;
    for (int t = 0; t < 10000; ++t)
    {
        const auto s = gen_support(p, rng);
        REQUIRE(s.size() == 8);
        REQUIRE(std::adjacent_find(s.begin(), s.end()) == s.end());
        // chunks of the sorted support are the contiguous runs
        for (std::size_t r = 0; r < 2; ++r)
        {
            for (std::size_t k = 1; k < 4; ++k)
                REQUIRE(s[4 * r + k] == s[4 * r] + k);
            ++runs;
            misaligned += s[4 * r] % 4 != 0;
        }
    }
    CHECK(static_cast<double>(misaligned) / runs == Approx(0.75).margin(0.05));

    auto crowded = small(8, 4, 12, GridMode::off_grid);
    CHECK_THROWS_AS(gen_support(crowded, rng), ParameterError);
}

TEST_CASE("gen_support off grid placements are uniform", "[channel]")
{
    // N = 6, d = 2, two runs: the disjoint start pairs are enumerated directly.
    std::map<std::pair<std::size_t, std::size_t>, int> counts;
    std::size_t placements = 0;
    for (std::size_t a = 0; a + 2 <= 6; ++a)
        for (std::size_t b = a + 2; b + 2 <= 6; ++b)
        {
            counts[{a, b}] = 0;
            ++placements;
        }
    RngStream rng(2, 2);
    auto p = small(6, 2, 4, GridMode::off_grid);
    const int draws = 60000;
    for (int t = 0; t < draws; ++t)
    {
        const auto s = gen_support(p, rng);
        ++counts.at({s[0], s[2]});
    }
    for (const auto &[k, c] : counts)
        CHECK(static_cast<double>(c) / draws == Approx(1.0 / static_cast<double>(placements)).epsilon(0.05));
}

TEST_CASE("gen_angular_channel", "[channel]")
{
    RngStream rng(3, 1);
    auto p = small(64, 4, 16);
    p.tap_gain = 1.0;
    const auto s = gen_support(p, rng);
    const auto ch = gen_angular_channel(p, s, rng);
    const std::set<std::size_t> set(s.begin(), s.end());
    for (Eigen::Index i = 0; i < ch.x.rows(); ++i)
        for (Eigen::Index k = 0; k < ch.x.cols(); ++k)
        {
            if (set.count(static_cast<std::size_t>(i)))
                REQUIRE(std::abs(std::abs(ch.x(i, k)) - 1.0) < 1e-12);
            else
                REQUIRE(ch.x(i, k) == Complex(0.0, 0.0));
        }

    p.tap_gain = 1.7;
    const auto ch2 = gen_angular_channel(p, s, rng);
    CHECK(oracle::sum_abs2(ch2.x) == Approx(16 * 1.7 * 1.7 * 4).epsilon(1e-12));

    auto empty = small(16, 4, 0);
    CHECK(gen_angular_channel(empty, {}, rng).x.isZero(0.0));

    // zero-mean phases
    Complex mean = 0;
    std::size_t count = 0;
    for (int t = 0; t < 10000; ++t)
    {
        const auto c = gen_angular_channel(p, s, rng);
        mean += c.x(static_cast<Eigen::Index>(s[0]), 0);
        ++count;
    }
    CHECK(std::abs(mean / static_cast<double>(count)) < 0.05 * p.tap_gain);
}

TEST_CASE("far_field_steering", "[channel]")
{
    const auto v0 = far_field_steering(0.0, 16);
    for (Eigen::Index i = 0; i < 16; ++i)
        CHECK(std::abs(v0(i) - Complex(0.25, 0.0)) < 1e-15);
    for (double th : {-1.0, -0.3, 0.77, 1.0})
        CHECK(std::abs(far_field_steering(th, 33).norm() - 1.0) < 1e-12);
}

TEST_CASE("dft codebook", "[channel]")
{
    const std::size_t n = 16;
    const auto f = dft_codebook(n);
    CHECK((f.adjoint() * f - ComplexMatrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(dft_codebook(1)(0, 0) == Complex(1.0, 0.0));

    for (std::size_t c = 0; c < n; ++c)
    {
        // column c is the steering vector at theta = -2c/N wrapped to [-1, 1)
        double theta = -2.0 * static_cast<double>(c) / n;
        theta = std::fmod(theta + 1.0 + 4.0, 2.0) - 1.0;
        const auto v = far_field_steering(theta, n);
        CHECK((f.col(static_cast<Eigen::Index>(c)) - v).cwiseAbs().maxCoeff() < 1e-12);

        const ComplexVector proj = f.adjoint() * v;
        for (Eigen::Index i = 0; i < proj.size(); ++i)
        {
            if (i == static_cast<Eigen::Index>(c))
                CHECK(std::abs(std::abs(proj(i)) - 1.0) < 1e-10);
            else
                CHECK(std::abs(proj(i)) < 1e-10);
        }
    }

    const auto sub = sub6_codebook(4, n);
    CHECK(sub.rows() == 4);
    CHECK(sub.cols() == 16);
    CHECK(std::abs(sub(3, 5) - f(3, 5)) < 1e-15);
}

TEST_CASE("near_field_steering", "[channel]")
{
    const std::size_t n = 256;
    const double lambda = wavelength(28e9);
    const double aperture = n * lambda / 2.0;
    const double rd = rayleigh_distance(aperture, lambda);
    for (double th : {-0.6, 0.0, 0.35})
    {
        const auto nf = near_field_steering(th, 1e9 * rd, n, lambda);
        CHECK(std::abs(nf.norm() - 1.0) < 1e-12);
        const auto ff = far_field_steering(th, n);
        // the symmetric array is referenced to its centre, the far-field vector to element 0
        const Complex ref = std::polar(1.0, std::numbers::pi * (n - 1.0) * th / 2.0);
        CHECK((nf - ff * ref).cwiseAbs().maxCoeff() < 1e-3);
    }
    CHECK(std::abs(near_field_steering(0.2, 3.0, n, lambda).norm() - 1.0) < 1e-12);

    // weak sparsity: a near-field user spreads over several DFT taps
    const auto v = near_field_steering(0.3, 10.0, n, lambda);
    const ComplexVector x = dft_codebook(n).adjoint() * v;
    CHECK(energy_support(x, 0.95) > 1);
}

TEST_CASE("rayleigh distance", "[channel]")
{
    CHECK(rayleigh_distance(0.5, wavelength(100e9)) == Approx(166.7).epsilon(1e-3));
    CHECK(rayleigh_distance(0.0, 0.01) == 0.0);
    CHECK(rayleigh_distance(1.37, wavelength(28e9)) == Approx(350.6).epsilon(1e-3));
}

TEST_CASE("gen_sub6_channel", "[channel]")
{
    SystemParams p = small(16, 4, 4);
    p.tap_gain = 1.0;
    CHECK(p.frequency_separation() == Approx(0.875));
    p.amplitude_ratio = 3.0;

    RngStream rng(4, 1);
    const auto s = gen_support(p, rng);
    const auto ch = gen_angular_channel(p, s, rng);
    const auto sub = gen_sub6_channel(ch, p, rng);
    CHECK(sub.gamma == Approx(0.875));
    CHECK(sub.sigma_n2 == Approx(0.875 * 0.875 / 3.0));
    CHECK(sub.sigma_n2 == Approx(0.2552).epsilon(1e-3));
    for (Eigen::Index i = 0; i < sub.x_sub.rows(); ++i)
        CHECK(sub.x_sub.row(i).norm() > 0.0);

    // E|X_sub| = gamma E[delta] g = gamma / 2 on the support, and d K sigma_n2 per zero block
    double modulus = 0.0;
    double zero_energy = 0.0;
    std::size_t entries = 0, zero_blocks = 0;
    const std::size_t zb = s[0] == 0 ? 1 : 0;
    for (int t = 0; t < 10000; ++t)
    {
        const auto x = gen_angular_channel(p, s, rng);
        const auto y = gen_sub6_channel(x, p, rng);
        for (auto i : s)
            for (Eigen::Index k = 0; k < y.x_sub.cols(); ++k)
            {
                modulus += std::abs(y.x_sub(static_cast<Eigen::Index>(i), k));
                ++entries;
            }
        zero_energy += y.x_sub.middleRows(static_cast<Eigen::Index>(zb * 4), 4).squaredNorm();
        ++zero_blocks;
    }
    CHECK(modulus / entries == Approx(0.875 / 2.0).epsilon(0.02));
    CHECK(zero_energy / zero_blocks == Approx(4 * 4 * sub.sigma_n2).epsilon(0.03));
}

TEST_CASE("gen_sub6_channel coupling of the first d_sub taps", "[channel]")
{
    SystemParams p = small(16, 4, 4);
    p.sub6_block_length = 1;
    RngStream rng(4, 2);
    const auto s = gen_support(p, rng);
    const auto x = gen_angular_channel(p, s, rng);
    const auto y = gen_sub6_channel(x, p, rng);
    // the coupled tap is Q x with |Q| <= gamma
    for (Eigen::Index k = 0; k < y.x_sub.cols(); ++k)
        CHECK(std::abs(y.x_sub(static_cast<Eigen::Index>(s[0]), k)) <= 0.875 * p.tap_gain + 1e-12);
    p.sub6_block_length = 5;
    CHECK_THROWS_AS(p.validate(), ParameterError);
}

TEST_CASE("gen_measurement", "[channel]")
{
    SystemParams p = small(32, 4, 8);
    p.pilots = 12;
    RngStream rng(5, 1);
    const auto s = gen_support(p, rng);
    const auto ch = gen_angular_channel(p, s, rng);

    p.snr_db = 300.0;
    const auto m = gen_measurement(ch, p, rng);
    CHECK(m.a.rows() == 12);
    CHECK(m.a.cols() == 32);
    CHECK(m.y.rows() == 12);
    CHECK(m.y.cols() == 4);
    const ComplexMatrix ax = m.a * ch.x;
    CHECK((m.y - ax).norm() <= 1e-6 * ax.norm());

    for (auto ref : {SnrReference::per_tap, SnrReference::received})
    {
        p.snr_db = 3.0;
        p.snr_reference = ref;
        double power = 0.0;
        for (int t = 0; t < 1000; ++t)
        {
            const auto c = gen_angular_channel(p, s, rng);
            power += gen_measurement(c, p, rng).y.squaredNorm() / (12.0 * 4.0);
        }
        const double g2 = p.tap_gain * p.tap_gain;
        CHECK(power / 1000.0 == Approx(8 * g2 + p.noise_variance()).epsilon(0.03));
    }

    AngularChannel zero = ch;
    zero.x.setZero();
    double power = 0.0;
    for (int t = 0; t < 1000; ++t)
        power += gen_measurement(zero, p, rng).y.squaredNorm() / 48.0;
    CHECK(power / 1000.0 == Approx(p.noise_variance()).epsilon(0.03));
}

TEST_CASE("gen_physical_channel", "[channel]")
{
    const std::size_t n = 64;
    const double lambda = wavelength(28e9);
    const double far = 1e9 * rayleigh_distance(n * lambda / 2.0, lambda);

    // theta on the DFT grid: column 60 sits at theta = -120/64 + 2
    const double theta = -2.0 * 60 / 64.0 + 2.0;
    std::vector<PhysicalPath> one{{theta, far, Complex(1.0, 0.0)}};
    const auto h = gen_physical_channel(one, n, 1, lambda, 0.0);
    const ComplexVector x = to_angular(h).col(0);
    Eigen::Index best;
    x.cwiseAbs().maxCoeff(&best);
    CHECK(std::abs(x(best)) > 0.99 * x.norm());

    std::vector<PhysicalPath> two{{0.2, 12.0, Complex(0.5, 0.3)}, {-0.4, 30.0, Complex(-0.1, 0.7)}};
    const auto h1 = gen_physical_channel(two, n, 8, lambda, 1e6);
    for (auto &path : two)
        path.gain *= 2.0;
    const auto h2 = gen_physical_channel(two, n, 8, lambda, 1e6);
    CHECK((h2 - 2.0 * h1).cwiseAbs().maxCoeff() == 0.0);

    std::vector<PhysicalPath> near{{0.3, 10.0, Complex(1.0, 0.0)}};
    const auto hn = gen_physical_channel(near, 256, 1, lambda, 0.0);
    const ComplexVector xn = to_angular(hn).col(0);
    CHECK(energy_support(xn, 0.95) > 1);
}
