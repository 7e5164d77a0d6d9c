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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nearcs
{

namespace
{

constexpr double two_pi = 2.0 * std::numbers::pi;

// k distinct values from [0, n), sorted (Floyd's algorithm).
std::vector<std::size_t> sorted_sample(std::size_t n, std::size_t k, RngStream &rng)
{
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    for (std::size_t j = n - k; j < n; ++j)
    {
        const std::size_t t = rng.uniform_index(j + 1);
        const auto pos = std::lower_bound(chosen.begin(), chosen.end(), t);
        if (pos != chosen.end() && *pos == t)
            chosen.insert(std::lower_bound(chosen.begin(), chosen.end(), j), j);
        else
            chosen.insert(pos, t);
    }
    return chosen;
}

void require(bool ok, const std::string &msg)
{
    if (!ok)
        throw ParameterError(msg);
}

} // namespace

std::string to_string(GridMode mode)
{
    return mode == GridMode::on_grid ? "on" : "off";
}

GridMode grid_mode_from_string(const std::string &name)
{
    if (name == "on" || name == "on_grid")
        return GridMode::on_grid;
    if (name == "off" || name == "off_grid")
        return GridMode::off_grid;
    throw ParameterError("unknown grid mode '" + name + "' (expected on or off)");
}

std::string to_string(SnrReference ref)
{
    return ref == SnrReference::per_tap ? "per_tap" : "received";
}

SnrReference snr_reference_from_string(const std::string &name)
{
    if (name == "per_tap")
        return SnrReference::per_tap;
    if (name == "received")
        return SnrReference::received;
    throw ParameterError("unknown SNR reference '" + name + "' (expected per_tap or received)");
}

void SystemParams::validate() const
{
    require(antennas >= 1, "antennas must be positive");
    require(antennas_sub6 >= 1, "antennas_sub6 must be positive");
    require(subcarriers >= 1, "subcarriers must be positive");
    require(pilots >= 1, "pilots must be positive");
    require(block_length >= 1, "block_length must be positive");
    require(antennas % block_length == 0, "antennas must be a multiple of block_length");
    require(nonzero_taps % block_length == 0, "nonzero_taps must be a multiple of block_length");
    require(nonzero_taps <= antennas, "nonzero_taps exceeds antennas");
    require(pilots <= antennas, "pilots exceeds antennas");
    require(std::isfinite(tap_gain) && tap_gain > 0.0, "tap_gain must be positive");
    require(std::isfinite(snr_db), "snr_db must be finite");
    require(std::isfinite(amplitude_ratio) && amplitude_ratio > 0.0, "amplitude_ratio must be positive");
    require(freq_sub6_hz > 0.0 && freq_mmwave_hz > freq_sub6_hz, "frequencies must satisfy f_m > f_s > 0");
    require(sub6_block_length <= block_length, "sub6_block_length exceeds block_length");
}

double SystemParams::noise_variance() const
{
    const double per_tap = tap_gain * tap_gain * std::pow(10.0, -snr_db / 10.0);
    return snr_reference == SnrReference::received ? static_cast<double>(nonzero_taps) * per_tap : per_tap;
}

double SystemParams::frequency_separation() const
{
    return std::abs(freq_mmwave_hz - freq_sub6_hz) / std::max(freq_mmwave_hz, freq_sub6_hz);
}

IndexSet gen_support(const SystemParams &params, RngStream &rng)
{
    params.validate();
    const std::size_t d = params.block_length;
    const std::size_t runs = params.nonzero_taps / d;
    IndexSet support;
    support.reserve(params.nonzero_taps);

    if (params.grid_mode == GridMode::on_grid)
    {
        for (std::size_t b : sorted_sample(params.blocks(), runs, rng))
            for (std::size_t t = 0; t < d; ++t)
                support.push_back(b * d + t);
        return support;
    }

    // Disjoint placements of `runs` runs of length d in N slots are in bijection with
    // `runs`-subsets of [0, N - runs*d + runs) via start_k = u_k + k (d - 1).
    const std::size_t slots = params.antennas - runs * d + runs;
    const auto u = sorted_sample(slots, runs, rng);
    for (std::size_t k = 0; k < runs; ++k)
    {
        const std::size_t start = u[k] + k * (d - 1);
        for (std::size_t t = 0; t < d; ++t)
            support.push_back(start + t);
    }
    return support;
}

AngularChannel gen_angular_channel(const SystemParams &params, const IndexSet &support, RngStream &rng)
{
    params.validate();
    require(std::is_sorted(support.begin(), support.end()) &&
                std::adjacent_find(support.begin(), support.end()) == support.end(),
            "support must be sorted and free of duplicates");
    require(support.empty() || support.back() < params.antennas, "support index out of range");

    AngularChannel ch;
    ch.x = ComplexMatrix::Zero(params.antennas, params.subcarriers);
    ch.support = support;
    ch.block_length = params.block_length;
    ch.grid_mode = params.grid_mode;
    for (std::size_t n : support)
        for (std::size_t k = 0; k < params.subcarriers; ++k)
            ch.x(n, k) = std::polar(params.tap_gain, two_pi * rng.uniform());
    return ch;
}

ComplexVector far_field_steering(double theta, std::size_t n)
{
    require(std::abs(theta) <= 1.0, "theta must lie in [-1, 1]");
    ComplexVector v(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        v(i) = std::polar(scale, -std::numbers::pi * static_cast<double>(i) * theta);
    return v;
}

ComplexVector near_field_steering(double theta, double r, std::size_t n, double wavelength)
{
    require(std::abs(theta) <= 1.0, "theta must lie in [-1, 1]");
    require(r > 0.0, "distance must be positive");
    require(wavelength > 0.0, "wavelength must be positive");
    ComplexVector v(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double s = wavelength / 2.0;
    const double k = two_pi / wavelength;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double delta = (2.0 * static_cast<double>(i) - static_cast<double>(n) + 1.0) / 2.0;
        const double ds = delta * s;
        // r_n - r, written to avoid cancellation when r is large
        const double q = ds * ds + 2.0 * r * ds * theta;
        const double dr = q / (std::sqrt(r * r + q) + r);
        v(i) = std::polar(scale, -k * dr);
    }
    return v;
}

double rayleigh_distance(double aperture_m, double wavelength_m)
{
    require(aperture_m >= 0.0 && wavelength_m > 0.0, "aperture and wavelength must be positive");
    return 2.0 * aperture_m * aperture_m / wavelength_m;
}

ComplexMatrix dft_codebook(std::size_t n)
{
    return sub6_codebook(n, n);
}

ComplexMatrix sub6_codebook(std::size_t rows_sub6, std::size_t n)
{
    require(n >= 1 && rows_sub6 >= 1, "codebook dimensions must be positive");
    ComplexMatrix f(rows_sub6, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t m = 0; m < rows_sub6; ++m)
        {
            const std::size_t e = (m * c) % n; // exact phase reduction
            f(m, c) = std::polar(scale, two_pi * static_cast<double>(e) / static_cast<double>(n));
        }
    return f;
}

SupportChannel gen_sub6_channel(const AngularChannel &x, const SystemParams &params, RngStream &rng)
{
    params.validate();
    const std::size_t n = static_cast<std::size_t>(x.x.rows());
    const std::size_t cols = static_cast<std::size_t>(x.x.cols());
    const std::size_t d = x.block_length;
    const std::size_t d_sub = params.effective_sub6_block_length();
    require(x.support.size() % d == 0, "support size must be a multiple of the block length");

    // Runs are recovered by chunking the sorted support, which is exact because
    // every run has length d and runs are disjoint.
    std::vector<char> coupled(n, 0);
    for (std::size_t i = 0; i < x.support.size(); ++i)
        if (i % d < d_sub)
            coupled[x.support[i]] = 1;

    SupportChannel out;
    out.gamma = params.frequency_separation();
    out.sigma_n2 = out.gamma * out.gamma / params.amplitude_ratio;
    out.x_sub.resize(n, cols);
    const double sd = std::sqrt(out.sigma_n2 / 2.0);
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t k = 0; k < cols; ++k)
        {
            if (coupled[row])
            {
                const double delta = rng.uniform();
                const int r1 = rng.sign();
                const int r2 = rng.sign();
                const double phase = two_pi * out.gamma * r2 * delta + (r1 < 0 ? std::numbers::pi : 0.0);
                out.x_sub(row, k) = std::polar(out.gamma * delta, phase) * x.x(row, k);
            }
            else
            {
                const double re = rng.normal();
                const double im = rng.normal();
                out.x_sub(row, k) = Complex(sd * re, sd * im);
            }
        }
    return out;
}

Measurement gen_measurement(const AngularChannel &x, const SystemParams &params, RngStream &rng)
{
    params.validate();
    require(static_cast<std::size_t>(x.x.rows()) == params.antennas, "channel rows must equal antennas");
    Measurement m;
    m.sigma2 = params.noise_variance();
    m.a = sample_complex_gaussian(params.pilots, params.antennas, 1.0, rng);
    const ComplexMatrix noise = sample_complex_gaussian(params.pilots, static_cast<std::size_t>(x.x.cols()), m.sigma2, rng);
    if (x.support.empty())
    {
        m.y = noise;
        return m;
    }
    const ComplexMatrix a_s = select_columns(m.a, x.support);
    ComplexMatrix x_s(static_cast<Eigen::Index>(x.support.size()), x.x.cols());
    for (std::size_t i = 0; i < x.support.size(); ++i)
        x_s.row(static_cast<Eigen::Index>(i)) = x.x.row(static_cast<Eigen::Index>(x.support[i]));
    m.y = a_s * x_s + noise;
    return m;
}

ComplexMatrix gen_physical_channel(std::span<const PhysicalPath> paths, std::size_t antennas,
                                   std::size_t subcarriers, double wavelength, double subcarrier_spacing_hz)
{
    require(!paths.empty(), "at least one path is required");
    require(antennas >= 1 && subcarriers >= 1, "dimensions must be positive");
    const double fc = speed_of_light / wavelength;
    const double prefactor = std::sqrt(static_cast<double>(antennas) / static_cast<double>(paths.size()));
    const auto centre = static_cast<double>((subcarriers + 1) / 2);

    ComplexMatrix h = ComplexMatrix::Zero(antennas, subcarriers);
    for (const auto &path : paths)
    {
        const ComplexVector b = near_field_steering(path.theta, path.r, antennas, wavelength);
        for (std::size_t k = 0; k < subcarriers; ++k)
        {
            const double freq = fc + (static_cast<double>(k) - centre) * subcarrier_spacing_hz;
            const double wavenumber = two_pi * freq / speed_of_light;
            const Complex w = prefactor * path.gain * std::polar(1.0, -wavenumber * path.r);
            h.col(static_cast<Eigen::Index>(k)) += w * b;
        }
    }
    return h;
}

ComplexMatrix to_angular(const ComplexMatrix &h)
{
    return dft_codebook(static_cast<std::size_t>(h.rows())).adjoint() * h;
}

} // namespace nearcs
