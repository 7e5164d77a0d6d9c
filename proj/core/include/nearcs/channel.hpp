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

#ifndef NEARCS_CHANNEL_HPP
#define NEARCS_CHANNEL_HPP

#include "nearcs/numerics.hpp"

#include <cstddef>
#include <span>
#include <string>

namespace nearcs
{

inline constexpr double speed_of_light = 299792458.0;

enum class GridMode
{
    on_grid,
    off_grid
};

std::string to_string(GridMode mode);
GridMode grid_mode_from_string(const std::string &name);

// What the SNR is measured against.
enum class SnrReference
{
    per_tap, // g^2 / sigma^2
    received // S g^2 / sigma^2, the mean power of one received entry
};

std::string to_string(SnrReference ref);
SnrReference snr_reference_from_string(const std::string &name);

// Scenario scalars for one dual-band channel draw.
struct SystemParams
{
    std::size_t antennas = 256;           // mmWave array size, also the angular grid size
    std::size_t antennas_sub6 = 32;       // Sub-6GHz array size
    std::size_t subcarriers = 32;         // OFDM subcarriers (columns of X)
    std::size_t pilots = 25;              // pilot transmissions (rows of A)
    std::size_t block_length = 4;         // taps per block
    std::size_t nonzero_taps = 20;        // total nonzero rows of X
    double tap_gain = 1.7320508075688772; // modulus of every nonzero tap (sqrt 3)
    double snr_db = 10.0;
    SnrReference snr_reference = SnrReference::per_tap;
    double freq_mmwave_hz = 28e9;
    double freq_sub6_hz = 3.5e9;
    double amplitude_ratio = 3.0; // C: nonzero / zero tap variance ratio in the Sub-6GHz channel
    GridMode grid_mode = GridMode::on_grid;
    // Taps per run that keep the coupled structure in the Sub-6GHz channel; 0 means block_length.
    std::size_t sub6_block_length = 0;

    // Throws ParameterError on the first violated invariant.
    void validate() const;

    std::size_t blocks() const { return antennas / block_length; }
    std::size_t effective_sub6_block_length() const
    {
        return sub6_block_length == 0 ? block_length : sub6_block_length;
    }
    // Per-entry receiver noise variance, g^2 10^(-snr/10), times nonzero_taps
    // for the received reference.
    double noise_variance() const;
    // |f_m - f_s| / max(f_m, f_s).
    double frequency_separation() const;
};

struct AngularChannel
{
    ComplexMatrix x;      // antennas x subcarriers
    IndexSet support;     // sorted nonzero rows
    std::size_t block_length = 1;
    GridMode grid_mode = GridMode::on_grid;
};

struct SupportChannel
{
    ComplexMatrix x_sub;  // antennas x subcarriers, angular Sub-6GHz channel
    double gamma = 0.0;   // frequency separation factor
    double sigma_n2 = 0.0; // variance of the perturbation on zero taps
};

struct Measurement
{
    ComplexMatrix a;      // pilots x antennas
    ComplexMatrix y;      // pilots x subcarriers
    double sigma2 = 0.0;  // noise variance per complex entry
};

struct PhysicalPath
{
    double theta = 0.0;   // sine of the angle, in [-1, 1]
    double r = 1.0;       // distance in metres
    Complex gain{1.0, 0.0};
};

// Support made of nonzero_taps / block_length runs of block_length taps.
// On-grid runs are aligned blocks drawn without replacement; off-grid runs start
// anywhere and are uniform over all pairwise disjoint placements.
IndexSet gen_support(const SystemParams &params, RngStream &rng);

// Constant-modulus channel: g * exp(j phi) on the support, phi uniform per entry.
AngularChannel gen_angular_channel(const SystemParams &params, const IndexSet &support, RngStream &rng);

// Half-wavelength ULA response exp(-j pi n theta) / sqrt(N).
ComplexVector far_field_steering(double theta, std::size_t n);

// Exact-distance spherical-wave response of a symmetric half-wavelength ULA.
ComplexVector near_field_steering(double theta, double r, std::size_t n, double wavelength);

double rayleigh_distance(double aperture_m, double wavelength_m);

// Unitary DFT codebook, [F]_{mn} = exp(j 2 pi m n / N) / sqrt(N).
ComplexMatrix dft_codebook(std::size_t n);

// Sub-6GHz codebook: the first rows_sub6 rows of the N-point grid, same normalisation.
ComplexMatrix sub6_codebook(std::size_t rows_sub6, std::size_t n);

// Sub-6GHz angular channel coupled to x through the coefficient Q on nonzero taps
// (|Q| = gamma * delta, phase 2 pi gamma R2 delta, plus pi when R1 = -1) and
// CN(0, gamma^2 / C) perturbation everywhere else.
SupportChannel gen_sub6_channel(const AngularChannel &x, const SystemParams &params, RngStream &rng);

// A with CN(0, 1) entries, Y = A X + N with CN(0, noise_variance()) noise.
Measurement gen_measurement(const AngularChannel &x, const SystemParams &params, RngStream &rng);

// Antenna-domain multipath channel (antennas x subcarriers) built from near-field
// steering vectors, with subcarrier wavenumbers centred on the carrier.
ComplexMatrix gen_physical_channel(std::span<const PhysicalPath> paths, std::size_t antennas,
                                   std::size_t subcarriers, double wavelength, double subcarrier_spacing_hz);

// F^H H.
ComplexMatrix to_angular(const ComplexMatrix &h);

} // namespace nearcs

#endif
