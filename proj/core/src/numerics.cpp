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

#include "nearcs/numerics.hpp"
#include "nearcs/errors.hpp"

#include <cmath>
#include <numbers>

namespace nearcs
{

namespace
{

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t &x) noexcept
{
    std::uint64_t z = (x += golden_gamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
    return (x << k) | (x >> (64 - k));
}

} // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id)
{
    std::uint64_t mix = master_seed;
    std::uint64_t key = splitmix64(mix) ^ stream_id;
    std::uint64_t seeder = splitmix64(key);
    for (auto &word : state_)
        word = splitmix64(seeder);
    // xoshiro must not start from the all-zero state.
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
        state_[0] = golden_gamma;
}

std::uint64_t RngStream::next_u64() noexcept
{
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() noexcept
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

double RngStream::gamma(double shape)
{
    if (!(shape > 0.0))
        throw ParameterError("gamma shape must be positive");
    if (shape < 1.0)
    {
        // Boost to shape + 1 and rescale by U^(1/shape).
        const double u = 1.0 - uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;)
    {
        double x;
        double v;
        do
        {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = 1.0 - uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x)
            return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

std::size_t RngStream::uniform_index(std::size_t n)
{
    if (n == 0)
        throw ParameterError("uniform_index over an empty range");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do
    {
        draw = next_u64();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % bound);
}

int RngStream::sign() noexcept
{
    return (next_u64() >> 63) != 0 ? 1 : -1;
}

std::uint64_t derive_stream_id(std::initializer_list<std::uint64_t> keys) noexcept
{
    std::uint64_t h = 0x6A09E667F3BCC909ULL;
    for (auto key : keys)
    {
        std::uint64_t x = h ^ key;
        h = splitmix64(x);
    }
    return h;
}

ComplexMatrix sample_complex_gaussian(std::size_t rows, std::size_t cols, double variance, RngStream &rng)
{
    if (!(variance >= 0.0))
        throw ParameterError("complex Gaussian variance must be non-negative");
    ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const double scale = std::sqrt(0.5 * variance);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
        {
            const double re = rng.normal();
            const double im = rng.normal();
            m(r, c) = Complex(scale * re, scale * im);
        }
    return m;
}

ComplexMatrix conj_transpose(const ComplexMatrix &m)
{
    return m.adjoint();
}

double frobenius_norm(const ComplexMatrix &m)
{
    return m.norm();
}

ComplexMatrix select_columns(const ComplexMatrix &a, std::span<const std::size_t> columns)
{
    ComplexMatrix out(a.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j)
    {
        if (columns[j] >= static_cast<std::size_t>(a.cols()))
            throw ParameterError("column index out of range");
        out.col(static_cast<Eigen::Index>(j)) = a.col(static_cast<Eigen::Index>(columns[j]));
    }
    return out;
}

ComplexMatrix least_squares(const ComplexMatrix &a_sub, const ComplexMatrix &y)
{
    if (a_sub.rows() != y.rows())
        throw ParameterError("least_squares: row count of A and Y differ");
    const auto n = a_sub.cols();
    if (n == 0)
        return ComplexMatrix::Zero(0, y.cols());
    if (a_sub.rows() < n)
        throw RankDeficientError(static_cast<std::size_t>(n), static_cast<std::size_t>(a_sub.rows()));

    Eigen::HouseholderQR<ComplexMatrix> qr(a_sub);
    const auto &packed = qr.matrixQR();
    double largest = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        largest = std::max(largest, std::abs(packed(i, i)));
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (largest > 0.0 && std::abs(packed(i, i)) >= rank_tolerance * largest)
            ++rank;
    if (rank < static_cast<std::size_t>(n))
        throw RankDeficientError(static_cast<std::size_t>(n), rank);
    return qr.solve(y);
}

ComplexMatrix pseudo_inverse_solve(const ComplexMatrix &a, const ComplexMatrix &y)
{
    if (a.rows() != y.rows())
        throw ParameterError("pseudo_inverse_solve: row count of A and Y differ");
    Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(a);
    return cod.solve(y);
}

} // namespace nearcs
