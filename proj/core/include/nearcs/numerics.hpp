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

#ifndef NEARCS_NUMERICS_HPP
#define NEARCS_NUMERICS_HPP

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace nearcs
{

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Ordered set of row (tap) indices.
using IndexSet = std::vector<std::size_t>;

// Deterministic pseudo-random stream keyed by (master_seed, stream_id).
//
// The generator is xoshiro256** seeded through splitmix64, and every variate is
// derived with explicit arithmetic, so a given key reproduces the same sequence
// independently of the standard library in use.
class RngStream
{
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept;

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    // Standard normal (Box-Muller, pairs cached).
    double normal() noexcept;

    // Gamma(shape, rate = 1), Marsaglia-Tsang.
    double gamma(double shape);

    // Uniform integer in [0, n), unbiased.
    std::size_t uniform_index(std::size_t n);

    // +1 or -1 with equal probability.
    int sign() noexcept;

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::array<std::uint64_t, 4> state_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Combines integer keys (experiment, sweep point, trial, component, ...) into one stream id.
std::uint64_t derive_stream_id(std::initializer_list<std::uint64_t> keys) noexcept;

// Matrix with i.i.d. circularly-symmetric CN(0, variance) entries, filled column-major.
ComplexMatrix sample_complex_gaussian(std::size_t rows, std::size_t cols, double variance, RngStream &rng);

ComplexMatrix conj_transpose(const ComplexMatrix &m);

double frobenius_norm(const ComplexMatrix &m);

// Columns of `a` selected by `columns`, in the given order.
ComplexMatrix select_columns(const ComplexMatrix &a, std::span<const std::size_t> columns);

// Relative threshold on |R_ii| below which a column set counts as rank deficient.
inline constexpr double rank_tolerance = 1e-10;

// argmin_X ||Y - A_sub X||_F through a Householder QR of A_sub.
// Throws RankDeficientError when a diagonal entry of R falls below
// rank_tolerance times the largest one, and ParameterError on shape mismatch
// or when A_sub has more columns than rows.
ComplexMatrix least_squares(const ComplexMatrix &a_sub, const ComplexMatrix &y);

// Pseudo-inverse solution A^+ Y: least squares for tall A, minimum norm for wide A.
ComplexMatrix pseudo_inverse_solve(const ComplexMatrix &a, const ComplexMatrix &y);

} // namespace nearcs

#endif
