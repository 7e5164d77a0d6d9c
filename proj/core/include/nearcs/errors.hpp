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

#ifndef NEARCS_ERRORS_HPP
#define NEARCS_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nearcs
{

// Invalid argument or scenario parameter (bad dimensions, violated invariants, ...).
class ParameterError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// A column set passed to a least-squares solve is numerically rank deficient.
class RankDeficientError : public std::runtime_error
{
public:
    RankDeficientError(std::size_t columns, std::size_t rank)
        : std::runtime_error("rank-deficient column set: " + std::to_string(columns) +
                             " columns, numerical rank " + std::to_string(rank)),
          columns_(columns), rank_(rank)
    {
    }

    std::size_t columns() const noexcept { return columns_; }
    std::size_t rank() const noexcept { return rank_; }

private:
    std::size_t columns_;
    std::size_t rank_;
};

// A closed-form coefficient was requested outside the regime where its derivation holds.
class RegimeError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Adaptive quadrature did not reach the requested tolerance.
class AccuracyError : public std::runtime_error
{
public:
    AccuracyError(const std::string &what, double estimate, double error_estimate)
        : std::runtime_error(what), estimate_(estimate), error_estimate_(error_estimate)
    {
    }

    double estimate() const noexcept { return estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double estimate_;
    double error_estimate_;
};

// Metric has no meaning for the given input (e.g. energy normalisation of a zero channel).
class UndefinedMetricError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

} // namespace nearcs

#endif
