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

#ifndef NEARCS_THEORY_HPP
#define NEARCS_THEORY_HPP

#include "nearcs/numerics.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nearcs
{

// ---- special functions ----

double bessel_i0(double x);
double bessel_i0_scaled(double x); // exp(-x) I0(x)

double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);
double regularized_beta(double x, double a, double b);

// CDF and survival function of the noncentral chi-square with `dof` degrees of freedom.
double noncentral_chi2_cdf(double x, double dof, double lambda);
double noncentral_chi2_sf(double x, double dof, double lambda);

// First-order Marcum Q function.
double marcum_q1(double a, double b);

// 1 - (exp(-(a^2 - b^2)/2) - exp(-(a^2 + b^2)/2)) / 2, the small-b estimate.
double marcum_q1_smallb_approx(double a, double b);

// Tricomi's confluent hypergeometric U(a, b, z) for a > 0, z > 0, from
// U = (1/Gamma(a)) int_0^inf exp(-z s) s^(a-1) (1+s)^(b-a-1) ds.
double hyperu(double a, double b, double z);
double log_hyperu(double a, double b, double z);

// W_{kappa,mu}(z) through the integral representation of Tricomi's U.
// Requires z > 0 and |mu| - kappa + 1/2 > 0. Throws AccuracyError when the
// quadrature does not converge.
double whittaker_w(double kappa, double mu, double z);
double log_whittaker_w(double kappa, double mu, double z);

// ---- selection statistics ----

// Correlation statistics of one nonzero and one zero tap (or block).
struct SelectionDistParams
{
    std::size_t pilots = 100;
    std::size_t nonzero_taps = 5;
    double tap_gain = 1.0;
    double noise_variance = 1.0;
    std::size_t block_length = 2;
    std::size_t subcarriers = 4;

    void validate() const;

    // Single tap, one subcarrier; per real dimension.
    double nonzero_tap_variance() const; // (M/2)((S-1) g^2 + sigma^2)
    double zero_tap_variance() const;    // (M/2)(S g^2 + sigma^2)
    double mean_amplitude() const;       // M g

    // Blocks; complex variance of one correlation entry.
    double nonzero_block_variance() const; // M((S-1) g^2 + sigma^2)
    double zero_block_variance() const;    // M(S g^2 + sigma^2)
    double block_dof() const;              // 2 d K
    double block_noncentrality() const;    // 2 d K M^2 g^2 / sigma_nz^2
};

struct GammaParams
{
    double shape = 1.0;
    double rate = 1.0;
};

struct PatnaikFit
{
    double rho = 1.0;
    double tau = 1.0;
};

// Scaled central chi-square rho * chi2(tau) matching mean and variance of chi2'(n, lambda).
PatnaikFit patnaik(double n, double lambda);

// |a_i^H y|^2 for a nonzero tap / a zero tap.
double single_tap_nonzero_cdf(double x, const SelectionDistParams &p);
double single_tap_zero_cdf(double x, const SelectionDistParams &p);

// T = T1 - T2 (nonzero minus zero tap statistic).
double pdf_t_single(double t, const SelectionDistParams &p);
double cdf_t_single(double t, const SelectionDistParams &p);
Complex cf_t_single(double omega, const SelectionDistParams &p);

// ||A_i^H Y||_F^2 for a nonzero block (exact noncentral law) / a zero block.
double block_nonzero_cdf(double x, const SelectionDistParams &p);
double block_zero_cdf(double x, const SelectionDistParams &p);

// Gamma laws of the block statistics: Patnaik fit for the nonzero block, exact for the zero block.
struct BlockGammaPair
{
    GammaParams nonzero;
    GammaParams zero;
};
BlockGammaPair block_gamma_params(const SelectionDistParams &p);

// Density and CDF of X1 - X2 with X1 ~ Gamma(g1), X2 ~ Gamma(g2) independent.
double gamma_diff_pdf(double t, const GammaParams &g1, const GammaParams &g2);
double gamma_diff_cdf(double t, const GammaParams &g1, const GammaParams &g2);
GammaParams validate_gamma(const GammaParams &g);

enum class SelectionModel
{
    single_tap,
    block
};

// P_e = p1 (1 - p2) P(T < dv) + p2 (1 - p1) P(T < -dv), dv = v(p2) - v(p1).
double selection_error_probability(double delta_v, double p1, double p2, SelectionModel model,
                                   const SelectionDistParams &params);

// P_e(dv) - P_e(0), computed from the density near zero without cancellation.
double selection_error_excess(double delta_v, double p1, double p2, SelectionModel model,
                              const SelectionDistParams &params);

struct OptimalPriorRow
{
    double p = 0.5;
    double delta_p = 0.0;
    double coefficient = 0.0;    // D used for the theoretical dv
    double dv_theory = 0.0;
    double dv_best = 0.0;        // grid search plus golden-section refinement
    double pe_zero = 0.0;        // P_e at dv = 0
    double pe_theory = 0.0;
    double pe_best = 0.0;
    double relative_gap = 0.0;   // (pe_theory - pe_best) / pe_best
    double excess_lost = 0.0;    // (pe_theory - pe_best) / (pe_zero - pe_best), 0 when no gain is possible
};

// For each p in p_values and each dp in delta_p_values, compares P_e at the
// theoretical dv = D (logit(p) - logit(p + dp)) against the best dv found by search.
// D is coefficient_single_measurement (single_tap) or coefficient_block (block), times coefficient_scale.
std::vector<OptimalPriorRow> validate_optimal_prior(SelectionModel model, const SelectionDistParams &params,
                                                    std::span<const double> p_values,
                                                    std::span<const double> delta_p_values,
                                                    double coefficient_scale = 1.0);

// ---- samplers and goodness of fit ----

struct StatisticSamples
{
    std::vector<double> nonzero;
    std::vector<double> zero;
};

// Model sampler: independent Gaussian correlations as in the derivation.
StatisticSamples sample_single_tap_model(const SelectionDistParams &p, std::size_t count, RngStream &rng);
StatisticSamples sample_block_model(const SelectionDistParams &p, std::size_t count, RngStream &rng);

// Pipeline sampler: constant-modulus channel from the channel module, Gaussian pilots,
// probe columns rescaled to squared norm M. Exact in law for a single tap.
StatisticSamples sample_single_tap_pipeline(const SelectionDistParams &p, std::size_t count, RngStream &rng);
StatisticSamples sample_block_pipeline(const SelectionDistParams &p, std::size_t count, RngStream &rng);

std::vector<double> sample_gamma_diff(const GammaParams &g1, const GammaParams &g2, std::size_t count, RngStream &rng);

// sup |F_n - F|; sorts `samples` in place.
double ks_statistic(std::vector<double> &samples, const std::function<double(double)> &cdf);

// CDF tabulated from a density by cumulative quadrature outward from an anchor
// with known CDF value, linearly interpolated. Outside [lo, hi] it clamps to the end values.
class TabulatedCdf
{
public:
    TabulatedCdf(const std::function<double(double)> &pdf, double anchor, double cdf_at_anchor, double lo, double hi,
                 std::size_t intervals);
    // Tabulates a CDF that is cheap enough to evaluate at every grid point.
    static TabulatedCdf from_cdf(const std::function<double(double)> &cdf, double lo, double hi,
                                 std::size_t intervals);

    double operator()(double x) const;

private:
    TabulatedCdf() = default;

    std::vector<double> x_;
    std::vector<double> f_;
};

// One line of the distribution validation report. `value` is a KS statistic,
// |integral - 1| for normalization checks, the largest relative error of the
// Patnaik moment identities, or the sup gap between exact and Patnaik CDFs.
struct DistributionCheck
{
    std::string family;
    std::string name;
    std::size_t samples = 0;
    double value = 0.0;
};

// Empirical-versus-theoretical checks for the single-tap statistics (model and
// pipeline samplers), T = T1 - T2, the block statistics with their Patnaik
// fit, and the Gamma difference. The pipeline sampler draws `pipeline_samples`.
std::vector<DistributionCheck> validate_distributions(const SelectionDistParams &params, std::size_t samples,
                                                      std::size_t pipeline_samples, std::uint64_t seed);

} // namespace nearcs

#endif
