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
#include "nearcs/channel.hpp"
#include "nearcs/errors.hpp"
#include "nearcs/quadrature.hpp"
#include "nearcs/sideinfo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nearcs
{

namespace
{

constexpr double eps = 1e-16;
constexpr double tiny = 1e-300;
constexpr int max_iterations = 100000;

// exp(a ln x - x - lgamma(a)), the common prefactor of the incomplete gamma functions.
double gamma_prefactor(double a, double x)
{
    return std::exp(a * std::log(x) - x - std::lgamma(a));
}

double gamma_series(double a, double x)
{
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < max_iterations; ++n)
    {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * eps)
            return sum * gamma_prefactor(a, x);
    }
    throw AccuracyError("incomplete gamma series did not converge", sum * gamma_prefactor(a, x), std::abs(del));
}

double gamma_continued_fraction(double a, double x)
{
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_iterations; ++i)
    {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps)
            return gamma_prefactor(a, x) * h;
    }
    throw AccuracyError("incomplete gamma continued fraction did not converge", gamma_prefactor(a, x) * h, 0.0);
}

double beta_continued_fraction(double a, double b, double x)
{
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < max_iterations; ++m)
    {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps)
            return h;
    }
    throw AccuracyError("incomplete beta continued fraction did not converge", h, 0.0);
}

// y^a e^{-y} / Gamma(a + 1)
double gamma_step(double a, double y)
{
    return std::exp(a * std::log(y) - y - std::lgamma(a + 1.0));
}

struct PoissonRange
{
    long lo;
    long hi;
};

PoissonRange poisson_range(double mean)
{
    const double centre = std::floor(mean);
    const double span = std::ceil(12.0 * std::sqrt(mean) + 30.0);
    return {static_cast<long>(std::max(0.0, centre - span)), static_cast<long>(centre + span)};
}

double poisson_weight(double mean, long j)
{
    if (mean == 0.0)
        return j == 0 ? 1.0 : 0.0;
    return std::exp(-mean + static_cast<double>(j) * std::log(mean) - std::lgamma(static_cast<double>(j) + 1.0));
}

double log1p_exp(double u)
{
    return u > 30.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

double golden_minimize(const std::function<double(double)> &f, double lo, double hi, int iterations)
{
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iterations; ++i)
    {
        if (fc < fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

double logit(double p)
{
    return std::log(p / (1.0 - p));
}

QuadratureOptions tight()
{
    QuadratureOptions o;
    o.abs_tol = 0.0;
    o.rel_tol = 1e-11;
    o.max_subdivisions = 20000;
    return o;
}

// Signed integral of f over [0, x].
double integrate_from_zero(const std::function<double(double)> &f, double x)
{
    if (x == 0.0)
        return 0.0;
    QuadratureOptions o;
    o.abs_tol = 1e-300;
    o.rel_tol = 1e-12;
    o.max_subdivisions = 20000;
    // Pieces [4^(k-1), 4^k] so a narrow density far from zero is not stepped over.
    const double end = std::abs(x);
    double total = 0.0;
    double error = 0.0;
    bool converged = true;
    for (double a = 0.0, b = std::min(1.0, end); a < end; a = b, b = std::min(4.0 * b, end))
    {
        const auto r = x > 0.0 ? integrate(f, a, b, o) : integrate(f, -b, -a, o);
        total += r.value;
        error += r.abs_error;
        converged = converged && r.converged;
    }
    if (!converged)
        throw AccuracyError("density integral did not converge", total, error);
    return x > 0.0 ? total : -total;
}

} // namespace

// ---- special functions ----

double bessel_i0_scaled(double x)
{
    if (x < 0.0)
        throw ParameterError("bessel_i0 needs x >= 0");
    if (x <= 30.0)
    {
        const double q = x * x / 4.0;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 500; ++k)
        {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < sum * 1e-17)
                break;
        }
        return sum * std::exp(-x);
    }
    // Asymptotic series: sum_k prod_{j<=k} (2j-1)^2 / (k! (8x)^k)
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k)
    {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (k * 8.0 * x);
        if (next > term)
            break;
        term = next;
        sum += term;
        if (term < sum * 1e-17)
            break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double bessel_i0(double x)
{
    if (x < 0.0)
        throw ParameterError("bessel_i0 needs x >= 0");
    if (x <= 30.0)
        return bessel_i0_scaled(x) * std::exp(x);
    return std::exp(x) * bessel_i0_scaled(x);
}

double regularized_gamma_p(double a, double x)
{
    if (!(a > 0.0) || x < 0.0)
        throw ParameterError("regularized_gamma_p needs a > 0 and x >= 0");
    if (x == 0.0)
        return 0.0;
    if (std::isinf(x))
        return 1.0;
    return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x)
{
    if (!(a > 0.0) || x < 0.0)
        throw ParameterError("regularized_gamma_q needs a > 0 and x >= 0");
    if (x == 0.0)
        return 1.0;
    if (std::isinf(x))
        return 0.0;
    return x < a + 1.0 ? 1.0 - gamma_series(a, x) : gamma_continued_fraction(a, x);
}

double regularized_beta(double x, double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0))
        throw ParameterError("regularized_beta needs a, b > 0");
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                               b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * beta_continued_fraction(a, b, x) / a;
    return 1.0 - bt * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double noncentral_chi2_cdf(double x, double dof, double lambda)
{
    if (!(dof > 0.0) || lambda < 0.0)
        throw ParameterError("noncentral chi-square needs dof > 0 and lambda >= 0");
    if (x <= 0.0)
        return 0.0;
    const double y = x / 2.0;
    const double h = lambda / 2.0;
    const double a0 = dof / 2.0;
    const auto range = poisson_range(h);
    // P(a, y) = P(a + 1, y) + y^a e^{-y} / Gamma(a + 1): downward recursion only adds terms.
    double pa = regularized_gamma_p(a0 + static_cast<double>(range.hi), y);
    double sum = 0.0;
    for (long j = range.hi; j >= range.lo; --j)
    {
        sum += poisson_weight(h, j) * pa;
        if (j > range.lo)
            pa += gamma_step(a0 + static_cast<double>(j - 1), y);
    }
    return std::min(1.0, sum);
}

double noncentral_chi2_sf(double x, double dof, double lambda)
{
    if (!(dof > 0.0) || lambda < 0.0)
        throw ParameterError("noncentral chi-square needs dof > 0 and lambda >= 0");
    if (x <= 0.0)
        return 1.0;
    const double y = x / 2.0;
    const double h = lambda / 2.0;
    const double a0 = dof / 2.0;
    const auto range = poisson_range(h);
    // Q(a + 1, y) = Q(a, y) + y^a e^{-y} / Gamma(a + 1): upward recursion only adds terms.
    double qa = regularized_gamma_q(a0 + static_cast<double>(range.lo), y);
    double sum = 0.0;
    for (long j = range.lo; j <= range.hi; ++j)
    {
        sum += poisson_weight(h, j) * qa;
        qa += gamma_step(a0 + static_cast<double>(j), y);
    }
    return std::min(1.0, sum);
}

double marcum_q1(double a, double b)
{
    if (a < 0.0 || b < 0.0)
        throw ParameterError("marcum_q1 needs a, b >= 0");
    if (b == 0.0)
        return 1.0;
    return noncentral_chi2_sf(b * b, 2.0, a * a);
}

double marcum_q1_smallb_approx(double a, double b)
{
    if (a < 0.0 || b < 0.0)
        throw ParameterError("marcum_q1_smallb_approx needs a, b >= 0");
    return 1.0 - 0.5 * (std::exp(-(a * a - b * b) / 2.0) - std::exp(-(a * a + b * b) / 2.0));
}

double log_hyperu(double a, double b, double z)
{
    if (!(a > 0.0) || !(z > 0.0))
        throw ParameterError("hyperu needs a > 0 and z > 0");
    const double c = b - a - 1.0;
    // Integrand after s = e^u.
    auto logh = [&](double u) { return a * u + c * log1p_exp(u) - z * std::exp(u); };

    // Every stationary point lies in [lo, hi]: below lo the log-integrand increases, above hi it decreases.
    double lo = std::log(a / (2.0 * z));
    if (c < 0.0)
    {
        const double q = a / (2.0 * -c);
        if (q < 1.0)
            lo = std::min(lo, std::log(q / (1.0 - q)));
    }
    lo -= 1.0;
    const double hi = std::log(std::max({a, b - 1.0, 1e-300}) / z) + 1.0;

    const int grid = 400;
    double best_u = lo, best = logh(lo);
    for (int i = 1; i <= grid; ++i)
    {
        const double u = lo + (hi - lo) * i / grid;
        const double v = logh(u);
        if (v > best)
        {
            best = v;
            best_u = u;
        }
    }
    const double h = (hi - lo) / grid;
    best_u = golden_minimize([&](double u) { return -logh(u); }, best_u - h, best_u + h, 80);
    best = std::max(best, logh(best_u));

    double left = lo, step = 1.0;
    while (logh(left) > best - 70.0)
    {
        left -= step;
        step *= 1.6;
    }
    double right = hi;
    step = 1.0;
    while (logh(right) > best - 70.0)
    {
        right += step;
        step *= 1.6;
    }

    auto f = [&](double u) { return std::exp(logh(u) - best); };
    const auto o = tight();
    const auto r1 = integrate(f, left, best_u, o);
    const auto r2 = integrate(f, best_u, right, o);
    const double value = r1.value + r2.value;
    if (!r1.converged || !r2.converged)
        throw AccuracyError("hypergeometric U quadrature did not converge", value, r1.abs_error + r2.abs_error);
    return best + std::log(value) - std::lgamma(a);
}

double hyperu(double a, double b, double z)
{
    return std::exp(log_hyperu(a, b, z));
}

double log_whittaker_w(double kappa, double mu, double z)
{
    if (!(z > 0.0))
        throw ParameterError("whittaker_w needs z > 0");
    const double m = std::abs(mu);
    const double a = m - kappa + 0.5;
    if (!(a > 0.0))
        throw ParameterError("whittaker_w needs |mu| - kappa + 1/2 > 0");
    return -z / 2.0 + (m + 0.5) * std::log(z) + log_hyperu(a, 1.0 + 2.0 * m, z);
}

double whittaker_w(double kappa, double mu, double z)
{
    return std::exp(log_whittaker_w(kappa, mu, z));
}

// ---- selection statistics ----

void SelectionDistParams::validate() const
{
    if (pilots == 0 || nonzero_taps == 0 || block_length == 0 || subcarriers == 0)
        throw ParameterError("selection parameters must be positive");
    if (!(tap_gain > 0.0) || !(noise_variance >= 0.0))
        throw ParameterError("tap_gain must be positive and noise_variance non-negative");
    if (!(nonzero_tap_variance() > 0.0))
        throw ParameterError("nonzero-tap correlation variance must be positive");
}

double SelectionDistParams::nonzero_tap_variance() const
{
    return nonzero_block_variance() / 2.0;
}

double SelectionDistParams::zero_tap_variance() const
{
    return zero_block_variance() / 2.0;
}

double SelectionDistParams::mean_amplitude() const
{
    return static_cast<double>(pilots) * tap_gain;
}

double SelectionDistParams::nonzero_block_variance() const
{
    const double g2 = tap_gain * tap_gain;
    return static_cast<double>(pilots) * ((static_cast<double>(nonzero_taps) - 1.0) * g2 + noise_variance);
}

double SelectionDistParams::zero_block_variance() const
{
    const double g2 = tap_gain * tap_gain;
    return static_cast<double>(pilots) * (static_cast<double>(nonzero_taps) * g2 + noise_variance);
}

double SelectionDistParams::block_dof() const
{
    return 2.0 * static_cast<double>(block_length * subcarriers);
}

double SelectionDistParams::block_noncentrality() const
{
    const double m = mean_amplitude();
    return block_dof() * m * m / nonzero_block_variance();
}

PatnaikFit patnaik(double n, double lambda)
{
    if (!(n > 0.0) || lambda < 0.0)
        throw ParameterError("patnaik needs n > 0 and lambda >= 0");
    return {(n + 2.0 * lambda) / (n + lambda), (n + lambda) * (n + lambda) / (n + 2.0 * lambda)};
}

double single_tap_nonzero_cdf(double x, const SelectionDistParams &p)
{
    p.validate();
    const double s1 = p.nonzero_tap_variance();
    const double m = p.mean_amplitude();
    return x <= 0.0 ? 0.0 : noncentral_chi2_cdf(x / s1, 2.0, m * m / s1);
}

double single_tap_zero_cdf(double x, const SelectionDistParams &p)
{
    p.validate();
    return x <= 0.0 ? 0.0 : -std::expm1(-x / (2.0 * p.zero_tap_variance()));
}

double pdf_t_single(double t, const SelectionDistParams &p)
{
    p.validate();
    const double s1 = p.nonzero_tap_variance();
    const double s2 = p.zero_tap_variance();
    const double m2 = p.mean_amplitude() * p.mean_amplitude();
    const double log_base = t / (2.0 * s2) - m2 / (2.0 * (s1 + s2)) - std::log(2.0 * (s1 + s2));
    if (t <= 0.0)
        return std::exp(log_base);
    const double alpha = std::sqrt(m2 / s1 * s2 / (s1 + s2));
    const double c = (s1 + s2) / (s1 * s2);
    const double q = marcum_q1(alpha, std::sqrt(c * t));
    if (q <= 0.0)
        return 0.0;
    return std::exp(log_base + std::log(q));
}

double cdf_t_single(double t, const SelectionDistParams &p)
{
    p.validate();
    const double s1 = p.nonzero_tap_variance();
    const double s2 = p.zero_tap_variance();
    const double m2 = p.mean_amplitude() * p.mean_amplitude();
    const double at_zero = s2 / (s1 + s2) * std::exp(-m2 / (2.0 * (s1 + s2)));
    if (t <= 0.0)
        return at_zero * std::exp(t / (2.0 * s2));
    return std::min(1.0, at_zero + integrate_from_zero([&](double u) { return pdf_t_single(u, p); }, t));
}

Complex cf_t_single(double omega, const SelectionDistParams &p)
{
    p.validate();
    const double s1 = p.nonzero_tap_variance();
    const double s2 = p.zero_tap_variance();
    const double m2 = p.mean_amplitude() * p.mean_amplitude();
    const Complex j(0.0, 1.0);
    const Complex d1 = 1.0 - 2.0 * j * omega * s1;
    const Complex d2 = 1.0 + 2.0 * j * omega * s2;
    return std::exp(j * omega * m2 / d1) / (d1 * d2);
}

double block_nonzero_cdf(double x, const SelectionDistParams &p)
{
    p.validate();
    return x <= 0.0 ? 0.0 : noncentral_chi2_cdf(2.0 * x / p.nonzero_block_variance(), p.block_dof(), p.block_noncentrality());
}

double block_zero_cdf(double x, const SelectionDistParams &p)
{
    p.validate();
    return x <= 0.0 ? 0.0 : regularized_gamma_p(p.block_dof() / 2.0, x / p.zero_block_variance());
}

BlockGammaPair block_gamma_params(const SelectionDistParams &p)
{
    p.validate();
    const auto fit = patnaik(p.block_dof(), p.block_noncentrality());
    BlockGammaPair out;
    out.nonzero = {fit.tau / 2.0, 1.0 / (fit.rho * p.nonzero_block_variance())};
    out.zero = {p.block_dof() / 2.0, 1.0 / p.zero_block_variance()};
    return out;
}

GammaParams validate_gamma(const GammaParams &g)
{
    if (!(g.shape > 0.0) || !(g.rate > 0.0))
        throw ParameterError("Gamma shape and rate must be positive");
    return g;
}

double gamma_diff_pdf(double t, const GammaParams &g1, const GammaParams &g2)
{
    validate_gamma(g1);
    validate_gamma(g2);
    const double a1 = g1.shape, b1 = g1.rate, a2 = g2.shape, b2 = g2.rate;
    const double asum = a1 + a2;
    if (t == 0.0)
    {
        if (asum <= 1.0)
            return std::numeric_limits<double>::infinity();
        return std::exp(a1 * std::log(b1) + a2 * std::log(b2) + std::lgamma(asum - 1.0) - std::lgamma(a1) -
                        std::lgamma(a2) - (asum - 1.0) * std::log(b1 + b2));
    }
    const double log_c = a1 * std::log(b1) + a2 * std::log(b2) - asum / 2.0 * std::log(b1 + b2);
    const double mu = (asum - 1.0) / 2.0;
    const double s = std::abs(t);
    double log_f;
    if (t > 0.0)
        log_f = log_c - std::lgamma(a1) + (asum / 2.0 - 1.0) * std::log(s) - (b1 - b2) * s / 2.0 +
                log_whittaker_w((a1 - a2) / 2.0, mu, (b1 + b2) * s);
    else
        log_f = log_c - std::lgamma(a2) + (asum / 2.0 - 1.0) * std::log(s) - (b2 - b1) * s / 2.0 +
                log_whittaker_w((a2 - a1) / 2.0, mu, (b1 + b2) * s);
    return std::exp(log_f);
}

double gamma_diff_cdf(double t, const GammaParams &g1, const GammaParams &g2)
{
    validate_gamma(g1);
    validate_gamma(g2);
    // P(X1 < X2) = I_{b1 / (b1 + b2)}(a1, a2)
    const double at_zero = regularized_beta(g1.rate / (g1.rate + g2.rate), g1.shape, g2.shape);
    const double v = at_zero + integrate_from_zero([&](double u) { return gamma_diff_pdf(u, g1, g2); }, t);
    return std::clamp(v, 0.0, 1.0);
}

namespace
{

std::function<double(double)> density_of(SelectionModel model, const SelectionDistParams &params)
{
    if (model == SelectionModel::single_tap)
        return [params](double t) { return pdf_t_single(t, params); };
    const auto g = block_gamma_params(params);
    return [g](double t) { return gamma_diff_pdf(t, g.nonzero, g.zero); };
}

double cdf_at_zero(SelectionModel model, const SelectionDistParams &params)
{
    if (model == SelectionModel::single_tap)
        return cdf_t_single(0.0, params);
    const auto g = block_gamma_params(params);
    return regularized_beta(g.nonzero.rate / (g.nonzero.rate + g.zero.rate), g.nonzero.shape, g.zero.shape);
}

void check_probabilities(double p1, double p2)
{
    if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0))
        throw ParameterError("probabilities must lie in [0, 1]");
}

} // namespace

double selection_error_excess(double delta_v, double p1, double p2, SelectionModel model,
                              const SelectionDistParams &params)
{
    check_probabilities(p1, p2);
    const auto f = density_of(model, params);
    return p1 * (1.0 - p2) * integrate_from_zero(f, delta_v) + p2 * (1.0 - p1) * integrate_from_zero(f, -delta_v);
}

double selection_error_probability(double delta_v, double p1, double p2, SelectionModel model,
                                   const SelectionDistParams &params)
{
    check_probabilities(p1, p2);
    const double f0 = cdf_at_zero(model, params);
    const double base = (p1 * (1.0 - p2) + p2 * (1.0 - p1)) * f0;
    return std::clamp(base + selection_error_excess(delta_v, p1, p2, model, params), 0.0, 1.0);
}

std::vector<OptimalPriorRow> validate_optimal_prior(SelectionModel model, const SelectionDistParams &params,
                                                    std::span<const double> p_values,
                                                    std::span<const double> delta_p_values, double coefficient_scale)
{
    params.validate();
    if (!(coefficient_scale > 0.0))
        throw ParameterError("coefficient scale must be positive");

    DParams dp;
    dp.pilots = params.pilots;
    dp.nonzero_taps = params.nonzero_taps;
    dp.tap_gain = params.tap_gain;
    dp.noise_variance = params.noise_variance;
    dp.mode = CoefficientMode::exact;
    double coefficient;
    if (model == SelectionModel::single_tap)
    {
        dp.block_length = 1;
        dp.effective_subcarriers = 1;
        coefficient = coefficient_single_measurement(dp);
    }
    else
    {
        dp.block_length = params.block_length;
        dp.effective_subcarriers = params.subcarriers;
        coefficient = coefficient_block(dp);
    }
    coefficient *= coefficient_scale;

    const auto f = density_of(model, params);
    const double f0 = cdf_at_zero(model, params);

    std::vector<OptimalPriorRow> rows;
    for (double p : p_values)
        for (double dpv : delta_p_values)
        {
            const double p1 = p + dpv;
            const double p2 = p;
            if (!(p2 > 0.0 && p2 < 1.0 && p1 > 0.0 && p1 < 1.0))
                throw ParameterError("p and p + delta_p must lie in (0, 1)");

            auto excess = [&](double dv) {
                return p1 * (1.0 - p2) * integrate_from_zero(f, dv) + p2 * (1.0 - p1) * integrate_from_zero(f, -dv);
            };

            OptimalPriorRow row;
            row.p = p;
            row.delta_p = dpv;
            row.coefficient = coefficient;
            row.dv_theory = coefficient * (logit(p2) - logit(p1));

            // Grid search, widening the window while the best point sits on its edge.
            double span = std::abs(row.dv_theory);
            if (span == 0.0)
                span = 1e-6 * std::sqrt(2.0 * params.zero_block_variance());
            double half = 8.0 * span;
            double best_dv = 0.0, best_e = 0.0, cell = 0.0;
            const int points = 320;
            for (int attempt = 0; attempt < 8; ++attempt)
            {
                best_e = std::numeric_limits<double>::infinity();
                int best_i = 0;
                for (int i = 0; i <= points; ++i)
                {
                    const double dv = -half + 2.0 * half * i / points;
                    const double e = excess(dv);
                    if (e < best_e)
                    {
                        best_e = e;
                        best_dv = dv;
                        best_i = i;
                    }
                }
                cell = 2.0 * half / points;
                if (best_i != 0 && best_i != points)
                    break;
                half *= 4.0;
            }
            best_dv = golden_minimize(excess, best_dv - cell, best_dv + cell, 100);
            best_e = std::min(best_e, excess(best_dv));
            row.dv_best = best_dv;

            const double e_theory = excess(row.dv_theory);
            row.pe_zero = (p1 * (1.0 - p2) + p2 * (1.0 - p1)) * f0;
            row.pe_theory = row.pe_zero + e_theory;
            row.pe_best = row.pe_zero + best_e;
            row.relative_gap = (e_theory - best_e) / row.pe_best;
            row.excess_lost = best_e < 0.0 ? (e_theory - best_e) / -best_e : 0.0;
            rows.push_back(row);
        }
    return rows;
}

// ---- samplers ----

StatisticSamples sample_single_tap_model(const SelectionDistParams &p, std::size_t count, RngStream &rng)
{
    p.validate();
    const double sd1 = std::sqrt(p.nonzero_tap_variance());
    const double sd2 = std::sqrt(p.zero_tap_variance());
    const double m = p.mean_amplitude();
    StatisticSamples out;
    out.nonzero.resize(count);
    out.zero.resize(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        const double re = m * std::cos(phi) + sd1 * rng.normal();
        const double im = m * std::sin(phi) + sd1 * rng.normal();
        out.nonzero[i] = re * re + im * im;
        const double z1 = sd2 * rng.normal();
        const double z2 = sd2 * rng.normal();
        out.zero[i] = z1 * z1 + z2 * z2;
    }
    return out;
}

StatisticSamples sample_block_model(const SelectionDistParams &p, std::size_t count, RngStream &rng)
{
    p.validate();
    const std::size_t entries = p.block_length * p.subcarriers;
    const double sd1 = std::sqrt(p.nonzero_block_variance() / 2.0);
    const double sd2 = std::sqrt(p.zero_block_variance() / 2.0);
    const double m = p.mean_amplitude();
    StatisticSamples out;
    out.nonzero.resize(count);
    out.zero.resize(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        double nz = 0.0, z = 0.0;
        for (std::size_t e = 0; e < entries; ++e)
        {
            const double phi = 2.0 * std::numbers::pi * rng.uniform();
            const double re = m * std::cos(phi) + sd1 * rng.normal();
            const double im = m * std::sin(phi) + sd1 * rng.normal();
            nz += re * re + im * im;
            const double z1 = sd2 * rng.normal();
            const double z2 = sd2 * rng.normal();
            z += z1 * z1 + z2 * z2;
        }
        out.nonzero[i] = nz;
        out.zero[i] = z;
    }
    return out;
}

namespace
{

// One block-structured draw: probe nonzero block statistic and probe zero block statistic.
std::pair<double, double> pipeline_draw(const SelectionDistParams &p, std::size_t block, std::size_t subcarriers,
                                        RngStream &rng)
{
    const std::size_t m = p.pilots;
    const std::size_t s = p.nonzero_taps;

    SystemParams sp;
    sp.antennas = std::max(m, s + block);
    sp.antennas -= sp.antennas % block;
    if (sp.antennas < std::max(m, s + block))
        sp.antennas += block;
    sp.subcarriers = subcarriers;
    sp.pilots = m;
    sp.block_length = block;
    sp.nonzero_taps = s;
    sp.tap_gain = p.tap_gain;
    const IndexSet support = gen_support(sp, rng);
    const AngularChannel ch = gen_angular_channel(sp, support, rng);

    // Columns 0..s-1 carry the support (the first `block` of them form the probe
    // block), columns s..s+block-1 are the zero probe block.
    ComplexMatrix a = sample_complex_gaussian(m, s + block, 1.0, rng);
    const ComplexMatrix noise = sample_complex_gaussian(m, subcarriers, p.noise_variance, rng);
    ComplexMatrix x_s(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(subcarriers));
    for (std::size_t i = 0; i < s; ++i)
        x_s.row(static_cast<Eigen::Index>(i)) = ch.x.row(static_cast<Eigen::Index>(support[i]));

    const double root_m = std::sqrt(static_cast<double>(m));
    ComplexMatrix a_probe = a.leftCols(static_cast<Eigen::Index>(s));
    for (std::size_t j = 0; j < block; ++j)
        a_probe.col(static_cast<Eigen::Index>(j)) *= root_m / a_probe.col(static_cast<Eigen::Index>(j)).norm();

    const ComplexMatrix y_probe = a_probe * x_s + noise;
    const ComplexMatrix y_plain = a.leftCols(static_cast<Eigen::Index>(s)) * x_s + noise;

    double nonzero = 0.0, zero = 0.0;
    for (std::size_t j = 0; j < block; ++j)
    {
        nonzero += (a_probe.col(static_cast<Eigen::Index>(j)).adjoint() * y_probe).squaredNorm();
        ComplexVector z = a.col(static_cast<Eigen::Index>(s + j));
        z *= root_m / z.norm();
        zero += (z.adjoint() * y_plain).squaredNorm();
    }
    return {nonzero, zero};
}

} // namespace

StatisticSamples sample_single_tap_pipeline(const SelectionDistParams &p, std::size_t count, RngStream &rng)
{
    p.validate();
    StatisticSamples out;
    out.nonzero.resize(count);
    out.zero.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        std::tie(out.nonzero[i], out.zero[i]) = pipeline_draw(p, 1, 1, rng);
    return out;
}

StatisticSamples sample_block_pipeline(const SelectionDistParams &p, std::size_t count, RngStream &rng)
{
    p.validate();
    if (p.nonzero_taps % p.block_length != 0)
        throw ParameterError("nonzero_taps must be a multiple of block_length");
    StatisticSamples out;
    out.nonzero.resize(count);
    out.zero.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        std::tie(out.nonzero[i], out.zero[i]) = pipeline_draw(p, p.block_length, p.subcarriers, rng);
    return out;
}

std::vector<double> sample_gamma_diff(const GammaParams &g1, const GammaParams &g2, std::size_t count, RngStream &rng)
{
    validate_gamma(g1);
    validate_gamma(g2);
    std::vector<double> out(count);
    for (auto &v : out)
    {
        const double x1 = rng.gamma(g1.shape) / g1.rate;
        const double x2 = rng.gamma(g2.shape) / g2.rate;
        v = x1 - x2;
    }
    return out;
}

double ks_statistic(std::vector<double> &samples, const std::function<double(double)> &cdf)
{
    if (samples.empty())
        throw ParameterError("ks_statistic needs samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        const double f = cdf(samples[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

TabulatedCdf::TabulatedCdf(const std::function<double(double)> &pdf, double anchor, double cdf_at_anchor, double lo,
                           double hi, std::size_t intervals)
{
    if (!(lo < hi) || intervals < 2)
        throw ParameterError("TabulatedCdf needs lo < hi and at least two intervals");
    anchor = std::clamp(anchor, lo, hi);
    const auto left_n = static_cast<std::size_t>(std::round(static_cast<double>(intervals) * (anchor - lo) / (hi - lo)));
    const std::size_t right_n = intervals - left_n;

    QuadratureOptions o;
    o.abs_tol = 1e-14;
    o.rel_tol = 1e-10;

    std::vector<double> xs_left, fs_left;
    double acc = cdf_at_anchor;
    for (std::size_t i = 1; i <= left_n; ++i)
    {
        const double b = anchor - (anchor - lo) * static_cast<double>(i - 1) / static_cast<double>(left_n);
        const double a = anchor - (anchor - lo) * static_cast<double>(i) / static_cast<double>(left_n);
        acc -= integrate(pdf, a, b, o).value;
        xs_left.push_back(a);
        fs_left.push_back(acc);
    }
    x_.assign(xs_left.rbegin(), xs_left.rend());
    f_.assign(fs_left.rbegin(), fs_left.rend());
    x_.push_back(anchor);
    f_.push_back(cdf_at_anchor);
    acc = cdf_at_anchor;
    for (std::size_t i = 1; i <= right_n; ++i)
    {
        const double a = anchor + (hi - anchor) * static_cast<double>(i - 1) / static_cast<double>(right_n);
        const double b = anchor + (hi - anchor) * static_cast<double>(i) / static_cast<double>(right_n);
        acc += integrate(pdf, a, b, o).value;
        x_.push_back(b);
        f_.push_back(acc);
    }
}

TabulatedCdf TabulatedCdf::from_cdf(const std::function<double(double)> &cdf, double lo, double hi,
                                   std::size_t intervals)
{
    if (!(lo < hi) || intervals < 2)
        throw ParameterError("TabulatedCdf needs lo < hi and at least two intervals");
    TabulatedCdf t;
    for (std::size_t i = 0; i <= intervals; ++i)
    {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(intervals);
        t.x_.push_back(x);
        t.f_.push_back(cdf(x));
    }
    return t;
}

double TabulatedCdf::operator()(double x) const
{
    if (x <= x_.front())
        return std::clamp(f_.front(), 0.0, 1.0);
    if (x >= x_.back())
        return std::clamp(f_.back(), 0.0, 1.0);
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin());
    const double w = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
    return std::clamp(f_[i - 1] + w * (f_[i] - f_[i - 1]), 0.0, 1.0);
}

namespace
{

struct Range
{
    double lo;
    double hi;
};

Range sample_range(const std::vector<double> &v, bool include_zero)
{
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double pad = 1e-6 * std::max(1.0, *mx - *mn);
    Range r{*mn - pad, *mx + pad};
    if (include_zero)
    {
        r.lo = std::min(r.lo, 0.0);
        r.hi = std::max(r.hi, 0.0);
    }
    return r;
}

// |integral of pdf over the real line - 1|, split at zero and the two ends of `r`.
double normalization_error(const std::function<double(double)> &pdf, double left_tail_scale, Range r)
{
    QuadratureOptions o;
    o.abs_tol = 1e-13;
    o.rel_tol = 1e-10;
    o.max_subdivisions = 20000;
    double total = 0.0;
    total += integrate(pdf, std::min(r.lo, 0.0) - 60.0 * left_tail_scale, 0.0, o).value;
    total += integrate(pdf, 0.0, r.hi, o).value;
    total += integrate_to_infinity(pdf, r.hi, o).value;
    return std::abs(total - 1.0);
}

constexpr std::size_t table_intervals = 2000;

} // namespace

std::vector<DistributionCheck> validate_distributions(const SelectionDistParams &params, std::size_t samples,
                                                      std::size_t pipeline_samples, std::uint64_t seed)
{
    params.validate();
    if (samples < 2 || pipeline_samples == 1)
        throw ParameterError("validate_distributions needs at least two samples");
    std::vector<DistributionCheck> out;
    auto ks = [&](const std::string &family, const std::string &name, std::vector<double> &v,
                  const std::function<double(double)> &cdf, bool include_zero) {
        const Range r = sample_range(v, include_zero);
        const auto table = TabulatedCdf::from_cdf(cdf, r.lo, r.hi, table_intervals);
        out.push_back({family, name, v.size(), ks_statistic(v, table)});
    };

    {
        RngStream rng(seed, derive_stream_id({1}));
        auto s = sample_single_tap_model(params, samples, rng);
        std::vector<double> t(samples);
        for (std::size_t i = 0; i < samples; ++i)
            t[i] = s.nonzero[i] - s.zero[i];
        ks("single_tap", "nonzero_model", s.nonzero, [&](double x) { return single_tap_nonzero_cdf(x, params); }, true);
        ks("single_tap", "zero_model", s.zero, [&](double x) { return single_tap_zero_cdf(x, params); }, true);

        const Range r = sample_range(t, true);
        const auto pdf = [&](double x) { return pdf_t_single(x, params); };
        const TabulatedCdf cdf(pdf, 0.0, cdf_t_single(0.0, params), r.lo, r.hi, table_intervals);
        out.push_back({"t_single", "ks_model", samples, ks_statistic(t, cdf)});
        out.push_back({"t_single", "normalization", 0, normalization_error(pdf, 2.0 * params.zero_tap_variance(), r)});
    }
    if (pipeline_samples > 0)
    {
        RngStream rng(seed, derive_stream_id({2}));
        auto s = sample_single_tap_pipeline(params, pipeline_samples, rng);
        ks("single_tap", "nonzero_pipeline", s.nonzero, [&](double x) { return single_tap_nonzero_cdf(x, params); },
           true);
        ks("single_tap", "zero_pipeline", s.zero, [&](double x) { return single_tap_zero_cdf(x, params); }, true);
    }
    {
        RngStream rng(seed, derive_stream_id({3}));
        auto s = sample_block_model(params, samples, rng);
        ks("block", "nonzero_model", s.nonzero, [&](double x) { return block_nonzero_cdf(x, params); }, true);
        ks("block", "zero_model", s.zero, [&](double x) { return block_zero_cdf(x, params); }, true);

        const double n = params.block_dof();
        const double lambda = params.block_noncentrality();
        const auto fit = patnaik(n, lambda);
        const double mean_err = std::abs(fit.rho * fit.tau - (n + lambda)) / (n + lambda);
        const double var_err =
            std::abs(2.0 * fit.rho * fit.rho * fit.tau - 2.0 * (n + 2.0 * lambda)) / (2.0 * (n + 2.0 * lambda));
        out.push_back({"block", "patnaik_moments", 0, std::max(mean_err, var_err)});

        const auto g = block_gamma_params(params);
        const double mean = g.nonzero.shape / g.nonzero.rate;
        const double sd = std::sqrt(g.nonzero.shape) / g.nonzero.rate;
        double gap = 0.0;
        for (int i = 0; i <= 4000; ++i)
        {
            const double x = std::max(0.0, mean - 10.0 * sd) + 20.0 * sd * i / 4000.0;
            if (x <= 0.0)
                continue;
            gap = std::max(gap, std::abs(block_nonzero_cdf(x, params) - regularized_gamma_p(g.nonzero.shape,
                                                                                           x * g.nonzero.rate)));
        }
        out.push_back({"block", "patnaik_cdf_gap", 0, gap});
    }
    {
        RngStream rng(seed, derive_stream_id({4}));
        const auto g = block_gamma_params(params);
        auto t = sample_gamma_diff(g.nonzero, g.zero, samples, rng);
        const Range r = sample_range(t, true);
        const auto pdf = [&](double x) { return gamma_diff_pdf(x, g.nonzero, g.zero); };
        const double at_zero = regularized_beta(g.nonzero.rate / (g.nonzero.rate + g.zero.rate), g.nonzero.shape,
                                                g.zero.shape);
        const TabulatedCdf cdf(pdf, 0.0, at_zero, r.lo, r.hi, table_intervals);
        out.push_back({"gamma_diff", "ks", samples, ks_statistic(t, cdf)});
        out.push_back({"gamma_diff", "normalization", 0, normalization_error(pdf, 1.0 / g.zero.rate, r)});
    }
    return out;
}

} // namespace nearcs
