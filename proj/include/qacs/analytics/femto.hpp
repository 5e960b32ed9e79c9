#pragma once

#include "qacs/numeric.hpp"
#include "qacs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qacs::analytics {

/// Normalized femto-side quantities: x_F is the largest of n_total = K_F N_F unit
/// exponentials, the MBS interference projections y_j are N_M unit exponentials.
struct femto_analysis_params {
    int n_total = 1;          ///< K_F * N_F
    int n_m = 1;              ///< N_M
    double lambda_f = 1.0;
    double mu_f = 1.0;
    double gamma_f_req = 1.0; ///< linear

    void validate() const
    {
        if (n_total < 1 || n_m < 1)
            throw std::domain_error("femto analysis: counts must be >= 1");
        if (!(lambda_f > 0.0) || !std::isfinite(lambda_f) || !(mu_f > 0.0) || !std::isfinite(mu_f))
            throw std::domain_error("femto analysis: lambda_F and mu_F must be positive");
        if (!(gamma_f_req > 0.0) || !std::isfinite(gamma_f_req))
            throw std::domain_error("femto analysis: Gamma_F must be positive");
    }

    /// x_F below mu_F * Gamma_F cannot meet Gamma_F even without interference.
    [[nodiscard]] double qualification_edge() const { return mu_f * gamma_f_req; }

    /// (x - mu_F Gamma_F) / (Gamma_F lambda_F): interference budget of one beam in units of lambda_F.
    [[nodiscard]] double interference_budget(double x) const
    {
        return (x - qualification_edge()) / (gamma_f_req * lambda_f);
    }
};

/// A value obtained from a closed-form fast path and an independent oracle.
/// `value` is the fast path when the two agree within `tolerance`, else the oracle.
struct checked_value {
    double value = 0.0;
    double fast = 0.0;
    double oracle = 0.0;
    double condition = 1.0;
    bool fast_path_used = true;
    std::string note;
};

inline checked_value reconcile(double fast, double fast_condition, double oracle, double tolerance,
                               double max_condition, const std::string& what)
{
    checked_value out{fast, fast, oracle, fast_condition, true, {}};
    if (!std::isfinite(fast) || fast_condition > max_condition) {
        out.value = oracle;
        out.fast_path_used = false;
        out.note = what + ": closed form ill-conditioned (condition " + std::to_string(fast_condition) +
                   "), using quadrature";
    } else if (std::abs(fast - oracle) > tolerance) {
        out.value = oracle;
        out.fast_path_used = false;
        out.note = what + ": closed form " + std::to_string(fast) + " disagrees with quadrature " +
                   std::to_string(oracle);
    }
    return out;
}

inline constexpr double agreement_tolerance = 1e-6;
inline constexpr double max_condition = 1e8;

/// Pr(beam j qualifies | x_F = x) = max(0, 1 - exp((-x + mu_F Gamma_F) / (Gamma_F lambda_F))).
inline double prob_beam_qualified(double x, const femto_analysis_params& p)
{
    const double t = p.interference_budget(x);
    return t <= 0.0 ? 0.0 : -std::expm1(-t);
}

/// Binomial(N_M, q(x)) mass at m.
inline double pmf_nq_given_xf(int m, double x, const femto_analysis_params& p)
{
    if (m < 0 || m > p.n_m)
        return 0.0;
    const double t = p.interference_budget(x);
    if (t <= 0.0)
        return m == 0 ? 1.0 : 0.0;
    const double miss = std::exp(-t);
    const double hit = -std::expm1(-t);
    return binomial(p.n_m, m) * std::pow(hit, m) * std::pow(miss, p.n_m - m);
}

/// Density of the largest of K_F N_F unit exponentials.
inline double pdf_xf(double x, const femto_analysis_params& p)
{
    if (x < 0.0)
        return 0.0;
    const int n = p.n_total;
    if (n == 1)
        return std::exp(-x);
    return n * std::pow(-std::expm1(-x), n - 1) * std::exp(-x);
}

inline double cdf_xf(double x, const femto_analysis_params& p)
{
    return x <= 0.0 ? 0.0 : std::pow(-std::expm1(-x), p.n_total);
}

struct series_value {
    double value = 0.0;
    double condition = 1.0;
};

/// Closed form of Pr(N_Q = m): the double binomial expansion of the x_F-average of the
/// conditional PMF, integrated from mu_F Gamma_F (below which no beam qualifies).
inline series_value pmf_nq_series(int m, const femto_analysis_params& p)
{
    if (m < 0 || m > p.n_m)
        return {0.0, 1.0};
    const int kn = p.n_total;
    const int nm = p.n_m;
    const double c = p.qualification_edge();
    const double log_pref = std::log(static_cast<double>(kn)) + log_binomial(nm, m);
    compensated_sum sum;
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; j <= kn - 1; ++j) {
            const double rate = (nm - i) / (p.lambda_f * p.gamma_f_req) + (kn - j);
            const double sign = ((kn - 1 - j + m - i) % 2 == 0) ? 1.0 : -1.0;
            const double log_mag = log_pref + log_binomial(m, i) + log_binomial(kn - 1, j) -
                                   (kn - j) * c - std::log(rate);
            sum += sign * std::exp(log_mag);
        }
    }
    double value = sum.value();
    if (m == 0) {
        const double below = cdf_xf(c, p);
        value += below;
        return {value, (sum.magnitude() + below) / std::max(std::abs(value), 1e-300)};
    }
    return {value, sum.condition()};
}

/// The same double sum with the x_F integral taken from zero, as commonly printed.
/// Ignores that beams cannot qualify for x_F < mu_F Gamma_F; kept for discrepancy reports.
inline double pmf_nq_printed(int m, const femto_analysis_params& p)
{
    if (m < 0 || m > p.n_m)
        return 0.0;
    const int kn = p.n_total;
    const int nm = p.n_m;
    compensated_sum sum;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= kn - 1; ++j) {
            const double sign = ((kn - 1 - j + m - i) % 2 == 0) ? 1.0 : -1.0;
            const double term = binomial(m, i) * binomial(kn - 1, j) *
                                std::exp(p.mu_f / p.lambda_f * (nm - i)) /
                                ((nm - i) / (p.lambda_f * p.gamma_f_req) + kn - j);
            sum += sign * term;
        }
    return kn * binomial(nm, m) * sum.value();
}

/// Pr(N_Q = m) by direct quadrature of pmf_nq_given_xf against pdf_xf.
inline double pmf_nq_quadrature(int m, const femto_analysis_params& p, const quadrature& quad = {})
{
    if (m < 0 || m > p.n_m)
        return 0.0;
    const double c = p.qualification_edge();
    auto integrand = [&](double x) { return pmf_nq_given_xf(m, x, p) * pdf_xf(x, p); };
    double below = 0.0;
    if (m == 0 && c > 0.0)
        below = quad.integrate_doubling(integrand, 0.0, c, std::min(c, 1.0));
    return below + quad.integrate_to_infinity(integrand, c);
}

inline checked_value pmf_nq(int m, const femto_analysis_params& p, const quadrature& quad = {})
{
    p.validate();
    const auto fast = pmf_nq_series(m, p);
    const double oracle = pmf_nq_quadrature(m, p, quad);
    return reconcile(fast.value, fast.condition, oracle, agreement_tolerance, max_condition,
                     "Pr(N_Q=" + std::to_string(m) + ")");
}

/// Pr(N_Q = m) for m = 0..N_M.
inline std::vector<double> pmf_nq_vector(const femto_analysis_params& p, const quadrature& quad = {},
                                         std::vector<std::string>* notes = nullptr)
{
    std::vector<double> out;
    for (int m = 0; m <= p.n_m; ++m) {
        const auto v = pmf_nq(m, p, quad);
        if (notes && !v.note.empty())
            notes->push_back(v.note);
        out.push_back(v.value);
    }
    return out;
}

/// Density of u = lambda_F * y_{j*}, the smallest of n interference powers that are each
/// exponential with mean lambda_F truncated to the qualification region [0, x/Gamma_F - mu_F].
inline double pdf_interference_given(double u, double x, int n, const femto_analysis_params& p)
{
    if (n < 1)
        throw std::domain_error("pdf_interference_given: n must be >= 1");
    const double budget = p.interference_budget(x);
    const double s = u / p.lambda_f;
    if (budget <= 0.0 || s < 0.0 || s > budget)
        return 0.0;
    const double qualified = -std::expm1(-budget);
    const double tail = std::exp(-s) * -std::expm1(-(budget - s)); // e^{-s} - e^{-budget}
    return n / p.lambda_f * std::exp(-s) * std::pow(tail, n - 1) / std::pow(qualified, n);
}

/// (n / lambda_F) e^{-n u / lambda_F} / (1 - e^{-budget}): the single-power normalization,
/// which is correct only for n = 1. Reported as a discrepancy for n >= 2.
inline double pdf_interference_printed(double u, double x, int n, const femto_analysis_params& p)
{
    const double budget = p.interference_budget(x);
    const double s = u / p.lambda_f;
    if (budget <= 0.0 || s < 0.0 || s > budget)
        return 0.0;
    return n / p.lambda_f * std::exp(-n * s) / -std::expm1(-budget);
}

/// Mass of pdf_interference_printed over its support: (1 - e^{-n b}) / (1 - e^{-b}).
inline double interference_printed_mass(double x, int n, const femto_analysis_params& p)
{
    const double b = p.interference_budget(x);
    if (b <= 0.0)
        return 0.0;
    return std::expm1(-n * b) / std::expm1(-b);
}

/// gamma_F = x_F / mu_F with x_F unconditioned: change of variables x = gamma mu_F,
/// including the Jacobian mu_F.
inline double pdf_gamma_f_interference_free(double gamma, const femto_analysis_params& p)
{
    if (gamma < 0.0)
        return 0.0;
    return pdf_xf(gamma * p.mu_f, p) * p.mu_f;
}

/// The no-interference density as commonly printed, K N (1 - e^{-g/mu})^{KN-1} e^{-g/mu}:
/// divides by mu_F where it should multiply and drops the Jacobian. Integrates to mu_F.
inline double pdf_gamma_f_n0_printed(double gamma, const femto_analysis_params& p)
{
    if (gamma < 0.0)
        return 0.0;
    return pdf_xf(gamma / p.mu_f, p);
}

} // namespace qacs::analytics
