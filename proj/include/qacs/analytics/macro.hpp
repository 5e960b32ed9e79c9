#pragma once

#include "qacs/analytics/femto.hpp"
#include "qacs/numeric.hpp"
#include "qacs/quadrature.hpp"

#include <bit>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace qacs::analytics {

/// Best-beam SINR of one macro-MT, gamma = x / (lambda y + mu), with x the largest of
/// n_q unit exponentials and y a unit exponential.
struct macro_analysis_params {
    int n_q = 1;              ///< N_Q
    int k_m = 1;              ///< K_M
    double lambda_m = 1.0;
    double mu_m = 1.0;
    double gamma_m_req = 1.0; ///< linear

    void validate() const
    {
        if (n_q < 1 || k_m < 1)
            throw std::domain_error("macro analysis: N_Q and K_M must be >= 1");
        if (!(lambda_m > 0.0) || !std::isfinite(lambda_m) || !(mu_m > 0.0) || !std::isfinite(mu_m))
            throw std::domain_error("macro analysis: lambda_M and mu_M must be positive");
        if (!(gamma_m_req > 0.0) || !std::isfinite(gamma_m_req))
            throw std::domain_error("macro analysis: Gamma_M must be positive");
    }

    [[nodiscard]] macro_analysis_params with_n_q(int m) const
    {
        auto out = *this;
        out.n_q = m;
        return out;
    }
};

/// Closed-form density of the best-beam SINR:
/// N_Q sum_i C(N_Q-1, i) (-1)^{N_Q-1-i} e^{-s mu g} / lambda * (1 + mu (s g + 1/lambda)) / (s g + 1/lambda)^2,
/// with s = N_Q - i.
inline series_value pdf_gamma_mk_series(double gamma, const macro_analysis_params& p)
{
    if (gamma < 0.0)
        return {0.0, 1.0};
    const int n = p.n_q;
    const double inv_lambda = 1.0 / p.lambda_m;
    compensated_sum sum;
    for (int i = 0; i <= n - 1; ++i) {
        const double s = n - i;
        const double sign = ((n - 1 - i) % 2 == 0) ? 1.0 : -1.0;
        const double d = s * gamma + inv_lambda;
        sum += sign * binomial(n - 1, i) * std::exp(-s * p.mu_m * gamma) * inv_lambda *
               (1.0 + p.mu_m * d) / (d * d);
    }
    return {n * sum.value(), sum.condition()};
}

/// Survival 1 - F(gamma) = -sum_{s=1}^{N_Q} C(N_Q, s) (-1)^s e^{-s mu g} / (1 + s g lambda).
inline series_value sf_gamma_mk_series(double gamma, const macro_analysis_params& p)
{
    if (gamma <= 0.0)
        return {1.0, 1.0};
    const int n = p.n_q;
    compensated_sum sum;
    for (int s = 1; s <= n; ++s) {
        const double sign = (s % 2 == 0) ? -1.0 : 1.0;
        sum += sign * binomial(n, s) * std::exp(-s * p.mu_m * gamma) / (1.0 + s * gamma * p.lambda_m);
    }
    return {sum.value(), sum.condition()};
}

/// Density by direct integration over the interference: int e^{-y} (lambda y + mu) f_x(g (lambda y + mu)) dy.
inline double pdf_gamma_mk_quadrature(double gamma, const macro_analysis_params& p, const quadrature& quad = {})
{
    if (gamma < 0.0)
        return 0.0;
    const int n = p.n_q;
    auto integrand = [&](double y) {
        const double scale = p.lambda_m * y + p.mu_m;
        const double x = gamma * scale;
        const double fx = n * std::pow(-std::expm1(-x), n - 1) * std::exp(-x);
        return std::exp(-y) * scale * fx;
    };
    return quad.integrate_to_infinity(integrand, 0.0);
}

/// CDF by direct integration: int e^{-y} (1 - e^{-g (lambda y + mu)})^{N_Q} dy.
inline double cdf_gamma_mk_quadrature(double gamma, const macro_analysis_params& p, const quadrature& quad = {})
{
    if (gamma <= 0.0)
        return 0.0;
    auto integrand = [&](double y) {
        return std::exp(-y) * std::pow(-std::expm1(-gamma * (p.lambda_m * y + p.mu_m)), p.n_q);
    };
    return quad.integrate_to_infinity(integrand, 0.0);
}

inline checked_value pdf_gamma_mk_checked(double gamma, const macro_analysis_params& p,
                                          const quadrature& quad = {})
{
    const auto fast = pdf_gamma_mk_series(gamma, p);
    return reconcile(fast.value, fast.condition, pdf_gamma_mk_quadrature(gamma, p, quad),
                     agreement_tolerance, max_condition, "f_gamma_Mk(" + std::to_string(gamma) + ")");
}

inline double pdf_gamma_mk(double gamma, const macro_analysis_params& p)
{
    return pdf_gamma_mk_series(gamma, p).value;
}

inline double sf_gamma_mk(double gamma, const macro_analysis_params& p)
{
    return sf_gamma_mk_series(gamma, p).value;
}

inline double cdf_gamma_mk(double gamma, const macro_analysis_params& p)
{
    return gamma <= 0.0 ? 0.0 : 1.0 - sf_gamma_mk(gamma, p);
}

/// The CDF in the form sum_i C(N_Q-1, i) mu/((N_Q-i) lambda) (-1)^{N_Q-1-i} e^{-s mu g} /
/// (-s mu g + mu/lambda), as commonly printed. Not a CDF (it is singular at
/// g = 1/(s lambda)); kept for discrepancy reports.
inline double cdf_gamma_mk_printed(double gamma, const macro_analysis_params& p)
{
    const int n = p.n_q;
    double sum = 0.0;
    for (int i = 0; i <= n - 1; ++i) {
        const double s = n - i;
        const double sign = ((n - 1 - i) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binomial(n - 1, i) * p.mu_m / (s * p.lambda_m) * std::exp(-s * p.mu_m * gamma) /
               (-s * p.mu_m * gamma + p.mu_m / p.lambda_m);
    }
    return n * sum;
}

struct truncated_value {
    double cdf = 0.0;
    double pdf = 0.0;
};

/// Best-beam SINR conditioned on meeting Gamma_M (left truncation at Gamma_M).
/// Throws std::domain_error when Gamma_M is unreachable (F(Gamma_M) = 1).
inline truncated_value conditional_gamma_m(double gamma, const macro_analysis_params& p)
{
    const double survive = sf_gamma_mk(p.gamma_m_req, p);
    if (!(survive > 0.0))
        throw std::domain_error("conditional_gamma_m: Gamma_M is unreachable (F(Gamma_M) = 1)");
    if (gamma < p.gamma_m_req)
        return {0.0, 0.0};
    const double cdf = (survive - sf_gamma_mk(gamma, p)) / survive;
    return {cdf, pdf_gamma_mk(gamma, p) / survive};
}

/// Pr(K_Q != 0 | N_Q = m) as sum_{k=1}^{K_M} C(K_M, k) F^{K_M-k} (1-F)^k.
inline double prob_kq_nonzero(const macro_analysis_params& p)
{
    const double survive = sf_gamma_mk(p.gamma_m_req, p);
    compensated_sum sum;
    for (int k = 1; k <= p.k_m; ++k)
        sum += binomial_pmf(p.k_m, k, survive);
    return sum.value();
}

/// 1 - F(Gamma_M)^{K_M}.
inline double prob_kq_nonzero_complement(const macro_analysis_params& p)
{
    const double survive = sf_gamma_mk(p.gamma_m_req, p);
    return -std::expm1(p.k_m * std::log1p(-survive));
}

/// Pr(N_B = n | N_Q = m) for K_M identical macro-MTs that each meet Gamma_M with
/// probability 1 - F and then request one of the m qualified beams uniformly:
/// C(m, n) sum_{i=1}^n C(n, i) (-1)^{n+i} [ (i/m + (m-i)/m F)^{K_M} - F^{K_M} ] for n >= 1,
/// with n = 0 taking the remaining mass.
inline series_value pmf_nb_given_nq_series(int n, int m, int k_m, double fail)
{
    if (m < 1 || n < 0 || n > m)
        return {n == 0 && m == 0 ? 1.0 : 0.0, 1.0};
    if (n == 0) {
        compensated_sum rest;
        double cond = 1.0;
        rest += 1.0;
        for (int j = 1; j <= m; ++j) {
            const auto v = pmf_nb_given_nq_series(j, m, k_m, fail);
            rest += -v.value;
            cond = std::max(cond, v.condition);
        }
        return {rest.value(), cond};
    }
    compensated_sum sum;
    const double none = std::pow(fail, k_m);
    for (int i = 1; i <= n; ++i) {
        const double sign = ((n + i) % 2 == 0) ? 1.0 : -1.0;
        const double within = std::pow(static_cast<double>(i) / m + static_cast<double>(m - i) / m * fail, k_m);
        sum += sign * binomial(n, i) * (within - none);
    }
    return {binomial(m, n) * sum.value(), sum.condition()};
}

inline double pmf_nb_given_nq(int n, const macro_analysis_params& p)
{
    return pmf_nb_given_nq_series(n, p.n_q, p.k_m, cdf_gamma_mk(p.gamma_m_req, p)).value;
}

/// Heterogeneous generalization: macro-MT k requests with probability request[k].
/// C(m, n) sum_{i=0}^n C(n, i) (-1)^{n-i} prod_k (1 - request[k] (1 - i/m)).
inline series_value pmf_nb_given_nq_series(int n, int m, std::span<const double> request)
{
    if (m < 1 || n < 0 || n > m)
        return {n == 0 && m == 0 ? 1.0 : 0.0, 1.0};
    compensated_sum sum;
    for (int i = 0; i <= n; ++i) {
        const double sign = ((n - i) % 2 == 0) ? 1.0 : -1.0;
        const double miss = 1.0 - static_cast<double>(i) / m;
        double log_prod = 0.0;
        bool zero = false;
        for (double r : request) {
            const double v = r * miss;
            if (v >= 1.0) {
                zero = true;
                break;
            }
            log_prod += std::log1p(-v);
        }
        sum += zero ? 0.0 : sign * binomial(n, i) * std::exp(log_prod);
    }
    return {binomial(m, n) * sum.value(), sum.condition()};
}

/// Exact distribution of the set of requested beams by dynamic programming over MTs
/// (state: subset of hit beams). Independent of the inclusion-exclusion form.
inline std::vector<double> pmf_nb_given_nq_dp(int m, std::span<const double> request)
{
    if (m < 1)
        return {1.0};
    const std::size_t states = std::size_t{1} << m;
    std::vector<double> cur(states, 0.0), next(states);
    cur[0] = 1.0;
    for (double r : request) {
        std::fill(next.begin(), next.end(), 0.0);
        const double each = r / m;
        for (std::size_t s = 0; s < states; ++s) {
            if (cur[s] == 0.0)
                continue;
            next[s] += cur[s] * (1.0 - r);
            for (int b = 0; b < m; ++b)
                next[s | (std::size_t{1} << b)] += cur[s] * each;
        }
        cur.swap(next);
    }
    std::vector<double> out(m + 1, 0.0);
    for (std::size_t s = 0; s < states; ++s)
        out[std::popcount(s)] += cur[s];
    return out;
}

/// Pr(N_B = n | N_Q = m) for n = 0..m, fast path checked against the DP.
inline std::vector<double> pmf_nb_given_nq_vector(int m, std::span<const double> request,
                                                  std::vector<std::string>* notes = nullptr)
{
    const auto dp = pmf_nb_given_nq_dp(m, request);
    std::vector<double> out(dp.size());
    for (int n = 0; n <= std::max(m, 0); ++n) {
        const auto fast = pmf_nb_given_nq_series(n, m, request);
        const auto v = reconcile(fast.value, fast.condition, dp[n], agreement_tolerance, max_condition,
                                 "Pr(N_B=" + std::to_string(n) + "|N_Q=" + std::to_string(m) + ")");
        if (notes && !v.note.empty())
            notes->push_back(v.note);
        out[n] = v.value;
    }
    return out;
}

/// Pr(macro-MT k is scheduled | N_Q = m) for every k. The MBS serves the least-interfering
/// requested beam, which is uniform over the requested set, then a uniform requester of it.
inline std::vector<double> selection_probabilities(int m, std::span<const double> request)
{
    const int k_m = static_cast<int>(request.size());
    std::vector<double> out(k_m, 0.0);
    if (m < 1)
        return out;
    const int others = m - 1;
    const std::size_t masks = std::size_t{1} << others;
    // state index: r * masks + mask, r = other MTs on the same beam.
    std::vector<double> cur, next;
    for (int k = 0; k < k_m; ++k) {
        if (request[k] <= 0.0)
            continue;
        cur.assign(static_cast<std::size_t>(k_m) * masks, 0.0);
        next.assign(cur.size(), 0.0);
        cur[0] = 1.0;
        int seen = 0;
        for (int l = 0; l < k_m; ++l) {
            if (l == k)
                continue;
            const double r = request[l];
            const double each = r / m;
            std::fill(next.begin(), next.end(), 0.0);
            for (int same = 0; same <= seen; ++same)
                for (std::size_t mask = 0; mask < masks; ++mask) {
                    const double w = cur[same * masks + mask];
                    if (w == 0.0)
                        continue;
                    next[same * masks + mask] += w * (1.0 - r);
                    next[(same + 1) * masks + mask] += w * each;
                    for (int b = 0; b < others; ++b)
                        next[same * masks + (mask | (std::size_t{1} << b))] += w * each;
                }
            cur.swap(next);
            ++seen;
        }
        compensated_sum weight;
        for (int same = 0; same <= seen; ++same)
            for (std::size_t mask = 0; mask < masks; ++mask) {
                const double w = cur[same * masks + mask];
                if (w != 0.0)
                    weight += w / ((1.0 + same) * (1.0 + std::popcount(mask)));
            }
        out[k] = request[k] * weight.value();
    }
    return out;
}

} // namespace qacs::analytics
