#pragma once

#include "qacs/analytics/femto.hpp"
#include "qacs/analytics/macro.hpp"
#include "qacs/model.hpp"
#include "qacs/numeric.hpp"
#include "qacs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qacs::analytics {

/// Ergodic rate int_{lo}^inf log2(1 + g) density(g) dg.
template <class Density>
double rate_integral(const Density& density, double support_lo, const quadrature& quad = {})
{
    return quad.integrate_to_infinity([&](double g) { return log2_1p(g) * density(g); }, support_lo);
}

/// Femto side of the protocol: x_F / N_Q statistics of one selected femto-MT together with
/// the conditional law of N_B given N_Q supplied by the macro side.
/// nb_given_nq[m][n] = Pr(N_B = n | N_Q = m), m = 0..N_M, n = 0..m.
struct femto_model {
    femto_analysis_params params;
    std::vector<std::vector<double>> nb_given_nq;

    void validate() const
    {
        params.validate();
        if (static_cast<int>(nb_given_nq.size()) != params.n_m + 1)
            throw std::domain_error("femto_model: N_B table must have N_M + 1 rows");
    }

    [[nodiscard]] double nb_entry(int m, int n) const
    {
        const auto& row = nb_given_nq[m];
        return n < static_cast<int>(row.size()) ? row[n] : 0.0;
    }

    /// Pr(N_B = n | x_F = x).
    [[nodiscard]] double nb_given_x(int n, double x) const
    {
        double sum = 0.0;
        for (int m = n; m <= params.n_m; ++m)
            sum += pmf_nq_given_xf(m, x, params) * nb_entry(m, n);
        return sum;
    }

    /// Pr(N_B = n | x) * density of s = y_{j*} (interference in units of lambda_F) given (x, n), n >= 1.
    /// The q^n normalization of the truncated minimum cancels against the binomial weights.
    [[nodiscard]] double weighted_min_density(double s, double x, int n) const
    {
        const double b = params.interference_budget(x);
        if (b <= 0.0 || s < 0.0 || s > b)
            return 0.0;
        const double q = -std::expm1(-b);
        const double miss = std::exp(-b);
        double weight = 0.0;
        for (int m = n; m <= params.n_m; ++m) {
            const double w = nb_entry(m, n);
            if (w != 0.0)
                weight += binomial(params.n_m, m) * std::pow(q, m - n) * std::pow(miss, params.n_m - m) * w;
        }
        const double tail = std::exp(-s) * -std::expm1(-(b - s));
        return weight * n * std::exp(-s) * std::pow(tail, n - 1);
    }
};

inline std::vector<double> pmf_nb_from(const std::vector<double>& pmf_nq,
                                       const std::vector<std::vector<double>>& nb_given_nq)
{
    std::vector<double> out(pmf_nq.size(), 0.0);
    for (std::size_t m = 0; m < pmf_nq.size(); ++m)
        for (std::size_t n = 0; n < nb_given_nq[m].size(); ++n)
            out[n] += pmf_nq[m] * nb_given_nq[m][n];
    return out;
}

/// Conditional density of gamma_F given N_B = n, with x_F weighted by Pr(N_B = n | x_F).
/// `prob_nb` is Pr(N_B = n) (pass a negative value to have it computed).
inline double pdf_gamma_f(double gamma, int n, const femto_model& model, double prob_nb = -1.0,
                          const quadrature& quad = {})
{
    const auto& p = model.params;
    if (prob_nb < 0.0)
        prob_nb = pmf_nb_from(pmf_nq_vector(p, quad), model.nb_given_nq)[n];
    if (!(prob_nb > 0.0))
        return 0.0;
    if (n == 0) {
        if (gamma < 0.0)
            return 0.0;
        const double x = gamma * p.mu_f;
        return pdf_xf(x, p) * model.nb_given_x(0, x) * p.mu_f / prob_nb;
    }
    if (gamma < p.gamma_f_req)
        return 0.0;
    // u = x/gamma - mu (in units of lambda: s = u / lambda), |du/dgamma| = x / gamma^2.
    // Integrated over s with x = gamma (mu + lambda s), dx = gamma lambda ds.
    auto integrand = [&](double s) {
        const double x = gamma * (p.mu_f + p.lambda_f * s);
        return pdf_xf(x, p) * model.weighted_min_density(s, x, n) * x / gamma;
    };
    return quad.integrate_doubling(integrand, 0.0, 60.0, std::min(1.0, 0.25 / (gamma * p.lambda_f))) /
           prob_nb;
}

/// Mass of pdf_gamma_f(., n). The support ends near x_max / mu_F with x_max = 64 (the
/// largest-NSNR tail beyond it is below 1e-25), so panels double from the lower edge up to there.
inline double femto_density_mass(int n, const femto_model& model, double prob_nb, const quadrature& quad = {})
{
    const auto& p = model.params;
    const double lo = n == 0 ? 0.0 : p.gamma_f_req;
    const double first = n == 0 ? 0.05 / p.mu_f : std::max(1.0, p.gamma_f_req);
    return quad.integrate_doubling([&](double g) { return pdf_gamma_f(g, n, model, prob_nb, quad); }, lo,
                                   64.0 / p.mu_f, first);
}

/// gamma_F density as commonly printed: the single-power truncated interference
/// density against the unconditioned x_F law, Jacobian taken in absolute value.
inline double pdf_gamma_f_printed(double gamma, int n, const femto_analysis_params& p,
                                  const quadrature& quad = {})
{
    if (n == 0)
        return pdf_gamma_f_n0_printed(gamma, p);
    if (gamma < p.gamma_f_req)
        return 0.0;
    auto integrand = [&](double x) {
        return pdf_interference_printed(x / gamma - p.mu_f, x, n, p) * x / (gamma * gamma) * pdf_xf(x, p);
    };
    return quad.integrate_to_infinity(integrand, gamma * p.mu_f);
}

/// Total mass of pdf_gamma_f_printed(., n), by exchanging the order of integration.
inline double printed_femto_density_mass(int n, const femto_analysis_params& p, const quadrature& quad = {})
{
    if (n == 0)
        return p.mu_f; // e^{-g/mu} form integrates to mu_F
    return quad.integrate_to_infinity(
        [&](double x) { return pdf_xf(x, p) * interference_printed_mass(x, n, p); }, p.qualification_edge());
}

struct femto_rate_term {
    double prob = 0.0;       ///< Pr(N_B = n)
    double joint_rate = 0.0; ///< E[log2(1 + gamma_F) ; N_B = n]

    [[nodiscard]] double conditional_rate() const { return prob > 0.0 ? joint_rate / prob : 0.0; }
};

/// E[log2(1+gamma_F) | x, N_B = n] * Pr(N_B = n | x), n >= 1.
inline double femto_inner_rate(double x, int n, const femto_model& model, const quadrature& quad)
{
    const auto& p = model.params;
    const double b = p.interference_budget(x);
    if (b <= 0.0)
        return 0.0;
    auto inner = [&](double s) {
        return log2_1p(x / (p.lambda_f * s + p.mu_f)) * model.weighted_min_density(s, x, n);
    };
    // log2(1 + x/(lambda s + mu)) varies on the scale mu/lambda near s = 0, and the density
    // decays like e^{-n s}; beyond s = 60 the remaining mass is below 1e-26.
    const double top = std::min(b, 60.0);
    double lo = std::min(top, 64.0 * p.mu_f / p.lambda_f);
    double v = quad.integrate(inner, 0.0, lo);
    for (double edge = std::max(1.0, 2.0 * lo); lo < top; edge *= 2.0) {
        const double hi = std::min(edge, top);
        if (hi > lo)
            v += quad.integrate(inner, lo, hi);
        lo = std::max(lo, hi);
    }
    return v;
}

/// Per-N_B decomposition of the femto ergodic rate. Sum of joint_rate is R_F.
inline std::vector<femto_rate_term> femto_rate_terms(const femto_model& model, const quadrature& quad = {},
                                                     std::vector<std::string>* notes = nullptr)
{
    model.validate();
    const auto& p = model.params;
    const auto pmf_nq = pmf_nq_vector(p, quad, notes);
    const auto pmf_nb = pmf_nb_from(pmf_nq, model.nb_given_nq);
    std::vector<femto_rate_term> terms(p.n_m + 1);
    for (int n = 0; n <= p.n_m; ++n)
        terms[n].prob = pmf_nb[n];

    const double c = p.qualification_edge();
    auto free_rate = [&](double x) { return pdf_xf(x, p) * model.nb_given_x(0, x) * log2_1p(x / p.mu_f); };
    const double below = c > 0.0 ? quad.integrate_doubling(free_rate, 0.0, c, std::min(c, 1.0)) : 0.0;
    terms[0].joint_rate = below + quad.integrate_to_infinity(free_rate, c);

    for (int n = 1; n <= p.n_m; ++n) {
        if (pmf_nb[n] == 0.0)
            continue;
        terms[n].joint_rate = quad.integrate_to_infinity(
            [&](double x) { return pdf_xf(x, p) * femto_inner_rate(x, n, model, quad); }, c);
    }
    return terms;
}

/// Pr(N_B = n | N_Q = m) table for identical macro-MTs.
inline std::vector<std::vector<double>> nb_table_homogeneous(const macro_analysis_params& pm, int n_m,
                                                             std::vector<std::string>* notes = nullptr)
{
    std::vector<std::vector<double>> table{{1.0}};
    for (int m = 1; m <= n_m; ++m) {
        const auto pq = pm.with_n_q(m);
        const double fail = cdf_gamma_mk(pq.gamma_m_req, pq);
        const std::vector<double> request(pq.k_m, 1.0 - fail);
        const auto dp = pmf_nb_given_nq_dp(m, request);
        std::vector<double> row(m + 1);
        for (int n = 0; n <= m; ++n) {
            const auto fast = pmf_nb_given_nq_series(n, m, pq.k_m, fail);
            const auto v = reconcile(fast.value, fast.condition, dp[n], agreement_tolerance, max_condition,
                                     "Pr(N_B=" + std::to_string(n) + "|N_Q=" + std::to_string(m) + ")");
            if (notes && !v.note.empty())
                notes->push_back(v.note);
            row[n] = v.value;
        }
        table.push_back(std::move(row));
    }
    return table;
}

/// R_F for a selected femto-MT with budget p_f and K_M identical macro-MTs p_m (p_m.n_q unused).
inline double throughput_femto(const femto_analysis_params& p_f, const macro_analysis_params& p_m,
                               const quadrature& quad = {})
{
    const femto_model model{p_f, nb_table_homogeneous(p_m, p_f.n_m)};
    double total = 0.0;
    for (const auto& t : femto_rate_terms(model, quad))
        total += t.joint_rate;
    return total;
}

/// E[log2(1 + gamma_M) | gamma_{M,k} >= Gamma_M, N_Q = m]; zero when Gamma_M is unreachable.
inline double macro_conditional_rate(const macro_analysis_params& pm, const quadrature& quad = {},
                                     bool* unreachable = nullptr)
{
    const double survive = sf_gamma_mk(pm.gamma_m_req, pm);
    if (!(survive > 0.0)) {
        if (unreachable)
            *unreachable = true;
        return 0.0;
    }
    auto density = [&](double g) { return pdf_gamma_mk(g, pm) / survive; };
    return rate_integral(density, pm.gamma_m_req, quad);
}

/// R_M = sum_m Pr(N_Q = m) Pr(K_Q != 0 | N_Q = m) E[log2(1 + gamma_M) | N_Q = m].
inline double throughput_macro(const femto_analysis_params& p_f, const macro_analysis_params& p_m,
                               const quadrature& quad = {}, bool* unreachable = nullptr)
{
    const auto pmf = pmf_nq_vector(p_f, quad);
    double total = 0.0;
    for (int m = 1; m <= p_f.n_m; ++m) {
        const auto pm = p_m.with_n_q(m);
        const double active = prob_kq_nonzero(pm);
        if (active == 0.0) {
            if (unreachable)
                *unreachable = true;
            continue;
        }
        total += pmf[m] * active * macro_conditional_rate(pm, quad, unreachable);
    }
    return total;
}

/// Antenna and user counts plus thresholds: everything but the link budgets.
struct analysis_shape {
    int n_fap_antennas = 2;
    int n_mbs_antennas = 4;
    int n_femto_mts = 5;
    int n_macro_mts = 50;
    qos_thresholds qos;

    static analysis_shape from(const scenario_config& cfg)
    {
        return {cfg.n_fap_antennas, cfg.n_mbs_antennas, cfg.n_femto_mts, cfg.n_macro_mts,
                qos_thresholds::from(cfg)};
    }
};

/// Analytic rates and distributions of one drop. Femto-MT selection is uniform and
/// independent of x_F, so femto quantities are averaged over the K_F candidates; macro-MTs
/// keep their own link budgets.
struct drop_analysis {
    double r_f = 0.0;
    double r_m = 0.0;
    std::vector<double> pmf_nq;
    std::vector<double> pmf_nb;
    std::vector<double> r_f_per_femto_mt;
    std::vector<std::vector<double>> nb_given_nq;
    std::vector<double> macro_rate_given_nq;          ///< sum_k Pr(sel = k | m) E[r | k, m]
    std::vector<std::vector<double>> selection_given_nq; ///< [m][k] = Pr(sel = k | N_Q = m)
    std::vector<std::string> notes;
    bool unreachable_macro_qos = false;

    [[nodiscard]] double expected_nq() const
    {
        double e = 0.0;
        for (std::size_t m = 0; m < pmf_nq.size(); ++m)
            e += m * pmf_nq[m];
        return e;
    }
    [[nodiscard]] double expected_nb() const
    {
        double e = 0.0;
        for (std::size_t n = 0; n < pmf_nb.size(); ++n)
            e += n * pmf_nb[n];
        return e;
    }
};

inline drop_analysis analyze_drop(const analysis_shape& shape, const drop_link_budget& budget,
                                  const quadrature& quad = {})
{
    drop_analysis out;
    const int n_m = shape.n_mbs_antennas;
    const int k_m = static_cast<int>(budget.macro.size());
    const int k_f = static_cast<int>(budget.femto.size());
    if (k_f < 1 || k_m < 1)
        throw std::domain_error("analyze_drop: need at least one femto-MT and one macro-MT");

    // Macro side, per N_Q = m.
    out.nb_given_nq.push_back({1.0});
    out.macro_rate_given_nq.assign(n_m + 1, 0.0);
    out.selection_given_nq.push_back(std::vector<double>(k_m, 0.0));
    bool any_reachable = false;
    for (int m = 1; m <= n_m; ++m) {
        std::vector<double> request(k_m), rate(k_m, 0.0);
        for (int k = 0; k < k_m; ++k) {
            const macro_analysis_params pm{m, k_m, budget.macro[k].lambda_m, budget.macro[k].mu_m,
                                           shape.qos.gamma_m};
            request[k] = sf_gamma_mk(pm.gamma_m_req, pm);
            if (request[k] > 0.0) {
                any_reachable = true;
                // Spot-check the closed-form density against direct integration.
                for (double g : {pm.gamma_m_req, 4.0 * pm.gamma_m_req, 32.0 * pm.gamma_m_req}) {
                    const auto v = pdf_gamma_mk_checked(g, pm, quad);
                    if (!v.fast_path_used)
                        out.notes.push_back("macro-MT " + std::to_string(k) + ": " + v.note);
                }
                rate[k] = macro_conditional_rate(pm, quad);
            }
        }
        out.nb_given_nq.push_back(pmf_nb_given_nq_vector(m, request, &out.notes));
        auto sel = selection_probabilities(m, request);
        compensated_sum acc;
        for (int k = 0; k < k_m; ++k)
            acc += sel[k] * rate[k];
        out.macro_rate_given_nq[m] = acc.value();
        out.selection_given_nq.push_back(std::move(sel));
    }
    out.unreachable_macro_qos = !any_reachable;

    // Femto side, averaged over the selected femto-MT.
    out.pmf_nq.assign(n_m + 1, 0.0);
    const double share = 1.0 / k_f;
    compensated_sum r_f, r_m;
    for (int k = 0; k < k_f; ++k) {
        const femto_analysis_params pf{shape.n_femto_mts * shape.n_fap_antennas, n_m,
                                       budget.femto[k].lambda_f, budget.femto[k].mu_f, shape.qos.gamma_f};
        const femto_model model{pf, out.nb_given_nq};
        const auto pmf = pmf_nq_vector(pf, quad, &out.notes);
        for (int m = 0; m <= n_m; ++m) {
            out.pmf_nq[m] += share * pmf[m];
            r_m += share * pmf[m] * out.macro_rate_given_nq[m];
        }
        double rate = 0.0;
        for (const auto& t : femto_rate_terms(model, quad))
            rate += t.joint_rate;
        out.r_f_per_femto_mt.push_back(rate);
        r_f += share * rate;
    }
    out.r_f = r_f.value();
    out.r_m = r_m.value();
    out.pmf_nb = pmf_nb_from(out.pmf_nq, out.nb_given_nq);
    return out;
}

} // namespace qacs::analytics
