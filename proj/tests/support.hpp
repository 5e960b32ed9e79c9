#pragma once

// Test oracles that do not share code with the library: Boost.Math quadrature,
// an empirical KS distance and small sampling helpers.

#include "qacs/rng.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace test_support {

/// Integral over [lo, inf) by exp-sinh.
inline double integrate_tail(const std::function<double(double)>& f, double lo)
{
    boost::math::quadrature::exp_sinh<double> rule;
    return rule.integrate([&](double t) { return f(lo + t); }, 0.0, std::numeric_limits<double>::infinity(),
                          1e-12);
}

/// Integral over [lo, hi] by tanh-sinh.
inline double integrate_finite(const std::function<double(double)>& f, double lo, double hi)
{
    boost::math::quadrature::tanh_sinh<double> rule;
    return rule.integrate(f, lo, hi, 1e-12);
}

/// sup |F_n - F| for a sample against a continuous CDF.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf)
{
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

/// Maximum of n unit exponentials.
inline double max_of_exponentials(int n, qacs::random_stream& rng)
{
    std::exponential_distribution<double> e(1.0);
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        m = std::max(m, e(rng));
    return m;
}

inline double choose(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

/// Density of the largest of n unit exponentials.
inline double max_exp_pdf(double x, int n)
{
    return x < 0.0 ? 0.0 : n * std::pow(1.0 - std::exp(-x), n - 1) * std::exp(-x);
}

/// Pr(N_Q = m) by integrating the binomial law of qualified beams against the x_F density.
inline double pmf_nq_oracle(int m, int kn, int n_m, double lambda, double mu, double gamma)
{
    const double c = mu * gamma;
    auto binom_at = [&](double x) {
        const double q = x <= c ? 0.0 : 1.0 - std::exp(-(x - c) / (gamma * lambda));
        return choose(n_m, m) * std::pow(q, m) * std::pow(1.0 - q, n_m - m);
    };
    auto f = [&](double x) { return binom_at(x) * max_exp_pdf(x, kn); };
    double below = 0.0;
    if (m == 0)
        below = std::pow(1.0 - std::exp(-c), kn);
    return below + integrate_tail(f, c);
}

/// Density of x / (lambda y + mu) with x the largest of n unit exponentials and y ~ Exp(1).
inline double macro_pdf_oracle(double g, int n, double lambda, double mu)
{
    return integrate_tail(
        [&](double y) {
            const double s = lambda * y + mu;
            return std::exp(-y) * s * max_exp_pdf(g * s, n);
        },
        0.0);
}

/// Pr(N_B = n | N_Q = m) by enumerating every macro-MT outcome (no request, or one of m beams).
inline std::vector<double> nb_enumeration(int m, const std::vector<double>& request)
{
    const int k = static_cast<int>(request.size());
    std::vector<double> out(m + 1, 0.0);
    std::vector<int> choice(k, 0); // 0 = no request, b + 1 = beam b
    for (;;) {
        double p = 1.0;
        std::vector<bool> hit(m, false);
        for (int i = 0; i < k; ++i) {
            if (choice[i] == 0) {
                p *= 1.0 - request[i];
            } else {
                p *= request[i] / m;
                hit[choice[i] - 1] = true;
            }
        }
        out[std::count(hit.begin(), hit.end(), true)] += p;
        int i = 0;
        while (i < k && ++choice[i] > m)
            choice[i++] = 0;
        if (i == k)
            break;
    }
    return out;
}

/// Pr(macro-MT k is served | N_Q = m): the served beam is uniform over the requested
/// beams, the served MT uniform over that beam's requesters.
inline std::vector<double> selection_enumeration(int m, const std::vector<double>& request)
{
    const int k = static_cast<int>(request.size());
    std::vector<double> out(k, 0.0);
    std::vector<int> choice(k, 0);
    for (;;) {
        double p = 1.0;
        std::vector<int> per_beam(m, 0);
        for (int i = 0; i < k; ++i) {
            if (choice[i] == 0) {
                p *= 1.0 - request[i];
            } else {
                p *= request[i] / m;
                ++per_beam[choice[i] - 1];
            }
        }
        const auto beams = std::count_if(per_beam.begin(), per_beam.end(), [](int c) { return c > 0; });
        for (int i = 0; i < k; ++i)
            if (choice[i] != 0)
                out[i] += p / beams / per_beam[choice[i] - 1];
        int i = 0;
        while (i < k && ++choice[i] > m)
            choice[i++] = 0;
        if (i == k)
            break;
    }
    return out;
}

/// Log-spaced grid of `n` points in [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1)));
    return out;
}

} // namespace test_support
