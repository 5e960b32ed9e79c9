#pragma once

#include "qacs/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qacs {

struct quad_result {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct panel {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const panel& other) const { return error < other.error; }
};

template <class F>
panel gauss_kronrod_15(const F& f, double lo, double hi)
{
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double f_center = f(center);
    double kronrod = f_center * kronrod_weights[7];
    double gauss = f_center * gauss_weights[3];
    double abs_kronrod = std::abs(kronrod);
    std::array<double, 7> f_lo{}, f_hi{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        f_lo[j] = f(center - dx);
        f_hi[j] = f(center + dx);
        const double pair = f_lo[j] + f_hi[j];
        kronrod += kronrod_weights[j] * pair;
        abs_kronrod += kronrod_weights[j] * (std::abs(f_lo[j]) + std::abs(f_hi[j]));
        if (j % 2 == 1)
            gauss += gauss_weights[j / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = kronrod_weights[7] * std::abs(f_center - mean);
    for (int j = 0; j < 7; ++j)
        asc += kronrod_weights[j] * (std::abs(f_lo[j] - mean) + std::abs(f_hi[j] - mean));

    const double value = kronrod * half;
    asc *= std::abs(half);
    abs_kronrod *= std::abs(half);
    double error = std::abs((kronrod - gauss) * half);
    if (asc != 0.0 && error != 0.0)
        error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_kronrod > std::numeric_limits<double>::min() / (50.0 * eps))
        error = std::max(50.0 * eps * abs_kronrod, error);
    if (!std::isfinite(value))
        throw numerical_error("non-finite integrand on [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    return {lo, hi, value, error};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration. Semi-infinite ranges are
/// mapped onto [0, 1) with x = a + t / (1 - t).
struct quadrature {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    int max_intervals = 4000;

    bool operator==(const quadrature&) const = default;

    template <class F>
    [[nodiscard]] quad_result integrate_detailed(const F& f, double lo, double hi) const
    {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw std::invalid_argument("quadrature tolerances must be positive");
        if (lo == hi)
            return {};
        const bool flipped = hi < lo;
        if (flipped)
            std::swap(lo, hi);
        quad_result r;
        if (std::isinf(hi)) {
            auto mapped = [&f, lo](double t) {
                const double s = 1.0 - t;
                const double v = f(lo + t / s);
                return v == 0.0 ? 0.0 : v / (s * s);
            };
            r = adaptive(mapped, 0.0, 1.0);
        } else {
            r = adaptive(f, lo, hi);
        }
        if (flipped)
            r.value = -r.value;
        return r;
    }

    template <class F>
    [[nodiscard]] double integrate(const F& f, double lo, double hi) const
    {
        return integrate_detailed(f, lo, hi).value;
    }

    /// Integral over [lo, infinity).
    template <class F>
    [[nodiscard]] double integrate_to_infinity(const F& f, double lo) const
    {
        return integrate_detailed(f, lo, std::numeric_limits<double>::infinity()).value;
    }

    /// Integral over [lo, hi] split at lo + first, lo + 2 first, lo + 4 first, ... so that
    /// mass concentrated near lo is never straddled by one wide panel.
    template <class F>
    [[nodiscard]] double integrate_doubling(const F& f, double lo, double hi, double first) const
    {
        if (!(first > 0.0))
            throw std::invalid_argument("integrate_doubling: first panel width must be positive");
        compensated_sum total;
        double a = lo;
        for (double w = first; a < hi; w *= 2.0) {
            const double b = std::min(hi, lo + w);
            total += integrate(f, a, b);
            a = b;
        }
        return total.value();
    }

private:
    template <class F>
    [[nodiscard]] quad_result adaptive(const F& f, double lo, double hi) const
    {
        std::priority_queue<detail::panel> panels;
        panels.push(detail::gauss_kronrod_15(f, lo, hi));
        double total = panels.top().value;
        double error = panels.top().error;
        int count = 1;
        while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
            if (count >= max_intervals) {
                std::ostringstream msg;
                msg << "quadrature did not converge on [" << lo << ", " << hi << "]: estimate "
                    << total << ", error " << error << " after " << count << " intervals";
                throw numerical_error(msg.str());
            }
            const detail::panel worst = panels.top();
            panels.pop();
            const double mid = 0.5 * (worst.lo + worst.hi);
            if (!(mid > worst.lo && mid < worst.hi)) {
                // Interval cannot be split further in double precision.
                std::ostringstream msg;
                msg << "quadrature hit roundoff limit near " << mid << " (error " << error << ")";
                throw numerical_error(msg.str());
            }
            const auto left = detail::gauss_kronrod_15(f, worst.lo, mid);
            const auto right = detail::gauss_kronrod_15(f, mid, worst.hi);
            total += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            panels.push(left);
            panels.push(right);
            ++count;
            if (count % 64 == 0) {
                // Re-accumulate to shed drift from the incremental updates.
                auto copy = panels;
                compensated_sum t, e;
                while (!copy.empty()) {
                    t += copy.top().value;
                    e += copy.top().error;
                    copy.pop();
                }
                total = t.value();
                error = e.value();
            }
        }
        auto copy = panels;
        compensated_sum t, e;
        while (!copy.empty()) {
            t += copy.top().value;
            e += copy.top().error;
            copy.pop();
        }
        return {t.value(), e.value(), count};
    }
};

} // namespace qacs
