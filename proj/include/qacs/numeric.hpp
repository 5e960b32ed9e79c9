#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace qacs {

/// Raised when an integral or series cannot be evaluated to the requested accuracy.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Neumaier-compensated running sum. Also tracks sum of |terms| so callers can
/// estimate the condition number of an alternating series.
class compensated_sum {
public:
    void add(double term) noexcept
    {
        const double t = sum_ + term;
        if (std::abs(sum_) >= std::abs(term))
            carry_ += (sum_ - t) + term;
        else
            carry_ += (term - t) + sum_;
        sum_ = t;
        magnitude_ += std::abs(term);
    }

    compensated_sum& operator+=(double term) noexcept
    {
        add(term);
        return *this;
    }

    [[nodiscard]] double value() const noexcept { return sum_ + carry_; }
    [[nodiscard]] double magnitude() const noexcept { return magnitude_; }

    /// sum|t_i| / |sum t_i|; infinite when the sum cancels to zero.
    [[nodiscard]] double condition() const noexcept
    {
        const double v = std::abs(value());
        if (v == 0.0)
            return magnitude_ == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        return magnitude_ / v;
    }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
    double magnitude_ = 0.0;
};

inline double log_binomial(int n, int k)
{
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// C(n, k). Exact product for n <= 30, log-space above that.
inline double binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0.0;
    if (n > 30)
        return std::exp(log_binomial(n, k));
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return std::round(r);
}

/// Binomial(n, p) mass at k, evaluated in log space so that large n does not overflow.
inline double binomial_pmf(int n, int k, double p)
{
    if (k < 0 || k > n)
        return 0.0;
    if (p <= 0.0)
        return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0)
        return k == n ? 1.0 : 0.0;
    return std::exp(log_binomial(n, k) + k * std::log(p) + (n - k) * std::log1p(-p));
}

inline double log2_1p(double x) { return std::log1p(x) / std::log(2.0); }

} // namespace qacs
