#pragma once

// Special functions and probability primitives.
//
// Incomplete gamma functions use the standard indexing
//   gamma(s, x) = integral_0^x t^(s-1) e^(-t) dt.
// Anything written as "integral_0^a e^(-x) x^b dx" is gamma(b + 1, a).

#include <cstdint>

namespace improvable {

// Real number in [0, 1]. Construction from an out-of-range value throws
// DomainError.
class Probability {
public:
    Probability(double value);  // NOLINT(google-explicit-constructor)

    double value() const noexcept { return value_; }
    operator double() const noexcept { return value_; }  // NOLINT

private:
    double value_;
};

// Finite real number > 0.
class PositiveReal {
public:
    PositiveReal(double value);  // NOLINT(google-explicit-constructor)

    double value() const noexcept { return value_; }
    operator double() const noexcept { return value_; }  // NOLINT

private:
    double value_;
};

/// ln Gamma(x) for x > 0, relative error below 1e-12 everywhere including the
/// zeros at x = 1 and x = 2.
double log_gamma(PositiveReal x);

/// Unregularized lower incomplete gamma function gamma(s, x).
/// Series for x < s + 1, Lentz continued fraction otherwise. Overflows to
/// +inf once Gamma(s) does; use log_lower_incomplete_gamma for large s.
double lower_incomplete_gamma(PositiveReal s, double x);

/// ln gamma(s, x); returns -inf at x = 0.
double log_lower_incomplete_gamma(PositiveReal s, double x);

/// P(s, x) = gamma(s, x) / Gamma(s).
double regularized_lower_incomplete_gamma(PositiveReal s, double x);

/// Q(s, x) = 1 - P(s, x), computed without cancellation for large x.
double regularized_upper_incomplete_gamma(PositiveReal s, double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse of normal_cdf on (0, 1): AS241 rational approximation followed by
/// one Newton step against normal_cdf.
double normal_quantile(Probability p);

/// Poisson probability mass, evaluated in log space.
double poisson_pmf(std::int64_t k, PositiveReal lambda);
double log_poisson_pmf(std::int64_t k, PositiveReal lambda);

}  // namespace improvable
