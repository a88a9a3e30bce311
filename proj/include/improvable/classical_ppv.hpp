#pragma once

// Positive predictive value of study successes for identical studies,
// with and without publication bias hiding failures.

#include "improvable/numerics.hpp"

namespace improvable {

// False-positive rate and power of a study design.
class ErrorRates {
public:
    // Requires 0 < alpha < 1 and 0 < power <= 1.
    ErrorRates(double alpha, double power);

    double alpha() const noexcept { return alpha_; }
    double power() const noexcept { return power_; }

    // power > alpha: a success is more likely under a true hypothesis.
    bool informative() const noexcept { return power_ > alpha_; }

private:
    double alpha_;
    double power_;
};

/// power / alpha.
double likelihood_ratio_single(const ErrorRates& rates);

/// prior / (prior + (1 - prior) / lr). Degenerate priors 0 and 1 are rejected.
double posterior_from_lr(Probability prior, PositiveReal lr);

/// Same posterior from ln(lr); stays accurate when lr under- or overflows.
double posterior_from_log_lr(Probability prior, double log_lr);

/// Likelihood ratio of observing at least one success out of n attempted
/// studies: (1 - (1-power)^n) / (1 - (1-alpha)^n).
double likelihood_ratio_at_least_one(const ErrorRates& rates, int n);

/// Likelihood ratio of exactly j successes out of n. The binomial
/// coefficients cancel, leaving (power/alpha)^j ((1-power)/(1-alpha))^(n-j).
double likelihood_ratio_exactly_j(const ErrorRates& rates, int n, int j);

}  // namespace improvable
