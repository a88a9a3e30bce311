#include "improvable/classical_ppv.hpp"

#include <cmath>
#include <string>

#include "improvable/errors.hpp"

namespace improvable {

ErrorRates::ErrorRates(double alpha, double power) : alpha_(alpha), power_(power) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("false-positive rate must lie in (0, 1), got " + std::to_string(alpha));
    }
    if (!(power > 0.0 && power <= 1.0)) {
        throw DomainError("power must lie in (0, 1], got " + std::to_string(power));
    }
}

double likelihood_ratio_single(const ErrorRates& rates) { return rates.power() / rates.alpha(); }

namespace {

void check_nondegenerate(double prior) {
    if (prior <= 0.0 || prior >= 1.0) {
        throw ValidationError("hypothesis prior must lie strictly inside (0, 1), got " +
                              std::to_string(prior));
    }
}

}  // namespace

double posterior_from_lr(Probability prior, PositiveReal lr) {
    check_nondegenerate(prior);
    const double p = prior.value();
    return p / (p + (1.0 - p) / lr.value());
}

double posterior_from_log_lr(Probability prior, double log_lr) {
    check_nondegenerate(prior);
    if (std::isnan(log_lr)) {
        throw DomainError("log likelihood ratio is NaN");
    }
    const double p = prior.value();
    const double log_odds = std::log(p) - std::log1p(-p) + log_lr;
    if (log_odds >= 0.0) {
        return 1.0 / (1.0 + std::exp(-log_odds));
    }
    const double e = std::exp(log_odds);
    return e / (1.0 + e);
}

double likelihood_ratio_at_least_one(const ErrorRates& rates, int n) {
    if (n < 1) {
        throw DomainError("number of attempted studies must be >= 1");
    }
    const double nd = static_cast<double>(n);
    // 1 - (1-x)^n without cancellation for small x.
    const auto at_least_one = [nd](double x) {
        return x == 1.0 ? 1.0 : -std::expm1(nd * std::log1p(-x));
    };
    return at_least_one(rates.power()) / at_least_one(rates.alpha());
}

double likelihood_ratio_exactly_j(const ErrorRates& rates, int n, int j) {
    if (n < 1) {
        throw DomainError("number of attempted studies must be >= 1");
    }
    if (j < 0 || j > n) {
        throw DomainError("success count j must lie in [0, n]");
    }
    const double a = rates.alpha();
    const double g = rates.power();
    if (g == 1.0) {
        // Every true-hypothesis study succeeds.
        return j == n ? std::pow(g / a, n) : 0.0;
    }
    const double log_lr = j * std::log(g / a) + (n - j) * (std::log1p(-g) - std::log1p(-a));
    return std::exp(log_lr);
}

}  // namespace improvable
