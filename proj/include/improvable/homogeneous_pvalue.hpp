#pragma once

// Single study type whose outcome is a p-value rho in (0, alpha] or failure.
// Under a false hypothesis Pr(rho < x) = a(x) <= x with a(alpha) = alpha;
// under a true one Pr(rho < x) = gamma(x), the power at level x. The number of
// attempts is Poisson(I) with I ~ Gamma(kappa, beta). The observed event
// O^{j,p} is "exactly j successes, all with rho >= p".

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "improvable/interest_framework.hpp"

namespace improvable {

struct CurvePoint {
    double x;
    double value;
};

// Piecewise-linear interpolation over strictly increasing x, clamped to the
// end values outside the table.
class CurveTable {
public:
    explicit CurveTable(std::vector<CurvePoint> points);

    double operator()(double x) const;
    const std::vector<CurvePoint>& points() const noexcept { return points_; }

private:
    std::vector<CurvePoint> points_;
};

// Power curve x -> gamma(x).
class PowerCurve {
public:
    // gamma(x) = 1 - Phi(Phi^{-1}(1 - x) - shift), shift >= 0.
    static PowerCurve normal_shift(double shift);
    static PowerCurve table(std::vector<CurvePoint> points);

    double operator()(double x) const;

    // The shift constant for normal-shift curves, nullopt for tables.
    std::optional<double> shift() const;

private:
    struct NormalShift {
        double shift;
    };
    explicit PowerCurve(std::variant<NormalShift, CurveTable> curve) : curve_(std::move(curve)) {}

    std::variant<NormalShift, CurveTable> curve_;
};

// Null distribution function x -> a(x) of the achieved p-value.
class NullCurve {
public:
    static NullCurve identity();
    // Each point must satisfy value <= x.
    static NullCurve table(std::vector<CurvePoint> points);

    double operator()(double x) const;
    bool is_identity() const noexcept { return !table_.has_value(); }

private:
    explicit NullCurve(std::optional<CurveTable> table) : table_(std::move(table)) {}

    std::optional<CurveTable> table_;
};

class HomogeneousParams {
public:
    // Validates 0 < alpha < 1, a(alpha) = alpha within 1e-9, gamma(x) in [0,1],
    // and a nondegenerate hypothesis prior.
    HomogeneousParams(double alpha, PowerCurve power, NullCurve null, double hypothesis_prior,
                      GammaPrior interest);

    double alpha() const noexcept { return alpha_; }
    const PowerCurve& power() const noexcept { return power_; }
    const NullCurve& null() const noexcept { return null_; }
    double hypothesis_prior() const noexcept { return hypothesis_prior_; }
    const GammaPrior& interest() const noexcept { return interest_; }

    HomogeneousParams with_interest(GammaPrior interest) const;

private:
    double alpha_;
    PowerCurve power_;
    NullCurve null_;
    double hypothesis_prior_;
    GammaPrior interest_;
};

double normal_shift_power(double x, double shift);

/// effect * sqrt(n) / sd: the mean of the test statistic under the alternative.
double shift_from_design(double effect, double sd, int n);

/// R_{j,p,alpha} = Pr(O^{j,p} | truth):
///   beta^kappa Gamma(j+kappa) / (Gamma(kappa) j!) * d^j / (beta + t)^(j+kappa)
/// with (d, t) = (a(alpha) - a(p), a(alpha)) or (gamma(alpha) - gamma(p), gamma(alpha)).
double homogeneous_observation_probability(const HomogeneousParams& params, Truth truth,
                                           std::int64_t j, double p);
double log_homogeneous_observation_probability(const HomogeneousParams& params, Truth truth,
                                               std::int64_t j, double p);

/// R^T / R^F.
double homogeneous_likelihood_ratio(const HomogeneousParams& params, std::int64_t j, double p);
double log_homogeneous_likelihood_ratio(const HomogeneousParams& params, std::int64_t j, double p);

double homogeneous_posterior(const HomogeneousParams& params, std::int64_t j, double p);

/// LR(j+1) / LR(j) = ((g(a) - g(p)) / (a(a) - a(p))) * (beta + a(a)) / (beta + g(a)), constant in j.
double homogeneous_step_factor(const HomogeneousParams& params, double p);

enum class ParadoxRegime {
    BelowThreshold,  // paradox iff beta < bound
    AboveThreshold,  // paradox iff beta > bound
    Always,          // paradox for every beta > 0
    Never,
};

struct HomogeneousThreshold {
    ParadoxRegime regime;
    // numerator / denominator of the rate condition, computed with the exact
    // a(p); 0 when the denominator vanishes. The regime says how to read it:
    // a nonpositive bound in the Never regime means no rate gives a paradox.
    double bound;
    // (alpha g(p) - p g(alpha)) / ((g(alpha) - g(p)) - (alpha - p)): the
    // bound obtained by replacing a(p) with p. Present when positive and
    // finite; equals `bound` for the identity null.
    std::optional<double> sufficient_bound;

    bool paradoxical_at(double rate) const;
};

/// Rate condition for the homogeneous paradox at cut-off p < alpha.
HomogeneousThreshold homogeneous_paradox_threshold(double alpha, double p, const PowerCurve& power,
                                                   const NullCurve& null);

/// gamma(p)/p > gamma(alpha)/alpha > 1.
bool homogeneous_condition_holds(double alpha, double p, const PowerCurve& power);

/// True iff gamma(p)/p > gamma(alpha)/alpha for every p in the grid, for the
/// normal-shift curve with the given shift.
bool ratio_monotonicity_check(double shift, double alpha, std::span<const double> grid);

}  // namespace improvable
