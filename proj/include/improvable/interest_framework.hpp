#pragma once

// Interest-level observation framework.
//
// A latent interest level I is drawn from a prior. Given I, the number of
// weak and strong studies attempted are independent Poisson(c_w I) and
// Poisson(I). The hypothesis is true with a fixed prior probability, and each
// attempt succeeds with probability power (true) or alpha (false). Only
// successes are observed.
//
// Given I, the success counts are again independent Poissons with rates
// c_w*rate_w*I and rate_s*I, so every observation probability is a mixture of
// a product of two Poisson pmfs over the interest prior. Under a gamma prior
// the mixture has a closed form in Gamma functions; under a uniform prior on
// [0, C] it is a lower incomplete gamma function.

#include <cstdint>
#include <variant>
#include <vector>

#include "improvable/classical_ppv.hpp"

namespace improvable {

// Gamma(shape kappa, rate beta) prior on the interest level.
class GammaPrior {
public:
    GammaPrior(double shape, double rate);

    double shape() const noexcept { return shape_; }
    double rate() const noexcept { return rate_; }

private:
    double shape_;
    double rate_;
};

// Uniform(0, C) prior on the interest level.
class UniformPrior {
public:
    explicit UniformPrior(double upper);

    double upper() const noexcept { return upper_; }

private:
    double upper_;
};

using InterestPrior = std::variant<GammaPrior, UniformPrior>;

enum class Truth { False, True };

// Everything in a framework except the interest prior.
struct EvidenceModel {
    ErrorRates weak;
    ErrorRates strong;
    double weak_rate_multiplier;
    double hypothesis_prior;
};

enum class OrderingCheck {
    Enforce,
    // Test fixtures only: allows uninformative designs (alpha == power).
    Skip,
};

// Immutable, validated parameter record. Construction enforces
//   power_S / alpha_S > power_w / alpha_w > 1
// unless OrderingCheck::Skip is passed.
class FrameworkParams {
public:
    FrameworkParams(EvidenceModel model, InterestPrior interest,
                    OrderingCheck check = OrderingCheck::Enforce);

    const EvidenceModel& model() const noexcept { return model_; }
    const ErrorRates& weak() const noexcept { return model_.weak; }
    const ErrorRates& strong() const noexcept { return model_.strong; }
    double weak_rate_multiplier() const noexcept { return model_.weak_rate_multiplier; }
    double hypothesis_prior() const noexcept { return model_.hypothesis_prior; }
    const InterestPrior& interest() const noexcept { return interest_; }
    OrderingCheck ordering_check() const noexcept { return check_; }

    bool has_gamma_prior() const noexcept {
        return std::holds_alternative<GammaPrior>(interest_);
    }
    // Throws ValidationError for the other family.
    const GammaPrior& gamma_prior() const;
    const UniformPrior& uniform_prior() const;

    FrameworkParams with_interest(InterestPrior interest) const;
    FrameworkParams with_hypothesis_prior(double prior) const;

private:
    EvidenceModel model_;
    InterestPrior interest_;
    OrderingCheck check_;
};

// Throws ValidationError unless power_S/alpha_S > power_w/alpha_w > 1.
void require_strength_ordering(const ErrorRates& weak, const ErrorRates& strong);

// Exactly j weak and k strong successes observed.
class Observation {
public:
    Observation(std::int64_t weak_successes, std::int64_t strong_successes);

    std::int64_t weak_successes() const noexcept { return weak_; }
    std::int64_t strong_successes() const noexcept { return strong_; }

private:
    std::int64_t weak_;
    std::int64_t strong_;
};

struct Exactly {
    std::int64_t count;
};
struct AtLeastOne {};
struct AnyCount {};

using CountSpec = std::variant<Exactly, AtLeastOne, AnyCount>;

// Event on the (weak, strong) success counts, e.g. {AtLeastOne, Exactly{0}}
// is "some weak successes and no strong success".
struct CountEvent {
    CountSpec weak;
    CountSpec strong;
};

// Posterior differences at or below this are ties (no paradox).
inline constexpr double kPosteriorTieTolerance = 1e-14;

/// Pr(O_{j,k} | truth). Closed form for both prior families, computed in log
/// space and exponentiated on return.
double observation_probability(const FrameworkParams& params, Truth truth, const Observation& obs);
double log_observation_probability(const FrameworkParams& params, Truth truth,
                                   const Observation& obs);

/// Q^T_{j,k} / Q^F_{j,k}. For the gamma prior this is
///   (g_w/a_w)^j (g_S/a_S)^k ((b + a_S + c_w a_w)/(b + g_S + c_w g_w))^(j+k+kappa).
double likelihood_ratio(const FrameworkParams& params, const Observation& obs);
double log_likelihood_ratio(const FrameworkParams& params, const Observation& obs);

/// Uniform prior only: the ratio above with both incomplete gamma functions
/// taken one order higher, gamma(j+k+2, .) in place of gamma(j+k+1, .). This
/// is what the notation int_0^a e^-x x^b dx yields when read with b = j+k+1.
/// Kept so the quadrature oracle can show which reading matches the integral.
double log_likelihood_ratio_shifted_indexing(const FrameworkParams& params,
                                             const Observation& obs);

/// Pr(H | O_{j,k}).
double posterior(const FrameworkParams& params, const Observation& obs);

/// LR(j+1, k) / LR(j, k). Independent of (j, k) for the gamma prior; depends
/// on j + k for the uniform prior.
double weak_step_factor(const FrameworkParams& params, const Observation& obs);

/// Largest gamma rate that still gives an improvable-evidence paradox:
///   (g_S a_w - g_w a_S) / (g_w - a_w).
double paradox_rate_threshold(const ErrorRates& weak, const ErrorRates& strong);

/// Gamma prior only: rate < paradox_rate_threshold (strict). For the gamma
/// closed form this is equivalent to every posterior step in j decreasing.
bool is_paradoxical(const FrameworkParams& params);

struct UniformParadoxCell {
    std::int64_t weak_successes;
    std::int64_t strong_successes;
    double log_step_factor;     // ln LR(j+1,k) - ln LR(j,k) from the incomplete-gamma condition
    bool condition_holds;       // log_step_factor < 0
    bool posterior_decreases;   // posterior(j+1,k) < posterior(j,k) beyond the tie tolerance
};

/// Per-cell evaluation of the uniform-prior paradox condition for all j + k <= K.
std::vector<UniformParadoxCell> uniform_paradox_cells(const FrameworkParams& params, int max_total);

/// Uniform prior only: the paradox ordering holds on every cell with j + k <= K,
/// by the incomplete-gamma condition and by direct posterior comparison.
bool is_paradoxical_uniform_up_to(const FrameworkParams& params, int max_total);

/// Smallest C (to 1e-6 relative) for which the uniform framework is
/// paradoxical up to K at C, 2C and 10C.
double min_uniform_upper_for(const EvidenceModel& model, int max_total);

/// Pr(event | truth). Gamma and uniform priors both use closed forms; the
/// AtLeastOne cases are expanded by inclusion-exclusion into Exactly/Any terms.
double aggregate_probability(const FrameworkParams& params, Truth truth, const CountEvent& event);

/// Q^T_{>=1,0} / Q^F_{>=1,0}: likelihood ratio of "weak successes only".
/// Gamma prior only. kappa == 1 uses the factored closed form.
double weak_only_likelihood_ratio(const FrameworkParams& params);

/// Pr(H | weak successes, no strong) < Pr(H | no successes at all).
bool general_paradox_check(const FrameworkParams& params);

/// Marginal law of the number of strong studies attempted under a gamma
/// prior: negative binomial with size kappa and success probability 1/(rate+1).
double strong_attempt_count_pmf(const GammaPrior& prior, std::int64_t n);

}  // namespace improvable
