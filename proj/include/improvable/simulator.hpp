#pragma once

// Monte Carlo simulation of the generative models, used as an independent
// check of the closed forms.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "improvable/homogeneous_pvalue.hpp"
#include "improvable/interest_framework.hpp"
#include "improvable/rng.hpp"

namespace improvable {

struct SimulationConfig {
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
    int max_count_tracked = 20;
    // Worker threads; 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;

    void validate() const;
};

// Tallies of (truth, j, k) over simulated samples. Samples with j or k above
// max_count land in the overflow tally; conditioned-away samples (see
// simulate_homogeneous) in the discarded tally. Also keeps the marginal
// histogram of strong attempts for the framework simulation.
//
// Invariant: sum of cell tallies + overflow + discarded == total.
class JointCountTable {
public:
    explicit JointCountTable(int max_count);

    void record(Truth truth, std::int64_t j, std::int64_t k);
    void record_discarded() { ++discarded_; ++total_; }
    void record_strong_attempts(std::int64_t n);

    // Adds another table's tallies. Addition commutes, so merge order does
    // not affect the result.
    void merge(const JointCountTable& other);

    int max_count() const noexcept { return max_count_; }
    std::uint64_t tally(Truth truth, std::int64_t j, std::int64_t k) const;
    std::uint64_t occupants(std::int64_t j, std::int64_t k) const;
    std::uint64_t overflow() const noexcept { return overflow_; }
    std::uint64_t discarded() const noexcept { return discarded_; }
    std::uint64_t total() const noexcept { return total_; }

    // Histogram of strong attempts 0..max_count; counts above go to
    // strong_attempt_overflow().
    const std::vector<std::uint64_t>& strong_attempts() const noexcept { return strong_attempts_; }
    std::uint64_t strong_attempt_overflow() const noexcept { return strong_attempt_overflow_; }

    bool operator==(const JointCountTable&) const = default;

private:
    std::size_t index(Truth truth, std::int64_t j, std::int64_t k) const;

    int max_count_;
    std::vector<std::uint64_t> cells_;
    std::uint64_t overflow_ = 0;
    std::uint64_t discarded_ = 0;
    std::uint64_t total_ = 0;
    std::vector<std::uint64_t> strong_attempts_;
    std::uint64_t strong_attempt_overflow_ = 0;
};

/// Draws one Gamma(shape, rate) variate: Marsaglia-Tsang squeeze for
/// shape >= 1, and Gamma(shape + 1) * U^(1/shape) for shape < 1.
double sample_gamma(SampleStream& stream, double shape, double rate);

/// Per sample: draw I from the interest prior, weak attempts ~ Poisson(c_w I)
/// and strong attempts ~ Poisson(I), truth ~ Bernoulli(prior), then one
/// Bernoulli per attempt. Tallies (truth, weak successes, strong successes).
JointCountTable simulate_framework(const FrameworkParams& params, const SimulationConfig& config);

/// Homogeneous p-value model. Attempts ~ Poisson(I); a normal-shift power
/// curve draws the test statistic T ~ N(shift or 0, 1) and rho = 1 - Phi(T);
/// table curves draw rho by inversion. A success (rho <= alpha) with
/// rho < p_floor discards the sample; otherwise (truth, successes, 0) is tallied.
JointCountTable simulate_homogeneous(const HomogeneousParams& params, const SimulationConfig& config,
                                     double p_floor);

// Empirical Pr(H | cell) against a reference value.
enum class CellStatus { Ok, Insufficient, Deviates };

struct PosteriorComparison {
    std::int64_t j;
    std::int64_t k;
    std::uint64_t occupants;
    double empirical;        // NaN when there are no occupants
    double closed_form;
    double standard_error;   // sqrt(closed_form (1 - closed_form) / occupants)
    double z;                // (empirical - closed_form) / standard_error
    CellStatus status;
};

/// Compares every occupied cell of a framework table with the closed-form
/// posterior. Cells with fewer than min_occupants are Insufficient; others
/// Deviate when |z| > max_z.
std::vector<PosteriorComparison> compare_framework_posteriors(const FrameworkParams& params,
                                                              const JointCountTable& table,
                                                              std::uint64_t min_occupants,
                                                              double max_z);

/// Same for the homogeneous table (k = 0 cells) at cut-off p_floor.
std::vector<PosteriorComparison> compare_homogeneous_posteriors(const HomogeneousParams& params,
                                                                const JointCountTable& table,
                                                                double p_floor,
                                                                std::uint64_t min_occupants,
                                                                double max_z);

struct CountCell {
    std::int64_t count;
    std::uint64_t observed;
    double expected_probability;
    double z;  // standardized deviation of the observed frequency
};

struct CountLawReport {
    std::vector<CountCell> cells;
    double max_abs_deviation;  // max |observed frequency - expected probability|
    int qualifying_cells;      // cells with expected count >= 100
    bool passes;               // all qualifying cells within the SE bound
};

struct ThinningReport {
    CountLawReport law;
    std::vector<std::uint64_t> source_counts;   // histogram of nu
    std::vector<std::uint64_t> thinned_counts;  // histogram of zeta
};

/// Simulates nu ~ Poisson(lambda) and zeta ~ Binomial(nu, p), and compares the
/// histogram of zeta with Poisson(p lambda) at 4 standard errors.
ThinningReport poisson_thinning_check(double lambda, double p, const SimulationConfig& config);

/// Compares the strong-attempt histogram of a gamma-prior framework simulation
/// with the negative-binomial marginal law at max_z standard errors.
CountLawReport negative_binomial_marginal_check(const FrameworkParams& params,
                                                const JointCountTable& table, double max_z = 3.0);

void write_csv(std::ostream& out, const JointCountTable& table);
void write_json(std::ostream& out, const JointCountTable& table);

}  // namespace improvable
