#include "improvable/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "improvable/errors.hpp"
#include "improvable/numerics.hpp"

namespace improvable {

void SimulationConfig::validate() const {
    if (samples < 1) {
        throw ValidationError("simulation needs at least one sample");
    }
    if (max_count_tracked < 1) {
        throw ValidationError("max_count_tracked must be positive");
    }
}

JointCountTable::JointCountTable(int max_count)
    : max_count_(max_count),
      cells_(2 * static_cast<std::size_t>(max_count + 1) * static_cast<std::size_t>(max_count + 1), 0),
      strong_attempts_(static_cast<std::size_t>(max_count + 1), 0) {
    if (max_count < 1) {
        throw ValidationError("count table needs max_count >= 1");
    }
}

std::size_t JointCountTable::index(Truth truth, std::int64_t j, std::int64_t k) const {
    const auto side = static_cast<std::size_t>(max_count_ + 1);
    const std::size_t t = truth == Truth::True ? 1 : 0;
    return (t * side + static_cast<std::size_t>(j)) * side + static_cast<std::size_t>(k);
}

void JointCountTable::record(Truth truth, std::int64_t j, std::int64_t k) {
    ++total_;
    if (j < 0 || k < 0 || j > max_count_ || k > max_count_) {
        ++overflow_;
        return;
    }
    ++cells_[index(truth, j, k)];
}

void JointCountTable::record_strong_attempts(std::int64_t n) {
    if (n >= 0 && n <= max_count_) {
        ++strong_attempts_[static_cast<std::size_t>(n)];
    } else {
        ++strong_attempt_overflow_;
    }
}

void JointCountTable::merge(const JointCountTable& other) {
    if (other.max_count_ != max_count_) {
        throw ValidationError("cannot merge count tables of different sizes");
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
    for (std::size_t i = 0; i < strong_attempts_.size(); ++i) {
        strong_attempts_[i] += other.strong_attempts_[i];
    }
    overflow_ += other.overflow_;
    discarded_ += other.discarded_;
    total_ += other.total_;
    strong_attempt_overflow_ += other.strong_attempt_overflow_;
}

std::uint64_t JointCountTable::tally(Truth truth, std::int64_t j, std::int64_t k) const {
    if (j < 0 || k < 0 || j > max_count_ || k > max_count_) return 0;
    return cells_[index(truth, j, k)];
}

std::uint64_t JointCountTable::occupants(std::int64_t j, std::int64_t k) const {
    return tally(Truth::True, j, k) + tally(Truth::False, j, k);
}

double sample_gamma(SampleStream& stream, double shape, double rate) {
    if (shape < 1.0) {
        const double u = stream.uniform_open();
        return sample_gamma(stream, shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    std::normal_distribution<double> normal;
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal(stream);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = stream.uniform_open();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2 ||
            std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return d * v / rate;
        }
    }
}

namespace {

std::int64_t sample_poisson(SampleStream& stream, double mean) {
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(stream);
}

std::int64_t count_successes(SampleStream& stream, std::int64_t attempts, double probability) {
    std::int64_t successes = 0;
    for (std::int64_t i = 0; i < attempts; ++i) {
        if (stream.uniform() < probability) ++successes;
    }
    return successes;
}

double sample_interest(SampleStream& stream, const InterestPrior& interest) {
    if (const auto* g = std::get_if<GammaPrior>(&interest)) {
        return sample_gamma(stream, g->shape(), g->rate());
    }
    return std::get<UniformPrior>(interest).upper() * stream.uniform();
}

unsigned worker_count(const SimulationConfig& config) {
    unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
    threads = std::max(threads, 1U);
    return static_cast<unsigned>(std::min<std::uint64_t>(threads, config.samples));
}

// Splits [0, samples) into contiguous shards. Sample i always draws from
// stream (seed, i), and shard accumulators merge in shard order.
template <typename Accumulator, typename MakeAccumulator, typename PerSample>
Accumulator run_sharded(const SimulationConfig& config, MakeAccumulator make, PerSample per_sample) {
    config.validate();
    const unsigned shards = worker_count(config);
    std::vector<Accumulator> partial;
    partial.reserve(shards);
    for (unsigned s = 0; s < shards; ++s) partial.push_back(make());

    const auto run = [&](unsigned shard) {
        const std::uint64_t begin = config.samples * shard / shards;
        const std::uint64_t end = config.samples * (shard + 1) / shards;
        for (std::uint64_t i = begin; i < end; ++i) {
            SampleStream stream(config.seed, i);
            per_sample(stream, partial[shard]);
        }
    };
    if (shards == 1) {
        run(0);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(shards);
        for (unsigned s = 0; s < shards; ++s) workers.emplace_back(run, s);
        for (auto& w : workers) w.join();
    }
    Accumulator result = std::move(partial[0]);
    for (unsigned s = 1; s < shards; ++s) result.merge(partial[s]);
    return result;
}

}  // namespace

JointCountTable simulate_framework(const FrameworkParams& params, const SimulationConfig& config) {
    const double cw = params.weak_rate_multiplier();
    const double prior = params.hypothesis_prior();
    const ErrorRates weak = params.weak();
    const ErrorRates strong = params.strong();
    const InterestPrior interest = params.interest();
    return run_sharded<JointCountTable>(
        config, [&] { return JointCountTable(config.max_count_tracked); },
        [&](SampleStream& stream, JointCountTable& table) {
            const double level = sample_interest(stream, interest);
            const std::int64_t weak_attempts = sample_poisson(stream, cw * level);
            const std::int64_t strong_attempts = sample_poisson(stream, level);
            const bool is_true = stream.uniform() < prior;
            const std::int64_t j =
                count_successes(stream, weak_attempts, is_true ? weak.power() : weak.alpha());
            const std::int64_t k =
                count_successes(stream, strong_attempts, is_true ? strong.power() : strong.alpha());
            table.record_strong_attempts(strong_attempts);
            table.record(is_true ? Truth::True : Truth::False, j, k);
        });
}

namespace {

enum class PValueOutcome { Failure, Counted, BelowFloor };

PValueOutcome classify(double rho, double alpha, double p_floor) {
    if (rho > alpha) return PValueOutcome::Failure;
    return rho < p_floor ? PValueOutcome::BelowFloor : PValueOutcome::Counted;
}

}  // namespace

JointCountTable simulate_homogeneous(const HomogeneousParams& params, const SimulationConfig& config,
                                     double p_floor) {
    const double alpha = params.alpha();
    if (!(p_floor >= 0.0 && p_floor < alpha)) {
        throw DomainError("p_floor must lie in [0, alpha)");
    }
    const std::optional<double> shift = params.power().shift();
    const bool identity_null = params.null().is_identity();
    // Inversion thresholds for table-backed curves.
    const double power_alpha = params.power()(alpha);
    const double power_floor = p_floor > 0.0 ? params.power()(p_floor) : 0.0;
    const double null_alpha = params.null()(alpha);
    const double null_floor = p_floor > 0.0 ? params.null()(p_floor) : 0.0;
    const double prior = params.hypothesis_prior();
    const GammaPrior interest = params.interest();

    const auto attempt = [&](SampleStream& stream, bool is_true) {
        if (is_true ? shift.has_value() : identity_null) {
            std::normal_distribution<double> normal(is_true ? *shift : 0.0, 1.0);
            const double statistic = normal(stream);
            return classify(normal_cdf(-statistic), alpha, p_floor);
        }
        const double u = stream.uniform();
        const double at_alpha = is_true ? power_alpha : null_alpha;
        const double at_floor = is_true ? power_floor : null_floor;
        if (u >= at_alpha) return PValueOutcome::Failure;
        return u < at_floor ? PValueOutcome::BelowFloor : PValueOutcome::Counted;
    };

    return run_sharded<JointCountTable>(
        config, [&] { return JointCountTable(config.max_count_tracked); },
        [&](SampleStream& stream, JointCountTable& table) {
            const double level = sample_gamma(stream, interest.shape(), interest.rate());
            const std::int64_t attempts = sample_poisson(stream, level);
            const bool is_true = stream.uniform() < prior;
            std::int64_t counted = 0;
            bool below_floor = false;
            for (std::int64_t i = 0; i < attempts; ++i) {
                switch (attempt(stream, is_true)) {
                    case PValueOutcome::Counted:
                        ++counted;
                        break;
                    case PValueOutcome::BelowFloor:
                        below_floor = true;
                        break;
                    case PValueOutcome::Failure:
                        break;
                }
            }
            if (below_floor) {
                table.record_discarded();
            } else {
                table.record(is_true ? Truth::True : Truth::False, counted, 0);
            }
        });
}

namespace {

template <typename ClosedForm>
std::vector<PosteriorComparison> compare_cells(const JointCountTable& table, std::int64_t max_k,
                                               ClosedForm closed_form,
                                               std::uint64_t min_occupants, double max_z) {
    std::vector<PosteriorComparison> rows;
    for (std::int64_t j = 0; j <= table.max_count(); ++j) {
        for (std::int64_t k = 0; k <= max_k; ++k) {
            const std::uint64_t n = table.occupants(j, k);
            if (n == 0) continue;
            PosteriorComparison row{};
            row.j = j;
            row.k = k;
            row.occupants = n;
            row.empirical = static_cast<double>(table.tally(Truth::True, j, k)) / static_cast<double>(n);
            row.closed_form = closed_form(j, k);
            row.standard_error =
                std::sqrt(row.closed_form * (1.0 - row.closed_form) / static_cast<double>(n));
            const double diff = row.empirical - row.closed_form;
            if (row.standard_error > 0.0) {
                row.z = diff / row.standard_error;
            } else {
                row.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
            }
            if (n < min_occupants) {
                row.status = CellStatus::Insufficient;
            } else {
                row.status = std::abs(row.z) > max_z ? CellStatus::Deviates : CellStatus::Ok;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace

std::vector<PosteriorComparison> compare_framework_posteriors(const FrameworkParams& params,
                                                              const JointCountTable& table,
                                                              std::uint64_t min_occupants,
                                                              double max_z) {
    return compare_cells(
        table, table.max_count(),
        [&](std::int64_t j, std::int64_t k) { return posterior(params, Observation(j, k)); },
        min_occupants, max_z);
}

std::vector<PosteriorComparison> compare_homogeneous_posteriors(const HomogeneousParams& params,
                                                                const JointCountTable& table,
                                                                double p_floor,
                                                                std::uint64_t min_occupants,
                                                                double max_z) {
    return compare_cells(
        table, 0, [&](std::int64_t j, std::int64_t) { return homogeneous_posterior(params, j, p_floor); },
        min_occupants, max_z);
}

namespace {

struct Histogram {
    std::vector<std::uint64_t> counts;

    void add(std::int64_t value) {
        const auto v = static_cast<std::size_t>(value);
        if (v >= counts.size()) counts.resize(v + 1, 0);
        ++counts[v];
    }
    void merge(const Histogram& other) {
        if (other.counts.size() > counts.size()) counts.resize(other.counts.size(), 0);
        for (std::size_t i = 0; i < other.counts.size(); ++i) counts[i] += other.counts[i];
    }
};

struct ThinningTally {
    Histogram source;
    Histogram thinned;

    void merge(const ThinningTally& other) {
        source.merge(other.source);
        thinned.merge(other.thinned);
    }
};

template <typename Pmf>
CountLawReport compare_count_law(const std::vector<std::uint64_t>& observed, std::uint64_t samples,
                                 std::size_t cells, Pmf pmf, double max_z) {
    CountLawReport report{{}, 0.0, 0, true};
    const double n = static_cast<double>(samples);
    for (std::size_t c = 0; c < cells; ++c) {
        const std::uint64_t obs = c < observed.size() ? observed[c] : 0;
        const double expected = pmf(static_cast<std::int64_t>(c));
        const double sd = std::sqrt(n * expected * (1.0 - expected));
        const double diff = static_cast<double>(obs) - n * expected;
        double z = 0.0;
        if (sd > 0.0) {
            z = diff / sd;
        } else if (diff != 0.0) {
            z = std::numeric_limits<double>::infinity();
        }
        report.cells.push_back({static_cast<std::int64_t>(c), obs, expected, z});
        report.max_abs_deviation =
            std::max(report.max_abs_deviation, std::abs(static_cast<double>(obs) / n - expected));
        if (n * expected >= 100.0) {
            ++report.qualifying_cells;
            if (!(std::abs(z) <= max_z)) report.passes = false;
        }
    }
    return report;
}

}  // namespace

ThinningReport poisson_thinning_check(double lambda, double p, const SimulationConfig& config) {
    PositiveReal mean(lambda);
    Probability keep(p);
    ThinningTally tally = run_sharded<ThinningTally>(
        config, [] { return ThinningTally{}; },
        [&](SampleStream& stream, ThinningTally& acc) {
            const std::int64_t nu = sample_poisson(stream, mean);
            const std::int64_t zeta = count_successes(stream, nu, keep);
            acc.source.add(nu);
            acc.thinned.add(zeta);
        });
    const double thinned_mean = p * lambda;
    const auto pmf = [&](std::int64_t k) {
        if (thinned_mean == 0.0) return k == 0 ? 1.0 : 0.0;
        return poisson_pmf(k, thinned_mean);
    };
    ThinningReport report;
    report.law = compare_count_law(tally.thinned.counts, config.samples,
                                   std::max(tally.thinned.counts.size(), std::size_t{1}), pmf, 4.0);
    report.source_counts = std::move(tally.source.counts);
    report.thinned_counts = std::move(tally.thinned.counts);
    return report;
}

CountLawReport negative_binomial_marginal_check(const FrameworkParams& params,
                                                const JointCountTable& table, double max_z) {
    const GammaPrior& prior = params.gamma_prior();
    return compare_count_law(
        table.strong_attempts(), table.total(), table.strong_attempts().size(),
        [&](std::int64_t n) { return strong_attempt_count_pmf(prior, n); }, max_z);
}

void write_csv(std::ostream& out, const JointCountTable& table) {
    out << "truth,j,k,tally\n";
    for (const Truth truth : {Truth::False, Truth::True}) {
        for (std::int64_t j = 0; j <= table.max_count(); ++j) {
            for (std::int64_t k = 0; k <= table.max_count(); ++k) {
                const std::uint64_t n = table.tally(truth, j, k);
                if (n == 0) continue;
                out << (truth == Truth::True ? "true" : "false") << ',' << j << ',' << k << ','
                    << n << '\n';
            }
        }
    }
}

void write_json(std::ostream& out, const JointCountTable& table) {
    nlohmann::ordered_json doc;
    doc["max_count"] = table.max_count();
    doc["total"] = table.total();
    doc["overflow"] = table.overflow();
    doc["discarded"] = table.discarded();
    auto cells = nlohmann::ordered_json::array();
    for (const Truth truth : {Truth::False, Truth::True}) {
        for (std::int64_t j = 0; j <= table.max_count(); ++j) {
            for (std::int64_t k = 0; k <= table.max_count(); ++k) {
                const std::uint64_t n = table.tally(truth, j, k);
                if (n == 0) continue;
                cells.push_back({{"truth", truth == Truth::True}, {"j", j}, {"k", k}, {"tally", n}});
            }
        }
    }
    doc["cells"] = std::move(cells);
    doc["strong_attempts"] = table.strong_attempts();
    doc["strong_attempt_overflow"] = table.strong_attempt_overflow();
    out << doc.dump(2) << '\n';
}

}  // namespace improvable
