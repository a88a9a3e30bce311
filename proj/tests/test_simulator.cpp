#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "improvable/errors.hpp"
#include "improvable/numerics.hpp"
#include "improvable/simulator.hpp"
#include "support/generators.hpp"

using namespace improvable;

namespace {

FrameworkParams standard(double kappa = 1.0, double beta = 0.1, double prior = 0.5) {
    return FrameworkParams(EvidenceModel{{0.05, 0.2}, {0.01, 0.9}, 1.0, prior}, GammaPrior(kappa, beta));
}

SimulationConfig config(std::uint64_t samples, std::uint64_t seed, unsigned threads = 1) {
    SimulationConfig c;
    c.samples = samples;
    c.seed = seed;
    c.threads = threads;
    return c;
}

std::uint64_t cell_sum(const JointCountTable& t) {
    std::uint64_t sum = 0;
    for (Truth truth : {Truth::False, Truth::True}) {
        for (int j = 0; j <= t.max_count(); ++j) {
            for (int k = 0; k <= t.max_count(); ++k) sum += t.tally(truth, j, k);
        }
    }
    return sum;
}

}  // namespace

TEST_CASE("count table bookkeeping") {
    JointCountTable a(3);
    a.record(Truth::True, 0, 0);
    a.record(Truth::False, 3, 1);
    a.record(Truth::True, 4, 0);
    a.record_discarded();
    CHECK(a.total() == 4);
    CHECK(a.overflow() == 1);
    CHECK(a.discarded() == 1);
    CHECK(a.tally(Truth::False, 3, 1) == 1);
    CHECK(a.occupants(0, 0) == 1);

    JointCountTable b(3);
    b.record(Truth::False, 3, 1);
    b.record_strong_attempts(2);
    b.record_strong_attempts(9);
    JointCountTable ab = a;
    ab.merge(b);
    JointCountTable ba = b;
    ba.merge(a);
    CHECK(ab == ba);
    CHECK(ab.tally(Truth::False, 3, 1) == 2);
    CHECK(ab.strong_attempt_overflow() == 1);
    CHECK(cell_sum(ab) + ab.overflow() + ab.discarded() == ab.total());

    CHECK_THROWS_AS(ab.merge(JointCountTable(4)), ValidationError);
    CHECK_THROWS_AS(JointCountTable(0), ValidationError);
    CHECK_THROWS_AS(config(0, 1).validate(), ValidationError);
}

TEST_CASE("framework simulation is deterministic across thread counts") {
    const auto params = standard();
    const auto reference = simulate_framework(params, config(20000, 99, 1));
    for (unsigned threads : {2U, 3U, 7U}) {
        CHECK(simulate_framework(params, config(20000, 99, threads)) == reference);
    }
    CHECK_FALSE(simulate_framework(params, config(20000, 100, 1)) == reference);
    CHECK(cell_sum(reference) + reference.overflow() + reference.discarded() == reference.total());
    CHECK(reference.total() == 20000);
    CHECK(reference.discarded() == 0);

    const HomogeneousParams hp(0.05, PowerCurve::normal_shift(1.0), NullCurve::identity(), 0.5,
                               GammaPrior(1.0, 0.1));
    const auto href = simulate_homogeneous(hp, config(20000, 5, 1), 0.025);
    for (unsigned threads : {2U, 5U}) {
        CHECK(simulate_homogeneous(hp, config(20000, 5, threads), 0.025) == href);
    }
    CHECK(cell_sum(href) + href.overflow() + href.discarded() == href.total());
}

TEST_CASE("table invariant holds for random configurations") {
    gen::Gen g(51);
    for (int c = 0; c < 20; ++c) {
        const auto params = standard(g.log_uniform(0.3, 3.0), g.log_uniform(0.01, 1.0), g.uniform(0.1, 0.9));
        SimulationConfig cfg = config(static_cast<std::uint64_t>(g.integer(1, 3000)), g.integer(0, 1 << 30),
                                      static_cast<unsigned>(g.integer(1, 4)));
        cfg.max_count_tracked = g.integer(1, 8);
        const auto t = simulate_framework(params, cfg);
        INFO("case " << c);
        CHECK(cell_sum(t) + t.overflow() == t.total());
        CHECK(t.total() == cfg.samples);
        const auto& hist = t.strong_attempts();
        CHECK(std::accumulate(hist.begin(), hist.end(), std::uint64_t{0}) + t.strong_attempt_overflow() ==
              t.total());
    }
}

TEST_CASE("tiny interest concentrates at no successes") {
    const auto params = standard(1.0, 1e6);
    const auto t = simulate_framework(params, config(10000, 3));
    CHECK(t.occupants(0, 0) >= 9990);
}

TEST_CASE("framework posteriors agree with the closed form") {
    const auto params = standard();
    const auto t = simulate_framework(params, config(400000, 11, 0));
    const auto cmp = compare_framework_posteriors(params, t, 50, 4.0);
    int ok = 0;
    for (const auto& c : cmp) {
        INFO("cell " << c.j << "," << c.k << " z " << c.z);
        CHECK(c.status != CellStatus::Deviates);
        if (c.status == CellStatus::Ok) {
            ++ok;
            CHECK(c.occupants >= 50);
            CHECK(std::abs(c.standard_error - std::sqrt(c.closed_form * (1 - c.closed_form) / c.occupants)) < 1e-15);
        } else {
            CHECK(c.occupants < 50);
        }
    }
    CHECK(ok > 20);

    const auto nb = negative_binomial_marginal_check(params, t);
    CHECK(nb.passes);
    CHECK(nb.qualifying_cells > 10);
}

TEST_CASE("negative binomial check detects a wrong prior") {
    const auto t = simulate_framework(standard(1.0, 0.1), config(200000, 12, 0));
    CHECK_FALSE(negative_binomial_marginal_check(standard(1.0, 0.12), t).passes);
}

TEST_CASE("homogeneous simulation") {
    const HomogeneousParams flat(0.05, PowerCurve::normal_shift(0.0), NullCurve::identity(), 0.3,
                                 GammaPrior(2.0, 0.05));
    const auto t = simulate_homogeneous(flat, config(200000, 21, 0), 0.02);
    for (const auto& c : compare_homogeneous_posteriors(flat, t, 0.02, 50, 4.0)) {
        INFO("j " << c.j);
        CHECK(c.closed_form == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(c.status != CellStatus::Deviates);
    }

    const HomogeneousParams hp(0.05, PowerCurve::normal_shift(1.0), NullCurve::identity(), 0.5,
                               GammaPrior(1.0, 0.1));
    const auto h = simulate_homogeneous(hp, config(400000, 22, 0), 0.025);
    CHECK(h.discarded() > 0);
    int ok = 0;
    for (const auto& c : compare_homogeneous_posteriors(hp, h, 0.025, 50, 4.0)) {
        INFO("j " << c.j << " z " << c.z);
        CHECK(c.status != CellStatus::Deviates);
        ok += c.status == CellStatus::Ok;
    }
    CHECK(ok >= 4);

    // p_floor = 0 conditions on nothing.
    const auto none = simulate_homogeneous(hp, config(50000, 23, 0), 0.0);
    CHECK(none.discarded() == 0);
    CHECK(cell_sum(none) + none.overflow() == none.total());

    CHECK_THROWS_AS(simulate_homogeneous(hp, config(10, 1), 0.05), DomainError);
}

TEST_CASE("poisson thinning") {
    for (const auto& [lambda, p] : {std::pair{5.0, 0.3}, std::pair{0.5, 0.9}, std::pair{20.0, 0.05}}) {
        INFO("lambda " << lambda << " p " << p);
        const auto r = poisson_thinning_check(lambda, p, config(1000000, 31, 0));
        CHECK(r.law.passes);
        CHECK(r.law.qualifying_cells >= 3);
        CHECK(r.law.max_abs_deviation < 5e-3);
    }

    const auto all = poisson_thinning_check(4.0, 1.0, config(20000, 32));
    CHECK(all.source_counts == all.thinned_counts);
    const auto none = poisson_thinning_check(4.0, 0.0, config(20000, 33));
    REQUIRE(none.thinned_counts.size() >= 1);
    CHECK(none.thinned_counts[0] == 20000);
    CHECK(std::accumulate(none.thinned_counts.begin() + 1, none.thinned_counts.end(), std::uint64_t{0}) == 0);
    CHECK(none.law.passes);
    CHECK(none.law.max_abs_deviation == 0.0);
}

TEST_CASE("monte carlo error shrinks like one over root n") {
    // Mean squared frequency error of the thinned histogram, pooled over
    // seeds, at n and 4n samples.
    const auto pooled_rms = [](std::uint64_t samples, std::uint64_t seed0) {
        double sum_sq = 0.0;
        int terms = 0;
        for (std::uint64_t s = 0; s < 16; ++s) {
            const auto r = poisson_thinning_check(5.0, 0.3, config(samples, seed0 + s));
            for (std::size_t k = 0; k < r.thinned_counts.size(); ++k) {
                const double freq = static_cast<double>(r.thinned_counts[k]) / samples;
                const double diff = freq - poisson_pmf(static_cast<std::int64_t>(k), 1.5);
                sum_sq += diff * diff;
                ++terms;
            }
        }
        return std::sqrt(sum_sq / terms);
    };
    const double ratio = pooled_rms(20000, 1000) / pooled_rms(80000, 2000);
    INFO("ratio " << ratio);
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 3.0);
}

TEST_CASE("gamma sampler moments") {
    for (const auto& [shape, rate] : {std::pair{0.3, 2.0}, std::pair{0.8, 0.5}, std::pair{1.0, 1.0},
                                      std::pair{4.5, 0.1}}) {
        const int n = 400000;
        double sum = 0.0;
        double sum_sq = 0.0;
        int negative = 0;
        for (int i = 0; i < n; ++i) {
            SampleStream stream(77, static_cast<std::uint64_t>(i));
            const double x = sample_gamma(stream, shape, rate);
            negative += x < 0.0;
            sum += x;
            sum_sq += x * x;
        }
        const double mean = sum / n;
        const double var = sum_sq / n - mean * mean;
        const double true_mean = shape / rate;
        const double true_var = shape / (rate * rate);
        INFO("shape " << shape << " rate " << rate);
        CHECK(negative == 0);
        CHECK(std::abs(mean - true_mean) < 4.0 * std::sqrt(true_var / n));
        CHECK(std::abs(var / true_var - 1.0) < 0.03);
    }
}

TEST_CASE("table writers") {
    JointCountTable t(2);
    t.record(Truth::True, 1, 0);
    t.record(Truth::True, 1, 0);
    t.record(Truth::False, 0, 2);
    t.record(Truth::False, 3, 0);
    std::ostringstream csv;
    write_csv(csv, t);
    CHECK(csv.str() == "truth,j,k,tally\nfalse,0,2,1\ntrue,1,0,2\n");

    std::ostringstream js;
    write_json(js, t);
    const auto doc = nlohmann::json::parse(js.str());
    CHECK(doc["total"] == 4);
    CHECK(doc["overflow"] == 1);
    CHECK(doc["discarded"] == 0);
    CHECK(doc["cells"].size() == 2);
    CHECK(doc["cells"][1]["tally"] == 2);
    CHECK(doc["cells"][1]["truth"] == true);
}
