#include "improvable/interest_framework.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>

#include "improvable/errors.hpp"

namespace improvable {

GammaPrior::GammaPrior(double shape, double rate) : shape_(shape), rate_(rate) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw DomainError("gamma prior shape must be positive and finite");
    }
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw DomainError("gamma prior rate must be positive and finite");
    }
}

UniformPrior::UniformPrior(double upper) : upper_(upper) {
    if (!(upper > 0.0) || !std::isfinite(upper)) {
        throw DomainError("uniform prior upper bound must be positive and finite");
    }
}

void require_strength_ordering(const ErrorRates& weak, const ErrorRates& strong) {
    const double weak_lr = weak.power() / weak.alpha();
    const double strong_lr = strong.power() / strong.alpha();
    if (!(strong_lr > weak_lr && weak_lr > 1.0)) {
        std::ostringstream msg;
        msg << "strength ordering violated: need gamma_strong/alpha_strong > "
               "gamma_weak/alpha_weak > 1, got "
            << strong_lr << " and " << weak_lr;
        throw ValidationError(msg.str());
    }
}

FrameworkParams::FrameworkParams(EvidenceModel model, InterestPrior interest, OrderingCheck check)
    : model_(std::move(model)), interest_(std::move(interest)), check_(check) {
    for (const ErrorRates* rates : {&model_.weak, &model_.strong}) {
        if (!(rates->power() < 1.0)) {
            throw ValidationError("framework power must lie strictly inside (0, 1)");
        }
    }
    if (!(model_.weak_rate_multiplier > 0.0) || !std::isfinite(model_.weak_rate_multiplier)) {
        throw ValidationError("weak-rate multiplier c_w must be positive and finite");
    }
    if (!(model_.hypothesis_prior > 0.0 && model_.hypothesis_prior < 1.0)) {
        throw ValidationError("hypothesis prior must lie strictly inside (0, 1)");
    }
    if (check_ == OrderingCheck::Enforce) {
        require_strength_ordering(model_.weak, model_.strong);
    }
}

const GammaPrior& FrameworkParams::gamma_prior() const {
    if (const auto* p = std::get_if<GammaPrior>(&interest_)) return *p;
    throw ValidationError("operation requires a gamma interest prior");
}

const UniformPrior& FrameworkParams::uniform_prior() const {
    if (const auto* p = std::get_if<UniformPrior>(&interest_)) return *p;
    throw ValidationError("operation requires a uniform interest prior");
}

FrameworkParams FrameworkParams::with_interest(InterestPrior interest) const {
    return FrameworkParams(model_, std::move(interest), check_);
}

FrameworkParams FrameworkParams::with_hypothesis_prior(double prior) const {
    EvidenceModel m = model_;
    m.hypothesis_prior = prior;
    return FrameworkParams(std::move(m), interest_, check_);
}

Observation::Observation(std::int64_t weak_successes, std::int64_t strong_successes)
    : weak_(weak_successes), strong_(strong_successes) {
    if (weak_successes < 0 || strong_successes < 0) {
        throw DomainError("success counts must be nonnegative");
    }
}

namespace {

// Per-unit-interest Poisson rates of observed successes.
struct SuccessRates {
    double weak;
    double strong;
};

SuccessRates success_rates(const FrameworkParams& params, Truth truth) {
    const double cw = params.weak_rate_multiplier();
    if (truth == Truth::True) {
        return {cw * params.weak().power(), params.strong().power()};
    }
    return {cw * params.weak().alpha(), params.strong().alpha()};
}

// n * ln(rate), with the 0 * ln 0 = 0 convention.
double count_log_rate(std::int64_t n, double rate) {
    if (n == 0) return 0.0;
    return static_cast<double>(n) * std::log(rate);
}

// ln E_I[ Pois(j; w I) Pois(k; s I) ] under a Gamma(kappa, beta) prior:
//   beta^kappa Gamma(j+k+kappa) / (Gamma(kappa) j! k!) * w^j s^k / (beta+w+s)^(j+k+kappa)
double log_mixed_cell_gamma(const GammaPrior& prior, double w, std::int64_t j, double s,
                            std::int64_t k) {
    const double kappa = prior.shape();
    const double beta = prior.rate();
    const double n = static_cast<double>(j + k);
    return kappa * std::log(beta) + log_gamma(n + kappa) - log_gamma(kappa) -
           log_gamma(static_cast<double>(j) + 1.0) - log_gamma(static_cast<double>(k) + 1.0) +
           count_log_rate(j, w) + count_log_rate(k, s) - (n + kappa) * std::log(beta + w + s);
}

// Same expectation under Uniform(0, C):
//   (1/C) w^j s^k / (j! k!) * gamma(j+k+1, aC) / a^(j+k+1),  a = w + s.
double log_mixed_cell_uniform(const UniformPrior& prior, double w, std::int64_t j, double s,
                              std::int64_t k) {
    const double c = prior.upper();
    const double a = w + s;
    if (a == 0.0) {
        // Only reachable for j = k = 0 with both factors marginalized.
        return 0.0;
    }
    const double n1 = static_cast<double>(j + k) + 1.0;
    return -std::log(c) + count_log_rate(j, w) + count_log_rate(k, s) -
           log_gamma(static_cast<double>(j) + 1.0) - log_gamma(static_cast<double>(k) + 1.0) +
           log_lower_incomplete_gamma(n1, a * c) - n1 * std::log(a);
}

double log_mixed_cell(const InterestPrior& interest, double w, std::int64_t j, double s,
                      std::int64_t k) {
    if (const auto* g = std::get_if<GammaPrior>(&interest)) {
        return log_mixed_cell_gamma(*g, w, j, s, k);
    }
    return log_mixed_cell_uniform(std::get<UniformPrior>(interest), w, j, s, k);
}

}  // namespace

double log_observation_probability(const FrameworkParams& params, Truth truth,
                                   const Observation& obs) {
    const SuccessRates r = success_rates(params, truth);
    return log_mixed_cell(params.interest(), r.weak, obs.weak_successes(), r.strong,
                          obs.strong_successes());
}

double observation_probability(const FrameworkParams& params, Truth truth,
                               const Observation& obs) {
    return std::exp(log_observation_probability(params, truth, obs));
}

double log_likelihood_ratio(const FrameworkParams& params, const Observation& obs) {
    const double j = static_cast<double>(obs.weak_successes());
    const double k = static_cast<double>(obs.strong_successes());
    const double cw = params.weak_rate_multiplier();
    const double aw = params.weak().alpha();
    const double gw = params.weak().power();
    const double as = params.strong().alpha();
    const double gs = params.strong().power();
    const double base = j * std::log(gw / aw) + k * std::log(gs / as);

    if (const auto* g = std::get_if<GammaPrior>(&params.interest())) {
        const double beta = g->rate();
        return base + (j + k + g->shape()) *
                          std::log((beta + as + cw * aw) / (beta + gs + cw * gw));
    }
    // Uniform: the normalizing constants cancel, leaving the rate ratio and
    // the ratio of incomplete gamma functions at the two total rates.
    const double c = params.uniform_prior().upper();
    const double false_total = as + cw * aw;
    const double true_total = gs + cw * gw;
    const double n1 = j + k + 1.0;
    return base + n1 * std::log(false_total / true_total) +
           log_lower_incomplete_gamma(n1, c * true_total) -
           log_lower_incomplete_gamma(n1, c * false_total);
}

double log_likelihood_ratio_shifted_indexing(const FrameworkParams& params,
                                             const Observation& obs) {
    const double c = params.uniform_prior().upper();
    const double j = static_cast<double>(obs.weak_successes());
    const double k = static_cast<double>(obs.strong_successes());
    const double cw = params.weak_rate_multiplier();
    const double false_total = params.strong().alpha() + cw * params.weak().alpha();
    const double true_total = params.strong().power() + cw * params.weak().power();
    const double n1 = j + k + 1.0;
    return j * std::log(params.weak().power() / params.weak().alpha()) +
           k * std::log(params.strong().power() / params.strong().alpha()) +
           n1 * std::log(false_total / true_total) +
           log_lower_incomplete_gamma(n1 + 1.0, c * true_total) -
           log_lower_incomplete_gamma(n1 + 1.0, c * false_total);
}

double likelihood_ratio(const FrameworkParams& params, const Observation& obs) {
    return std::exp(log_likelihood_ratio(params, obs));
}

double posterior(const FrameworkParams& params, const Observation& obs) {
    return posterior_from_log_lr(params.hypothesis_prior(), log_likelihood_ratio(params, obs));
}

double weak_step_factor(const FrameworkParams& params, const Observation& obs) {
    const Observation next(obs.weak_successes() + 1, obs.strong_successes());
    return std::exp(log_likelihood_ratio(params, next) - log_likelihood_ratio(params, obs));
}

double paradox_rate_threshold(const ErrorRates& weak, const ErrorRates& strong) {
    try {
        require_strength_ordering(weak, strong);
    } catch (const ValidationError& e) {
        throw DomainError(e.what());
    }
    return (strong.power() * weak.alpha() - weak.power() * strong.alpha()) /
           (weak.power() - weak.alpha());
}

bool is_paradoxical(const FrameworkParams& params) {
    const GammaPrior& prior = params.gamma_prior();
    return prior.rate() < paradox_rate_threshold(params.weak(), params.strong());
}

namespace {

bool strictly_decreasing(double current, double next) {
    return current - next > kPosteriorTieTolerance;
}

// Incomplete-gamma form of ln LR(j+1,k) - ln LR(j,k) with n = j + k:
//   ln(g_w/a_w) + ln(A_F/A_T)
//   + ln gamma(n+2, C A_T) - ln gamma(n+2, C A_F)
//   + ln gamma(n+1, C A_F) - ln gamma(n+1, C A_T)
// where A_F = a_S + c_w a_w and A_T = g_S + c_w g_w.
double uniform_log_step(const FrameworkParams& params, std::int64_t total) {
    const double c = params.uniform_prior().upper();
    const double cw = params.weak_rate_multiplier();
    const double false_total = params.strong().alpha() + cw * params.weak().alpha();
    const double true_total = params.strong().power() + cw * params.weak().power();
    const double n = static_cast<double>(total);
    return std::log(params.weak().power() / params.weak().alpha()) +
           std::log(false_total / true_total) +
           log_lower_incomplete_gamma(n + 2.0, c * true_total) -
           log_lower_incomplete_gamma(n + 2.0, c * false_total) +
           log_lower_incomplete_gamma(n + 1.0, c * false_total) -
           log_lower_incomplete_gamma(n + 1.0, c * true_total);
}

}  // namespace

std::vector<UniformParadoxCell> uniform_paradox_cells(const FrameworkParams& params, int max_total) {
    params.uniform_prior();
    if (max_total < 0) {
        throw DomainError("K must be nonnegative");
    }
    std::vector<UniformParadoxCell> cells;
    for (std::int64_t total = 0; total <= max_total; ++total) {
        const double log_step = uniform_log_step(params, total);
        for (std::int64_t k = 0; k <= total; ++k) {
            const std::int64_t j = total - k;
            const double current = posterior(params, Observation(j, k));
            const double next = posterior(params, Observation(j + 1, k));
            cells.push_back({j, k, log_step, log_step < 0.0, strictly_decreasing(current, next)});
        }
    }
    return cells;
}

bool is_paradoxical_uniform_up_to(const FrameworkParams& params, int max_total) {
    for (const auto& cell : uniform_paradox_cells(params, max_total)) {
        if (!cell.condition_holds || !cell.posterior_decreases) return false;
    }
    return true;
}

double min_uniform_upper_for(const EvidenceModel& model, int max_total) {
    require_strength_ordering(model.weak, model.strong);
    const auto paradox_at = [&](double c) {
        return is_paradoxical_uniform_up_to(FrameworkParams(model, UniformPrior(c)), max_total);
    };
    const auto holds = [&](double c) {
        return paradox_at(c) && paradox_at(2.0 * c) && paradox_at(10.0 * c);
    };

    double hi = 1.0;
    while (!holds(hi)) {
        hi *= 2.0;
        if (hi > 1e12) {
            throw std::runtime_error("no paradox-inducing uniform upper bound below 1e12");
        }
    }
    double lo = hi / 2.0;
    while (holds(lo)) {
        hi = lo;
        lo /= 2.0;
        if (lo < 1e-12) return hi;
    }
    while (hi / lo - 1.0 > 1e-6) {
        const double mid = std::sqrt(lo * hi);
        if (holds(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

namespace {

// One inclusion-exclusion term for a single count factor: coefficient, whether
// the factor's Poisson rate is kept (false means the factor is marginalized
// out, i.e. "any count"), and the exact count.
struct FactorTerm {
    double sign;
    bool keep_rate;
    std::int64_t count;
};

std::vector<FactorTerm> expand(const CountSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::vector<FactorTerm> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Exactly>) {
                if (s.count < 0) throw DomainError("exact count must be nonnegative");
                return {{1.0, true, s.count}};
            } else if constexpr (std::is_same_v<T, AnyCount>) {
                return {{1.0, false, 0}};
            } else {
                // at least one = any - exactly zero
                return {{1.0, false, 0}, {-1.0, true, 0}};
            }
        },
        spec);
}

}  // namespace

double aggregate_probability(const FrameworkParams& params, Truth truth, const CountEvent& event) {
    const SuccessRates r = success_rates(params, truth);
    struct Term {
        double sign;
        double weak_rate;
        std::int64_t j;
        double strong_rate;
        std::int64_t k;
        double log_value;
    };
    std::vector<Term> terms;
    for (const FactorTerm& w : expand(event.weak)) {
        for (const FactorTerm& s : expand(event.strong)) {
            // Families: Q_{>=0,k} (weak marginalized), Q_{0,k}, Q_{>=1,>=0}
            // = 1 - Q_{0,>=0}, and Q_{>=1,0} = Q_{>=0,0} - Q_{0,0}.
            const double wr = w.keep_rate ? r.weak : 0.0;
            const double sr = s.keep_rate ? r.strong : 0.0;
            terms.push_back({w.sign * s.sign, wr, w.count, sr, s.count,
                             log_mixed_cell(params.interest(), wr, w.count, sr, s.count)});
        }
    }
    if (terms.size() == 2 && terms[0].sign > 0.0 && terms[1].sign < 0.0) {
        // e^a - e^b = e^a (1 - e^(b-a)), keeps precision when the terms are close.
        double delta = terms[1].log_value - terms[0].log_value;
        if (const auto* g = std::get_if<GammaPrior>(&params.interest())) {
            // The second term switches on one factor's rate at count zero, so
            // b - a = -(m + kappa) ln(1 + rate / (beta + other_rate)), where
            // m and other_rate belong to the unchanged factor.
            const bool weak_differs = terms[0].weak_rate != terms[1].weak_rate;
            const double rate = weak_differs ? terms[1].weak_rate : terms[1].strong_rate;
            const double other_rate = weak_differs ? terms[1].strong_rate : terms[1].weak_rate;
            const auto m = static_cast<double>(weak_differs ? terms[1].k : terms[1].j);
            delta = -(m + g->shape()) * std::log1p(rate / (g->rate() + other_rate));
        }
        return std::exp(terms[0].log_value) * -std::expm1(delta);
    }
    double sum = 0.0;
    for (const Term& t : terms) sum += t.sign * std::exp(t.log_value);
    return sum;
}

namespace {

const CountEvent kWeakOnly{AtLeastOne{}, Exactly{0}};
const CountEvent kNothing{Exactly{0}, Exactly{0}};

}  // namespace

double weak_only_likelihood_ratio(const FrameworkParams& params) {
    const GammaPrior& prior = params.gamma_prior();
    if (prior.shape() == 1.0) {
        const double beta = prior.rate();
        const double cw = params.weak_rate_multiplier();
        const double aw = params.weak().alpha();
        const double gw = params.weak().power();
        const double as = params.strong().alpha();
        const double gs = params.strong().power();
        return (gw / aw) * (beta + as) * (beta + as + cw * aw) /
               ((beta + gs) * (beta + gs + cw * gw));
    }
    return aggregate_probability(params, Truth::True, kWeakOnly) /
           aggregate_probability(params, Truth::False, kWeakOnly);
}

bool general_paradox_check(const FrameworkParams& params) {
    params.gamma_prior();
    const auto event_posterior = [&](const CountEvent& event) {
        const double lr = aggregate_probability(params, Truth::True, event) /
                          aggregate_probability(params, Truth::False, event);
        return posterior_from_lr(params.hypothesis_prior(), lr);
    };
    return strictly_decreasing(event_posterior(kNothing), event_posterior(kWeakOnly));
}

double strong_attempt_count_pmf(const GammaPrior& prior, std::int64_t n) {
    if (n < 0) {
        throw DomainError("attempt count must be nonnegative");
    }
    const double kappa = prior.shape();
    const double beta = prior.rate();
    const double nd = static_cast<double>(n);
    const double log_pmf = log_gamma(nd + kappa) - log_gamma(kappa) - log_gamma(nd + 1.0) +
                           kappa * std::log(beta / (beta + 1.0)) - nd * std::log1p(beta);
    return std::exp(log_pmf);
}

}  // namespace improvable
