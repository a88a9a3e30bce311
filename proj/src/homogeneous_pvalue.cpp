#include "improvable/homogeneous_pvalue.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "improvable/errors.hpp"
#include "improvable/numerics.hpp"

namespace improvable {

CurveTable::CurveTable(std::vector<CurvePoint> points) : points_(std::move(points)) {
    if (points_.empty()) {
        throw ValidationError("curve table is empty");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const CurvePoint& pt = points_[i];
        if (!(pt.x >= 0.0 && pt.x <= 1.0) || !(pt.value >= 0.0 && pt.value <= 1.0)) {
            throw ValidationError("curve table entries must lie in [0, 1]");
        }
        if (i > 0) {
            if (!(pt.x > points_[i - 1].x)) {
                throw ValidationError("curve table x values must be strictly increasing");
            }
            if (pt.value < points_[i - 1].value) {
                throw ValidationError("curve table values must be nondecreasing");
            }
        }
    }
}

double CurveTable::operator()(double x) const {
    if (x <= points_.front().x) return points_.front().value;
    if (x >= points_.back().x) return points_.back().value;
    const auto upper = std::upper_bound(points_.begin(), points_.end(), x,
                                        [](double v, const CurvePoint& pt) { return v < pt.x; });
    const CurvePoint& hi = *upper;
    const CurvePoint& lo = *(upper - 1);
    const double t = (x - lo.x) / (hi.x - lo.x);
    return lo.value + t * (hi.value - lo.value);
}

double normal_shift_power(double x, double shift) {
    if (!(x > 0.0 && x < 1.0)) {
        throw DomainError("normal_shift_power requires 0 < x < 1, got " + std::to_string(x));
    }
    if (!std::isfinite(shift)) {
        throw DomainError("shift must be finite");
    }
    if (shift == 0.0) return x;
    // 1 - Phi(Phi^{-1}(1-x) - shift) = Phi(shift + Phi^{-1}(x))
    return normal_cdf(shift + normal_quantile(x));
}

double shift_from_design(double effect, double sd, int n) {
    if (!(effect > 0.0) || !(sd > 0.0) || n < 1) {
        throw DomainError("shift_from_design requires effect > 0, sd > 0 and n >= 1");
    }
    return effect * std::sqrt(static_cast<double>(n)) / sd;
}

PowerCurve PowerCurve::normal_shift(double shift) {
    if (!(shift >= 0.0) || !std::isfinite(shift)) {
        throw ValidationError("normal-shift power curve requires a finite shift >= 0");
    }
    return PowerCurve(NormalShift{shift});
}

PowerCurve PowerCurve::table(std::vector<CurvePoint> points) {
    return PowerCurve(CurveTable(std::move(points)));
}

double PowerCurve::operator()(double x) const {
    if (const auto* ns = std::get_if<NormalShift>(&curve_)) {
        return normal_shift_power(x, ns->shift);
    }
    return std::get<CurveTable>(curve_)(x);
}

std::optional<double> PowerCurve::shift() const {
    if (const auto* ns = std::get_if<NormalShift>(&curve_)) return ns->shift;
    return std::nullopt;
}

NullCurve NullCurve::identity() { return NullCurve(std::nullopt); }

NullCurve NullCurve::table(std::vector<CurvePoint> points) {
    CurveTable table(std::move(points));
    for (const CurvePoint& pt : table.points()) {
        if (pt.value > pt.x + 1e-12) {
            throw ValidationError("null curve must satisfy a(x) <= x");
        }
    }
    return NullCurve(std::move(table));
}

double NullCurve::operator()(double x) const { return table_ ? (*table_)(x) : x; }

HomogeneousParams::HomogeneousParams(double alpha, PowerCurve power, NullCurve null,
                                     double hypothesis_prior, GammaPrior interest)
    : alpha_(alpha),
      power_(std::move(power)),
      null_(std::move(null)),
      hypothesis_prior_(hypothesis_prior),
      interest_(interest) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("publication cutoff alpha must lie in (0, 1)");
    }
    if (!(hypothesis_prior > 0.0 && hypothesis_prior < 1.0)) {
        throw ValidationError("hypothesis prior must lie strictly inside (0, 1)");
    }
    if (std::abs(null_(alpha) - alpha) > 1e-9) {
        throw ValidationError("null curve must satisfy a(alpha) = alpha");
    }
    const double g = power_(alpha);
    if (!(g >= 0.0 && g <= 1.0)) {
        throw ValidationError("power curve must take values in [0, 1]");
    }
}

HomogeneousParams HomogeneousParams::with_interest(GammaPrior interest) const {
    return HomogeneousParams(alpha_, power_, null_, hypothesis_prior_, interest);
}

namespace {

void check_cutoff(double alpha, double p) {
    if (!(p > 0.0)) {
        throw DomainError("p-value cut-off must be positive");
    }
    if (!(p < alpha)) {
        throw DomainError("p-value cut-off must be below alpha");
    }
}

struct PValueRates {
    double window;  // Pr(success with p <= rho <= alpha) per attempt
    double total;   // Pr(success) per attempt
};

PValueRates pvalue_rates(const HomogeneousParams& params, Truth truth, double p) {
    check_cutoff(params.alpha(), p);
    if (truth == Truth::True) {
        const double ga = params.power()(params.alpha());
        return {ga - params.power()(p), ga};
    }
    const double aa = params.null()(params.alpha());
    return {aa - params.null()(p), aa};
}

}  // namespace

double log_homogeneous_observation_probability(const HomogeneousParams& params, Truth truth,
                                               std::int64_t j, double p) {
    if (j < 0) {
        throw DomainError("success count must be nonnegative");
    }
    const PValueRates r = pvalue_rates(params, truth, p);
    const double kappa = params.interest().shape();
    const double beta = params.interest().rate();
    const double jd = static_cast<double>(j);
    const double count_term = j == 0 ? 0.0 : jd * std::log(r.window);
    return kappa * std::log(beta) + log_gamma(jd + kappa) - log_gamma(kappa) -
           log_gamma(jd + 1.0) + count_term - (jd + kappa) * std::log(beta + r.total);
}

double homogeneous_observation_probability(const HomogeneousParams& params, Truth truth,
                                           std::int64_t j, double p) {
    return std::exp(log_homogeneous_observation_probability(params, truth, j, p));
}

double log_homogeneous_likelihood_ratio(const HomogeneousParams& params, std::int64_t j, double p) {
    if (j < 0) {
        throw DomainError("success count must be nonnegative");
    }
    const PValueRates t = pvalue_rates(params, Truth::True, p);
    const PValueRates f = pvalue_rates(params, Truth::False, p);
    const double beta = params.interest().rate();
    const double jd = static_cast<double>(j);
    const double window_term = j == 0 ? 0.0 : jd * std::log(t.window / f.window);
    return window_term + (jd + params.interest().shape()) * std::log((beta + f.total) / (beta + t.total));
}

double homogeneous_likelihood_ratio(const HomogeneousParams& params, std::int64_t j, double p) {
    return std::exp(log_homogeneous_likelihood_ratio(params, j, p));
}

double homogeneous_posterior(const HomogeneousParams& params, std::int64_t j, double p) {
    return posterior_from_log_lr(params.hypothesis_prior(),
                                 log_homogeneous_likelihood_ratio(params, j, p));
}

double homogeneous_step_factor(const HomogeneousParams& params, double p) {
    const PValueRates t = pvalue_rates(params, Truth::True, p);
    const PValueRates f = pvalue_rates(params, Truth::False, p);
    const double beta = params.interest().rate();
    return (t.window / f.window) * (beta + f.total) / (beta + t.total);
}

bool HomogeneousThreshold::paradoxical_at(double rate) const {
    switch (regime) {
        case ParadoxRegime::BelowThreshold:
            return rate < bound;
        case ParadoxRegime::AboveThreshold:
            return rate > bound;
        case ParadoxRegime::Always:
            return true;
        case ParadoxRegime::Never:
            return false;
    }
    return false;
}

HomogeneousThreshold homogeneous_paradox_threshold(double alpha, double p, const PowerCurve& power,
                                                   const NullCurve& null) {
    check_cutoff(alpha, p);
    const double ga = power(alpha);
    const double gp = power(p);
    const double null_window = alpha - null(p);
    const double power_window = ga - gp;

    // Paradox iff null_window (beta + ga) > power_window (beta + alpha), i.e.
    // beta (power_window - null_window) < null_window ga - power_window alpha.
    const double numerator = null_window * ga - power_window * alpha;
    const double denominator = power_window - null_window;

    HomogeneousThreshold out{ParadoxRegime::Never, 0.0, std::nullopt};
    if (denominator != 0.0) out.bound = numerator / denominator;
    if (denominator > 0.0) {
        if (numerator > 0.0) out.regime = ParadoxRegime::BelowThreshold;
    } else if (denominator < 0.0) {
        out.regime = numerator > 0.0 ? ParadoxRegime::Always : ParadoxRegime::AboveThreshold;
    } else if (numerator > 0.0) {
        out.regime = ParadoxRegime::Always;
    }

    const double sufficient = (alpha * gp - p * ga) / ((ga - gp) - (alpha - p));
    if (sufficient > 0.0 && std::isfinite(sufficient)) {
        out.sufficient_bound = sufficient;
    }
    return out;
}

bool homogeneous_condition_holds(double alpha, double p, const PowerCurve& power) {
    check_cutoff(alpha, p);
    const double ratio_alpha = power(alpha) / alpha;
    return power(p) / p > ratio_alpha && ratio_alpha > 1.0;
}

bool ratio_monotonicity_check(double shift, double alpha, std::span<const double> grid) {
    const double ratio_alpha = normal_shift_power(alpha, shift) / alpha;
    for (const double p : grid) {
        check_cutoff(alpha, p);
        if (!(normal_shift_power(p, shift) / p > ratio_alpha)) {
            return false;
        }
    }
    return true;
}

}  // namespace improvable
