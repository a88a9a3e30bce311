#include "improvable/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "improvable/errors.hpp"

namespace improvable {

namespace {

// Kronrod nodes on [-1, 1] (nonnegative half, descending) and weights; the
// odd-indexed nodes are the 7-point Gauss nodes.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Segment {
    double a;
    double b;
    double value;
    double error;
};

Segment gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[i] * pair;
        if (i % 2 == 1) {
            gauss += kGaussWeights[i / 2] * pair;
        }
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options) {
    if (!(b >= a)) {
        throw DomainError("integration bounds must satisfy a <= b");
    }
    if (a == b) return {0.0, 0.0, 0};

    const auto by_error = [](const Segment& x, const Segment& y) { return x.error < y.error; };
    std::vector<Segment> heap{gauss_kronrod(f, a, b)};
    for (int subdivisions = 0;; ++subdivisions) {
        double value = 0.0;
        double error = 0.0;
        for (const Segment& s : heap) {
            value += s.value;
            error += s.error;
        }
        if (!std::isfinite(value)) {
            throw QuadratureError("integrand produced a non-finite value", error);
        }
        const double tolerance = std::max(options.abs_tol, options.rel_tol * std::abs(value));
        if (error <= tolerance) {
            return {value, error, subdivisions};
        }
        if (subdivisions >= options.max_subdivisions) {
            std::ostringstream msg;
            msg << "adaptive quadrature did not converge on [" << a << ", " << b
                << "]: error estimate " << error << " exceeds " << tolerance;
            throw QuadratureError(msg.str(), error);
        }
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureError("quadrature interval collapsed below machine precision", error);
        }
        heap.push_back(gauss_kronrod(f, worst.a, mid));
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(gauss_kronrod(f, mid, worst.b));
        std::push_heap(heap.begin(), heap.end(), by_error);
    }
}

namespace {

// Pois(count; rate * I) as a factor of the integrand.
struct PoissonFactor {
    double rate;
    std::int64_t count;
};

double log_factors(const std::vector<PoissonFactor>& factors, double interest) {
    double sum = 0.0;
    for (const PoissonFactor& pf : factors) {
        const double mean = pf.rate * interest;
        sum -= mean;
        if (pf.count > 0) {
            const double n = static_cast<double>(pf.count);
            sum += n * std::log(mean) - std::lgamma(n + 1.0);
        }
    }
    return sum;
}

// Piecewise integration over [start, upper) in doubling segments beyond
// `scale`, stopping once a segment adds less than 1e-15 of the running total.
template <typename Integrand>
double integrate_doubling(Integrand segment_integral, double start, double scale, double upper,
                          double total = 0.0) {
    total += segment_integral(start, std::min(scale, upper), 0.0);
    double lo = scale;
    while (lo < upper) {
        const double hi = std::min(2.0 * lo, upper);
        const double piece = segment_integral(lo, hi, 1e-16 * std::abs(total));
        total += piece;
        if (std::abs(piece) <= 1e-15 * std::abs(total) && std::isinf(upper)) break;
        lo = hi;
    }
    return total;
}

double mixture_integral(const InterestPrior& interest, const std::vector<PoissonFactor>& factors) {
    double counts = 0.0;
    double rates = 0.0;
    for (const PoissonFactor& pf : factors) {
        counts += static_cast<double>(pf.count);
        rates += pf.rate;
    }

    if (const auto* g = std::get_if<GammaPrior>(&interest)) {
        const double kappa = g->shape();
        const double beta = g->rate();
        const double log_norm = kappa * std::log(beta) - std::lgamma(kappa);
        const auto integrand = [&](double interest_level) {
            return std::exp(log_norm + (kappa - 1.0) * std::log(interest_level) - beta * interest_level +
                            log_factors(factors, interest_level));
        };
        const auto segment = [&](double lo, double hi, double abs_tol) {
            QuadratureOptions opts;
            opts.abs_tol = abs_tol;
            return integrate(integrand, lo, hi, opts).value;
        };
        const double m = counts + kappa;
        const double scale = (m + 10.0 * std::sqrt(m) + 10.0) / (beta + rates);
        if (kappa >= 1.0) {
            return integrate_doubling(segment, 0.0, scale, std::numeric_limits<double>::infinity());
        }

        // Below head_end the density I^(kappa-1) is singular; t = ln I turns
        // it into e^(kappa t), which decays geometrically as t -> -inf once
        // multiplied by I^counts. Without successes the integrand is
        // I^(kappa-1) e^(-s I); its I^(kappa-1) part integrates exactly and
        // the remainder I^(kappa-1) (1 - e^(-s I)) behaves like I^kappa.
        const double head_end = 0.01 / (beta + rates);
        const double t_hi = std::log(head_end);
        double head = 0.0;
        if (counts == 0.0) {
            const double s_rate = beta + rates;
            const double remainder =
                integrate(
                    [&](double t) {
                        const double interest_level = std::exp(t);
                        return std::exp(log_norm + kappa * t) * -std::expm1(-s_rate * interest_level);
                    },
                    t_hi - 40.0 / (kappa + 1.0), t_hi)
                    .value;
            head = std::exp(log_norm + kappa * t_hi - std::log(kappa)) - remainder;
        } else {
            head = integrate(
                       [&](double t) {
                           const double interest_level = std::exp(t);
                           return std::exp(log_norm + kappa * t - beta * interest_level +
                                           log_factors(factors, interest_level));
                       },
                       t_hi - 40.0 / m, t_hi)
                       .value;
        }
        return integrate_doubling(segment, head_end, scale, std::numeric_limits<double>::infinity(), head);
    }

    const double c = std::get<UniformPrior>(interest).upper();
    const auto integrand = [&](double interest_level) {
        return std::exp(log_factors(factors, interest_level)) / c;
    };
    const double m = counts + 1.0;
    const double scale = rates > 0.0 ? (m + 10.0 * std::sqrt(m) + 10.0) / rates : c;
    return integrate_doubling(
        [&](double lo, double hi, double abs_tol) {
            QuadratureOptions opts;
            opts.abs_tol = abs_tol;
            return integrate(integrand, lo, hi, opts).value;
        },
        0.0, scale, c);
}

}  // namespace

double quadrature_observation_probability(const FrameworkParams& params, Truth truth,
                                          const Observation& obs) {
    const double cw = params.weak_rate_multiplier();
    const bool is_true = truth == Truth::True;
    const double weak_rate = cw * (is_true ? params.weak().power() : params.weak().alpha());
    const double strong_rate = is_true ? params.strong().power() : params.strong().alpha();
    return mixture_integral(params.interest(), {{weak_rate, obs.weak_successes()},
                                                {strong_rate, obs.strong_successes()}});
}

double quadrature_homogeneous_probability(const HomogeneousParams& params, Truth truth,
                                          std::int64_t j, double p) {
    if (!(p > 0.0 && p < params.alpha())) {
        throw DomainError("p-value cut-off must lie in (0, alpha)");
    }
    const bool is_true = truth == Truth::True;
    const double at_alpha = is_true ? params.power()(params.alpha()) : params.null()(params.alpha());
    const double at_p = is_true ? params.power()(p) : params.null()(p);
    // j successes in [p, alpha] and none below p.
    return mixture_integral(params.interest(), {{at_alpha - at_p, j}, {at_p, 0}});
}

double quadrature_zero_count_probability(const GammaPrior& prior, double rate) {
    return mixture_integral(prior, {{rate, 0}});
}

double quadrature_attempt_count_pmf(const GammaPrior& prior, std::int64_t n) {
    return mixture_integral(prior, {{1.0, n}});
}

}  // namespace improvable
