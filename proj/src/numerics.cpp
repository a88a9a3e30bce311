#include "improvable/numerics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "improvable/errors.hpp"

namespace improvable {

Probability::Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw DomainError("probability outside [0, 1]: " + std::to_string(value));
    }
}

PositiveReal::PositiveReal(double value) : value_(value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError("expected a finite positive real, got " + std::to_string(value));
    }
}

namespace {

constexpr double kEulerGamma = 0.577215664901532860607;

// zeta(k) for k = 2..31.
constexpr std::array<double, 30> kZeta = {
    1.64493406684822643647, 1.2020569031595942854,  1.08232323371113819152,
    1.03692775514336992633, 1.01734306198444913971, 1.00834927738192282684,
    1.00407735619794433938, 1.00200839282608221442, 1.00099457512781808534,
    1.00049418860411946456, 1.0002460865533080483,  1.00012271334757848915,
    1.00006124813505870483, 1.00003058823630702049, 1.00001528225940865187,
    1.00000763719763789976, 1.00000381729326499984, 1.00000190821271655394,
    1.0000009539620338728,  1.00000047693298678781, 1.00000023845050272773,
    1.00000011921992596531, 1.00000005960818905126, 1.00000002980350351465,
    1.00000001490155482837, 1.00000000745071178984, 1.00000000372533402479,
    1.00000000186265972351, 1.00000000093132743242, 1.0000000004656629065,
};

// ln Gamma(1 + z) = -gamma z + sum_{k>=2} zeta(k) (-z)^k / k, |z| <= 1/4.
double log_gamma_one_plus(double z) {
    double sum = 0.0;
    double zk = -z;
    for (std::size_t i = 0; i < kZeta.size(); ++i) {
        zk *= -z;
        const double k = static_cast<double>(i + 2);
        sum += kZeta[i] * zk / k;
    }
    return -kEulerGamma * z + sum;
}

// Lanczos approximation, g = 7, n = 9.
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};

double log_gamma_lanczos(double x) {
    const double z = x - 1.0;
    double acc = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        acc += kLanczos[i] / (z + static_cast<double>(i));
    }
    const double t = z + 7.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(acc);
}

double log_gamma_impl(double x) {
    if (x < 0.5) {
        return log_gamma_impl(x + 1.0) - std::log(x);
    }
    if (std::abs(x - 1.0) <= 0.25) {
        return log_gamma_one_plus(x - 1.0);
    }
    if (std::abs(x - 2.0) <= 0.25) {
        const double z = x - 2.0;
        return std::log1p(z) + log_gamma_one_plus(z);
    }
    return log_gamma_lanczos(x);
}

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 100000;

// ln of sum_{n>=0} x^n / (s (s+1) ... (s+n)); gamma(s,x) = x^s e^-x * sum.
double log_series_sum(double s, double x) {
    double ap = s;
    double term = 1.0 / s;
    double sum = term;
    for (int n = 0; n < kMaxIterations; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) {
            return std::log(sum);
        }
    }
    throw std::runtime_error("incomplete gamma series failed to converge");
}

// ln of the continued fraction h with Gamma(s,x) = x^s e^-x * h (modified Lentz).
double log_continued_fraction(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) {
            return std::log(h);
        }
    }
    throw std::runtime_error("incomplete gamma continued fraction failed to converge");
}

void check_incomplete_gamma_x(double x) {
    if (!(x >= 0.0)) {
        throw DomainError("incomplete gamma requires x >= 0, got " + std::to_string(x));
    }
}

// ln Q(s, x) for x >= s + 1.
double log_upper_regularized_cf(double s, double x) {
    return -x + s * std::log(x) - log_gamma_impl(s) + log_continued_fraction(s, x);
}

}  // namespace

double log_gamma(PositiveReal x) { return log_gamma_impl(x.value()); }

double log_lower_incomplete_gamma(PositiveReal s_in, double x) {
    check_incomplete_gamma_x(x);
    const double s = s_in.value();
    if (x == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (std::isinf(x)) {
        return log_gamma_impl(s);
    }
    if (x < s + 1.0) {
        return s * std::log(x) - x + log_series_sum(s, x);
    }
    return log_gamma_impl(s) + std::log1p(-std::exp(log_upper_regularized_cf(s, x)));
}

double lower_incomplete_gamma(PositiveReal s, double x) {
    return std::exp(log_lower_incomplete_gamma(s, x));
}

double regularized_lower_incomplete_gamma(PositiveReal s_in, double x) {
    check_incomplete_gamma_x(x);
    const double s = s_in.value();
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < s + 1.0) {
        return std::exp(s * std::log(x) - x + log_series_sum(s, x) - log_gamma_impl(s));
    }
    return -std::expm1(log_upper_regularized_cf(s, x));
}

double regularized_upper_incomplete_gamma(PositiveReal s_in, double x) {
    check_incomplete_gamma_x(x);
    const double s = s_in.value();
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < s + 1.0) {
        return -std::expm1(s * std::log(x) - x + log_series_sum(s, x) - log_gamma_impl(s));
    }
    return std::exp(log_upper_regularized_cf(s, x));
}

double normal_cdf(double x) {
    if (std::isnan(x)) {
        throw DomainError("normal_cdf of NaN");
    }
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Wichura (1988), AS241 PPND16.
double as241(double p) {
    const double q = p - 0.5;
    if (std::abs(q) < 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r < 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return std::copysign(value, q);
}

}  // namespace

double normal_quantile(Probability p_in) {
    const double p = p_in.value();
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal_quantile requires 0 < p < 1, got " + std::to_string(p));
    }
    double x = as241(p);
    // Newton step; the residual is taken on the smaller tail to keep precision.
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (density > 0.0) {
        const double residual = p < 0.5 ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
        x -= residual / density;
    }
    return x;
}

double log_poisson_pmf(std::int64_t k, PositiveReal lambda) {
    if (k < 0) {
        throw DomainError("poisson_pmf requires k >= 0");
    }
    const double kd = static_cast<double>(k);
    return kd * std::log(lambda.value()) - lambda.value() - log_gamma_impl(kd + 1.0);
}

double poisson_pmf(std::int64_t k, PositiveReal lambda) {
    return std::exp(log_poisson_pmf(k, lambda));
}

}  // namespace improvable
