#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature and the integral oracles built on
// it. The oracles integrate the defining mixtures directly (prior density
// times Poisson pmfs) and share no code with the closed forms they check.

#include <cstdint>
#include <functional>

#include "improvable/homogeneous_pvalue.hpp"
#include "improvable/interest_framework.hpp"

namespace improvable {

struct QuadratureOptions {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    int max_subdivisions = 2000;
};

struct QuadratureResult {
    double value;
    double error_estimate;
    int subdivisions;
};

/// Globally adaptive G7/K15 on a finite interval: the interval with the
/// largest error estimate is bisected until the summed estimate falls below
/// max(abs_tol, rel_tol * |value|). Throws QuadratureError otherwise.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options = {});

/// Pr(O_{j,k} | truth) by quadrature over the interest prior.
double quadrature_observation_probability(const FrameworkParams& params, Truth truth,
                                          const Observation& obs);

/// R_{j,p,alpha} by quadrature over the gamma interest prior.
double quadrature_homogeneous_probability(const HomogeneousParams& params, Truth truth,
                                          std::int64_t j, double p);

/// E_I[exp(-rate * I)] by quadrature: probability that a Poisson(rate * I)
/// count is zero.
double quadrature_zero_count_probability(const GammaPrior& prior, double rate);

/// Pr(N = n) for N ~ Poisson(I), I ~ prior, by quadrature.
double quadrature_attempt_count_pmf(const GammaPrior& prior, std::int64_t n);

}  // namespace improvable
