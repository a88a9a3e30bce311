#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cli/report.hpp"
#include "improvable/interest_framework.hpp"

namespace improvable::cli {

// Defaults are the standard rate set used throughout the examples.
struct FrameworkFlags {
    double alpha_weak = 0.05;
    double gamma_weak = 0.2;
    double alpha_strong = 0.01;
    double gamma_strong = 0.9;
    double cw = 1.0;
    double prior = 0.5;
    std::string interest = "gamma:1,0.1";
};

struct PpvFlags {
    double alpha = 0.0;
    double gamma = 0.0;
    double prior = 0.0;
    std::optional<int> n;
    std::optional<int> j;
};

struct PosteriorFlags {
    FrameworkFlags framework;
    std::optional<std::int64_t> j;
    std::optional<std::int64_t> k;
    std::optional<std::int64_t> j_max;
    std::optional<std::int64_t> k_max;
};

struct RegionFlags {
    FrameworkFlags framework;
    std::string beta_grid;
    std::optional<double> kappa;
    std::string kappa_grid;
};

struct HomogeneousFlags {
    double alpha = 0.05;
    std::optional<double> p;
    std::optional<double> shift;
    std::string power_table;
    std::string null_table;
    std::optional<double> effect;
    std::optional<double> sd;
    std::optional<int> n;
    std::string interest = "gamma:1,0.1";
    double prior = 0.5;
    std::int64_t j_max = 5;
};

struct SimulateFlags {
    std::string model = "framework";
    std::string oracle = "both";
    FrameworkFlags framework;
    // Homogeneous-model flags; prior and interest come from `framework`.
    HomogeneousFlags homogeneous;
    double samples = 1e6;
    std::uint64_t seed = 0;
    int max_count = 20;
    unsigned threads = 0;
    std::int64_t j_max = 5;
    std::int64_t k_max = 5;
};

// Parses "gamma:<kappa>,<beta>" or "uniform:<C>".
InterestPrior parse_interest(const std::string& text);

FrameworkParams make_framework(const FrameworkFlags& flags);

Report cmd_ppv(const PpvFlags& flags);
Report cmd_posterior(const PosteriorFlags& flags);
Report cmd_region(const RegionFlags& flags);
Report cmd_homogeneous(const HomogeneousFlags& flags);
Report cmd_simulate(const SimulateFlags& flags);

}  // namespace improvable::cli
