#include "cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "improvable/classical_ppv.hpp"
#include "improvable/errors.hpp"
#include "improvable/homogeneous_pvalue.hpp"
#include "improvable/quadrature.hpp"
#include "improvable/simulator.hpp"
#include "improvable/table_io.hpp"

namespace improvable::cli {

namespace {

constexpr std::uint64_t kMinOccupants = 50;
constexpr double kMonteCarloMaxZ = 4.0;
constexpr double kQuadratureRelTol = 1e-8;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, sep)) parts.push_back(part);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

double parse_double(const std::string& text, const std::string& what) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ValidationError(what + ": '" + text + "' is not a number");
    }
    return value;
}

std::vector<double> parse_grid(const std::string& text, const std::string& what) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) {
        throw ValidationError(what + " must be <lo>,<hi>,<steps>");
    }
    const double lo = parse_double(parts[0], what);
    const double hi = parse_double(parts[1], what);
    const double steps = parse_double(parts[2], what);
    if (!(steps >= 1.0) || steps != std::floor(steps) || steps > 1e6) {
        throw ValidationError(what + ": steps must be a positive integer");
    }
    if (!(lo <= hi)) {
        throw ValidationError(what + ": grid is empty (lo > hi)");
    }
    const auto n = static_cast<int>(steps);
    std::vector<double> grid;
    for (int i = 0; i < n; ++i) {
        grid.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    }
    return grid;
}

Cell finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return std::monostate{};
}

nlohmann::ordered_json json_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::string regime_name(ParadoxRegime regime) {
    switch (regime) {
        case ParadoxRegime::BelowThreshold:
            return "below_threshold";
        case ParadoxRegime::AboveThreshold:
            return "above_threshold";
        case ParadoxRegime::Always:
            return "always";
        case ParadoxRegime::Never:
            return "never";
    }
    return "never";
}

std::string status_name(CellStatus status) {
    switch (status) {
        case CellStatus::Ok:
            return "ok";
        case CellStatus::Insufficient:
            return "insufficient";
        case CellStatus::Deviates:
            return "deviates";
    }
    return "insufficient";
}

nlohmann::ordered_json framework_parameters(const FrameworkFlags& f) {
    return {{"alpha_weak", f.alpha_weak},     {"gamma_weak", f.gamma_weak},
            {"alpha_strong", f.alpha_strong}, {"gamma_strong", f.gamma_strong},
            {"cw", f.cw},                     {"prior", f.prior},
            {"interest", f.interest}};
}

std::pair<std::int64_t, std::int64_t> count_range(const std::optional<std::int64_t>& exact,
                                                  const std::optional<std::int64_t>& max,
                                                  const char* name) {
    if (exact && max) {
        throw ValidationError(std::string("give either --") + name + " or --" + name + "-max, not both");
    }
    const std::int64_t lo = exact ? *exact : 0;
    const std::int64_t hi = exact ? *exact : (max ? *max : 0);
    if (lo < 0 || hi < 0) {
        throw ValidationError(std::string("--") + name + " must be nonnegative");
    }
    return {lo, hi};
}

HomogeneousParams make_homogeneous(const HomogeneousFlags& f) {
    if (!f.p) throw ValidationError("--p is required");
    if (!(*f.p > 0.0 && *f.p < f.alpha)) {
        throw ValidationError("p-value cut-off must satisfy 0 < p < alpha");
    }
    const bool design = f.effect || f.sd || f.n;
    const int sources = static_cast<int>(f.shift.has_value()) + static_cast<int>(!f.power_table.empty()) +
                        static_cast<int>(design);
    if (sources != 1) {
        throw ValidationError("give exactly one of --shift, --power-table, or --effect/--sd/--n");
    }
    std::optional<PowerCurve> power;
    if (f.shift) {
        power = PowerCurve::normal_shift(*f.shift);
    } else if (!f.power_table.empty()) {
        power = PowerCurve::table(read_curve_csv_file(f.power_table));
    } else {
        if (!(f.effect && f.sd && f.n)) {
            throw ValidationError("--effect, --sd and --n must be given together");
        }
        try {
            power = PowerCurve::normal_shift(shift_from_design(*f.effect, *f.sd, *f.n));
        } catch (const DomainError& e) {
            throw ValidationError(e.what());
        }
    }
    NullCurve null = f.null_table.empty() ? NullCurve::identity()
                                          : NullCurve::table(read_curve_csv_file(f.null_table));
    const InterestPrior interest = parse_interest(f.interest);
    const auto* gamma = std::get_if<GammaPrior>(&interest);
    if (gamma == nullptr) {
        throw ValidationError("the homogeneous model needs a gamma interest prior");
    }
    return HomogeneousParams(f.alpha, std::move(*power), std::move(null), f.prior, *gamma);
}

nlohmann::ordered_json homogeneous_parameters(const HomogeneousFlags& f) {
    nlohmann::ordered_json p;
    p["alpha"] = f.alpha;
    p["p"] = f.p ? nlohmann::ordered_json(*f.p) : nlohmann::ordered_json(nullptr);
    p["shift"] = f.shift ? nlohmann::ordered_json(*f.shift) : nlohmann::ordered_json(nullptr);
    p["power_table"] = f.power_table.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(f.power_table);
    p["null_table"] = f.null_table.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(f.null_table);
    p["effect"] = f.effect ? nlohmann::ordered_json(*f.effect) : nlohmann::ordered_json(nullptr);
    p["sd"] = f.sd ? nlohmann::ordered_json(*f.sd) : nlohmann::ordered_json(nullptr);
    p["n"] = f.n ? nlohmann::ordered_json(*f.n) : nlohmann::ordered_json(nullptr);
    p["interest"] = f.interest;
    p["prior"] = f.prior;
    p["j_max"] = f.j_max;
    return p;
}

}  // namespace

InterestPrior parse_interest(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ValidationError("--interest must be gamma:<kappa>,<beta> or uniform:<C>");
    }
    const std::string family = text.substr(0, colon);
    const auto values = split(text.substr(colon + 1), ',');
    try {
        if (family == "gamma" && values.size() == 2) {
            return GammaPrior(parse_double(values[0], "--interest kappa"),
                              parse_double(values[1], "--interest beta"));
        }
        if (family == "uniform" && values.size() == 1) {
            return UniformPrior(parse_double(values[0], "--interest C"));
        }
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
    throw ValidationError("--interest must be gamma:<kappa>,<beta> or uniform:<C>, got '" + text + "'");
}

FrameworkParams make_framework(const FrameworkFlags& f) {
    try {
        EvidenceModel model{ErrorRates(f.alpha_weak, f.gamma_weak),
                            ErrorRates(f.alpha_strong, f.gamma_strong), f.cw, f.prior};
        return FrameworkParams(model, parse_interest(f.interest));
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
}

Report cmd_ppv(const PpvFlags& f) {
    Report r;
    r.command = "ppv";
    r.parameters = {{"alpha", f.alpha}, {"gamma", f.gamma}, {"prior", f.prior}};
    r.parameters["n"] = f.n ? nlohmann::ordered_json(*f.n) : nlohmann::ordered_json(nullptr);
    r.parameters["j"] = f.j ? nlohmann::ordered_json(*f.j) : nlohmann::ordered_json(nullptr);
    r.columns = {"case", "n", "j", "likelihood_ratio", "posterior"};

    const ErrorRates rates(f.alpha, f.gamma);
    const Probability prior(f.prior);
    const auto add = [&](const std::string& name, Cell n, Cell j, double lr) {
        r.rows.push_back({name, std::move(n), std::move(j), lr, posterior_from_log_lr(prior, std::log(lr))});
    };
    add("single", std::int64_t{1}, std::monostate{}, likelihood_ratio_single(rates));
    if (f.j && !f.n) {
        throw ValidationError("--j needs --n");
    }
    if (f.n) {
        if (*f.n < 1) throw ValidationError("--n must be at least 1");
        add("at_least_one", std::int64_t{*f.n}, std::monostate{},
            likelihood_ratio_at_least_one(rates, *f.n));
        if (f.j) {
            if (*f.j < 0 || *f.j > *f.n) throw ValidationError("--j must lie in [0, n]");
            add("exactly_j", std::int64_t{*f.n}, std::int64_t{*f.j},
                likelihood_ratio_exactly_j(rates, *f.n, *f.j));
        }
    }
    return r;
}

Report cmd_posterior(const PosteriorFlags& f) {
    const FrameworkParams params = make_framework(f.framework);
    const auto [j_lo, j_hi] = count_range(f.j, f.j_max, "j");
    const auto [k_lo, k_hi] = count_range(f.k, f.k_max, "k");

    Report r;
    r.command = "posterior";
    r.parameters = framework_parameters(f.framework);
    r.parameters["j_range"] = {j_lo, j_hi};
    r.parameters["k_range"] = {k_lo, k_hi};
    r.columns = {"j", "k", "likelihood_ratio", "posterior"};
    for (std::int64_t j = j_lo; j <= j_hi; ++j) {
        for (std::int64_t k = k_lo; k <= k_hi; ++k) {
            const Observation obs(j, k);
            r.rows.push_back({j, k, finite_or_null(likelihood_ratio(params, obs)), posterior(params, obs)});
        }
    }
    const double beta_star = paradox_rate_threshold(params.weak(), params.strong());
    if (params.has_gamma_prior()) {
        r.summary["interest_family"] = "gamma";
        r.summary["paradox"] = is_paradoxical(params);
    } else {
        r.summary["interest_family"] = "uniform";
        const auto up_to = static_cast<int>(j_hi + k_hi);
        r.summary["paradox"] = is_paradoxical_uniform_up_to(params, up_to);
        r.summary["paradox_checked_up_to"] = up_to;
    }
    r.summary["beta_star"] = beta_star;
    return r;
}

Report cmd_region(const RegionFlags& f) {
    const FrameworkParams base = make_framework(f.framework);
    const std::vector<double> betas = parse_grid(f.beta_grid, "--beta-grid");
    std::vector<double> kappas;
    if (!f.kappa_grid.empty() && f.kappa) {
        throw ValidationError("give either --kappa or --kappa-grid, not both");
    }
    if (!f.kappa_grid.empty()) {
        kappas = parse_grid(f.kappa_grid, "--kappa-grid");
    } else if (f.kappa) {
        kappas = {*f.kappa};
    } else if (base.has_gamma_prior()) {
        kappas = {base.gamma_prior().shape()};
    } else {
        kappas = {1.0};
    }
    const double beta_star = paradox_rate_threshold(base.weak(), base.strong());

    Report r;
    r.command = "region";
    r.parameters = framework_parameters(f.framework);
    r.parameters["beta_grid"] = f.beta_grid;
    r.parameters["kappa_values"] = kappas;
    r.columns = {"beta", "kappa", "paradox", "posterior_1_0", "posterior_0_0", "beta_star"};
    for (const double kappa : kappas) {
        for (const double beta : betas) {
            FrameworkParams params = [&] {
                try {
                    return base.with_interest(GammaPrior(kappa, beta));
                } catch (const DomainError& e) {
                    throw ValidationError(e.what());
                }
            }();
            r.rows.push_back({beta, kappa, is_paradoxical(params), posterior(params, Observation(1, 0)),
                              posterior(params, Observation(0, 0)), beta_star});
        }
    }
    r.summary["beta_star"] = beta_star;
    return r;
}

Report cmd_homogeneous(const HomogeneousFlags& f) {
    if (f.j_max < 0) throw ValidationError("--j-max must be nonnegative");
    const HomogeneousParams params = make_homogeneous(f);
    const double p = *f.p;
    const double beta = params.interest().rate();
    const HomogeneousThreshold threshold =
        homogeneous_paradox_threshold(params.alpha(), p, params.power(), params.null());

    Report r;
    r.command = "homogeneous";
    r.parameters = homogeneous_parameters(f);
    const auto shift = params.power().shift();
    r.summary["shift"] = shift ? nlohmann::ordered_json(*shift) : nlohmann::ordered_json(nullptr);
    r.summary["gamma_alpha"] = params.power()(params.alpha());
    r.summary["gamma_p"] = params.power()(p);
    r.summary["null_p"] = params.null()(p);
    r.summary["regime"] = regime_name(threshold.regime);
    r.summary["threshold"] = json_or_null(threshold.bound);
    r.summary["sufficient_bound"] = threshold.sufficient_bound
                                        ? nlohmann::ordered_json(*threshold.sufficient_bound)
                                        : nlohmann::ordered_json(nullptr);
    r.summary["beta"] = beta;
    r.summary["paradox"] = threshold.paradoxical_at(beta);
    r.summary["ratio_condition"] = homogeneous_condition_holds(params.alpha(), p, params.power());
    r.summary["step_factor"] = json_or_null(homogeneous_step_factor(params, p));
    r.columns = {"j", "likelihood_ratio", "posterior"};
    for (std::int64_t j = 0; j <= f.j_max; ++j) {
        r.rows.push_back({j, finite_or_null(homogeneous_likelihood_ratio(params, j, p)),
                          homogeneous_posterior(params, j, p)});
    }
    return r;
}

namespace {

struct OracleTally {
    int ok = 0;
    int insufficient = 0;
    int deviating = 0;
    double max_abs_z = 0.0;
};

void add_monte_carlo_rows(Report& r, const std::vector<PosteriorComparison>& cells, OracleTally& t) {
    for (const PosteriorComparison& c : cells) {
        const bool judged = c.status != CellStatus::Insufficient;
        if (c.status == CellStatus::Ok) ++t.ok;
        if (c.status == CellStatus::Insufficient) ++t.insufficient;
        if (c.status == CellStatus::Deviates) ++t.deviating;
        if (judged) t.max_abs_z = std::max(t.max_abs_z, std::abs(c.z));
        r.rows.push_back({std::string("montecarlo"), std::string("posterior"), std::monostate{}, c.j, c.k,
                          static_cast<std::int64_t>(c.occupants), c.closed_form,
                          judged ? Cell(c.empirical) : Cell(std::monostate{}),
                          judged ? Cell(c.empirical - c.closed_form) : Cell(std::monostate{}),
                          c.standard_error, judged ? finite_or_null(c.z) : Cell(std::monostate{}),
                          status_name(c.status)});
    }
}

void summarize_monte_carlo(Report& r, const JointCountTable& table, const OracleTally& t) {
    r.summary["total"] = table.total();
    r.summary["overflow"] = table.overflow();
    r.summary["discarded"] = table.discarded();
    r.summary["cells_ok"] = t.ok;
    r.summary["cells_insufficient"] = t.insufficient;
    r.summary["cells_deviating"] = t.deviating;
    r.summary["max_abs_z"] = t.max_abs_z;
    if (t.ok + t.deviating == 0) {
        r.warnings.push_back("every cell has fewer than " + std::to_string(kMinOccupants) +
                             " occupants; no Monte Carlo comparison was made");
    }
    if (t.deviating > 0) {
        r.exit_code = 3;
        r.diagnostic = std::to_string(t.deviating) + " Monte Carlo cell(s) deviate by more than " +
                       std::to_string(static_cast<int>(kMonteCarloMaxZ)) + " standard errors";
    }
}

double relative_deviation(double estimate, double reference) {
    if (estimate == reference) return 0.0;
    return std::abs(estimate - reference) / std::abs(reference);
}

struct QuadratureTally {
    int cells = 0;
    int failures = 0;
    double max_rel = 0.0;
};

void add_quadrature_row(Report& r, QuadratureTally& t, Truth truth, std::int64_t j, std::int64_t k,
                        double closed, double quad) {
    const double rel = relative_deviation(quad, closed);
    const bool ok = rel <= kQuadratureRelTol;
    ++t.cells;
    if (!ok) ++t.failures;
    t.max_rel = std::max(t.max_rel, rel);
    r.rows.push_back({std::string("quadrature"), std::string("probability"), truth == Truth::True, j, k,
                      std::monostate{}, closed, quad, rel, std::monostate{}, std::monostate{},
                      std::string(ok ? "ok" : "deviates")});
}

void summarize_quadrature(Report& r, const QuadratureTally& t) {
    r.summary["quadrature_cells"] = t.cells;
    r.summary["quadrature_failures"] = t.failures;
    r.summary["quadrature_max_rel_deviation"] = t.max_rel;
    if (t.failures > 0) {
        r.exit_code = 3;
        if (!r.diagnostic.empty()) r.diagnostic += "; ";
        r.diagnostic += std::to_string(t.failures) +
                        " quadrature cell(s) differ from the closed form by more than 1e-8 relative";
    }
}

}  // namespace

Report cmd_simulate(const SimulateFlags& f) {
    if (f.model != "framework" && f.model != "homogeneous") {
        throw ValidationError("--model must be framework or homogeneous");
    }
    if (f.oracle != "montecarlo" && f.oracle != "quadrature" && f.oracle != "both") {
        throw ValidationError("--oracle must be montecarlo, quadrature or both");
    }
    if (!(f.samples >= 1.0) || f.samples != std::floor(f.samples) || f.samples > 0x1p53) {
        throw ValidationError("--samples must be a positive integer");
    }
    if (f.j_max < 0 || f.k_max < 0) throw ValidationError("--j-max and --k-max must be nonnegative");
    SimulationConfig config;
    config.samples = static_cast<std::uint64_t>(f.samples);
    config.seed = f.seed;
    config.max_count_tracked = f.max_count;
    config.threads = f.threads;
    config.validate();

    const bool monte_carlo = f.oracle != "quadrature";
    const bool quadrature = f.oracle != "montecarlo";

    Report r;
    r.command = "simulate";
    r.parameters["model"] = f.model;
    r.parameters["oracle"] = f.oracle;
    r.parameters["samples"] = config.samples;
    r.parameters["seed"] = config.seed;
    r.parameters["max_count"] = config.max_count_tracked;
    r.parameters["j_max"] = f.j_max;
    r.parameters["k_max"] = f.k_max;
    r.columns = {"oracle", "quantity", "truth",    "j", "k",  "occupants",
                 "closed_form", "estimate", "deviation", "standard_error", "z", "status"};

    if (f.model == "framework") {
        const FrameworkParams params = make_framework(f.framework);
        r.parameters["framework"] = framework_parameters(f.framework);
        if (monte_carlo) {
            const JointCountTable table = simulate_framework(params, config);
            OracleTally t;
            const auto cells = compare_framework_posteriors(params, table, kMinOccupants, kMonteCarloMaxZ);
            add_monte_carlo_rows(r, cells, t);
            summarize_monte_carlo(r, table, t);
            const auto empirical = [&](std::int64_t j, std::int64_t k) -> nlohmann::ordered_json {
                const std::uint64_t n = table.occupants(j, k);
                if (n < kMinOccupants) return nullptr;
                return static_cast<double>(table.tally(Truth::True, j, k)) / static_cast<double>(n);
            };
            r.summary["empirical_posterior_1_0"] = empirical(1, 0);
            r.summary["empirical_posterior_0_0"] = empirical(0, 0);
            if (params.has_gamma_prior()) {
                r.summary["strong_attempt_law_passes"] =
                    negative_binomial_marginal_check(params, table, 3.0).passes;
            }
        }
        if (quadrature) {
            QuadratureTally t;
            int standard_matches = 0;
            int shifted_matches = 0;
            for (std::int64_t j = 0; j <= f.j_max; ++j) {
                for (std::int64_t k = 0; k <= f.k_max; ++k) {
                    const Observation obs(j, k);
                    double quad[2];
                    for (const Truth truth : {Truth::False, Truth::True}) {
                        const double closed = observation_probability(params, truth, obs);
                        const double q = quadrature_observation_probability(params, truth, obs);
                        quad[truth == Truth::True ? 1 : 0] = q;
                        add_quadrature_row(r, t, truth, j, k, closed, q);
                    }
                    if (!params.has_gamma_prior()) {
                        const double quad_lr = quad[1] / quad[0];
                        if (relative_deviation(likelihood_ratio(params, obs), quad_lr) <= kQuadratureRelTol) {
                            ++standard_matches;
                        }
                        if (relative_deviation(std::exp(log_likelihood_ratio_shifted_indexing(params, obs)),
                                               quad_lr) <= kQuadratureRelTol) {
                            ++shifted_matches;
                        }
                    }
                }
            }
            summarize_quadrature(r, t);
            if (!params.has_gamma_prior()) {
                const int cells = static_cast<int>((f.j_max + 1) * (f.k_max + 1));
                std::string verdict = "neither";
                if (standard_matches == cells && shifted_matches < cells) verdict = "standard";
                if (shifted_matches == cells && standard_matches < cells) verdict = "shifted";
                if (standard_matches == cells && shifted_matches == cells) verdict = "both";
                r.summary["incomplete_gamma_indexing"] = verdict;
                r.summary["standard_indexing_matches"] = standard_matches;
                r.summary["shifted_indexing_matches"] = shifted_matches;
            }
        }
        return r;
    }

    HomogeneousFlags hf = f.homogeneous;
    hf.prior = f.framework.prior;
    hf.interest = f.framework.interest;
    const HomogeneousParams params = make_homogeneous(hf);
    const double p = *hf.p;
    r.parameters["homogeneous"] = homogeneous_parameters(hf);
    if (monte_carlo) {
        const JointCountTable table = simulate_homogeneous(params, config, p);
        OracleTally t;
        add_monte_carlo_rows(
            r, compare_homogeneous_posteriors(params, table, p, kMinOccupants, kMonteCarloMaxZ), t);
        summarize_monte_carlo(r, table, t);
    }
    if (quadrature) {
        QuadratureTally t;
        for (std::int64_t j = 0; j <= f.j_max; ++j) {
            for (const Truth truth : {Truth::False, Truth::True}) {
                add_quadrature_row(r, t, truth, j, 0, homogeneous_observation_probability(params, truth, j, p),
                                   quadrature_homogeneous_probability(params, truth, j, p));
            }
        }
        summarize_quadrature(r, t);
    }
    return r;
}

}  // namespace improvable::cli
