#include "cli/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/commands.hpp"
#include "improvable/errors.hpp"

namespace improvable::cli {

namespace {

const std::set<std::string> kCommands = {"ppv", "posterior", "region", "simulate", "homogeneous"};

std::string config_value(const nlohmann::json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_array()) {
        std::string joined;
        for (const auto& v : value) joined += (joined.empty() ? "" : ",") + config_value(v);
        return joined;
    }
    return value.dump();
}

void append_config_entries(const nlohmann::json& object, std::vector<std::string>& out) {
    for (const auto& [key, value] : object.items()) {
        if (key == "command" || value.is_object() || value.is_null()) continue;
        if (value.is_boolean()) {
            out.push_back("--" + key + "=" + (value.get<bool>() ? "true" : "false"));
            continue;
        }
        out.push_back("--" + key);
        out.push_back(config_value(value));
    }
}

// Expands --config <file> into ordinary flags inserted right after the
// subcommand name, ahead of anything given on the command line. Options use
// the take-last policy, so explicit flags override file values.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string value;
        std::size_t erase = 0;
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ValidationError("--config needs a file path");
            value = args[i + 1];
            erase = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            value = args[i].substr(9);
            erase = 1;
        } else {
            continue;
        }
        if (path) throw ValidationError("--config given more than once");
        path = value;
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                   args.begin() + static_cast<std::ptrdiff_t>(i + erase));
        --i;
    }
    if (!path) return args;

    std::ifstream in(*path);
    if (!in) throw ValidationError("cannot open config file '" + *path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config file '" + *path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config file must hold a JSON object");

    auto command = std::find_if(args.begin(), args.end(),
                                [](const std::string& a) { return kCommands.count(a) > 0; });
    if (command == args.end()) {
        if (!doc.contains("command") || !doc["command"].is_string() ||
            kCommands.count(doc["command"].get<std::string>()) == 0) {
            throw ValidationError("no subcommand given on the command line or in the config file");
        }
        args.insert(args.begin(), doc["command"].get<std::string>());
        command = args.begin();
    }
    std::vector<std::string> injected;
    append_config_entries(doc, injected);
    if (doc.contains(*command) && doc[*command].is_object()) {
        append_config_entries(doc[*command], injected);
    }
    args.insert(command + 1, injected.begin(), injected.end());
    return args;
}

void add_framework_options(CLI::App* cmd, FrameworkFlags& f) {
    cmd->add_option("--alpha-weak", f.alpha_weak, "alpha_w: false-positive rate of weak studies")
        ->capture_default_str();
    cmd->add_option("--gamma-weak", f.gamma_weak, "gamma_w: power of weak studies")->capture_default_str();
    cmd->add_option("--alpha-strong", f.alpha_strong, "alpha_S: false-positive rate of strong studies")
        ->capture_default_str();
    cmd->add_option("--gamma-strong", f.gamma_strong, "gamma_S: power of strong studies")
        ->capture_default_str();
    cmd->add_option("--cw", f.cw, "c_w: weak attempt rate per unit interest")->capture_default_str();
    cmd->add_option("--prior", f.prior, "Pr(H): prior probability of the hypothesis")->capture_default_str();
    cmd->add_option("--interest", f.interest, "interest prior, gamma:<kappa>,<beta> or uniform:<C>")
        ->capture_default_str();
}

void add_homogeneous_options(CLI::App* cmd, HomogeneousFlags& f, bool with_prior) {
    cmd->add_option("--alpha", f.alpha, "alpha: publication cut-off")->capture_default_str();
    cmd->add_option("--p", f.p, "p: lower p-value cut-off, 0 < p < alpha")->required();
    cmd->add_option("--shift", f.shift, "shift of the normal-shift power curve");
    cmd->add_option("--power-table", f.power_table, "CSV power curve (header, then x,gamma_x rows)");
    cmd->add_option("--null-table", f.null_table, "CSV null curve a(x) (header, then x,a_x rows)");
    cmd->add_option("--effect", f.effect, "effect size, with --sd and --n");
    cmd->add_option("--sd", f.sd, "standard deviation, with --effect and --n");
    cmd->add_option("--n", f.n, "sample size, with --effect and --sd");
    if (with_prior) {
        cmd->add_option("--interest", f.interest, "interest prior, gamma:<kappa>,<beta>")->capture_default_str();
        cmd->add_option("--prior", f.prior, "Pr(H): prior probability of the hypothesis")->capture_default_str();
        cmd->add_option("--j-max", f.j_max, "largest success count tabulated")->capture_default_str();
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Posterior calculus for improvable evidence under publication bias", "improvable"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.fallthrough();
    app.require_subcommand(1, 1);

    std::string format = "json";
    std::string output;
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--output", output, "write the report to this file instead of standard output");
    app.add_option("--config", "JSON file of flag values; explicit flags take precedence");

    std::function<Report()> run;

    PpvFlags ppv;
    auto* ppv_cmd = app.add_subcommand("ppv", "posterior after identical studies, with and without hidden failures");
    ppv_cmd->add_option("--alpha", ppv.alpha, "alpha: false-positive rate")->required();
    ppv_cmd->add_option("--gamma", ppv.gamma, "gamma: power")->required();
    ppv_cmd->add_option("--prior", ppv.prior, "Pr(H): prior probability")->required();
    ppv_cmd->add_option("--n", ppv.n, "number of studies attempted");
    ppv_cmd->add_option("--j", ppv.j, "exact number of successes out of n");
    ppv_cmd->callback([&] { run = [&] { return cmd_ppv(ppv); }; });

    PosteriorFlags post;
    auto* post_cmd = app.add_subcommand("posterior", "Pr(H | exactly j weak and k strong successes)");
    add_framework_options(post_cmd, post.framework);
    post_cmd->add_option("--j", post.j, "weak successes");
    post_cmd->add_option("--k", post.k, "strong successes");
    post_cmd->add_option("--j-max", post.j_max, "tabulate j = 0..j-max");
    post_cmd->add_option("--k-max", post.k_max, "tabulate k = 0..k-max");
    post_cmd->callback([&] { run = [&] { return cmd_posterior(post); }; });

    RegionFlags region;
    auto* region_cmd = app.add_subcommand("region", "paradox flag over a grid of gamma-prior rates");
    add_framework_options(region_cmd, region.framework);
    region_cmd->add_option("--beta-grid", region.beta_grid, "<lo>,<hi>,<steps> linear grid of rates")->required();
    region_cmd->add_option("--kappa", region.kappa, "gamma-prior shape");
    region_cmd->add_option("--kappa-grid", region.kappa_grid, "<lo>,<hi>,<steps> linear grid of shapes");
    region_cmd->callback([&] { run = [&] { return cmd_region(region); }; });

    HomogeneousFlags hom;
    auto* hom_cmd = app.add_subcommand("homogeneous", "single study type reporting p-values");
    add_homogeneous_options(hom_cmd, hom, true);
    hom_cmd->callback([&] { run = [&] { return cmd_homogeneous(hom); }; });

    SimulateFlags sim;
    auto* sim_cmd = app.add_subcommand("simulate", "check closed forms against Monte Carlo and quadrature");
    sim_cmd->add_option("--model", sim.model, "framework or homogeneous")
        ->check(CLI::IsMember({"framework", "homogeneous"}))
        ->capture_default_str();
    sim_cmd->add_option("--oracle", sim.oracle, "montecarlo, quadrature or both")
        ->check(CLI::IsMember({"montecarlo", "quadrature", "both"}))
        ->capture_default_str();
    add_framework_options(sim_cmd, sim.framework);
    sim_cmd->add_option("--alpha", sim.homogeneous.alpha, "homogeneous model: publication cut-off")
        ->capture_default_str();
    sim_cmd->add_option("--p", sim.homogeneous.p, "homogeneous model: lower p-value cut-off");
    sim_cmd->add_option("--shift", sim.homogeneous.shift, "homogeneous model: normal shift");
    sim_cmd->add_option("--power-table", sim.homogeneous.power_table, "homogeneous model: CSV power curve");
    sim_cmd->add_option("--null-table", sim.homogeneous.null_table, "homogeneous model: CSV null curve");
    sim_cmd->add_option("--effect", sim.homogeneous.effect, "homogeneous model: effect size");
    sim_cmd->add_option("--sd", sim.homogeneous.sd, "homogeneous model: standard deviation");
    sim_cmd->add_option("--n", sim.homogeneous.n, "homogeneous model: sample size");
    sim_cmd->add_option("--samples", sim.samples, "Monte Carlo samples")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "random seed")->capture_default_str();
    sim_cmd->add_option("--max-count", sim.max_count, "largest success count tallied per type")
        ->capture_default_str();
    sim_cmd->add_option("--threads", sim.threads, "worker threads, 0 for all cores")->capture_default_str();
    sim_cmd->add_option("--j-max", sim.j_max, "quadrature grid: largest j")->capture_default_str();
    sim_cmd->add_option("--k-max", sim.k_max, "quadrature grid: largest k")->capture_default_str();
    sim_cmd->callback([&] { run = [&] { return cmd_simulate(sim); }; });

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    Report report;
    try {
        report = run();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const QuadratureError& e) {
        err << "oracle failure: " << e.what() << '\n';
        return kExitOracleFailure;
    }

    const Format fmt = format == "csv" ? Format::Csv : Format::Json;
    if (output.empty()) {
        write_report(report, fmt, out);
    } else {
        std::ofstream file(output);
        if (!file) {
            err << "error: cannot write '" << output << "'\n";
            return kExitUsage;
        }
        write_report(report, fmt, file);
    }
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    if (report.exit_code != 0) {
        err << "oracle failure: " << report.diagnostic << '\n';
    }
    return report.exit_code;
}

}  // namespace improvable::cli
