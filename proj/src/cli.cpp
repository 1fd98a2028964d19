#include "smatch/cli.hpp"

#include "smatch/baselines.hpp"
#include "smatch/errors.hpp"
#include "smatch/format.hpp"
#include "smatch/harness.hpp"
#include "smatch/kde.hpp"
#include "smatch/matching.hpp"
#include "smatch/simulate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace smatch::cli {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool sets_flag(const std::vector<std::string>& args, const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
    });
}

struct SimulateOptions {
    double theta = 2.0;
    double sigma = 1.0;
    double delta = 0.1;
    std::size_t n = 199;
    std::uint64_t seed = 1;
    std::uint64_t rep = 0;
    std::string method = "exact";
    std::size_t substeps = 100;
    std::optional<std::size_t> burn_in;
    double x0 = 0.0;
    std::string out;
};

struct EstimateOptions {
    std::string input;
    std::string model = "ou";
    std::string estimator = "sm";
    double sigma = 1.0;
    double theta_lo = 0.05;
    double theta_hi = 20.0;
    std::string bandwidth = "auto";
    bool closed_form = false;
    bool transition_only = false;
};

struct McOptions {
    double theta0 = 2.0;
    double sigma = 1.0;
    std::vector<double> deltas{0.01, 0.05, 0.1, 1.0};
    std::vector<std::size_t> ns{99, 199};
    std::size_t k = 200;
    std::uint64_t seed = 20130401;
    std::vector<std::string> estimators{"sm", "onestep", "kessler", "mle"};
    double theta_lo = 0.05;
    double theta_hi = 20.0;
    std::size_t workers = 1;
    bool transition_only = false;
    std::string out;
    std::string raw;
    std::string table;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    const SeedSpec seed{o.seed, o.rep};
    std::optional<TimeSeriesSample> sample;
    if (o.method == "exact") {
        sample = sample_ou_exact(OuModel(o.theta, o.sigma, o.delta), o.n, seed);
    } else if (o.method == "euler") {
        OuModel(o.theta, o.sigma, o.delta);  // parameter validation only
        EulerMaruyamaConfig cfg;
        cfg.theta = o.theta;
        cfg.sigma = o.sigma;
        cfg.delta = o.delta;
        cfg.substeps = o.substeps;
        cfg.n = o.n;
        cfg.x0 = o.x0;
        cfg.burn_in = o.burn_in ? *o.burn_in : default_burn_in(o.theta, o.delta);
        sample = sample_euler_maruyama(ou_drift_spec(), cfg, seed);
    } else {
        throw ConfigError("unknown simulation method '" + o.method + "' (exact|euler)");
    }
    if (o.out.empty()) {
        write_sample_csv(out, *sample);
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open '" + o.out + "' for writing");
        write_sample_csv(f, *sample);
    }
    return kExitOk;
}

int cmd_estimate(const EstimateOptions& o, std::ostream& out) {
    if (o.model != "ou") throw ConfigError("unknown model '" + o.model + "' (only 'ou' is shipped)");
    std::ifstream in(o.input);
    if (!in) throw ConfigError("cannot open sample file '" + o.input + "'");
    const auto sample = read_sample_csv(in);
    const ParameterInterval space(o.theta_lo, o.theta_hi);
    const auto kind = parse_estimator(o.estimator);

    SmoothMatchConfig cfg;
    cfg.sigma = o.sigma;
    cfg.space = space;
    cfg.method = o.closed_form ? SmMethod::closed_form : SmMethod::grid_golden;
    auto run_sm = [&] {
        if (o.bandwidth == "auto") return smooth_and_match(sample, cfg);
        return smooth_and_match(sample, parse_real(o.bandwidth), cfg);
    };

    std::string theta, bandwidth, crit;
    switch (kind) {
        case EstimatorKind::sm: {
            const auto est = run_sm();
            theta = format_real(est.theta_hat);
            bandwidth = format_real(est.bandwidth);
            crit = format_real(est.criterion_value);
            break;
        }
        case EstimatorKind::onestep: {
            const auto est = run_sm();
            const OuLikelihood lik(sample, o.sigma, !o.transition_only);
            theta = format_real(one_step(est.theta_hat, lik, space).theta_bar);
            bandwidth = format_real(est.bandwidth);
            break;
        }
        case EstimatorKind::kessler:
            theta = format_real(kessler_estimator(sample, o.sigma));
            break;
        case EstimatorKind::mle:
            theta = format_real(ou_mle(sample, o.sigma, space, !o.transition_only));
            break;
    }
    out << "estimator,theta_hat,bandwidth,criterion\n"
        << to_string(kind) << ',' << theta << ',' << bandwidth << ',' << crit << '\n';
    return kExitOk;
}

int cmd_mc_table(const McOptions& o, std::ostream& out) {
    ExperimentConfig cfg;
    cfg.theta0 = o.theta0;
    cfg.sigma = o.sigma;
    cfg.deltas = o.deltas;
    cfg.ns = o.ns;
    cfg.k = o.k;
    cfg.base_seed = o.seed;
    cfg.theta_space = ParameterInterval(o.theta_lo, o.theta_hi);
    cfg.estimators.clear();
    for (const auto& e : o.estimators) cfg.estimators.push_back(parse_estimator(e));
    cfg.workers = o.workers;
    cfg.include_stationary_term = !o.transition_only;
    cfg.validate();

    const auto report = run_experiment(cfg);
    if (!o.out.empty()) write_report(report, ReportFormat::csv, o.out);
    if (!o.raw.empty()) write_report(report, ReportFormat::raw_csv, o.raw);
    if (!o.table.empty()) {
        write_report(report, ReportFormat::table, o.table);
    } else {
        write_table(out, report);
    }
    return kExitOk;
}

int cmd_kde_check(std::ostream& out) {
    const auto k = biweight4_kernel();
    const auto w = plateau_weight();
    out << "kind,arg,value\n";
    for (int l = 0; l <= 8; ++l) out << "moment," << l << ',' << format_real(kernel_moment(k, l)) << '\n';
    for (double x : {-1.5, -1.4, -1.2, -1.0, -0.98, -0.5, 0.0, 0.5, 0.9, 0.98, 1.1, 1.19, 1.3, 1.4, 1.5}) {
        out << "weight," << format_real(x) << ',' << format_real(w.eval(x)) << '\n';
    }
    for (double x : {-1.3, -1.1, 0.0, 1.1, 1.3}) {
        out << "weight_deriv," << format_real(x) << ',' << format_real(w.deriv(x)) << '\n';
    }
    return kExitOk;
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> result;
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a file path");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            result.push_back(args[i]);
        }
    }
    if (!path) return result;

    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config file '" + *path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(*path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!sets_flag(result, key)) result.push_back("--" + key + "=" + value);
    }
    return result;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Smooth-and-match drift estimation for ergodic diffusions"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate an OU path and write it as CSV");
    simulate->add_option("--theta", sim.theta, "Mean-reversion rate")->capture_default_str();
    simulate->add_option("--sigma", sim.sigma, "Dispersion")->capture_default_str();
    simulate->add_option("--delta", sim.delta, "Observation spacing")->capture_default_str();
    simulate->add_option("--n", sim.n, "Number of transitions (n + 1 values)")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
    simulate->add_option("--rep", sim.rep, "Replication index")->capture_default_str();
    simulate->add_option("--method", sim.method, "exact | euler")->capture_default_str();
    simulate->add_option("--substeps", sim.substeps, "Euler substeps per observation")->capture_default_str();
    simulate->add_option("--burn-in", sim.burn_in, "Euler burn-in observations (default 10/(theta delta))");
    simulate->add_option("--x0", sim.x0, "Euler starting point")->capture_default_str();
    simulate->add_option("--out", sim.out, "Output CSV (stdout when omitted)");

    EstimateOptions est;
    auto* estimate = app.add_subcommand("estimate", "Estimate theta from one sample CSV");
    estimate->add_option("input,--input", est.input, "Sample CSV written by `simulate`")->required();
    estimate->add_option("--model", est.model, "Drift model")->capture_default_str();
    estimate->add_option("--estimator", est.estimator, "sm | onestep | kessler | mle")->capture_default_str();
    estimate->add_option("--sigma", est.sigma, "Known dispersion")->capture_default_str();
    estimate->add_option("--theta-lo", est.theta_lo, "Parameter space lower end")->capture_default_str();
    estimate->add_option("--theta-hi", est.theta_hi, "Parameter space upper end")->capture_default_str();
    estimate->add_option("--bandwidth", est.bandwidth, "auto | <h>")->capture_default_str();
    estimate->add_flag("--closed-form", est.closed_form, "Use the weighted least squares solution");
    estimate->add_flag("--transition-only", est.transition_only, "Drop log pi(Z_0) from the likelihood");

    McOptions mc;
    auto* mc_table = app.add_subcommand("mc-table", "Monte Carlo MSE table over (delta, n) cells");
    mc_table->add_option("--theta0", mc.theta0, "True parameter")->capture_default_str();
    mc_table->add_option("--sigma", mc.sigma, "Dispersion")->capture_default_str();
    mc_table->add_option("--deltas", mc.deltas, "Observation spacings")->delimiter(',')->capture_default_str();
    mc_table->add_option("--ns", mc.ns, "Transition counts n")->delimiter(',')->capture_default_str();
    mc_table->add_option("--k", mc.k, "Replications per cell")->capture_default_str();
    mc_table->add_option("--seed", mc.seed, "Base seed")->capture_default_str();
    mc_table->add_option("--estimators", mc.estimators, "Subset of sm,onestep,kessler,mle")
        ->delimiter(',')
        ->capture_default_str();
    mc_table->add_option("--theta-lo", mc.theta_lo, "Parameter space lower end")->capture_default_str();
    mc_table->add_option("--theta-hi", mc.theta_hi, "Parameter space upper end")->capture_default_str();
    mc_table->add_option("--workers", mc.workers, "Worker threads")->capture_default_str();
    mc_table->add_flag("--transition-only", mc.transition_only, "Drop log pi(Z_0) from the likelihood");
    mc_table->add_option("--out", mc.out, "Summary CSV path");
    mc_table->add_option("--raw", mc.raw, "Per-replication CSV path");
    mc_table->add_option("--table", mc.table, "Formatted table path (stdout when omitted)");

    auto* kde_check = app.add_subcommand("kde-check", "Kernel moments and weight probes as CSV");

    try {
        auto args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (*simulate) return cmd_simulate(sim, out);
        if (*estimate) return cmd_estimate(est, out);
        if (*mc_table) return cmd_mc_table(mc, out);
        if (*kde_check) return cmd_kde_check(out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitConfig;
}

}  // namespace smatch::cli
