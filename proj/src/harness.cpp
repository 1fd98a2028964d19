#include "smatch/harness.hpp"

#include "smatch/baselines.hpp"
#include "smatch/errors.hpp"
#include "smatch/format.hpp"
#include "smatch/matching.hpp"
#include "smatch/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace smatch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool wants(const ExperimentConfig& cfg, EstimatorKind e) {
    return std::find(cfg.estimators.begin(), cfg.estimators.end(), e) != cfg.estimators.end();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::size_t parse_count(const std::string& s) {
    const double v = parse_real(s);
    if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError("expected a count, got '" + s + "'");
    return static_cast<std::size_t>(v);
}

}  // namespace

std::string_view to_string(EstimatorKind e) noexcept {
    switch (e) {
        case EstimatorKind::sm: return "sm";
        case EstimatorKind::onestep: return "onestep";
        case EstimatorKind::kessler: return "kessler";
        case EstimatorKind::mle: return "mle";
    }
    return "unknown";
}

EstimatorKind parse_estimator(std::string_view name) {
    for (auto e : all_estimators()) {
        if (to_string(e) == name) return e;
    }
    throw ConfigError("unknown estimator '" + std::string(name) +
                      "' (expected sm, onestep, kessler or mle)");
}

std::vector<EstimatorKind> all_estimators() {
    return {EstimatorKind::sm, EstimatorKind::onestep, EstimatorKind::kessler, EstimatorKind::mle};
}

void ExperimentConfig::validate() const {
    if (k < 2) throw ConfigError("need at least 2 replications per cell");
    if (deltas.empty() || ns.empty()) throw ConfigError("need at least one delta and one n");
    for (double d : deltas) {
        if (!(std::isfinite(d) && d > 0.0)) throw ConfigError("every delta must be positive");
    }
    for (auto n : ns) {
        if (n < 10) throw ConfigError("every n must be at least 10, got " + std::to_string(n));
    }
    if (estimators.empty()) throw ConfigError("no estimators selected");
    if (!(theta0 > 0.0 && sigma > 0.0)) throw ConfigError("theta0 and sigma must be positive");
    if (!(theta_space.lo > 0.0)) throw ConfigError("parameter space must lie in (0, inf)");
}

const CellSummary& CellReport::summary(EstimatorKind e) const {
    for (const auto& s : summaries) {
        if (s.estimator == e) return s;
    }
    throw std::out_of_range("cell has no summary for estimator " + std::string(to_string(e)));
}

std::vector<double> CellReport::estimates(EstimatorKind e) const {
    std::vector<double> out;
    for (const auto& r : raw) {
        if (r.estimator == e && std::isfinite(r.estimate)) out.push_back(r.estimate);
    }
    return out;
}

const CellReport& MonteCarloReport::cell(double delta, std::size_t n) const {
    for (const auto& c : cells) {
        if (c.delta == delta && c.n == n) return c;
    }
    throw std::out_of_range("report has no cell delta=" + format_real(delta) + " n=" + std::to_string(n));
}

CellSummary aggregate(EstimatorKind e, std::span<const double> estimates, double theta0) {
    CellSummary s;
    s.estimator = e;
    double sum = 0.0;
    for (double v : estimates) {
        if (std::isfinite(v)) {
            sum += v;
            ++s.k;
        } else {
            ++s.excluded;
        }
    }
    if (s.k == 0) {
        s.mean = s.variance = s.bias_sq = s.mse = kNaN;
        return s;
    }
    s.mean = sum / static_cast<double>(s.k);
    double ss = 0.0;
    for (double v : estimates) {
        if (std::isfinite(v)) ss += (v - s.mean) * (v - s.mean);
    }
    s.variance = s.k > 1 ? ss / static_cast<double>(s.k - 1) : kNaN;
    s.bias_sq = (s.mean - theta0) * (s.mean - theta0);
    s.mse = s.variance + s.bias_sq;
    return s;
}

SeedSpec replication_seed(std::uint64_t base_seed, double delta, std::size_t n, std::size_t rep) {
    const std::uint64_t tag = mix64(std::bit_cast<std::uint64_t>(delta)) ^
                              mix64(0xC2B2AE3D27D4EB4FULL + static_cast<std::uint64_t>(n));
    return SeedSpec{substream_seed(SeedSpec{base_seed, tag}), rep};
}

CellReport run_cell(const ExperimentConfig& cfg, double delta, std::size_t n) {
    cfg.validate();
    const OuModel model(cfg.theta0, cfg.sigma, delta);

    SmoothMatchConfig sm_cfg;
    sm_cfg.sigma = cfg.sigma;
    sm_cfg.space = cfg.theta_space;

    const bool need_sm = wants(cfg, EstimatorKind::sm) || wants(cfg, EstimatorKind::onestep);
    std::vector<EstimatorKind> order;
    for (auto e : all_estimators()) {
        if (wants(cfg, e)) order.push_back(e);
    }

    // slots[rep][estimator position in `order`]
    std::vector<std::vector<ReplicationRecord>> slots(cfg.k);
    parallel_for(cfg.k, cfg.workers, [&](std::size_t rep) {
        const auto sample = sample_ou_exact(model, n, replication_seed(cfg.base_seed, delta, n, rep));
        std::optional<SmEstimate> sm;
        std::string sm_error;
        if (need_sm) {
            try {
                sm = smooth_and_match(sample, sm_cfg);
            } catch (const NumericalError& e) {
                sm_error = e.what();
            }
        }
        auto& out = slots[rep];
        for (auto e : order) {
            ReplicationRecord r{rep, e, kNaN, kNaN, {}};
            try {
                switch (e) {
                    case EstimatorKind::sm:
                        if (!sm) throw DegenerateSampleError(sm_error);
                        r.estimate = sm->theta_hat;
                        r.bandwidth = sm->bandwidth;
                        break;
                    case EstimatorKind::onestep: {
                        if (!sm) throw DegenerateSampleError("preliminary failed: " + sm_error);
                        const OuLikelihood lik(sample, cfg.sigma, cfg.include_stationary_term);
                        r.estimate = one_step(sm->theta_hat, lik, cfg.theta_space).theta_bar;
                        r.bandwidth = sm->bandwidth;
                        break;
                    }
                    case EstimatorKind::kessler:
                        r.estimate = kessler_estimator(sample, cfg.sigma);
                        break;
                    case EstimatorKind::mle:
                        r.estimate = ou_mle(sample, cfg.sigma, cfg.theta_space, cfg.include_stationary_term);
                        break;
                }
            } catch (const NumericalError& ex) {
                r.estimate = kNaN;
                r.error = ex.what();
            }
            out.push_back(std::move(r));
        }
    });

    CellReport cell;
    cell.delta = delta;
    cell.n = n;
    cell.eb = efficiency_bound(cfg.theta0, cfg.sigma, delta, n + 1);
    for (auto& s : slots) {
        for (auto& r : s) cell.raw.push_back(std::move(r));
    }
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        std::vector<double> values;
        values.reserve(cfg.k);
        for (std::size_t rep = 0; rep < cfg.k; ++rep) {
            values.push_back(cell.raw[rep * order.size() + pos].estimate);
        }
        cell.summaries.push_back(aggregate(order[pos], values, cfg.theta0));
    }
    return cell;
}

MonteCarloReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    MonteCarloReport report;
    report.theta0 = cfg.theta0;
    for (double delta : cfg.deltas) {
        for (auto n : cfg.ns) report.cells.push_back(run_cell(cfg, delta, n));
    }
    return report;
}

MonteCarloReport reproduce_table1(const ExperimentConfig& cfg) { return run_experiment(cfg); }

void write_summary_csv(std::ostream& out, const MonteCarloReport& report) {
    out << "delta,n,estimator,mean,variance,bias_sq,mse,eb,k,excluded\n";
    for (const auto& c : report.cells) {
        for (const auto& s : c.summaries) {
            out << format_real(c.delta) << ',' << c.n << ',' << to_string(s.estimator) << ','
                << format_real(s.mean) << ',' << format_real(s.variance) << ','
                << format_real(s.bias_sq) << ',' << format_real(s.mse) << ',' << format_real(c.eb)
                << ',' << s.k << ',' << s.excluded << '\n';
        }
    }
}

void write_raw_csv(std::ostream& out, const MonteCarloReport& report) {
    out << "delta,n,rep,estimator,estimate,bandwidth\n";
    for (const auto& c : report.cells) {
        for (const auto& r : c.raw) {
            out << format_real(c.delta) << ',' << c.n << ',' << r.rep << ',' << to_string(r.estimator)
                << ',' << format_real(r.estimate) << ','
                << (std::isnan(r.bandwidth) ? std::string() : format_real(r.bandwidth)) << '\n';
        }
    }
}

void write_table(std::ostream& out, const MonteCarloReport& report) {
    std::vector<EstimatorKind> columns;
    for (auto e : all_estimators()) {
        for (const auto& c : report.cells) {
            const bool present = std::any_of(c.summaries.begin(), c.summaries.end(),
                                             [e](const CellSummary& s) { return s.estimator == e; });
            if (present) {
                columns.push_back(e);
                break;
            }
        }
    }
    char buf[64];
    auto cell_text = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%10.4g", v);
        return std::string(buf);
    };
    out << "     delta      n";
    for (auto e : columns) {
        std::snprintf(buf, sizeof(buf), "%10s", std::string(to_string(e)).c_str());
        out << buf;
    }
    out << "        EB\n";
    out << std::string(16 + 10 * (columns.size() + 1), '-') << '\n';
    double last_delta = kNaN;
    for (const auto& c : report.cells) {
        if (c.delta == last_delta) {
            out << "          ";
        } else {
            std::snprintf(buf, sizeof(buf), "%10g", c.delta);
            out << buf;
        }
        last_delta = c.delta;
        std::snprintf(buf, sizeof(buf), "%7zu", c.n);
        out << buf;
        for (auto e : columns) {
            const auto it = std::find_if(c.summaries.begin(), c.summaries.end(),
                                         [e](const CellSummary& s) { return s.estimator == e; });
            out << (it == c.summaries.end() ? std::string("         -") : cell_text(it->mse));
        }
        out << cell_text(c.eb) << '\n';
    }
}

void write_report(const MonteCarloReport& report, ReportFormat format,
                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    switch (format) {
        case ReportFormat::csv: write_summary_csv(out, report); break;
        case ReportFormat::raw_csv: write_raw_csv(out, report); break;
        case ReportFormat::table: write_table(out, report); break;
    }
    out.flush();
    if (!out) throw std::runtime_error("failed writing report to '" + path.string() + "'");
}

std::vector<RawRow> read_raw_csv(std::istream& in) {
    std::vector<RawRow> rows;
    std::string line;
    if (!std::getline(in, line) || line != "delta,n,rep,estimator,estimate,bandwidth") {
        throw ConfigError("raw CSV: unexpected header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 6) throw ConfigError("raw CSV: expected 6 fields in '" + line + "'");
        RawRow r;
        r.delta = parse_real(f[0]);
        r.n = parse_count(f[1]);
        r.rep = parse_count(f[2]);
        r.estimator = parse_estimator(f[3]);
        r.estimate = f[4] == "nan" ? kNaN : parse_real(f[4]);
        r.bandwidth = f[5].empty() ? kNaN : parse_real(f[5]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
    std::vector<SummaryRow> rows;
    std::string line;
    if (!std::getline(in, line) || line != "delta,n,estimator,mean,variance,bias_sq,mse,eb,k,excluded") {
        throw ConfigError("summary CSV: unexpected header");
    }
    auto real_or_nan = [](const std::string& s) { return s == "nan" ? kNaN : parse_real(s); };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 10) throw ConfigError("summary CSV: expected 10 fields in '" + line + "'");
        SummaryRow r;
        r.delta = parse_real(f[0]);
        r.n = parse_count(f[1]);
        r.summary.estimator = parse_estimator(f[2]);
        r.summary.mean = real_or_nan(f[3]);
        r.summary.variance = real_or_nan(f[4]);
        r.summary.bias_sq = real_or_nan(f[5]);
        r.summary.mse = real_or_nan(f[6]);
        r.eb = parse_real(f[7]);
        r.summary.k = parse_count(f[8]);
        r.summary.excluded = parse_count(f[9]);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace smatch
