#pragma once

#include "smatch/models.hpp"
#include "smatch/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smatch {

enum class EstimatorKind { sm, onestep, kessler, mle };

std::string_view to_string(EstimatorKind e) noexcept;
/// Throws ConfigError for unknown names.
EstimatorKind parse_estimator(std::string_view name);

/// Canonical column order sm, onestep, kessler, mle.
std::vector<EstimatorKind> all_estimators();

struct ExperimentConfig {
    double theta0 = 2.0;
    double sigma = 1.0;
    std::vector<double> deltas{0.01, 0.05, 0.1, 1.0};
    std::vector<std::size_t> ns{99, 199};
    std::size_t k = 200;
    std::uint64_t base_seed = 20130401;
    ParameterInterval theta_space{0.05, 20.0};
    std::vector<EstimatorKind> estimators = all_estimators();
    bool include_stationary_term = true;
    std::size_t workers = 1;

    /// Throws ConfigError unless k >= 2, every delta > 0, every n >= 10, and the
    /// estimator list is nonempty.
    void validate() const;
};

/// One estimator's output on one replication. A NaN estimate marks an excluded
/// replication and `error` says why.
struct ReplicationRecord {
    std::size_t rep = 0;
    EstimatorKind estimator = EstimatorKind::sm;
    double estimate = 0.0;
    double bandwidth = 0.0;  // NaN for estimators without a bandwidth
    std::string error;
};

struct CellSummary {
    EstimatorKind estimator = EstimatorKind::sm;
    double mean = 0.0;
    double variance = 0.0;  // divisor k - 1
    double bias_sq = 0.0;
    double mse = 0.0;       // variance + bias_sq
    std::size_t k = 0;      // completed replications
    std::size_t excluded = 0;
};

struct CellReport {
    double delta = 0.0;
    std::size_t n = 0;
    double eb = 0.0;
    std::vector<CellSummary> summaries;
    std::vector<ReplicationRecord> raw;  // replication-major, estimator order within

    const CellSummary& summary(EstimatorKind e) const;
    /// Non-excluded estimates of one estimator in replication order.
    std::vector<double> estimates(EstimatorKind e) const;
};

struct MonteCarloReport {
    double theta0 = 0.0;
    std::vector<CellReport> cells;

    const CellReport& cell(double delta, std::size_t n) const;
};

/// Mean / unbiased variance / squared bias / MSE over the finite entries; NaNs count as
/// exclusions.
CellSummary aggregate(EstimatorKind e, std::span<const double> estimates, double theta0);

/// Seed of replication `rep` in cell (delta, n): every cell owns an independent substream.
SeedSpec replication_seed(std::uint64_t base_seed, double delta, std::size_t n, std::size_t rep);

CellReport run_cell(const ExperimentConfig& cfg, double delta, std::size_t n);

/// All (delta, n) cells of the configuration in the order given there.
MonteCarloReport run_experiment(const ExperimentConfig& cfg);

/// run_experiment on the default 4 x 2 grid with all four estimators.
MonteCarloReport reproduce_table1(const ExperimentConfig& cfg = ExperimentConfig{});

enum class ReportFormat { csv, raw_csv, table };

/// `delta,n,estimator,mean,variance,bias_sq,mse,eb,k,excluded`
void write_summary_csv(std::ostream& out, const MonteCarloReport& report);
/// `delta,n,rep,estimator,estimate,bandwidth`
void write_raw_csv(std::ostream& out, const MonteCarloReport& report);
/// Fixed-width MSE table, one row per (delta, n), one column per estimator, then EB.
void write_table(std::ostream& out, const MonteCarloReport& report);

/// Writes to a file; I/O failures throw std::runtime_error naming the path.
void write_report(const MonteCarloReport& report, ReportFormat format,
                  const std::filesystem::path& path);

struct RawRow {
    double delta = 0.0;
    std::size_t n = 0;
    std::size_t rep = 0;
    EstimatorKind estimator = EstimatorKind::sm;
    double estimate = 0.0;
    double bandwidth = 0.0;
};

std::vector<RawRow> read_raw_csv(std::istream& in);

struct SummaryRow {
    double delta = 0.0;
    std::size_t n = 0;
    CellSummary summary;
    double eb = 0.0;
};

std::vector<SummaryRow> read_summary_csv(std::istream& in);

}  // namespace smatch
