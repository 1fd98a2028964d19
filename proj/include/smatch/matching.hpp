#pragma once

#include "smatch/kde.hpp"
#include "smatch/models.hpp"
#include "smatch/quadrature.hpp"
#include "smatch/simulate.hpp"

#include <functional>
#include <limits>
#include <string_view>
#include <vector>

namespace smatch {

/// Default quadrature resolution for all weighted integrals.
inline constexpr std::size_t kDefaultGridNodes = 2001;

/// Trapezoid grid spanning exactly the weight support.
UniformGrid weight_grid(const WeightFunction& w, std::size_t nodes = kDefaultGridNodes);

/// Everything R_n(theta) needs. The weight and drift are tabulated once on construction,
/// so evaluation at many theta is a single pass over the grid.
class CriterionContext {
public:
    /// Throws ConfigError unless the grid spans the weight support exactly and has an odd
    /// node count of at least 101.
    CriterionContext(DensityTable density, DriftSpec drift, double sigma, WeightFunction weight,
                     UniformGrid grid, double bandwidth = std::numeric_limits<double>::quiet_NaN());

    /// Tabulates the kernel estimate on the grid.
    CriterionContext(const DensityEstimate& density, DriftSpec drift, double sigma,
                     WeightFunction weight, UniformGrid grid);

    const DensityTable& density() const noexcept { return density_; }
    const DriftSpec& drift() const noexcept { return drift_; }
    const WeightFunction& weight() const noexcept { return weight_; }
    const UniformGrid& grid() const noexcept { return grid_; }
    double sigma() const noexcept { return sigma_; }
    double bandwidth() const noexcept { return bandwidth_; }

    /// Integral of (mu(x; theta) pi-hat - (1/2)[sigma^2 pi-hat]')^2 w(x) dx.
    double criterion(double theta) const;

    /// Trapezoid weight times w(x) at each node.
    std::span<const double> quadrature_weights() const noexcept { return qw_; }

private:
    DensityTable density_;
    DriftSpec drift_;
    double sigma_;
    WeightFunction weight_;
    UniformGrid grid_;
    double bandwidth_;
    std::vector<double> qw_;
    std::vector<double> m_;  // filled for linear drifts only
    std::vector<double> b_;
};

enum class SmMethod { grid_golden, closed_form };

std::string_view to_string(SmMethod m) noexcept;

struct SmEstimate {
    double theta_hat = 0.0;
    double bandwidth = 0.0;
    double criterion_value = 0.0;
    SmMethod method = SmMethod::grid_golden;
    /// Closed form fell outside the parameter space and was clamped to it.
    bool clamped = false;
};

double criterion(const CriterionContext& ctx, double theta);

/// argmin of R_n over the interval: 64-point scan, then golden section to 1e-8.
SmEstimate minimize_criterion(const CriterionContext& ctx, const ParameterInterval& space);

/// -(sigma^2/2) * int x pi pi' w / int x^2 pi^2 w, for the drift -theta x.
/// Throws ConfigError for any other drift and DegenerateSampleError when the
/// denominator is below 1e-14.
SmEstimate ou_closed_form(const CriterionContext& ctx, const ParameterInterval& space);

/// Weighted least squares solution for mu = theta m(x) + b(x).
SmEstimate generic_linear_closed_form(const CriterionContext& ctx, const ParameterInterval& space);

/// sd(sample) * (n + 1)^(-1/8)
double default_bandwidth_anchor(const TimeSeriesSample& sample);

/// h_max * ratio^i, i = 0..count-1 (strictly decreasing).
std::vector<double> geometric_bandwidth_grid(double h_max, double ratio = 0.9, std::size_t count = 30);

struct QuasiOptimalResult {
    double bandwidth = 0.0;
    double theta_hat = 0.0;
    std::size_t index = 0;
    std::vector<double> thetas;
};

/// Picks the bandwidth whose estimate changes least when moving to the next (smaller)
/// bandwidth; ties go to the larger bandwidth.
QuasiOptimalResult quasi_optimal_bandwidth(std::span<const double> h_grid,
                                           const std::function<double(double)>& estimator);

struct SmoothMatchConfig {
    DriftSpec drift = ou_drift_spec();
    double sigma = 1.0;
    ParameterInterval space{};
    Kernel kernel = biweight4_kernel();
    WeightFunction weight = plateau_weight();
    std::size_t grid_nodes = kDefaultGridNodes;
    SmMethod method = SmMethod::grid_golden;
    double bandwidth_ratio = 0.9;
    std::size_t bandwidth_count = 30;
};

/// Smooth-and-match estimate at a fixed bandwidth.
SmEstimate smooth_and_match(const TimeSeriesSample& sample, double bandwidth,
                            const SmoothMatchConfig& cfg);

/// Smooth-and-match estimate with the bandwidth picked by quasi-optimality over the
/// default geometric grid.
SmEstimate smooth_and_match(const TimeSeriesSample& sample, const SmoothMatchConfig& cfg);

}  // namespace smatch
