#pragma once

#include "smatch/quadrature.hpp"
#include "smatch/simulate.hpp"

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace smatch {

/// Symmetric kernel supported on [-1, 1].
///
/// `declared_order` follows the usual convention: moments 1..order-1 vanish and
/// the moment of index `order` is the first nonzero one.
struct Kernel {
    std::string name;
    double (*eval)(double u) = nullptr;
    double (*deriv)(double u) = nullptr;
    double support_halfwidth = 1.0;
    int declared_order = 2;
};

/// K(u) = (105/64 - 315/64 u^2)(1 - u^2)^2 on |u| <= 1; fourth order, C^1.
Kernel biweight4_kernel();

/// K(u) = 3/4 (1 - u^2); second order. Not differentiable at the support edge,
/// kept for moment checks only.
Kernel epanechnikov_kernel();

/// Integral of u^l K(u) over [-1, 1], composite Simpson on 4001 nodes.
double kernel_moment(const Kernel& k, int l);

/// Smooth plateau function: 1 on |x| <= c, 0 on |x| >= 1, and
/// exp[-beta exp[-beta/(|x|-c)^2] / (|x|-1)^2] in between.
double weight_lambda(double x, double c, double beta);
double weight_lambda_deriv(double x, double c, double beta);

struct WeightFunction {
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    double support_lo = -1.0;
    double support_hi = 1.0;

    /// c * w; the support is unchanged.
    WeightFunction scaled(double factor) const;
};

/// x -> weight_lambda(x / half_width, c, beta), supported on [-half_width, half_width].
WeightFunction lambda_weight(double c, double beta, double half_width);

/// Plateau weight used throughout the experiments: c = 0.7, beta = 0.5, support [-1.4, 1.4].
WeightFunction plateau_weight();

/// Values of a density estimate and its derivative on the nodes of a grid.
struct DensityTable {
    std::vector<double> pi;
    std::vector<double> dpi;
};

/// Kernel density estimate built from a sample; immutable.
class DensityEstimate {
public:
    DensityEstimate(std::vector<double> observations, double bandwidth, Kernel kernel = biweight4_kernel());
    DensityEstimate(const TimeSeriesSample& sample, double bandwidth, Kernel kernel = biweight4_kernel());

    double bandwidth() const noexcept { return h_; }
    const Kernel& kernel() const noexcept { return kernel_; }
    std::span<const double> observations() const noexcept { return obs_; }

    /// (1 / (N h)) sum_j K((x - Z_j) / h). Can be negative for higher-order kernels.
    double eval(double x) const;
    /// (1 / (N h^2)) sum_j K'((x - Z_j) / h).
    double deriv(double x) const;

    /// Same sums on every grid node, visiting only the nodes inside each kernel's support.
    DensityTable tabulate(const UniformGrid& grid) const;

private:
    std::vector<double> obs_;
    double h_;
    Kernel kernel_;
};

/// Tabulate arbitrary density / derivative callables (e.g. a closed-form law) on a grid.
DensityTable tabulate(const UniformGrid& grid, const std::function<double(double)>& pi,
                      const std::function<double(double)>& dpi);

/// Weighted integrated squared errors of pi-hat and pi-hat' against the truth.
std::pair<double, double> empirical_wise(const DensityEstimate& d,
                                         const std::function<double(double)>& truth,
                                         const std::function<double(double)>& truth_deriv,
                                         const WeightFunction& w, const UniformGrid& grid);

}  // namespace smatch
