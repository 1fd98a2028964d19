#include "smatch/kde.hpp"

#include "smatch/errors.hpp"

#include <algorithm>
#include <cmath>

namespace smatch {

namespace {

double biweight4_eval(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    const double u2 = u * u;
    const double q = 1.0 - u2;
    return (105.0 / 64.0 - 315.0 / 64.0 * u2) * q * q;
}

double biweight4_deriv(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    // d/du [(105/64)(1 - 3u^2)(1 - u^2)^2] = (105/64)(-6u(1-u^2)^2 - 4u(1-3u^2)(1-u^2))
    //                                     = (105/64) u (1 - u^2)(-10 + 18 u^2)
    const double u2 = u * u;
    return 105.0 / 64.0 * u * (1.0 - u2) * (18.0 * u2 - 10.0);
}

double epanechnikov_eval(double u) { return std::abs(u) >= 1.0 ? 0.0 : 0.75 * (1.0 - u * u); }
double epanechnikov_deriv(double u) { return std::abs(u) >= 1.0 ? 0.0 : -1.5 * u; }

}  // namespace

Kernel biweight4_kernel() { return Kernel{"biweight4", &biweight4_eval, &biweight4_deriv, 1.0, 4}; }

Kernel epanechnikov_kernel() {
    return Kernel{"epanechnikov", &epanechnikov_eval, &epanechnikov_deriv, 1.0, 2};
}

double kernel_moment(const Kernel& k, int l) {
    if (l < 0 || l > 8) throw ConfigError("kernel_moment: order must lie in 0..8");
    constexpr std::size_t intervals = 4000;
    const double h = 2.0 / static_cast<double>(intervals);
    auto f = [&](double u) { return std::pow(u, l) * k.eval(u); };
    double acc = f(-1.0) + f(1.0);
    for (std::size_t i = 1; i < intervals; ++i) {
        const double u = -1.0 + static_cast<double>(i) * h;
        acc += (i % 2 == 1 ? 4.0 : 2.0) * f(u);
    }
    return acc * h / 3.0;
}

double weight_lambda(double x, double c, double beta) {
    const double a = std::abs(x);
    if (a <= c) return 1.0;
    if (a >= 1.0) return 0.0;
    const double inner = std::exp(-beta / ((a - c) * (a - c)));
    return std::exp(-beta * inner / ((a - 1.0) * (a - 1.0)));
}

double weight_lambda_deriv(double x, double c, double beta) {
    const double a = std::abs(x);
    if (a <= c || a >= 1.0) return 0.0;
    const double s = a - c;
    const double t = a - 1.0;
    const double inner = std::exp(-beta / (s * s));
    if (inner == 0.0) return 0.0;
    // lambda = exp(g), g = -beta * inner / t^2
    const double dg = -beta * inner * (2.0 * beta / (s * s * s * t * t) - 2.0 / (t * t * t));
    const double value = std::exp(-beta * inner / (t * t));
    return (x < 0.0 ? -1.0 : 1.0) * value * dg;
}

WeightFunction WeightFunction::scaled(double factor) const {
    WeightFunction w = *this;
    w.eval = [f = eval, factor](double x) { return factor * f(x); };
    w.deriv = [f = deriv, factor](double x) { return factor * f(x); };
    return w;
}

WeightFunction lambda_weight(double c, double beta, double half_width) {
    if (!(c > 0.0 && c < 1.0)) throw ConfigError("weight plateau c must lie in (0, 1)");
    if (!(beta > 0.0)) throw ConfigError("weight steepness beta must be positive");
    if (!(half_width > 0.0)) throw ConfigError("weight half-width must be positive");
    WeightFunction w;
    w.eval = [=](double x) { return weight_lambda(x / half_width, c, beta); };
    w.deriv = [=](double x) { return weight_lambda_deriv(x / half_width, c, beta) / half_width; };
    w.support_lo = -half_width;
    w.support_hi = half_width;
    return w;
}

WeightFunction plateau_weight() { return lambda_weight(0.7, 0.5, 1.4); }

DensityEstimate::DensityEstimate(std::vector<double> observations, double bandwidth, Kernel kernel)
    : obs_(std::move(observations)), h_(bandwidth), kernel_(std::move(kernel)) {
    if (obs_.empty()) throw ConfigError("density estimate needs at least one observation");
    if (!(std::isfinite(h_) && h_ > 0.0)) {
        throw ConfigError("bandwidth must be positive, got " + std::to_string(h_));
    }
    if (kernel_.eval == nullptr || kernel_.deriv == nullptr) {
        throw ConfigError("kernel is missing its evaluator");
    }
}

DensityEstimate::DensityEstimate(const TimeSeriesSample& sample, double bandwidth, Kernel kernel)
    : DensityEstimate(std::vector<double>(sample.values().begin(), sample.values().end()),
                      bandwidth, std::move(kernel)) {}

double DensityEstimate::eval(double x) const {
    double acc = 0.0;
    for (double z : obs_) acc += kernel_.eval((x - z) / h_);
    return acc / (static_cast<double>(obs_.size()) * h_);
}

double DensityEstimate::deriv(double x) const {
    double acc = 0.0;
    for (double z : obs_) acc += kernel_.deriv((x - z) / h_);
    return acc / (static_cast<double>(obs_.size()) * h_ * h_);
}

DensityTable DensityEstimate::tabulate(const UniformGrid& grid) const {
    const std::size_t m = grid.nodes();
    DensityTable t{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    const double reach = kernel_.support_halfwidth * h_;
    const double last = static_cast<double>(m - 1);
    for (double z : obs_) {
        // One node of slack on each side; the kernel itself returns 0 off its support.
        const double first_pos = std::floor((z - reach - grid.lo()) / grid.step()) - 1.0;
        const double last_pos = std::ceil((z + reach - grid.lo()) / grid.step()) + 1.0;
        if (last_pos < 0.0 || first_pos > last) continue;
        const auto i0 = static_cast<std::size_t>(std::max(first_pos, 0.0));
        const auto i1 = static_cast<std::size_t>(std::min(last_pos, last));
        for (std::size_t i = i0; i <= i1; ++i) {
            const double u = (grid.node(i) - z) / h_;
            t.pi[i] += kernel_.eval(u);
            t.dpi[i] += kernel_.deriv(u);
        }
    }
    const double scale = 1.0 / (static_cast<double>(obs_.size()) * h_);
    for (std::size_t i = 0; i < m; ++i) {
        t.pi[i] *= scale;
        t.dpi[i] *= scale / h_;
    }
    return t;
}

DensityTable tabulate(const UniformGrid& grid, const std::function<double(double)>& pi,
                      const std::function<double(double)>& dpi) {
    DensityTable t;
    t.pi.reserve(grid.nodes());
    t.dpi.reserve(grid.nodes());
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        t.pi.push_back(pi(grid.node(i)));
        t.dpi.push_back(dpi(grid.node(i)));
    }
    return t;
}

std::pair<double, double> empirical_wise(const DensityEstimate& d,
                                         const std::function<double(double)>& truth,
                                         const std::function<double(double)>& truth_deriv,
                                         const WeightFunction& w, const UniformGrid& grid) {
    if (grid.lo() > w.support_lo || grid.hi() < w.support_hi) {
        throw ConfigError("empirical_wise: grid must cover the weight support");
    }
    const DensityTable t = d.tabulate(grid);
    double density_err = 0.0;
    double deriv_err = 0.0;
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const double x = grid.node(i);
        const double wx = w.eval(x) * grid.weight(i);
        const double e0 = t.pi[i] - truth(x);
        const double e1 = t.dpi[i] - truth_deriv(x);
        density_err += e0 * e0 * wx;
        deriv_err += e1 * e1 * wx;
    }
    return {density_err, deriv_err};
}

}  // namespace smatch
