#pragma once

#include <cstddef>
#include <span>

namespace smatch {

/// Uniform nodes lo = x_0 < ... < x_{m-1} = hi for composite trapezoid quadrature.
class UniformGrid {
public:
    /// Throws ConfigError unless lo < hi and nodes >= 2.
    UniformGrid(double lo, double hi, std::size_t nodes);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    std::size_t nodes() const noexcept { return nodes_; }
    double step() const noexcept { return step_; }

    double node(std::size_t i) const noexcept {
        return i + 1 == nodes_ ? hi_ : lo_ + static_cast<double>(i) * step_;
    }
    /// Trapezoid weight: step at interior nodes, step / 2 at the ends.
    double weight(std::size_t i) const noexcept {
        return (i == 0 || i + 1 == nodes_) ? 0.5 * step_ : step_;
    }

    /// Same interval with 2 m - 1 nodes (every interval halved).
    UniformGrid refined() const { return UniformGrid(lo_, hi_, 2 * nodes_ - 1); }

private:
    double lo_;
    double hi_;
    std::size_t nodes_;
    double step_;
};

/// Trapezoid sum of values tabulated on the grid nodes.
double trapezoid(const UniformGrid& grid, std::span<const double> values);

template <class F>
double integrate(const UniformGrid& grid, F&& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.nodes(); ++i) acc += grid.weight(i) * f(grid.node(i));
    return acc;
}

}  // namespace smatch
