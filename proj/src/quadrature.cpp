#include "smatch/quadrature.hpp"

#include "smatch/errors.hpp"

#include <cmath>
#include <string>

namespace smatch {

UniformGrid::UniformGrid(double lo, double hi, std::size_t nodes)
    : lo_(lo), hi_(hi), nodes_(nodes), step_(0.0) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
        throw ConfigError("quadrature grid needs lo < hi");
    }
    if (nodes < 2) throw ConfigError("quadrature grid needs at least 2 nodes");
    step_ = (hi - lo) / static_cast<double>(nodes - 1);
}

double trapezoid(const UniformGrid& grid, std::span<const double> values) {
    if (values.size() != grid.nodes()) {
        throw ConfigError("trapezoid: " + std::to_string(values.size()) + " values for " +
                          std::to_string(grid.nodes()) + " nodes");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += grid.weight(i) * values[i];
    return acc;
}

}  // namespace smatch
