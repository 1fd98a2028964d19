#include "smatch/matching.hpp"

#include "smatch/errors.hpp"
#include "smatch/optimize.hpp"

#include <cmath>
#include <string>

namespace smatch {

UniformGrid weight_grid(const WeightFunction& w, std::size_t nodes) {
    return UniformGrid(w.support_lo, w.support_hi, nodes);
}

CriterionContext::CriterionContext(DensityTable density, DriftSpec drift, double sigma,
                                   WeightFunction weight, UniformGrid grid, double bandwidth)
    : density_(std::move(density)),
      drift_(std::move(drift)),
      sigma_(sigma),
      weight_(std::move(weight)),
      grid_(grid),
      bandwidth_(bandwidth) {
    if (grid_.lo() != weight_.support_lo || grid_.hi() != weight_.support_hi) {
        throw ConfigError("criterion grid must span the weight support exactly");
    }
    if (grid_.nodes() < 101 || grid_.nodes() % 2 == 0) {
        throw ConfigError("criterion grid needs an odd node count >= 101, got " +
                          std::to_string(grid_.nodes()));
    }
    if (density_.pi.size() != grid_.nodes() || density_.dpi.size() != grid_.nodes()) {
        throw ConfigError("density table does not match the criterion grid");
    }
    if (!(std::isfinite(sigma_) && sigma_ > 0.0)) throw ParameterDomainError("sigma must be positive");

    const std::size_t m = grid_.nodes();
    qw_.resize(m);
    for (std::size_t i = 0; i < m; ++i) qw_[i] = grid_.weight(i) * weight_.eval(grid_.node(i));
    if (drift_.linear) {
        m_.resize(m);
        b_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            m_[i] = drift_.linear->m(grid_.node(i));
            b_[i] = drift_.linear->b(grid_.node(i));
        }
    }
}

CriterionContext::CriterionContext(const DensityEstimate& density, DriftSpec drift, double sigma,
                                   WeightFunction weight, UniformGrid grid)
    : CriterionContext(density.tabulate(grid), std::move(drift), sigma, std::move(weight), grid,
                       density.bandwidth()) {}

double CriterionContext::criterion(double theta) const {
    double acc = 0.0;
    const bool linear = !m_.empty();
    for (std::size_t i = 0; i < qw_.size(); ++i) {
        if (qw_[i] == 0.0) continue;
        const double mu = linear ? theta * m_[i] + b_[i] : drift_.mu(grid_.node(i), theta);
        const double r = stationary_ode_residual(mu, density_.pi[i], density_.dpi[i], sigma_);
        acc += qw_[i] * r * r;
    }
    return acc;
}

std::string_view to_string(SmMethod m) noexcept {
    switch (m) {
        case SmMethod::grid_golden: return "grid+golden-section";
        case SmMethod::closed_form: return "closed-form";
    }
    return "unknown";
}

double criterion(const CriterionContext& ctx, double theta) { return ctx.criterion(theta); }

SmEstimate minimize_criterion(const CriterionContext& ctx, const ParameterInterval& space) {
    const auto best = minimize_scan_golden([&](double t) { return ctx.criterion(t); }, space.lo,
                                           space.hi, 64, 1e-8);
    return SmEstimate{best.x, ctx.bandwidth(), best.value, SmMethod::grid_golden, false};
}

namespace {

SmEstimate finish_closed_form(const CriterionContext& ctx, const ParameterInterval& space,
                              double num, double den) {
    if (!(std::abs(den) >= 1e-14)) {
        throw DegenerateSampleError("closed-form estimator: weighted denominator " +
                                    std::to_string(den) + " is below 1e-14");
    }
    const double raw = num / den;
    if (!std::isfinite(raw)) throw DegenerateSampleError("closed-form estimator is not finite");
    const double theta = space.clamp(raw);
    return SmEstimate{theta, ctx.bandwidth(), ctx.criterion(theta), SmMethod::closed_form,
                      theta != raw};
}

}  // namespace

SmEstimate ou_closed_form(const CriterionContext& ctx, const ParameterInterval& space) {
    const auto& lin = ctx.drift().linear;
    const auto& g = ctx.grid();
    if (!lin) throw ConfigError("ou_closed_form needs a drift linear in theta");
    for (std::size_t i = 0; i < g.nodes(); i += 50) {
        const double x = g.node(i);
        if (lin->m(x) != -x || lin->b(x) != 0.0) {
            throw ConfigError("ou_closed_form needs the drift -theta x, got '" + ctx.drift().name + "'");
        }
    }
    const auto qw = ctx.quadrature_weights();
    const auto& d = ctx.density();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < qw.size(); ++i) {
        const double x = g.node(i);
        num += qw[i] * x * d.pi[i] * d.dpi[i];
        den += qw[i] * x * x * d.pi[i] * d.pi[i];
    }
    const double s2 = ctx.sigma() * ctx.sigma();
    return finish_closed_form(ctx, space, -0.5 * s2 * num, den);
}

SmEstimate generic_linear_closed_form(const CriterionContext& ctx, const ParameterInterval& space) {
    const auto& lin = ctx.drift().linear;
    if (!lin) throw ConfigError("generic_linear_closed_form needs a drift linear in theta");
    const auto& g = ctx.grid();
    const auto qw = ctx.quadrature_weights();
    const auto& d = ctx.density();
    const double half_s2 = 0.5 * ctx.sigma() * ctx.sigma();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < qw.size(); ++i) {
        const double x = g.node(i);
        const double m = lin->m(x);
        const double rest = lin->b(x) * d.pi[i] - half_s2 * d.dpi[i];
        num += qw[i] * m * d.pi[i] * rest;
        den += qw[i] * m * m * d.pi[i] * d.pi[i];
    }
    return finish_closed_form(ctx, space, -num, den);
}

double default_bandwidth_anchor(const TimeSeriesSample& sample) {
    const double sd = sample.stddev();
    if (!(sd > 0.0)) throw DegenerateSampleError("sample has zero spread; no bandwidth anchor");
    return sd * std::pow(static_cast<double>(sample.size()), -1.0 / 8.0);
}

std::vector<double> geometric_bandwidth_grid(double h_max, double ratio, std::size_t count) {
    if (!(h_max > 0.0)) throw ConfigError("bandwidth grid needs h_max > 0");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("bandwidth grid ratio must lie in (0, 1)");
    std::vector<double> h(count);
    double v = h_max;
    for (auto& e : h) {
        e = v;
        v *= ratio;
    }
    return h;
}

QuasiOptimalResult quasi_optimal_bandwidth(std::span<const double> h_grid,
                                           const std::function<double(double)>& estimator) {
    if (h_grid.size() < 3) {
        throw ConfigError("quasi-optimality needs at least 3 bandwidths, got " +
                          std::to_string(h_grid.size()));
    }
    for (std::size_t i = 1; i < h_grid.size(); ++i) {
        if (!(h_grid[i] < h_grid[i - 1])) {
            throw ConfigError("quasi-optimality bandwidths must be strictly decreasing");
        }
    }
    QuasiOptimalResult r;
    r.thetas.reserve(h_grid.size());
    for (double h : h_grid) r.thetas.push_back(estimator(h));

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i + 1 < r.thetas.size(); ++i) {
        const double change = std::abs(r.thetas[i + 1] - r.thetas[i]);
        if (change < best) {
            best = change;
            best_i = i;
        }
    }
    r.index = best_i;
    r.bandwidth = h_grid[best_i];
    r.theta_hat = r.thetas[best_i];
    return r;
}

SmEstimate smooth_and_match(const TimeSeriesSample& sample, double bandwidth,
                            const SmoothMatchConfig& cfg) {
    const UniformGrid grid = weight_grid(cfg.weight, cfg.grid_nodes);
    const DensityEstimate kde(sample, bandwidth, cfg.kernel);
    const CriterionContext ctx(kde, cfg.drift, cfg.sigma, cfg.weight, grid);
    if (cfg.method == SmMethod::closed_form) return generic_linear_closed_form(ctx, cfg.space);
    return minimize_criterion(ctx, cfg.space);
}

SmEstimate smooth_and_match(const TimeSeriesSample& sample, const SmoothMatchConfig& cfg) {
    const auto h_grid = geometric_bandwidth_grid(default_bandwidth_anchor(sample),
                                                 cfg.bandwidth_ratio, cfg.bandwidth_count);
    std::vector<SmEstimate> fits;
    fits.reserve(h_grid.size());
    const auto pick = quasi_optimal_bandwidth(h_grid, [&](double h) {
        fits.push_back(smooth_and_match(sample, h, cfg));
        return fits.back().theta_hat;
    });
    return fits[pick.index];
}

}  // namespace smatch
