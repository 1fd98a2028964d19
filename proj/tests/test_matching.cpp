#include "smatch/errors.hpp"
#include "smatch/matching.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace smatch;

namespace {

const OuModel kTruth(2.0, 1.0, 0.1);

CriterionContext exact_context(const WeightFunction& w = plateau_weight(),
                               std::size_t nodes = kDefaultGridNodes) {
    const auto grid = weight_grid(w, nodes);
    return CriterionContext(
        tabulate(grid, [](double x) { return ou_stationary_density(x, kTruth); },
                 [](double x) { return ou_stationary_density_deriv(x, kTruth); }),
        ou_drift_spec(), 1.0, w, grid);
}

CriterionContext kde_context(const TimeSeriesSample& s, double h, double sigma = 1.0,
                             const WeightFunction& w = plateau_weight()) {
    return CriterionContext(DensityEstimate(s, h), ou_drift_spec(), sigma, w, weight_grid(w));
}

// Independent weighted integral over the plateau weight's support (no CriterionContext).
template <class F>
double weighted_integral(F&& f, std::size_t nodes = 4001) {
    const auto w = plateau_weight();
    const UniformGrid g(-1.4, 1.4, nodes);
    return integrate(g, [&](double x) { return f(x) * w.eval(x); });
}

}  // namespace

TEST(CriterionContext, GridContract) {
    const auto w = plateau_weight();
    auto table = [](const UniformGrid& g) {
        return tabulate(g, [](double) { return 0.0; }, [](double) { return 0.0; });
    };
    const UniformGrid off(-1.0, 1.4, 2001);
    EXPECT_THROW(CriterionContext(table(off), ou_drift_spec(), 1.0, w, off), ConfigError);
    const UniformGrid even(-1.4, 1.4, 2000);
    EXPECT_THROW(CriterionContext(table(even), ou_drift_spec(), 1.0, w, even), ConfigError);
    const UniformGrid coarse(-1.4, 1.4, 99);
    EXPECT_THROW(CriterionContext(table(coarse), ou_drift_spec(), 1.0, w, coarse), ConfigError);
    const UniformGrid ok(-1.4, 1.4, 101);
    EXPECT_NO_THROW(CriterionContext(table(ok), ou_drift_spec(), 1.0, w, ok));
}

TEST(Criterion, ExactDensityVanishesAtTruth) {
    const auto ctx = exact_context();
    EXPECT_LT(criterion(ctx, 2.0), 1e-12);
    EXPECT_GT(criterion(ctx, 2.5), 1e-4);
}

TEST(Criterion, NonnegativeEverywhere) {
    const auto s = sample_ou_exact(kTruth, 199, {10, 0});
    for (double h : {0.05, 0.2, 0.6}) {
        const auto ctx = kde_context(s, h);
        for (double t = -5.0; t <= 25.0; t += 0.37) EXPECT_GE(criterion(ctx, t), 0.0);
    }
}

// R_n is a quadratic polynomial in theta for a drift linear in theta.
TEST(Criterion, QuadraticInThetaForLinearDrift) {
    const auto s = sample_ou_exact(kTruth, 199, {10, 1});
    const auto ctx = kde_context(s, 0.25);
    const double r1 = criterion(ctx, 1.0), r2 = criterion(ctx, 2.0), r3 = criterion(ctx, 3.0);
    // Lagrange interpolation through (1, r1), (2, r2), (3, r3) evaluated at 2.5.
    const double p = r1 * (0.5 * -0.5) / ((1 - 2) * (1 - 3)) + r2 * (1.5 * -0.5) / ((2 - 1) * (2 - 3)) +
                     r3 * (1.5 * 0.5) / ((3 - 1) * (3 - 2));
    EXPECT_NEAR(criterion(ctx, 2.5), p, 1e-10);
}

TEST(Criterion, LinearFastPathMatchesGenericDrift) {
    const auto s = sample_ou_exact(kTruth, 199, {10, 2});
    const auto w = plateau_weight();
    const auto grid = weight_grid(w);
    auto generic = ou_drift_spec();
    generic.linear.reset();
    const DensityEstimate d(s, 0.3);
    const CriterionContext fast(d, ou_drift_spec(), 1.0, w, grid);
    const CriterionContext slow(d, generic, 1.0, w, grid);
    for (double t : {0.1, 1.0, 2.0, 7.5}) EXPECT_NEAR(fast.criterion(t), slow.criterion(t), 1e-14);
}

TEST(Criterion, QuadratureRefinementIsStable) {
    const auto coarse = exact_context(plateau_weight(), 2001);
    const auto fine = exact_context(plateau_weight(), 4001);
    for (double t : {0.5, 1.0, 3.0, 10.0}) {
        const double a = criterion(coarse, t);
        const double b = criterion(fine, t);
        EXPECT_LT(std::abs(a - b) / b, 1e-8) << t;
    }
}

TEST(MinimizeCriterion, ExactDensityRecoversTruth) {
    const auto est = minimize_criterion(exact_context(), ParameterInterval(0.05, 20.0));
    EXPECT_NEAR(est.theta_hat, 2.0, 1e-6);
    EXPECT_EQ(est.method, SmMethod::grid_golden);
    EXPECT_GE(est.criterion_value, 0.0);
}

TEST(MinimizeCriterion, FlatCriterionReturnsLowerEnd) {
    const auto w = plateau_weight();
    const auto grid = weight_grid(w);
    const CriterionContext ctx(tabulate(grid, [](double) { return 0.0; }, [](double) { return 0.0; }),
                               ou_drift_spec(), 1.0, w, grid);
    const ParameterInterval space(0.05, 20.0);
    EXPECT_EQ(minimize_criterion(ctx, space).theta_hat, 0.05);
    EXPECT_THROW(ou_closed_form(ctx, space), DegenerateSampleError);
    EXPECT_THROW(generic_linear_closed_form(ctx, space), DegenerateSampleError);
}

TEST(MinimizeCriterion, WeightScalingKeepsArgmin) {
    const auto s = sample_ou_exact(kTruth, 199, {10, 3});
    const auto w = plateau_weight();
    const auto a = kde_context(s, 0.2, 1.0, w);
    const auto b = kde_context(s, 0.2, 1.0, w.scaled(3.5));
    for (double t : {0.5, 2.0, 4.0}) EXPECT_NEAR(b.criterion(t), 3.5 * a.criterion(t), 1e-12);
    const ParameterInterval space(0.05, 20.0);
    // a smooth minimum is only located to about sqrt(eps) relative
    EXPECT_NEAR(minimize_criterion(a, space).theta_hat, minimize_criterion(b, space).theta_hat, 1e-6);
}

TEST(MinimizeCriterion, AgreesWithClosedFormOnSimulatedSamples) {
    const ParameterInterval space(0.05, 20.0);
    int interior = 0;
    for (std::uint64_t r = 0; r < 20; ++r) {
        const auto s = sample_ou_exact(kTruth, 199, {404, r});
        const auto ctx = kde_context(s, default_bandwidth_anchor(s));
        const auto cf = ou_closed_form(ctx, space);
        if (cf.clamped) continue;
        ++interior;
        EXPECT_NEAR(minimize_criterion(ctx, space).theta_hat, cf.theta_hat, 1e-4) << r;
    }
    EXPECT_GT(interior, 15);
}

TEST(OuClosedForm, ExactDensityRecoversTruth) {
    const auto est = ou_closed_form(exact_context(), ParameterInterval(0.05, 20.0));
    EXPECT_NEAR(est.theta_hat, 2.0, 1e-10);
    EXPECT_FALSE(est.clamped);
    EXPECT_EQ(est.method, SmMethod::closed_form);
}

TEST(OuClosedForm, UnitSigmaMatchesDirectRatio) {
    const auto s = sample_ou_exact(kTruth, 199, {10, 4});
    const DensityEstimate d(s, 0.22);
    const auto est = ou_closed_form(kde_context(s, 0.22), ParameterInterval(0.05, 20.0));
    // Independent quadrature on a finer grid with pointwise kernel sums.
    const double num = weighted_integral([&](double x) { return x * d.eval(x) * d.deriv(x); });
    const double den = weighted_integral([&](double x) { return x * x * d.eval(x) * d.eval(x); });
    EXPECT_NEAR(est.theta_hat, -0.5 * num / den, 1e-4);
}

TEST(OuClosedForm, ProportionalDerivativeOracle) {
    // pi' = -c x pi gives theta = (sigma^2 / 2) c for any even pi.
    const auto w = plateau_weight();
    const auto grid = weight_grid(w);
    const double c = 3.7, sigma = 0.8;
    auto pi = [](double x) { return 1.0 / (1.0 + x * x); };
    const CriterionContext ctx(tabulate(grid, pi, [&](double x) { return -c * x * pi(x); }),
                               ou_drift_spec(), sigma, w, grid);
    EXPECT_NEAR(ou_closed_form(ctx, ParameterInterval(0.05, 20.0)).theta_hat, 0.5 * sigma * sigma * c, 1e-12);
}

TEST(OuClosedForm, ClampsAndRejectsOtherDrifts) {
    const auto w = plateau_weight();
    const auto grid = weight_grid(w);
    auto pi = [](double x) { return std::exp(-x * x); };
    const CriterionContext ctx(tabulate(grid, pi, [&](double x) { return -100.0 * x * pi(x); }),
                               ou_drift_spec(), 1.0, w, grid);
    const auto est = ou_closed_form(ctx, ParameterInterval(0.05, 20.0));
    EXPECT_TRUE(est.clamped);
    EXPECT_EQ(est.theta_hat, 20.0);

    const CriterionContext shifted(tabulate(grid, pi, [](double) { return 0.0; }),
                                   shifted_ou_drift_spec(0.5), 1.0, w, grid);
    EXPECT_THROW(ou_closed_form(shifted, ParameterInterval(0.05, 20.0)), ConfigError);
}

TEST(GenericLinear, OuSpecializationMatches) {
    const ParameterInterval space(0.05, 20.0);
    for (std::uint64_t r = 0; r < 5; ++r) {
        const auto ctx = kde_context(sample_ou_exact(kTruth, 199, {77, r}), 0.2);
        EXPECT_NEAR(generic_linear_closed_form(ctx, space).theta_hat, ou_closed_form(ctx, space).theta_hat, 1e-12);
    }
}

TEST(GenericLinear, ConstantDriftFormula) {
    const auto w = plateau_weight();
    const auto grid = weight_grid(w);
    const double sigma = 1.3;
    auto pi = [](double x) { return gaussian_density(x, 0.3, 0.2); };
    auto dpi = [](double x) { return gaussian_density_deriv(x, 0.3, 0.2); };
    DriftSpec constant;
    constant.name = "constant";
    constant.mu = [](double, double t) { return t; };
    constant.dmu_dtheta = [](double, double) { return 1.0; };
    constant.d2mu_dtheta2 = [](double, double) { return 0.0; };
    constant.linear = LinearDecomposition{[](double) { return 1.0; }, [](double) { return 0.0; }};
    const CriterionContext ctx(tabulate(grid, pi, dpi), constant, sigma, w, grid);
    const double expected = 0.5 * sigma * sigma * weighted_integral([&](double x) { return dpi(x) * pi(x); }) /
                            weighted_integral([&](double x) { return pi(x) * pi(x); });
    EXPECT_NEAR(generic_linear_closed_form(ctx, ParameterInterval(-50.0, 50.0)).theta_hat, expected, 1e-8);
}

TEST(GenericLinear, ExactDensityForShiftedModel) {
    const auto w = plateau_weight();
    const auto grid = weight_grid(w);
    const double theta0 = 3.0, mean = 0.25, sigma = 0.9;
    const double var = sigma * sigma / (2 * theta0);
    const CriterionContext ctx(
        tabulate(grid, [&](double x) { return gaussian_density(x, mean, var); },
                 [&](double x) { return gaussian_density_deriv(x, mean, var); }),
        shifted_ou_drift_spec(mean), sigma, w, grid);
    const ParameterInterval space(0.05, 20.0);
    EXPECT_NEAR(generic_linear_closed_form(ctx, space).theta_hat, theta0, 1e-6);
    EXPECT_NEAR(minimize_criterion(ctx, space).theta_hat, theta0, 1e-6);
}

TEST(BandwidthGrid, GeometricAndAnchored) {
    const auto g = geometric_bandwidth_grid(0.5);
    ASSERT_EQ(g.size(), 30u);
    EXPECT_DOUBLE_EQ(g[0], 0.5);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], 0.9, 1e-15);
    const TimeSeriesSample s(0.1, {-1.0, 1.0});
    EXPECT_DOUBLE_EQ(default_bandwidth_anchor(s), std::sqrt(2.0) * std::pow(2.0, -1.0 / 8.0));
    EXPECT_THROW(default_bandwidth_anchor(TimeSeriesSample(0.1, {1.0, 1.0})), DegenerateSampleError);
}

TEST(QuasiOptimal, TieGoesToLargestBandwidth) {
    const std::vector<double> h{0.4, 0.3, 0.2, 0.1};
    const auto r = quasi_optimal_bandwidth(h, [](double) { return 2.0; });
    EXPECT_EQ(r.index, 0u);
    EXPECT_EQ(r.bandwidth, 0.4);
}

TEST(QuasiOptimal, PicksSmallestChange) {
    const std::vector<double> h{0.4, 0.3, 0.2, 0.1};
    // thetas 1.0, 1.5, 1.51, 1.81: changes 0.5, 0.01, 0.3
    const auto r = quasi_optimal_bandwidth(h, [](double b) {
        if (b == 0.4) return 1.0;
        if (b == 0.3) return 1.5;
        if (b == 0.2) return 1.51;
        return 1.81;
    });
    EXPECT_EQ(r.index, 1u);
    EXPECT_EQ(r.bandwidth, 0.3);
    EXPECT_EQ(r.theta_hat, 1.5);
}

TEST(QuasiOptimal, ConfigurationErrors) {
    const std::vector<double> two{0.4, 0.3};
    EXPECT_THROW(quasi_optimal_bandwidth(two, [](double) { return 1.0; }), ConfigError);
    const std::vector<double> rising{0.1, 0.2, 0.3};
    EXPECT_THROW(quasi_optimal_bandwidth(rising, [](double) { return 1.0; }), ConfigError);
}

TEST(SmoothAndMatch, QuasiOptimalIsDeterministic) {
    const auto s = sample_ou_exact(kTruth, 199, {2013, 0});
    SmoothMatchConfig cfg;
    const auto a = smooth_and_match(s, cfg);
    const auto b = smooth_and_match(s, cfg);
    EXPECT_TRUE(std::isfinite(a.theta_hat));
    EXPECT_TRUE(cfg.space.contains(a.theta_hat));
    EXPECT_EQ(a.theta_hat, b.theta_hat);
    EXPECT_EQ(a.bandwidth, b.bandwidth);
    const auto grid = geometric_bandwidth_grid(default_bandwidth_anchor(s));
    EXPECT_NE(std::find(grid.begin(), grid.end(), a.bandwidth), grid.end());
}

TEST(SmoothAndMatch, ClosedFormMethodAgrees) {
    const auto s = sample_ou_exact(kTruth, 199, {2013, 1});
    SmoothMatchConfig cfg;
    const auto a = smooth_and_match(s, 0.2, cfg);
    cfg.method = SmMethod::closed_form;
    const auto b = smooth_and_match(s, 0.2, cfg);
    EXPECT_NEAR(a.theta_hat, b.theta_hat, 1e-4);
}
