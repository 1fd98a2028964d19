#include "smatch/errors.hpp"
#include "smatch/kde.hpp"
#include "smatch/models.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace smatch;

namespace {

std::vector<double> random_points(std::size_t n, std::uint64_t seed, double spread = 1.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> d(0.0, spread);
    std::vector<double> v(n);
    for (auto& x : v) x = d(gen);
    return v;
}

// Quadrature grid over the support hull of an estimate, fine enough that the trapezoid
// error on a C^1 piecewise polynomial is far below 1e-6.
UniformGrid hull_grid(const DensityEstimate& d) {
    const auto obs = d.observations();
    const auto [lo, hi] = std::minmax_element(obs.begin(), obs.end());
    return UniformGrid(*lo - d.bandwidth(), *hi + d.bandwidth(), 40001);
}

}  // namespace

TEST(Biweight4, PointValues) {
    const auto k = biweight4_kernel();
    EXPECT_DOUBLE_EQ(k.eval(0.0), 1.640625);
    EXPECT_DOUBLE_EQ(k.eval(1.0), 0.0);
    EXPECT_DOUBLE_EQ(k.eval(-1.0), 0.0);
    EXPECT_DOUBLE_EQ(k.eval(1.7), 0.0);
    EXPECT_EQ(k.declared_order, 4);
}

TEST(Biweight4, EvenAndDerivativeMatchesFiniteDifferences) {
    const auto k = biweight4_kernel();
    for (int i = 1; i < 200; ++i) {
        const double u = -1.0 + 2.0 * i / 200.0;
        EXPECT_DOUBLE_EQ(k.eval(u), k.eval(-u));
        const double eps = 1e-6;
        const double fd = (k.eval(u + eps) - k.eval(u - eps)) / (2 * eps);
        EXPECT_NEAR(k.deriv(u), fd, 1e-6);
    }
}

// Exact moments by polynomial integration (sympy): 1, 0, 0, 0, -1/33, 0, -10/429, 0, -7/429.
TEST(KernelMoment, MatchesPolynomialIntegration) {
    const auto k = biweight4_kernel();
    const double exact[] = {1.0, 0.0, 0.0, 0.0, -1.0 / 33.0, 0.0, -10.0 / 429.0, 0.0, -7.0 / 429.0};
    for (int l = 0; l <= 8; ++l) EXPECT_NEAR(kernel_moment(k, l), exact[l], 1e-9) << "l=" << l;
    EXPECT_THROW(kernel_moment(k, 9), ConfigError);
}

TEST(KernelMoment, DeclaredOrderIsFirstNonzeroMoment) {
    for (const auto& k : {biweight4_kernel(), epanechnikov_kernel()}) {
        EXPECT_NEAR(kernel_moment(k, 0), 1.0, 1e-9) << k.name;
        for (int l = 1; l < k.declared_order; ++l) EXPECT_NEAR(kernel_moment(k, l), 0.0, 1e-9) << k.name;
        EXPECT_GT(std::abs(kernel_moment(k, k.declared_order)), 1e-3) << k.name;
    }
}

TEST(WeightLambda, PiecewiseValues) {
    EXPECT_DOUBLE_EQ(weight_lambda(0.0, 0.7, 0.5), 1.0);
    EXPECT_DOUBLE_EQ(weight_lambda(0.7, 0.7, 0.5), 1.0);
    EXPECT_DOUBLE_EQ(weight_lambda(1.2, 0.7, 0.5), 0.0);
    EXPECT_DOUBLE_EQ(weight_lambda(-1.0, 0.7, 0.5), 0.0);
    // exp[-0.5 exp(-0.5/0.15^2)/0.15^2], mpmath
    const double v = weight_lambda(0.85, 0.7, 0.5);
    EXPECT_NEAR(v, 0.999999995036374598533979, 1e-15);
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
    EXPECT_NEAR(weight_lambda(0.97, 0.7, 0.5), 0.557952279351647076924785, 1e-15);
}

TEST(PlateauWeight, ShapeAndSupport) {
    const auto w = plateau_weight();
    EXPECT_DOUBLE_EQ(w.support_lo, -1.4);
    EXPECT_DOUBLE_EQ(w.support_hi, 1.4);
    EXPECT_DOUBLE_EQ(w.eval(0.9), 1.0);
    EXPECT_DOUBLE_EQ(w.eval(1.5), 0.0);
    EXPECT_DOUBLE_EQ(w.eval(1.4), 0.0);
    for (int i = 0; i <= 400; ++i) {
        const double x = -2.0 + 4.0 * i / 400.0;
        const double v = w.eval(x);
        EXPECT_GE(v, 0.0);
        EXPECT_DOUBLE_EQ(v, w.eval(-x));
        if (std::abs(x) >= 1.4) EXPECT_EQ(v, 0.0);
        if (std::abs(x) <= 0.98) {
            EXPECT_EQ(v, 1.0);
            EXPECT_EQ(w.deriv(x), 0.0);
        }
    }
}

TEST(PlateauWeight, DerivativeMatchesFiniteDifferences) {
    const auto w = plateau_weight();
    for (int i = 0; i < 200; ++i) {
        const double x = -1.39 + 2.78 * i / 199.0;
        const double eps = 1e-7;
        const double fd = (w.eval(x + eps) - w.eval(x - eps)) / (2 * eps);
        EXPECT_NEAR(w.deriv(x), fd, 1e-5 * std::max(1.0, std::abs(fd))) << x;
    }
}

TEST(DensityEstimate, RejectsBadInput) {
    EXPECT_THROW(DensityEstimate(std::vector<double>{}, 1.0), ConfigError);
    EXPECT_THROW(DensityEstimate(std::vector<double>{0.0}, 0.0), ConfigError);
    EXPECT_THROW(DensityEstimate(std::vector<double>{0.0}, -1.0), ConfigError);
}

TEST(DensityEstimate, OneTermAndOffSupport) {
    const DensityEstimate d(std::vector<double>{0.0}, 1.0);
    EXPECT_DOUBLE_EQ(d.eval(0.0), 1.640625);
    const DensityEstimate e(std::vector<double>{-1.0, 0.5, 2.0}, 0.3);
    EXPECT_EQ(e.eval(1.2), 0.0);
    EXPECT_EQ(e.eval(-5.0), 0.0);
    EXPECT_EQ(e.deriv(1.2), 0.0);
}

// Between consecutive breakpoints x_j +- h the estimate is a degree-8 polynomial,
// so 5-point Gauss-Legendre per piece integrates it exactly.
template <class F>
double piecewise_exact(const DensityEstimate& d, F f) {
    std::vector<double> cuts;
    for (double x : d.observations()) {
        cuts.push_back(x - d.bandwidth());
        cuts.push_back(x + d.bandwidth());
    }
    std::sort(cuts.begin(), cuts.end());
    static const double node[5] = {-0.906179845938663992797627, -0.538469310105683091036314, 0.0,
                                   0.538469310105683091036314, 0.906179845938663992797627};
    static const double weight[5] = {0.236926885056189087514264, 0.478628670499366468041292,
                                     0.568888888888888888888889, 0.478628670499366468041292,
                                     0.236926885056189087514264};
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const double half = 0.5 * (cuts[i + 1] - cuts[i]);
        for (int q = 0; q < 5; ++q) total += half * weight[q] * f(mid + half * node[q]);
    }
    return total;
}

TEST(DensityEstimate, UnitMassAndZeroDerivativeMass) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (double h : {0.05, 0.3, 1.1}) {
            const DensityEstimate d(random_points(150, seed), h);
            EXPECT_NEAR(piecewise_exact(d, [&](double x) { return d.eval(x); }), 1.0, 1e-11);
            EXPECT_NEAR(piecewise_exact(d, [&](double x) { return d.deriv(x); }), 0.0, 1e-10);
            const auto g = hull_grid(d);
            EXPECT_NEAR(integrate(g, [&](double x) { return d.eval(x); }), 1.0, 1e-6);
        }
    }
}

TEST(DensityEstimate, SymmetricSampleHasFlatCentre) {
    for (double h : {0.5, 1.5, 3.0}) {
        const DensityEstimate d(std::vector<double>{-1.0, 1.0}, h);
        EXPECT_NEAR(d.deriv(0.0), 0.0, 1e-15);
    }
}

TEST(DensityEstimate, DerivativeMatchesFiniteDifferences) {
    const DensityEstimate d(random_points(80, 9, 0.5), 0.25);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> xs(-1.2, 1.2);
    int checked = 0;
    while (checked < 50) {
        const double x = xs(gen);
        const double eps = 1e-6;
        const double fd = (d.eval(x + eps) - d.eval(x - eps)) / (2 * eps);
        if (std::abs(fd) < 1e-3) continue;  // relative check is meaningless near zeros
        EXPECT_NEAR(d.deriv(x), fd, 1e-5 * std::abs(fd)) << x;
        ++checked;
    }
}

TEST(DensityEstimate, TranslationEquivariance) {
    const auto pts = random_points(60, 5);
    const double c = 0.375;
    auto shifted = pts;
    for (auto& x : shifted) x += c;
    const DensityEstimate a(pts, 0.4), b(shifted, 0.4);
    for (int i = 0; i < 50; ++i) {
        const double x = -2.0 + 4.0 * i / 49.0;
        EXPECT_NEAR(a.eval(x), b.eval(x + c), 1e-12);
    }
}

TEST(DensityEstimate, CanBeNegativeWithFourthOrderKernel) {
    // K < 0 for 1/sqrt(3) < |u| < 1.
    const DensityEstimate d(std::vector<double>{0.0}, 1.0);
    EXPECT_LT(d.eval(0.8), 0.0);
}

TEST(DensityEstimate, TabulateAgreesWithPointwise) {
    const DensityEstimate d(random_points(200, 12, 0.5), 0.17);
    const UniformGrid g(-1.4, 1.4, 2001);
    const auto t = d.tabulate(g);
    for (std::size_t i = 0; i < g.nodes(); ++i) {
        EXPECT_NEAR(t.pi[i], d.eval(g.node(i)), 1e-12);
        EXPECT_NEAR(t.dpi[i], d.deriv(g.node(i)), 1e-11);
    }
}

TEST(EmpiricalWise, ZeroForExactTruthAndNonnegative) {
    const DensityEstimate d(random_points(100, 3, 0.5), 0.3);
    const auto w = plateau_weight();
    const UniformGrid g(-1.4, 1.4, 2001);
    const auto [e0, e1] = empirical_wise(
        d, [&](double x) { return d.eval(x); }, [&](double x) { return d.deriv(x); }, w, g);
    EXPECT_NEAR(e0, 0.0, 1e-20);
    EXPECT_NEAR(e1, 0.0, 1e-18);

    const OuModel m(2.0, 1.0, 0.1);
    const auto [f0, f1] = empirical_wise(
        d, [&](double x) { return ou_stationary_density(x, m); },
        [&](double x) { return ou_stationary_density_deriv(x, m); }, w, g);
    EXPECT_GT(f0, 0.0);
    EXPECT_GT(f1, 0.0);

    EXPECT_THROW(empirical_wise(d, [](double) { return 0.0; }, [](double) { return 0.0; }, w,
                                UniformGrid(-1.0, 1.0, 101)),
                 ConfigError);
}

TEST(EmpiricalWise, DecreasesWithSampleSize) {
    const OuModel m(2.0, 1.0, 0.1);
    const auto w = plateau_weight();
    const UniformGrid g(-1.4, 1.4, 2001);
    auto median_wise = [&](std::size_t n) {
        std::vector<double> errs;
        for (std::uint64_t s = 0; s < 50; ++s) {
            const auto sample = sample_ou_exact(m, n - 1, {555, s});
            const DensityEstimate d(sample, std::pow(static_cast<double>(n), -1.0 / 8.0));
            errs.push_back(empirical_wise(d, [&](double x) { return ou_stationary_density(x, m); },
                                          [&](double x) { return ou_stationary_density_deriv(x, m); }, w, g)
                               .first);
        }
        std::nth_element(errs.begin(), errs.begin() + 25, errs.end());
        return errs[25];
    };
    EXPECT_LT(median_wise(3200), median_wise(200));
}
