#include "smatch/models.hpp"

#include "smatch/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace smatch {

ParameterInterval::ParameterInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
        throw ConfigError("parameter interval requires lo < hi, got [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "]");
    }
}

double ParameterInterval::clamp(double theta) const noexcept {
    if (theta < lo) return lo;
    if (theta > hi) return hi;
    return theta;
}

OuModel::OuModel(double theta, double sigma, double delta)
    : theta_(theta), sigma_(sigma), delta_(delta) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(theta) || !positive(sigma) || !positive(delta)) {
        throw ParameterDomainError("OU model requires theta, sigma, delta > 0, got theta=" +
                                   std::to_string(theta) + " sigma=" + std::to_string(sigma) +
                                   " delta=" + std::to_string(delta));
    }
}

double OuModel::ar_coefficient() const noexcept { return std::exp(-theta_ * delta_); }

double OuModel::transition_variance() const noexcept {
    // 1 - exp(-2 theta delta) via expm1 keeps precision for small delta.
    return -sigma_ * sigma_ * std::expm1(-2.0 * theta_ * delta_) / (2.0 * theta_);
}

double ou_drift(double x, double theta) noexcept { return -theta * x; }

DriftSpec ou_drift_spec() {
    DriftSpec d;
    d.name = "ou";
    d.mu = [](double x, double theta) { return -theta * x; };
    d.dmu_dtheta = [](double x, double) { return -x; };
    d.d2mu_dtheta2 = [](double, double) { return 0.0; };
    d.linear = LinearDecomposition{[](double x) { return -x; }, [](double) { return 0.0; }};
    return d;
}

DriftSpec shifted_ou_drift_spec(double mean) {
    DriftSpec d;
    d.name = "shifted-ou";
    d.mu = [mean](double x, double theta) { return theta * (mean - x); };
    d.dmu_dtheta = [mean](double x, double) { return mean - x; };
    d.d2mu_dtheta2 = [](double, double) { return 0.0; };
    d.linear = LinearDecomposition{[mean](double x) { return mean - x; },
                                   [](double) { return 0.0; }};
    return d;
}

double gaussian_density(double x, double mean, double variance) noexcept {
    const double z = x - mean;
    return std::exp(-0.5 * z * z / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

double gaussian_density_deriv(double x, double mean, double variance) noexcept {
    return -(x - mean) / variance * gaussian_density(x, mean, variance);
}

double ou_stationary_density(double x, const OuModel& model) noexcept {
    return gaussian_density(x, 0.0, model.stationary_variance());
}

double ou_stationary_density_deriv(double x, const OuModel& model) noexcept {
    return gaussian_density_deriv(x, 0.0, model.stationary_variance());
}

double stationary_ode_residual(double drift_value, double pi, double pi_prime,
                               double sigma) noexcept {
    // [sigma^2 pi]' = 2 sigma sigma' pi + sigma^2 pi', and sigma' = 0 here.
    constexpr double sigma_prime = 0.0;
    const double flux_deriv = 2.0 * sigma * sigma_prime * pi + sigma * sigma * pi_prime;
    return drift_value * pi - 0.5 * flux_deriv;
}

double stationary_ode_residual(double x, double theta, double pi, double pi_prime,
                               const DriftSpec& drift, double sigma) {
    return stationary_ode_residual(drift.mu(x, theta), pi, pi_prime, sigma);
}

}  // namespace smatch
