#pragma once

#include <functional>
#include <optional>
#include <string>

namespace smatch {

/// Drift mu(x; theta) = theta * m(x) + b(x) for drifts linear in theta.
struct LinearDecomposition {
    std::function<double(double)> m;
    std::function<double(double)> b;
};

/// Parametric drift with analytic theta-derivatives.
struct DriftSpec {
    std::string name;
    std::function<double(double x, double theta)> mu;
    std::function<double(double x, double theta)> dmu_dtheta;
    std::function<double(double x, double theta)> d2mu_dtheta2;
    std::optional<LinearDecomposition> linear;

    bool is_linear() const noexcept { return linear.has_value(); }
};

/// Compact parameter space [lo, hi].
struct ParameterInterval {
    double lo = 0.05;
    double hi = 20.0;

    ParameterInterval() = default;
    ParameterInterval(double lo_, double hi_);

    bool contains(double theta) const noexcept { return theta >= lo && theta <= hi; }
    double clamp(double theta) const noexcept;
    double width() const noexcept { return hi - lo; }
};

/// Ornstein-Uhlenbeck model dX = -theta X dt + sigma dW observed every delta.
class OuModel {
public:
    /// Throws ParameterDomainError unless theta, sigma and delta are all positive and finite.
    OuModel(double theta, double sigma, double delta);

    double theta() const noexcept { return theta_; }
    double sigma() const noexcept { return sigma_; }
    double delta() const noexcept { return delta_; }

    double stationary_variance() const noexcept { return sigma_ * sigma_ / (2.0 * theta_); }
    /// exp(-theta * delta)
    double ar_coefficient() const noexcept;
    /// Conditional variance of X_{t+delta} given X_t.
    double transition_variance() const noexcept;

private:
    double theta_;
    double sigma_;
    double delta_;
};

double ou_drift(double x, double theta) noexcept;

/// mu(x; theta) = -theta x, linear with m(x) = -x and b = 0.
DriftSpec ou_drift_spec();

/// mu(x; theta) = theta (mean - x); invariant law N(mean, sigma^2 / (2 theta)).
DriftSpec shifted_ou_drift_spec(double mean);

/// N(0, sigma^2/(2 theta)) density and its x-derivative.
double ou_stationary_density(double x, const OuModel& model) noexcept;
double ou_stationary_density_deriv(double x, const OuModel& model) noexcept;

/// Gaussian invariant density for any mean / variance (used for the shifted model).
double gaussian_density(double x, double mean, double variance) noexcept;
double gaussian_density_deriv(double x, double mean, double variance) noexcept;

/// Residual of the stationary equation mu pi - (1/2) [sigma^2 pi]' for constant sigma.
double stationary_ode_residual(double drift_value, double pi, double pi_prime, double sigma) noexcept;

double stationary_ode_residual(double x, double theta, double pi, double pi_prime,
                               const DriftSpec& drift, double sigma);

}  // namespace smatch
