#include "smatch/baselines.hpp"

#include "smatch/errors.hpp"
#include "smatch/optimize.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace smatch {

namespace {

struct VarianceParts {
    double a, da, d2a;
    double v, dv, d2v;
};

// v(theta) = sigma^2 (1 - a^2) / (2 theta), a = exp(-theta delta).
VarianceParts variance_parts(double theta, double sigma, double delta) {
    const double s2 = sigma * sigma;
    const double a = std::exp(-theta * delta);
    const double q = -std::expm1(-2.0 * theta * delta);  // 1 - a^2
    const double dq = 2.0 * delta * a * a;
    const double d2q = -4.0 * delta * delta * a * a;
    VarianceParts p;
    p.a = a;
    p.da = -delta * a;
    p.d2a = delta * delta * a;
    p.v = 0.5 * s2 * q / theta;
    p.dv = 0.5 * s2 * (dq * theta - q) / (theta * theta);
    p.d2v = 0.5 * s2 * (d2q / theta - 2.0 * (dq * theta - q) / (theta * theta * theta));
    return p;
}

void require_positive_theta(double theta) {
    if (!(theta > 0.0)) {
        throw ParameterDomainError("OU likelihood needs theta > 0, got " + std::to_string(theta));
    }
}

}  // namespace

double kessler_estimator(const TimeSeriesSample& sample, double sigma) {
    const auto z = sample.values();
    const std::size_t n = sample.n();
    if (n == 0) throw DegenerateSampleError("moment estimator needs at least one transition");
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += z[j] * z[j];
    if (!(sum > 0.0)) throw DegenerateSampleError("moment estimator: sum of squares is zero");
    return sigma * sigma * static_cast<double>(n) / (2.0 * sum);
}

OuLikelihood::OuLikelihood(const TimeSeriesSample& sample, double sigma, bool include_stationary_term)
    : sigma_(sigma),
      delta_(sample.delta()),
      include_stationary_(include_stationary_term),
      n_(static_cast<double>(sample.n())),
      z0_(sample[0]),
      sxx_(0.0),
      syy_(0.0),
      sxy_(0.0) {
    if (!(std::isfinite(sigma) && sigma > 0.0)) throw ParameterDomainError("sigma must be positive");
    const auto z = sample.values();
    for (std::size_t j = 0; j + 1 < z.size(); ++j) {
        sxx_ += z[j] * z[j];
        syy_ += z[j + 1] * z[j + 1];
        sxy_ += z[j] * z[j + 1];
    }
}

OuLikelihood::Transition OuLikelihood::transition(double theta) const {
    const auto p = variance_parts(theta, sigma_, delta_);
    Transition t;
    t.v = p.v;
    t.dv = p.dv;
    t.d2v = p.d2v;
    // sum (Z_{j+1} - a Z_j)^2 = syy - 2 a sxy + a^2 sxx
    t.r = syy_ - 2.0 * p.a * sxy_ + p.a * p.a * sxx_;
    const double g = 2.0 * (p.a * sxx_ - sxy_);
    t.dr = g * p.da;
    t.d2r = 2.0 * sxx_ * p.da * p.da + g * p.d2a;
    return t;
}

double OuLikelihood::stationary_term(double theta) const {
    require_positive_theta(theta);
    const double var = sigma_ * sigma_ / (2.0 * theta);
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * z0_ * z0_ / var;
}

double OuLikelihood::loglik(double theta) const {
    require_positive_theta(theta);
    const auto t = transition(theta);
    double ll = -0.5 * n_ * std::log(2.0 * std::numbers::pi * t.v) - 0.5 * t.r / t.v;
    if (include_stationary_) ll += stationary_term(theta);
    return ll;
}

double OuLikelihood::score(double theta) const {
    require_positive_theta(theta);
    const auto t = transition(theta);
    double s = -0.5 * n_ * t.dv / t.v - 0.5 * t.dr / t.v + 0.5 * t.r * t.dv / (t.v * t.v);
    // d/dtheta [0.5 log(2 theta / sigma^2) - theta z0^2 / sigma^2]
    if (include_stationary_) s += 0.5 / theta - z0_ * z0_ / (sigma_ * sigma_);
    return s;
}

double OuLikelihood::score_deriv(double theta) const {
    require_positive_theta(theta);
    const auto t = transition(theta);
    const double v2 = t.v * t.v;
    double h = -0.5 * n_ * (t.d2v * t.v - t.dv * t.dv) / v2 - 0.5 * t.d2r / t.v +
               t.dr * t.dv / v2 + 0.5 * t.r * t.d2v / v2 - t.r * t.dv * t.dv / (v2 * t.v);
    if (include_stationary_) h += -0.5 / (theta * theta);
    return h;
}

double ou_loglik(double theta, const TimeSeriesSample& sample, double sigma,
                 bool include_stationary_term) {
    return OuLikelihood(sample, sigma, include_stationary_term).loglik(theta);
}

double ou_mle(const TimeSeriesSample& sample, double sigma, const ParameterInterval& space,
              bool include_stationary_term) {
    if (!(space.lo > 0.0)) throw ConfigError("MLE parameter space must lie in (0, inf)");
    const OuLikelihood lik(sample, sigma, include_stationary_term);
    return minimize_scan_golden([&](double t) { return -lik.loglik(t); }, space.lo, space.hi, 64,
                                1e-8)
        .x;
}

OneStepResult one_step(double preliminary, const OuLikelihood& likelihood,
                       const ParameterInterval& space) {
    return one_step(
        preliminary, [&](double t) { return likelihood.score(t); },
        [&](double t) { return likelihood.score_deriv(t); }, space);
}

OneStepResult one_step(double preliminary, const std::function<double(double)>& psi,
                       const std::function<double(double)>& dpsi, const ParameterInterval& space) {
    const double h = dpsi(preliminary);
    if (!(std::abs(h) > 1e-12)) {
        throw SingularStepError("one-step: score derivative vanishes at " + std::to_string(preliminary));
    }
    const double raw = preliminary - psi(preliminary) / h;
    if (!std::isfinite(raw)) throw SingularStepError("one-step: Newton update is not finite");
    const double theta = space.clamp(raw);
    return OneStepResult{theta, preliminary, theta - preliminary, theta != raw};
}

double ou_transition_information(double theta, double sigma, double delta) {
    require_positive_theta(theta);
    const auto p = variance_parts(theta, sigma, delta);
    const double second_moment = sigma * sigma / (2.0 * theta);
    return second_moment * p.da * p.da / p.v + p.dv * p.dv / (2.0 * p.v * p.v);
}

double efficiency_bound(double theta, double sigma, double delta, std::size_t n_plus_1) {
    if (!(sigma > 0.0 && delta > 0.0) || n_plus_1 == 0) {
        throw ParameterDomainError("efficiency bound needs positive sigma, delta and sample size");
    }
    return 1.0 / (static_cast<double>(n_plus_1) * ou_transition_information(theta, sigma, delta));
}

}  // namespace smatch
