#pragma once

#include "smatch/models.hpp"
#include "smatch/simulate.hpp"

#include <functional>

namespace smatch {

/// Moment estimator sigma^2 n / (2 sum_{j<n} Z_j^2); the last observation is left out.
/// Throws DegenerateSampleError when the sum vanishes.
double kessler_estimator(const TimeSeriesSample& sample, double sigma);

/// Exact OU log-likelihood pi(Z_0; theta) prod_j p(delta, Z_j, Z_{j+1}; theta) and its
/// first two theta-derivatives, all computed from the three lag sums of the sample.
class OuLikelihood {
public:
    OuLikelihood(const TimeSeriesSample& sample, double sigma, bool include_stationary_term = true);

    bool include_stationary_term() const noexcept { return include_stationary_; }
    double sigma() const noexcept { return sigma_; }
    double delta() const noexcept { return delta_; }

    /// Throw ParameterDomainError for theta <= 0.
    double loglik(double theta) const;
    double score(double theta) const;
    double score_deriv(double theta) const;

    /// log N(Z_0; 0, sigma^2 / (2 theta)).
    double stationary_term(double theta) const;

private:
    struct Transition {
        double v, dv, d2v;     // conditional variance and derivatives
        double r, dr, d2r;     // residual sum of squares and derivatives
    };
    Transition transition(double theta) const;

    double sigma_;
    double delta_;
    bool include_stationary_;
    double n_;    // transitions
    double z0_;
    double sxx_;  // sum_{j<n} Z_j^2
    double syy_;  // sum_{j<n} Z_{j+1}^2
    double sxy_;  // sum_{j<n} Z_j Z_{j+1}
};

double ou_loglik(double theta, const TimeSeriesSample& sample, double sigma,
                 bool include_stationary_term = true);

/// Maximum likelihood by a 64-point scan plus golden section to 1e-8 over the interval.
double ou_mle(const TimeSeriesSample& sample, double sigma, const ParameterInterval& space,
              bool include_stationary_term = true);

struct OneStepResult {
    double theta_bar = 0.0;
    double preliminary = 0.0;
    double newton_increment = 0.0;
    bool clamped = false;
};

/// One Newton-Raphson step on the score from a preliminary estimate, clamped to the space.
/// Throws SingularStepError when |score'| <= 1e-12.
OneStepResult one_step(double preliminary, const OuLikelihood& likelihood,
                       const ParameterInterval& space);

/// Same step for any estimating function psi with derivative dpsi.
OneStepResult one_step(double preliminary, const std::function<double(double)>& psi,
                       const std::function<double(double)>& dpsi, const ParameterInterval& space);

/// Fisher information of one Gaussian transition of the stationary OU chain:
/// E[Z^2] (da/dtheta)^2 / v + (dv/dtheta)^2 / (2 v^2).
double ou_transition_information(double theta, double sigma, double delta);

/// 1 / (n_plus_1 * transition information).
double efficiency_bound(double theta, double sigma, double delta, std::size_t n_plus_1);

}  // namespace smatch
