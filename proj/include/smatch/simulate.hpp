#pragma once

#include "smatch/models.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace smatch {

/// Equally spaced observations Z_0..Z_n of a diffusion, spacing delta.
class TimeSeriesSample {
public:
    /// Throws ConfigError on empty / non-finite values or non-positive delta.
    TimeSeriesSample(double delta, std::vector<double> values);

    double delta() const noexcept { return delta_; }
    std::span<const double> values() const noexcept { return values_; }
    /// Number of transitions n (there are n + 1 values).
    std::size_t n() const noexcept { return values_.size() - 1; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t j) const noexcept { return values_[j]; }

    double mean() const noexcept;
    /// Sample standard deviation with divisor size() - 1 (0 for a single value).
    double stddev() const noexcept;

private:
    double delta_;
    std::vector<double> values_;
};

struct SeedSpec {
    std::uint64_t base_seed = 0;
    std::uint64_t replication_index = 0;
};

/// SplitMix64 finalizer (Steele, Lea & Flood). A bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Seed of the private stream for one replication:
///   mix64(base_seed + 0x9E3779B97F4A7C15 * (replication_index + 1)).
/// For a fixed base seed the map is injective in the replication index.
std::uint64_t substream_seed(const SeedSpec& seed) noexcept;

/// The generator used by every sampler in the library.
using Generator = std::mt19937_64;

Generator make_generator(const SeedSpec& seed);

/// Exact sampling through the AR(1) representation, started from the stationary law.
TimeSeriesSample sample_ou_exact(const OuModel& model, std::size_t n, const SeedSpec& seed);

struct EulerMaruyamaConfig {
    double theta = 1.0;
    double sigma = 1.0;
    double delta = 0.1;
    std::size_t substeps = 1;
    std::size_t n = 100;
    std::size_t burn_in = 0;
    double x0 = 0.0;
};

/// Burn-in of 10 / (theta_lo * delta) observations, i.e. ten slowest mean-reversion times.
std::size_t default_burn_in(double theta_lo, double delta);

/// Euler-Maruyama with `substeps` inner steps per observation; throws DivergenceError
/// carrying the inner step index once the state stops being finite.
TimeSeriesSample sample_euler_maruyama(const DriftSpec& drift, const EulerMaruyamaConfig& cfg,
                                       const SeedSpec& seed);

/// `# delta=<value>` line, then `j,z` header and one row per observation.
void write_sample_csv(std::ostream& out, const TimeSeriesSample& sample);
TimeSeriesSample read_sample_csv(std::istream& in);

}  // namespace smatch
