#include "smatch/simulate.hpp"

#include "smatch/errors.hpp"
#include "smatch/format.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace smatch {

TimeSeriesSample::TimeSeriesSample(double delta, std::vector<double> values)
    : delta_(delta), values_(std::move(values)) {
    if (!(std::isfinite(delta_) && delta_ > 0.0)) {
        throw ConfigError("sample spacing must be positive, got " + std::to_string(delta_));
    }
    if (values_.empty()) throw ConfigError("sample must hold at least one observation");
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (!std::isfinite(values_[j])) {
            throw ConfigError("sample value " + std::to_string(j) + " is not finite");
        }
    }
}

double TimeSeriesSample::mean() const noexcept {
    return std::accumulate(values_.begin(), values_.end(), 0.0) /
           static_cast<double>(values_.size());
}

double TimeSeriesSample::stddev() const noexcept {
    if (values_.size() < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double v : values_) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values_.size() - 1));
}

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t substream_seed(const SeedSpec& seed) noexcept {
    constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
    return mix64(seed.base_seed + golden * (seed.replication_index + 1));
}

Generator make_generator(const SeedSpec& seed) { return Generator(substream_seed(seed)); }

TimeSeriesSample sample_ou_exact(const OuModel& model, std::size_t n, const SeedSpec& seed) {
    if (n < 1) throw ConfigError("exact OU sampler needs n >= 1");
    auto gen = make_generator(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const double a = model.ar_coefficient();
    const double innovation_sd = std::sqrt(model.transition_variance());

    std::vector<double> z(n + 1);
    z[0] = std::sqrt(model.stationary_variance()) * normal(gen);
    for (std::size_t j = 0; j < n; ++j) z[j + 1] = a * z[j] + innovation_sd * normal(gen);
    return TimeSeriesSample(model.delta(), std::move(z));
}

std::size_t default_burn_in(double theta_lo, double delta) {
    if (!(theta_lo > 0.0 && delta > 0.0)) {
        throw ConfigError("burn-in needs positive theta_lo and delta");
    }
    return static_cast<std::size_t>(std::ceil(10.0 / (theta_lo * delta)));
}

TimeSeriesSample sample_euler_maruyama(const DriftSpec& drift, const EulerMaruyamaConfig& cfg,
                                       const SeedSpec& seed) {
    if (cfg.substeps < 1) throw ConfigError("Euler-Maruyama needs at least one substep");
    if (!(cfg.delta > 0.0)) throw ConfigError("Euler-Maruyama needs delta > 0");
    if (!(cfg.sigma >= 0.0)) throw ConfigError("Euler-Maruyama needs sigma >= 0");

    auto gen = make_generator(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double dt = cfg.delta / static_cast<double>(cfg.substeps);
    const double noise_scale = cfg.sigma * std::sqrt(dt);

    double x = cfg.x0;
    long long step = 0;
    auto advance = [&] {
        for (std::size_t s = 0; s < cfg.substeps; ++s, ++step) {
            x = x + drift.mu(x, cfg.theta) * dt + noise_scale * normal(gen);
            if (!std::isfinite(x)) throw DivergenceError("Euler-Maruyama state diverged", step);
        }
    };

    for (std::size_t i = 0; i < cfg.burn_in; ++i) advance();
    std::vector<double> z(cfg.n + 1);
    z[0] = x;
    for (std::size_t j = 1; j <= cfg.n; ++j) {
        advance();
        z[j] = x;
    }
    return TimeSeriesSample(cfg.delta, std::move(z));
}

void write_sample_csv(std::ostream& out, const TimeSeriesSample& sample) {
    out << "# delta=" << format_real(sample.delta()) << '\n' << "j,z\n";
    for (std::size_t j = 0; j < sample.size(); ++j) {
        out << j << ',' << format_real(sample[j]) << '\n';
    }
}

TimeSeriesSample read_sample_csv(std::istream& in) {
    std::optional<double> delta;
    std::vector<double> values;
    bool header_seen = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto pos = line.find("delta=");
            if (pos != std::string::npos) delta = parse_real(line.substr(pos + 6));
            continue;
        }
        if (!header_seen) {
            if (line != "j,z") throw ConfigError("sample CSV: expected header 'j,z', got '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError("sample CSV: malformed row at line " + std::to_string(line_no));
        }
        values.push_back(parse_real(line.substr(comma + 1)));
    }
    if (!delta) throw ConfigError("sample CSV: missing '# delta=<value>' metadata line");
    return TimeSeriesSample(*delta, std::move(values));
}

}  // namespace smatch
