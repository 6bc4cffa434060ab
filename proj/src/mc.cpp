#include "bubblefd/mc.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace bubblefd {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

namespace {

// std::normal_distribution is implementation-defined, which would tie results
// to a particular standard library; the stream below is pinned bit for bit
struct NormalGen {
    std::mt19937_64 eng;
    double spare = 0.0;
    bool has_spare = false;

    explicit NormalGen(std::uint64_t seed) : eng(seed) {}

    double uniform() { return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        double r = std::sqrt(-2.0 * std::log(uniform()));
        double a = 2.0 * std::numbers::pi * uniform();
        spare = r * std::sin(a);
        has_spare = true;
        return r * std::cos(a);
    }
};

double run_path(const VolatilityModel& model, double y0, double dt, long n_steps, NormalGen& gen,
                double sign, bool* absorbed) {
    double y = y0;
    double sq = std::sqrt(dt);
    for (long s = 0; s < n_steps; ++s) {
        double z = sign * gen.normal();
        y += model.sigma(y) * sq * z;
        if (y <= 0.0) {
            *absorbed = true;
            return 0.0;
        }
        // superlinear volatility can ladder a discrete path to +inf; the true
        // conditional expectation up there is the bounded limit value, so the
        // escaped mass is counted with the absorbed mass rather than as NaN
        if (!std::isfinite(y)) {
            *absorbed = true;
            return 0.0;
        }
    }
    return y;
}

}  // namespace

McAccumulator simulate_block(const VolatilityModel& model, double y0, double maturity,
                             const McConfig& cfg, long first, long count) {
    if (!(y0 > 0.0)) throw std::invalid_argument("simulate_block: y0 must be positive");
    if (!(maturity > 0.0)) throw std::invalid_argument("simulate_block: maturity must be positive");
    if (cfg.n_steps < 1) throw std::invalid_argument("simulate_block: n_steps must be >= 1");

    double dt = maturity / static_cast<double>(cfg.n_steps);
    McAccumulator acc;
    for (long p = first; p < first + count; ++p) {
        NormalGen gen(split_seed(cfg.seed, static_cast<std::uint64_t>(p)));
        double value;
        bool absorbed = false;
        if (cfg.antithetic) {
            NormalGen mirror = gen;
            bool abs_a = false, abs_b = false;
            double a = run_path(model, y0, dt, cfg.n_steps, gen, +1.0, &abs_a);
            double b = run_path(model, y0, dt, cfg.n_steps, mirror, -1.0, &abs_b);
            value = 0.5 * (a + b);
            absorbed = abs_a && abs_b;
        } else {
            value = run_path(model, y0, dt, cfg.n_steps, gen, +1.0, &absorbed);
        }
        acc.sum += value;
        acc.sum_sq += value * value;
        if (absorbed) acc.absorbed += 1.0;
    }
    return acc;
}

McResult simulate_forward(const VolatilityModel& model, double y0, double maturity,
                          const McConfig& cfg) {
    if (cfg.n_paths < 2) throw std::invalid_argument("simulate_forward: need at least 2 paths");

    const long block = 8192;
    McAccumulator total;
    for (long first = 0; first < cfg.n_paths; first += block) {
        long count = std::min(block, cfg.n_paths - first);
        McAccumulator part = simulate_block(model, y0, maturity, cfg, first, count);
        total.sum += part.sum;
        total.sum_sq += part.sum_sq;
        total.absorbed += part.absorbed;
    }

    double n = static_cast<double>(cfg.n_paths);
    double mean = total.sum / n;
    double var = (total.sum_sq - n * mean * mean) / (n - 1.0);
    if (var < 0.0) var = 0.0;
    return {mean, std::sqrt(var / n), total.absorbed / n};
}

}  // namespace bubblefd
