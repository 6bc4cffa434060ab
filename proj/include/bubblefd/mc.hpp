#pragma once

#include "bubblefd/model.hpp"

#include <cstdint>

namespace bubblefd {

struct McConfig {
    long n_paths = 100000;
    long n_steps = 2000;
    std::uint64_t seed = 0;
    bool antithetic = false;
};

struct McResult {
    double mean;
    double std_err;
    double absorbed_frac;
};

// Deterministic, collision-resistant sub-seed for a path or chunk index.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

// Partial sums over paths [first, first + count). Each path draws its own
// generator from split_seed(seed, path index), so results are independent of
// how the path range is chunked.
struct McAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    double absorbed = 0.0;
};
McAccumulator simulate_block(const VolatilityModel& model, double y0, double T,
                             const McConfig& cfg, long first, long count);

// Euler-Maruyama estimate of E_y0[Y_T]. A path whose update lands at or below 0
// is absorbed there for good and contributes 0 from then on.
McResult simulate_forward(const VolatilityModel& model, double y0, double T,
                          const McConfig& cfg);

}  // namespace bubblefd
