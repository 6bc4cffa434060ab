#pragma once

#include "bubblefd/model.hpp"

#include <vector>

namespace bubblefd {

// Top boundary of the transformed solve at x = x_max. u tends to 1 with
// vanishing slope as x grows, so zero slope is the default; pinning u = 1
// is kept for sensitivity runs.
enum class TopCondition { NeumannZero, DirichletOne };

struct HittingGrid {
    double x_max;
    double dx;
    double dtau;
    double maturity;
    double theta = 1.0;
    TopCondition top = TopCondition::NeumannZero;

    int space_nodes() const;
    int time_steps() const;
    void validate() const;
};

// Survival probability u(tau, x) of the coordinate process started at x, i.e.
// the probability of not hitting 0 by tau. u(0, x) = 1 for x > 0, u(tau, 0) = 0.
struct HittingProbSurface {
    std::vector<double> times;
    std::vector<double> xs;
    std::vector<std::vector<double>> values;  // in [0, 1] up to 1e-9 slack
};

// theta-scheme for u_tau = u_xx / 2 - T_{1/f}(x) u_x / 2. The convection term is
// upwinded wherever |T_{1/f}(x)| dx > 1 (keeps the implicit matrix an M-matrix
// despite the singular drift at 0), central elsewhere.
HittingProbSurface solve_hitting_prob(const VolatilityModel& model, const HittingGrid& grid);

// v(tau, y) = y * u(tau, f_inv(y)). Throws out_of_range when f_inv(y) > x_max:
// the truncated grid cannot see that price.
double price_from_u(const HittingProbSurface& s, const VolatilityModel& model,
                    double tau, double y);

// Grid presets: x_max = 4, dx = 0.02, except steep log-power tails (p < 0.5)
// which need (0, 8) at dx = 0.001.
HittingGrid default_hitting_grid(const VolatilityModel& model, double maturity);

}  // namespace bubblefd
