#pragma once

#include "bubblefd/model.hpp"

#include <vector>

namespace bubblefd {

// Uniform grid for the forward-price solve on (0, n) x (0, maturity).
// Time runs in time-to-maturity, so the payoff enters at level 0.
struct SolverConfig {
    double n;         // truncation bound
    double dy;        // price step
    double dtau;      // time step
    double maturity;  // T
    double theta = 1.0;

    int space_nodes() const;  // M with y_k = k dy, k = 0..M
    int time_steps() const;   // N with tau_i = i dtau, i = 0..N
    void validate() const;    // n/dy and maturity/dtau must be (near) integers
};

struct TridiagonalSystem {
    std::vector<double> sub;    // sub[k] multiplies x[k-1]; sub[0] unused
    std::vector<double> diag;   // diag[k] multiplies x[k]
    std::vector<double> super;  // super[k] multiplies x[k+1]; super[M] unused
    std::vector<double> rhs;
};

struct PriceSurface {
    std::vector<double> times;                 // tau_0 = 0, ..., tau_N
    std::vector<double> nodes;                 // y_0 = 0, ..., y_M = n
    std::vector<std::vector<double>> values;   // values[i][k] at (times[i], nodes[k])
};

struct BoundaryScheme;  // boundary.hpp

// theta-scheme rows for one time step. Row 0 encodes v_0 = 0 (absorption at 0),
// rows 1..M-1 encode
//   (v_k - v_k_old)/dtau = (sigma(y_k)^2 / 2) [theta D2 v + (1-theta) D2 v_old]_k,
// and row M is left as zeros for the far-boundary scheme to install.
TridiagonalSystem assemble_interior(const VolatilityModel& model, const SolverConfig& cfg,
                                    int step, const PriceSurface& surface);

// Thomas algorithm. Residual ||Ax-b||_inf <= 1e-10 (1 + ||b||_inf) on the
// diagonally dominant systems produced here; throws on a vanishing pivot.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys);

// Full time march from the payoff v(0, y) = y. Pass assume_strict = true to
// skip the strict-local-martingale gate (test stubs have divergent tails).
PriceSurface march(const VolatilityModel& model, const SolverConfig& cfg,
                   const BoundaryScheme& scheme, bool assume_strict = false);

// Bilinear interpolation on the stored surface; exact at nodes.
double sample(const PriceSurface& surface, double tau, double y);

}  // namespace bubblefd
