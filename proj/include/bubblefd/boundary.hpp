#pragma once

#include "bubblefd/pde.hpp"

#include <vector>

namespace bubblefd {

// Far-boundary treatments at y = n.
//
//   NeumannZero       one-sided zero slope at the new time level
//   DirichletZero     v(tau, n) = 0 (no payoff revision)
//   IntegralInfinity  discrete flux row driven by the tail mass I = tail_integral(n)
//   ThetaJ            v(tau, n) = Theta_j(tau) from a knock-out solve
//   CetinRoute        marker: price through the transformed x-solver instead
enum class FarBoundary { NeumannZero, DirichletZero, IntegralInfinity, ThetaJ, CetinRoute };

// Coefficients of the last matrix row: sub * v_{M-1} + diag * v_M = rhs.
struct BoundaryRow {
    double sub;
    double diag;
    double rhs;
};

struct BoundaryScheme {
    FarBoundary kind;
    double j = 0.0;                   // ThetaJ: barrier coordinate, f(j) = n
    double tail = 0.0;                // IntegralInfinity: I, finite and positive
    std::vector<double> theta_curve;  // ThetaJ: boundary values at tau_0..tau_N
};

BoundaryRow final_row_neumann(const SolverConfig& cfg, int step);
BoundaryRow final_row_dirichlet_zero(const SolverConfig& cfg, int step);

// Discretization of the integral condition at infinity,
//   theta Dy v(tau, n) + (1-theta) Dy v(tau-dtau, n) = -(2 I / n) Dt v(tau, n),
// with Dy the backward difference and Dt the backward time difference.
// Solved for the unknowns this reads
//   (theta/dy + c) v_M - (theta/dy) v_{M-1} = c v_M_old - (1-theta)(v_M_old - v_{M-1}_old)/dy,
// where c = 2 I / (n dtau). I = 0 degenerates to the Neumann row.
BoundaryRow final_row_integral_infinity(const SolverConfig& cfg, double tail, int step,
                                        const std::vector<double>& old_level);

BoundaryRow final_row_theta_j(const SolverConfig& cfg, const std::vector<double>& curve,
                              int step);

// Theta_j(tau_i) = (2 / f(j)) integral_0^{f(j)} v_knockout(tau_i, y) dy, where the
// knock-out forward is solved on (0, f(j)) with Dirichlet 0 at the barrier and the
// same dy/dtau/theta. Trapezoid rule on the solver grid; Theta_j(0) = f(j) exactly.
std::vector<double> theta_j_curve(const VolatilityModel& model, double j,
                                  const SolverConfig& cfg, bool assume_strict = false);

BoundaryScheme neumann_scheme();
BoundaryScheme dirichlet_zero_scheme();
BoundaryScheme integral_infinity_scheme(const VolatilityModel& model, const SolverConfig& cfg);

// Default barrier j = f_inv(n); an explicit j must satisfy f(j) = n to 1e-9.
BoundaryScheme theta_j_scheme(const VolatilityModel& model, const SolverConfig& cfg);
BoundaryScheme theta_j_scheme(const VolatilityModel& model, const SolverConfig& cfg, double j);

// Dispatch used by march(); throws for CetinRoute.
BoundaryRow far_boundary_row(const BoundaryScheme& scheme, const SolverConfig& cfg, int step,
                             const std::vector<double>& old_level);

}  // namespace bubblefd
