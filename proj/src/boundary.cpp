#include "bubblefd/boundary.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bubblefd {

BoundaryRow final_row_neumann(const SolverConfig& cfg, int /*step*/) {
    // zero slope across the last interval, scaled like the integral row so the
    // two coincide when the tail mass vanishes
    return {-1.0 / cfg.dy, 1.0 / cfg.dy, 0.0};
}

BoundaryRow final_row_dirichlet_zero(const SolverConfig& /*cfg*/, int /*step*/) {
    return {0.0, 1.0, 0.0};
}

BoundaryRow final_row_integral_infinity(const SolverConfig& cfg, double tail, int /*step*/,
                                        const std::vector<double>& old_level) {
    if (tail < 0.0) throw std::domain_error("final_row_integral_infinity: tail mass must be >= 0");
    const std::size_t M = old_level.size() - 1;
    const double th = cfg.theta;
    const double c = 2.0 * tail / (cfg.n * cfg.dtau);
    double rhs = c * old_level[M];
    if (th < 1.0) rhs -= (1.0 - th) * (old_level[M] - old_level[M - 1]) / cfg.dy;
    return {-th / cfg.dy, th / cfg.dy + c, rhs};
}

BoundaryRow final_row_theta_j(const SolverConfig& /*cfg*/, const std::vector<double>& curve,
                              int step) {
    if (step < 0 || static_cast<std::size_t>(step) >= curve.size())
        throw std::invalid_argument("final_row_theta_j: curve does not cover step " +
                                    std::to_string(step));
    return {0.0, 1.0, curve[step]};
}

std::vector<double> theta_j_curve(const VolatilityModel& model, double j, const SolverConfig& cfg,
                                  bool assume_strict) {
    if (!(j > 0.0)) throw std::invalid_argument("theta_j_curve: j must be positive");
    double B = model.f(j);
    if (!(B > 0.0) || !std::isfinite(B))
        throw std::invalid_argument("theta_j_curve: f(j) must be positive and finite");

    SolverConfig inner = cfg;
    inner.n = B;
    inner.validate();

    PriceSurface knock = march(model, inner, dirichlet_zero_scheme(), assume_strict);

    const int M = inner.space_nodes();
    std::vector<double> curve(knock.values.size());
    // level 0 is the payoff, where the trapezoid rule is exact with value B;
    // writing the closed value spares it the accumulated roundoff
    curve[0] = B;
    for (std::size_t i = 1; i < knock.values.size(); ++i) {
        const std::vector<double>& v = knock.values[i];
        double acc = 0.5 * (v[0] + v[M]);
        for (int k = 1; k < M; ++k) acc += v[k];
        curve[i] = (2.0 / B) * inner.dy * acc;
    }
    return curve;
}

BoundaryScheme neumann_scheme() { return {FarBoundary::NeumannZero, 0.0, 0.0, {}}; }

BoundaryScheme dirichlet_zero_scheme() { return {FarBoundary::DirichletZero, 0.0, 0.0, {}}; }

BoundaryScheme integral_infinity_scheme(const VolatilityModel& model, const SolverConfig& cfg) {
    double tail = tail_integral_eval(model, cfg.n);
    if (!(tail > 0.0) || !std::isfinite(tail))
        throw std::domain_error("integral_infinity_scheme: tail mass must be positive and finite");
    return {FarBoundary::IntegralInfinity, 0.0, tail, {}};
}

BoundaryScheme theta_j_scheme(const VolatilityModel& model, const SolverConfig& cfg) {
    double j = model.f_inv(cfg.n);
    if (std::abs(model.f(j) - cfg.n) > 1e-9)
        throw std::invalid_argument("theta_j_scheme: f(f_inv(n)) does not recover the grid top");
    return theta_j_scheme(model, cfg, j);
}

BoundaryScheme theta_j_scheme(const VolatilityModel& model, const SolverConfig& cfg, double j) {
    if (std::abs(model.f(j) - cfg.n) > 1e-9)
        throw std::invalid_argument("theta_j_scheme: f(j) must equal the grid top n");
    BoundaryScheme s{FarBoundary::ThetaJ, j, 0.0, {}};
    s.theta_curve = theta_j_curve(model, j, cfg);
    return s;
}

BoundaryRow far_boundary_row(const BoundaryScheme& scheme, const SolverConfig& cfg, int step,
                             const std::vector<double>& old_level) {
    switch (scheme.kind) {
        case FarBoundary::NeumannZero:
            return final_row_neumann(cfg, step);
        case FarBoundary::DirichletZero:
            return final_row_dirichlet_zero(cfg, step);
        case FarBoundary::IntegralInfinity:
            return final_row_integral_infinity(cfg, scheme.tail, step, old_level);
        case FarBoundary::ThetaJ:
            return final_row_theta_j(cfg, scheme.theta_curve, step);
        case FarBoundary::CetinRoute:
            break;
    }
    throw std::invalid_argument("far_boundary_row: scheme has no boundary row");
}

}  // namespace bubblefd
