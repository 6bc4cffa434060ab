#pragma once

#include <functional>
#include <map>
#include <string>

namespace bubblefd {

// One-dimensional diffusion dY = sigma(Y) dW absorbed at 0, bundled with the
// scale companions used by the transformed solver and by the far-boundary row.
//
// f is the decreasing map with f_inv(y) = integral_y^inf d eta / sigma(eta), so
// Y = f(X) for a coordinate process X; t_recip is the pre-Schwarzian of 1/f and
// supplies the drift of the transformed equation. tail_integral(n) is the
// volatility mass beyond n: integral_n^inf y / sigma(y)^2 dy.
struct VolatilityModel {
    std::string id;  // "cev", "qnv", "logpow", or a test stub name
    std::function<double(double)> sigma;
    std::function<double(double)> f;
    std::function<double(double)> f_inv;
    std::function<double(double)> t_recip;
    std::function<double(double)> tail_integral;
    std::function<double(double, double)> closed_forward;  // (tau, y); empty when unknown
    std::function<double(double)> closed_theta0;           // tau; empty when unknown
    std::map<std::string, double> params;
};

// sigma(y) = a * y^{1 + 1/(2 nu)}; strict local martingale for every nu > 0.
VolatilityModel make_cev(double a, double nu);

// Quadratic normal volatility with roots at 0 and l < 0: sigma(y) = a (y - l) y.
VolatilityModel make_qnv(double a, double l);

// sigma(y) = p (1 + y) (log(1 + y))^{1 + 1/p}; no closed-form forward.
VolatilityModel make_log_power(double p);

double forward_exact_cev(const VolatilityModel& m, double tau, double y);
double theta0_exact_cev(const VolatilityModel& m, double tau);
double forward_exact_qnv(const VolatilityModel& m, double tau, double y);
double theta0_exact_qnv(const VolatilityModel& m, double tau);
double laplace_theta0_qnv(const VolatilityModel& m, double r);

struct StrictLmResult {
    bool is_strict;
    double integral;        // tail mass above 1; +inf when divergent
    bool quadrature_issue;  // doubling scan hit its cap without settling
};

// Convergence test of the tail mass: partial integrals over [2^k, 2^{k+1}]
// must Cauchy-converge within 60 doublings. Diagnostic, not a proof.
StrictLmResult strict_lm_check(const VolatilityModel& m);

// tail_integral(n), via the model's closed form when present, otherwise by a
// doubling-window quadrature that throws if the mass does not converge.
double tail_integral_eval(const VolatilityModel& m, double n);

}  // namespace bubblefd
