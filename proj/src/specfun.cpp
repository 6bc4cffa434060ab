#include "bubblefd/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bubblefd {

namespace {

// Lower-tail series: P(nu, z) = e^{-z} z^nu / Gamma(nu) * sum_k z^k / (nu(nu+1)...(nu+k)).
// Converges fast for z < nu + 1.
double gamma_p_series(double nu, double z) {
    double ap = nu;
    double del = 1.0 / nu;
    double sum = del;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= z / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-z + nu * std::log(z) - std::lgamma(nu));
}

// Upper-tail continued fraction (modified Lentz), accurate for z >= nu + 1.
double gamma_q_contfrac(double nu, double z) {
    const double tiny = 1e-300;
    double b = z + 1.0 - nu;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - nu);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-z + nu * std::log(z) - std::lgamma(nu)) * h;
}

}  // namespace

double reg_lower_gamma(double nu, double z) {
    if (!(nu > 0.0)) throw std::domain_error("reg_lower_gamma: nu must be positive");
    if (!(z >= 0.0)) throw std::domain_error("reg_lower_gamma: z must be nonnegative");
    if (z == 0.0) return 0.0;
    if (z < nu + 1.0) return gamma_p_series(nu, z);
    return 1.0 - gamma_q_contfrac(nu, z);
}

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

}  // namespace bubblefd
