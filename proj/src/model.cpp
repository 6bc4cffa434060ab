#include "bubblefd/model.hpp"

#include "bubblefd/quadrature.hpp"
#include "bubblefd/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bubblefd {

namespace {

void require_id(const VolatilityModel& m, const char* id, const char* what) {
    if (m.id != id) throw std::invalid_argument(std::string(what) + ": no closed form for model '" + m.id + "'");
}

double pow_checked(double y, double e) {
    // y^{1.5} dominates the Monte Carlo inner loop for the common nu = 1 case.
    if (e == 1.5) return y * std::sqrt(y);
    return std::pow(y, e);
}

}  // namespace

VolatilityModel make_cev(double a, double nu) {
    if (!(a > 0.0)) throw std::domain_error("make_cev: a must be positive");
    if (!(nu > 0.0)) throw std::domain_error("make_cev: nu must be positive");

    const double expo = 1.0 + 1.0 / (2.0 * nu);
    const double scale = std::pow(2.0 * nu / a, 2.0 * nu);  // f(x) = scale * x^{-2 nu}

    VolatilityModel m;
    m.id = "cev";
    m.params = {{"a", a}, {"nu", nu}};
    m.sigma = [a, expo](double y) { return a * pow_checked(y, expo); };
    m.f = [scale, nu](double x) { return scale * std::pow(x, -2.0 * nu); };
    m.f_inv = [a, nu](double y) { return (2.0 * nu / a) * std::pow(y, -1.0 / (2.0 * nu)); };
    m.t_recip = [nu](double x) { return (2.0 * nu - 1.0) / x; };
    m.tail_integral = [a, nu](double n) { return nu * std::pow(n, -1.0 / nu) / (a * a); };
    m.closed_forward = [a, nu](double tau, double y) {
        if (y == 0.0) return 0.0;
        double r = std::pow(2.0 * nu / a, 2.0) / (std::pow(y, 1.0 / nu) * tau);
        return y * reg_lower_gamma(nu, 0.5 * r);
    };
    m.closed_theta0 = [a, nu](double tau) {
        return std::pow(2.0 * nu * nu / (a * a * tau), nu) / (nu * std::tgamma(nu));
    };
    return m;
}

VolatilityModel make_qnv(double a, double l) {
    if (!(l < 0.0)) throw std::domain_error("make_qnv: l must be negative");
    if (!(a > 0.0)) throw std::domain_error("make_qnv: a must be positive");

    VolatilityModel m;
    m.id = "qnv";
    m.params = {{"a", a}, {"l", l}};
    m.sigma = [a, l](double y) { return a * (y - l) * y; };
    // f(x) = (l/2)(coth(a l x / 2) + 1) = l / (1 - e^{-a l x}); f(0+) = +inf.
    m.f = [a, l](double x) { return l / (-std::expm1(-a * l * x)); };
    m.f_inv = [a, l](double y) { return -std::log1p(-l / y) / (a * l); };
    // (1/f)''/(1/f)' is the constant -a l: 1/f = (1 - e^{-a l x})/l.
    m.t_recip = [a, l](double) { return -a * l; };
    m.tail_integral = [a, l, f = m.f](double n) {
        double xn = -std::log1p(-l / n) / (a * l);
        // Integrand after y = f(x): f/sigma(f) = 1/(a (f - l)); vanishes at x = 0.
        auto g = [a, l, &f](double x) { return 1.0 / (a * (f(x) - l)); };
        return integrate(g, 0.0, xn, 1e-10);
    };
    const double b = -a * l;  // volatility of the coordinate process
    m.closed_forward = [b, l](double tau, double y) {
        if (!(y > 0.0)) throw std::domain_error("qnv forward: y must be positive");
        double s = b * std::sqrt(tau);
        double log_ratio = -std::log1p(-l / y);  // log(y / (y - l)), safe for huge y
        double d_minus = (log_ratio - 0.5 * s * s) / s;
        double d_plus = (log_ratio + 0.5 * s * s) / s;
        return y - (y - l) * norm_cdf(d_minus) - y * norm_cdf(d_plus);
    };
    m.closed_theta0 = [a, l](double tau) {
        double s = a * std::sqrt(tau);  // sqrt(a^2 tau)
        double half_l = 0.5 * l;
        return std::sqrt(2.0 / std::numbers::pi) * std::exp(-half_l * half_l * s * s / 2.0) / s +
               l * norm_cdf(half_l * s);
    };
    return m;
}

VolatilityModel make_log_power(double p) {
    if (!(p > 0.0)) throw std::domain_error("make_log_power: p must be positive");

    VolatilityModel m;
    m.id = "logpow";
    m.params = {{"p", p}};
    m.sigma = [p](double y) {
        double lg = std::log1p(y);
        return p * (1.0 + y) * std::pow(lg, 1.0 + 1.0 / p);
    };
    m.f = [p](double x) { return std::expm1(std::pow(x, -p)); };
    m.f_inv = [p](double y) { return std::pow(std::log1p(y), -1.0 / p); };
    m.t_recip = [p](double x) {
        double w = std::pow(x, -p);
        double e = std::exp(-w);
        // (1 + e^{-w})/(1 - e^{-w}) * p w / x - (p + 1)/x, stable for small w.
        return (1.0 + e) / (-std::expm1(-w)) * p * w / x - (p + 1.0) / x;
    };
    m.tail_integral = [p, f_inv = m.f_inv](double n) {
        double xn = f_inv(n);
        // f/(-f') in closed form; tends to 0 as x -> 0 despite f blowing up.
        auto g = [p](double x) {
            return -std::expm1(-std::pow(x, -p)) * std::pow(x, p + 1.0) / p;
        };
        return integrate(g, 0.0, xn, 1e-10);
    };
    return m;
}

double forward_exact_cev(const VolatilityModel& m, double tau, double y) {
    require_id(m, "cev", "forward_exact_cev");
    return m.closed_forward(tau, y);
}

double theta0_exact_cev(const VolatilityModel& m, double tau) {
    require_id(m, "cev", "theta0_exact_cev");
    return m.closed_theta0(tau);
}

double forward_exact_qnv(const VolatilityModel& m, double tau, double y) {
    require_id(m, "qnv", "forward_exact_qnv");
    return m.closed_forward(tau, y);
}

double theta0_exact_qnv(const VolatilityModel& m, double tau) {
    require_id(m, "qnv", "theta0_exact_qnv");
    return m.closed_theta0(tau);
}

double laplace_theta0_qnv(const VolatilityModel& m, double r) {
    require_id(m, "qnv", "laplace_theta0_qnv");
    if (r < 0.0) throw std::domain_error("laplace_theta0_qnv: r must be nonnegative");
    double a = m.params.at("a");
    double l = m.params.at("l");
    double k = r / ((a * l) * (a * l));
    return (-2.0 / (a * a * l)) * 2.0 / (1.0 + std::sqrt(1.0 + 8.0 * k));
}

StrictLmResult strict_lm_check(const VolatilityModel& m) {
    auto integrand = [&m](double y) {
        double s = m.sigma(y);
        return y / (s * s);
    };
    double total = 0.0;
    double lo = 1.0;
    for (int k = 0; k < 60; ++k) {
        double hi = 2.0 * lo;
        double part = integrate(integrand, lo, hi, 1e-9);
        total += part;
        if (part < 1e-6) {
            double tail = m.tail_integral ? m.tail_integral(1.0) : total;
            return {true, tail, false};
        }
        lo = hi;
    }
    return {false, std::numeric_limits<double>::infinity(), true};
}

double tail_integral_eval(const VolatilityModel& m, double n) {
    if (!(n > 0.0)) throw std::domain_error("tail_integral_eval: n must be positive");
    if (m.tail_integral) return m.tail_integral(n);
    auto integrand = [&m](double y) {
        double s = m.sigma(y);
        return y / (s * s);
    };
    double total = 0.0;
    double lo = n;
    double prev = -1.0;
    for (int k = 0; k < 60; ++k) {
        double hi = 2.0 * lo;
        double part = integrate(integrand, lo, hi, 1e-11);
        total += part;
        if (part < 1e-6) {
            // Estimate the mass beyond the last window from the decay ratio.
            // Exact for geometric decay; a slight undercount for logarithmic
            // tails, where the windows shrink like a power of the index.
            if (prev > 0.0 && part > 0.0 && part < prev) {
                double r = part / prev;
                total += part * r / (1.0 - r);
            }
            return total;
        }
        prev = part;
        lo = hi;
    }
    throw std::runtime_error("tail_integral_eval: integral does not converge (model is not a strict local martingale?)");
}

}  // namespace bubblefd
