#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bubblefd/boundary.hpp"
#include "bubblefd/hitting.hpp"
#include "bubblefd/mc.hpp"
#include "bubblefd/model.hpp"
#include "bubblefd/pde.hpp"
#include "bubblefd/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

using namespace bubblefd;

// Acceptance gate. Each test case evaluates one numbered release criterion and
// prints a single "criterion NN <name> PASS/FAIL" line; the doctest assertions
// carry the per-entry detail. Benchmark rows are frozen at two decimals, so a
// computed value passes an entry when its two-decimal rounding lands within
// the row tolerance of the frozen entry.

namespace {

constexpr double kYs[9] = {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};

// CEV benchmark (a = 0.5, nu = 1, tau = 1): forward prices by scheme.
constexpr double kExactCev[9]     = {1.00, 1.49, 1.96, 2.40, 2.79, 3.14, 3.46, 3.74, 3.99};
constexpr double kFluxCev[9]      = {1.00, 1.48, 1.92, 2.32, 2.67, 2.98, 3.25, 3.50, 3.72};
constexpr double kOneSidedCev[9]  = {1.00, 1.46, 1.85, 2.16, 2.41, 2.61, 2.77, 2.89, 2.99};
constexpr double kAbsorbingCev[9] = {0.99, 1.40, 1.67, 1.82, 1.87, 1.85, 1.79, 1.70, 1.58};
constexpr double kTransformCev[9] = {1.00, 1.49, 1.96, 2.40, 2.79, 3.14, 3.46, 3.74, 4.00};
constexpr double kKnockoutCev[9]  = {0.99, 1.44, 1.80, 2.07, 2.26, 2.40, 2.49, 2.54, 2.57};

// log-power benchmarks (tau = 1), flux boundary row.
constexpr double kFluxP1[9]  = {0.73, 0.82, 0.86, 0.89, 0.90, 0.91, 0.92, 0.92, 0.93};
constexpr double kFluxP01[9] = {1.00, 1.50, 1.68, 1.69, 1.69, 1.69, 1.69, 1.69, 1.69};

double r2(double v) { return std::round(v * 100.0) / 100.0; }

bool entry_ok(double computed, double frozen, double tol) {
    return std::abs(r2(computed) - frozen) <= tol + 1e-9;
}

void verdict(int num, const char* name, bool ok) {
    std::printf("criterion %02d %s %s\n", num, name, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
}

bool row_check(const char* label, const double* frozen, double tol,
               const std::function<double(double)>& eval) {
    bool ok = true;
    for (int i = 0; i < 9; ++i) {
        double v = eval(kYs[i]);
        INFO(label << " at y=" << kYs[i] << ": " << v << " vs " << frozen[i] << " +/- " << tol);
        bool hit = entry_ok(v, frozen[i], tol);
        CHECK(hit);
        ok &= hit;
    }
    return ok;
}

// Bilinear read of the survival surface. An x past the truncation keeps the
// boundary value; the zero-slope top makes the surface flat there.
double interp_u(const HittingProbSurface& surface, double tau, double x) {
    auto locate = [](const std::vector<double>& grid, double v, std::size_t& idx, double& w) {
        if (v <= grid.front()) { idx = 0; w = 0.0; return; }
        if (v >= grid.back()) { idx = grid.size() - 2; w = 1.0; return; }
        std::size_t hi = 1;
        while (grid[hi] < v) ++hi;
        idx = hi - 1;
        w = (v - grid[idx]) / (grid[idx + 1] - grid[idx]);
    };
    std::size_t i, k;
    double wt, wx;
    locate(surface.times, tau, i, wt);
    locate(surface.xs, x, k, wx);
    double lo = surface.values[i][k] + wx * (surface.values[i][k + 1] - surface.values[i][k]);
    double hi = surface.values[i + 1][k] + wx * (surface.values[i + 1][k + 1] - surface.values[i + 1][k]);
    return lo + wt * (hi - lo);
}

double transform_price(const HittingProbSurface& surface, const VolatilityModel& model,
                       double x_max, double tau, double y) {
    double x = model.f_inv(y);
    if (x > x_max) x = x_max;
    return y * interp_u(surface, tau, x);
}

// Surfaces shared across criteria, built once on first use.
struct CevBench {
    VolatilityModel model = make_cev(0.5, 1.0);
    SolverConfig grid{10.0, 0.05, 0.01, 1.0, 1.0};
    PriceSurface one_sided, absorbing, flux, knockout;
    HittingGrid xgrid;
    HittingProbSurface u;

    static const CevBench& get() {
        static CevBench b;
        return b;
    }

private:
    CevBench() : xgrid(default_hitting_grid(model, 1.0)) {
        one_sided = march(model, grid, neumann_scheme());
        absorbing = march(model, grid, dirichlet_zero_scheme());
        flux = march(model, grid, integral_infinity_scheme(model, grid));
        knockout = march(model, grid, theta_j_scheme(model, grid));
        u = solve_hitting_prob(model, xgrid);
    }
};

struct LogPowBench {
    VolatilityModel p1 = make_log_power(1.0);
    VolatilityModel p01 = make_log_power(0.1);
    SolverConfig grid{10.0, 0.05, 0.01, 1.0, 1.0};
    PriceSurface p1_flux, p01_flux;
    HittingGrid p01_xgrid;
    HittingProbSurface p01_u;

    static const LogPowBench& get() {
        static LogPowBench b;
        return b;
    }

private:
    LogPowBench() : p01_xgrid(default_hitting_grid(p01, 1.0)) {
        p1_flux = march(p1, grid, integral_infinity_scheme(p1, grid));
        p01_flux = march(p01, grid, integral_infinity_scheme(p01, grid));
        p01_u = solve_hitting_prob(p01, p01_xgrid);
    }
};

std::vector<double> matvec(const TridiagonalSystem& sys, const std::vector<double>& x) {
    int m = static_cast<int>(x.size());
    std::vector<double> out(m);
    for (int k = 0; k < m; ++k) {
        double v = sys.diag[k] * x[k];
        if (k > 0) v += sys.sub[k] * x[k - 1];
        if (k + 1 < m) v += sys.super[k] * x[k + 1];
        out[k] = v;
    }
    return out;
}

}  // namespace

TEST_CASE("cev-exact-row") {
    const auto& b = CevBench::get();
    bool ok = row_check("closed form", kExactCev, 0.0,
                        [&](double y) { return forward_exact_cev(b.model, 1.0, y); });
    verdict(1, "cev-exact-row", ok);
}

TEST_CASE("integral-bc-row") {
    const auto& b = CevBench::get();
    bool ok = row_check("flux row", kFluxCev, 0.01,
                        [&](double y) { return sample(b.flux, 1.0, y); });
    verdict(2, "integral-bc-row", ok);
}

TEST_CASE("neumann-dirichlet-rows") {
    const auto& b = CevBench::get();
    bool ok = row_check("zero slope", kOneSidedCev, 0.02,
                        [&](double y) { return sample(b.one_sided, 1.0, y); });
    ok &= row_check("absorbing top", kAbsorbingCev, 0.02,
                    [&](double y) { return sample(b.absorbing, 1.0, y); });
    verdict(3, "neumann-dirichlet-rows", ok);
}

TEST_CASE("transform-row") {
    const auto& b = CevBench::get();
    bool ok = row_check("transformed solve", kTransformCev, 0.02, [&](double y) {
        return transform_price(b.u, b.model, b.xgrid.x_max, 1.0, y);
    });
    verdict(4, "transform-row", ok);
}

TEST_CASE("knockout-boundary-row") {
    const auto& b = CevBench::get();
    bool ok = row_check("knock-out fed top", kKnockoutCev, 0.03,
                        [&](double y) { return sample(b.knockout, 1.0, y); });
    verdict(5, "knockout-boundary-row", ok);
}

TEST_CASE("logpow-p1-row") {
    const auto& b = LogPowBench::get();
    bool ok = row_check("p=1 flux row", kFluxP1, 0.02,
                        [&](double y) { return sample(b.p1_flux, 1.0, y); });
    verdict(6, "logpow-p1-row", ok);
}

TEST_CASE("logpow-p01-row") {
    const auto& b = LogPowBench::get();
    bool ok = row_check("p=0.1 flux row", kFluxP01, 0.02,
                        [&](double y) { return sample(b.p01_flux, 1.0, y); });

    // the price curve levels off: raw values, not just the rounding, sit on
    // the plateau from y = 2.5 outward
    for (double y = 2.5; y <= 5.0 + 1e-9; y += 0.5) {
        double v = sample(b.p01_flux, 1.0, y);
        INFO("plateau at y=" << y << ": " << v);
        bool flat = std::abs(v - 1.69) <= 0.01;
        CHECK(flat);
        ok &= flat;
    }

    // the transformed route loses mass out here and slopes down instead
    double near = transform_price(b.p01_u, b.p01, b.p01_xgrid.x_max, 1.0, 2.0);
    double far = transform_price(b.p01_u, b.p01, b.p01_xgrid.x_max, 1.0, 5.0);
    INFO("transformed p=0.1 at y=2: " << near << ", at y=5: " << far);
    bool drops = near - far >= 0.3;
    CHECK(drops);
    ok &= drops;

    verdict(7, "logpow-p01-row", ok);
}

TEST_CASE("scheme-ordering") {
    const auto& b = CevBench::get();
    bool ok = true;
    auto chk = [&](bool c) {
        CHECK(c);
        ok &= c;
    };

    std::vector<double> one_sided, absorbing, flux, knockout, exact;
    for (double y : kYs) {
        one_sided.push_back(sample(b.one_sided, 1.0, y));
        absorbing.push_back(sample(b.absorbing, 1.0, y));
        flux.push_back(sample(b.flux, 1.0, y));
        knockout.push_back(sample(b.knockout, 1.0, y));
        exact.push_back(forward_exact_cev(b.model, 1.0, y));
    }

    // truncating schemes only ever undershoot the closed form
    for (int i = 0; i < 9; ++i) {
        INFO("y=" << kYs[i]);
        chk(absorbing[i] <= exact[i] + 0.01);
        chk(knockout[i] <= exact[i] + 0.01);
    }

    auto nondecreasing = [](const std::vector<double>& row) {
        for (std::size_t i = 1; i < row.size(); ++i)
            if (row[i] + 1e-12 < row[i - 1]) return false;
        return true;
    };
    chk(nondecreasing(one_sided));
    chk(nondecreasing(knockout));
    chk(nondecreasing(flux));
    chk(nondecreasing(exact));

    verdict(8, "scheme-ordering", ok);
}

TEST_CASE("boundary-curve-convergence") {
    const auto& b = CevBench::get();
    double bound = theta0_exact_cev(b.model, 1.0);

    double caps[3] = {10.0, 20.0, 40.0};
    double theta[3];
    for (int i = 0; i < 3; ++i) {
        SolverConfig cfg{caps[i], 0.05, 0.01, 1.0, 1.0};
        theta[i] = theta_j_curve(b.model, b.model.f_inv(caps[i]), cfg).back();
    }

    bool ok = true;
    auto chk = [&](bool c) {
        CHECK(c);
        ok &= c;
    };
    chk(theta[0] <= theta[1] + 1e-12);
    chk(theta[1] <= theta[2] + 1e-12);
    for (double t : theta) chk(t <= bound + 1e-9);

    bool close = theta[2] >= 0.9 * bound;
    WARN_MESSAGE(close, "cap-40 averaged boundary value " << theta[2]
                            << " has not reached 10% of the limit " << bound);
    if (!close) {
        std::printf(
            "criterion 09 note: averaged knock-out boundary value at caps 10/20/40 is "
            "%.3f/%.3f/%.3f against the limit %.1f; the deficit shrinks like cap^(-1/2), "
            "roughly 25/sqrt(cap), so reaching the 10%% band (>= 7.2) needs a cap near "
            "1000, far beyond any grid this suite can run in its time budget\n",
            theta[0], theta[1], theta[2], bound);
    }
    verdict(9, "boundary-curve-convergence", ok && close);
}

TEST_CASE("qnv-closed-forms") {
    auto qnv = make_qnv(1.0, -1.0);
    bool ok = true;
    auto chk = [&](bool c) {
        CHECK(c);
        ok &= c;
    };

    // far-field forward against the boundary-limit closed form
    for (double tau : {0.5, 1.0, 2.0}) {
        double gap = std::abs(forward_exact_qnv(qnv, tau, 1e6) - theta0_exact_qnv(qnv, tau));
        INFO("tau=" << tau << " gap=" << gap);
        chk(gap <= 1e-3);
    }

    // Laplace transform of the boundary limit against quadrature; tau = s*s
    // flattens the integrand near zero and stretches the effective range
    for (double r : {0.5, 1.0}) {
        double quad = integrate(
            [&](double s) { return 2.0 * s * std::exp(-r * s * s) * theta0_exact_qnv(qnv, s * s); },
            1e-6, 15.0, 1e-8);
        double gap = std::abs(quad - laplace_theta0_qnv(qnv, r));
        INFO("r=" << r << " gap=" << gap);
        chk(gap <= 1e-4);
    }

    verdict(10, "qnv-closed-forms", ok);
}

TEST_CASE("mc-corroboration") {
    bool ok = true;
    auto chk = [&](bool c) {
        CHECK(c);
        ok &= c;
    };

    McConfig mc;
    mc.n_paths = 100000;
    mc.n_steps = 2000;
    mc.seed = 12345;

    auto cev = make_cev(0.5, 1.0);
    McResult rc = simulate_forward(cev, 2.0, 1.0, mc);
    double cev_ref = forward_exact_cev(cev, 1.0, 2.0);
    INFO("cev mean=" << rc.mean << " se=" << rc.std_err << " ref=" << cev_ref);
    chk(std::abs(rc.mean - cev_ref) <= std::max(3.0 * rc.std_err, 0.03));

    auto qnv = make_qnv(1.0, -1.0);
    McResult rq = simulate_forward(qnv, 0.5, 1.0, mc);
    double qnv_ref = forward_exact_qnv(qnv, 1.0, 0.5);
    INFO("qnv mean=" << rq.mean << " se=" << rq.std_err << " ref=" << qnv_ref);
    chk(std::abs(rq.mean - qnv_ref) <= 3.0 * rq.std_err + 0.02);

    verdict(11, "mc-corroboration", ok);
}

TEST_CASE("kernel-properties") {
    bool ok = true;
    auto chk = [&](bool c) {
        CHECK(c);
        ok &= c;
    };

    // Thomas solve on random diagonally dominant systems
    std::mt19937_64 rng(771210);
    std::uniform_real_distribution<double> off(-1.0, 1.0);
    std::uniform_real_distribution<double> pad(0.5, 1.5);
    std::uniform_real_distribution<double> load(-2.0, 2.0);
    for (int m : {50, 400}) {
        TridiagonalSystem sys;
        sys.sub.assign(m, 0.0);
        sys.diag.assign(m, 0.0);
        sys.super.assign(m, 0.0);
        sys.rhs.assign(m, 0.0);
        for (int k = 0; k < m; ++k) {
            if (k > 0) sys.sub[k] = off(rng);
            if (k + 1 < m) sys.super[k] = off(rng);
            double d = std::abs(sys.sub[k]) + std::abs(sys.super[k]) + pad(rng);
            sys.diag[k] = off(rng) < 0.0 ? -d : d;
            sys.rhs[k] = load(rng);
        }
        auto x = solve_tridiagonal(sys);
        auto ax = matvec(sys, x);
        double resid = 0.0;
        double bmax = 0.0;
        for (int k = 0; k < m; ++k) {
            resid = std::max(resid, std::abs(ax[k] - sys.rhs[k]));
            bmax = std::max(bmax, std::abs(sys.rhs[k]));
        }
        INFO("m=" << m << " residual=" << resid);
        chk(resid <= 1e-10 * (1.0 + bmax));
    }

    // eigenmode decay under constant volatility, first order in dtau
    VolatilityModel stub;
    stub.id = "stub";
    stub.sigma = [](double) { return std::numbers::sqrt2; };
    auto heat_run = [&stub](double dtau) {
        SolverConfig cfg{1.0, 0.01, dtau, 0.1, 1.0};
        int M = cfg.space_nodes();
        PriceSurface s;
        s.times = {0.0};
        s.nodes.resize(M + 1);
        s.values.emplace_back(M + 1);
        for (int k = 0; k <= M; ++k) {
            s.nodes[k] = k * cfg.dy;
            s.values[0][k] = std::sin(std::numbers::pi * s.nodes[k]);
        }
        for (int i = 1; i <= cfg.time_steps(); ++i) {
            auto sys = assemble_interior(stub, cfg, i, s);
            sys.sub[M] = 0.0;
            sys.diag[M] = 1.0;
            sys.rhs[M] = 0.0;
            s.values.push_back(solve_tridiagonal(sys));
            s.times.push_back(i * dtau);
        }
        return s.values.back()[M / 2];
    };
    double exact = std::exp(-std::numbers::pi * std::numbers::pi * 0.1);
    double gap1 = std::abs(heat_run(1e-3) - exact);
    double gap2 = std::abs(heat_run(5e-4) - exact);
    INFO("decay gaps " << gap1 << " -> " << gap2);
    chk(gap1 <= 5e-3);
    chk(gap2 / gap1 > 0.3);
    chk(gap2 / gap1 < 0.7);

    // halving both steps moves no benchmark entry by more than its rounding slack
    const auto& b = CevBench::get();
    SolverConfig half{10.0, 0.025, 0.005, 1.0, 1.0};
    auto fine = march(b.model, half, integral_infinity_scheme(b.model, half));
    HittingGrid xhalf = b.xgrid;
    xhalf.dx = 0.01;
    xhalf.dtau = 0.005;
    auto ufine = solve_hitting_prob(b.model, xhalf);
    for (double y : kYs) {
        double dflux = std::abs(sample(fine, 1.0, y) - sample(b.flux, 1.0, y));
        double dtrans = std::abs(transform_price(ufine, b.model, xhalf.x_max, 1.0, y) -
                                 transform_price(b.u, b.model, b.xgrid.x_max, 1.0, y));
        INFO("y=" << y << " refinement shifts " << dflux << " and " << dtrans);
        chk(dflux <= 0.01);
        chk(dtrans <= 0.01);
    }

    verdict(12, "kernel-properties", ok);
}
