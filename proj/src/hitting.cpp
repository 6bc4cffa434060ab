#include "bubblefd/hitting.hpp"

#include "bubblefd/pde.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace bubblefd {

namespace {

int checked_ratio(double total, double step, const char* what) {
    double ratio = total / step;
    int count = static_cast<int>(std::lround(ratio));
    if (count < 1 || std::abs(ratio - count) > 1e-6 * ratio + 1e-9)
        throw std::invalid_argument(std::string("HittingGrid: ") + what + " must divide evenly");
    return count;
}

struct OperatorRow {
    double lower, center, upper;
};

}  // namespace

int HittingGrid::space_nodes() const { return checked_ratio(x_max, dx, "x_max/dx"); }

int HittingGrid::time_steps() const { return checked_ratio(maturity, dtau, "maturity/dtau"); }

void HittingGrid::validate() const {
    if (!(x_max > 0.0) || !(dx > 0.0) || !(dtau > 0.0) || !(maturity > 0.0))
        throw std::invalid_argument("HittingGrid: x_max, dx, dtau, maturity must be positive");
    if (theta < 0.0 || theta > 1.0)
        throw std::invalid_argument("HittingGrid: theta must lie in [0, 1]");
    if (space_nodes() < 3) throw std::invalid_argument("HittingGrid: need at least 3 intervals");
    time_steps();
}

HittingProbSurface solve_hitting_prob(const VolatilityModel& model, const HittingGrid& grid) {
    grid.validate();

    const int M = grid.space_nodes();
    const int N = grid.time_steps();
    const double d = 0.5 / (grid.dx * grid.dx);
    const double th = grid.theta;

    // drift away from the origin makes the convection coefficient grow without
    // bound as x -> 0; upwind those nodes so every row keeps the M-matrix signs
    std::vector<OperatorRow> op(M + 1, OperatorRow{0.0, 0.0, 0.0});
    bool warned = false;
    for (int k = 1; k < M; ++k) {
        double x = k * grid.dx;
        double t = model.t_recip(x);
        double c = -0.5 * t;
        OperatorRow row{d, -2.0 * d, d};
        if (std::abs(t) * grid.dx > 1.0) {
            if (c < 0.0) {
                row.lower += -c / grid.dx;
                row.center += c / grid.dx;
            } else {
                row.upper += c / grid.dx;
                row.center += -c / grid.dx;
            }
        } else {
            row.lower += -c / (2.0 * grid.dx);
            row.upper += c / (2.0 * grid.dx);
            if (!warned && std::abs(t) * grid.dx > 2.0) {
                std::cerr << "solve_hitting_prob: central difference outside its stability range at x="
                          << x << "\n";
                warned = true;
            }
        }
        op[k] = row;
    }

    HittingProbSurface s;
    s.xs.resize(M + 1);
    for (int k = 0; k <= M; ++k) s.xs[k] = k * grid.dx;
    s.times.reserve(N + 1);
    s.times.push_back(0.0);

    std::vector<double> level(M + 1, 1.0);
    level[0] = 0.0;  // already struck
    s.values.reserve(N + 1);
    s.values.push_back(level);

    TridiagonalSystem sys;
    sys.sub.assign(M + 1, 0.0);
    sys.diag.assign(M + 1, 0.0);
    sys.super.assign(M + 1, 0.0);
    sys.rhs.assign(M + 1, 0.0);

    for (int i = 1; i <= N; ++i) {
        const std::vector<double>& old_level = s.values[i - 1];

        sys.diag[0] = 1.0;
        sys.sub[0] = sys.super[0] = sys.rhs[0] = 0.0;

        for (int k = 1; k < M; ++k) {
            const OperatorRow& r = op[k];
            sys.sub[k] = -th * grid.dtau * r.lower;
            sys.diag[k] = 1.0 - th * grid.dtau * r.center;
            sys.super[k] = -th * grid.dtau * r.upper;
            double rhs = old_level[k];
            if (th < 1.0) {
                double lu = r.lower * old_level[k - 1] + r.center * old_level[k] +
                            r.upper * old_level[k + 1];
                rhs += (1.0 - th) * grid.dtau * lu;
            }
            sys.rhs[k] = rhs;
        }

        if (grid.top == TopCondition::NeumannZero) {
            sys.sub[M] = -1.0;
            sys.diag[M] = 1.0;
            sys.rhs[M] = 0.0;
        } else {
            sys.sub[M] = 0.0;
            sys.diag[M] = 1.0;
            sys.rhs[M] = 1.0;
        }
        sys.super[M] = 0.0;

        s.values.push_back(solve_tridiagonal(sys));
        s.times.push_back(i * grid.dtau);

        if (i % 10 == 0 || i == N) {
            for (double u : s.values.back()) {
                if (!std::isfinite(u) || u < -1e-9 || u > 1.0 + 1e-9)
                    throw std::runtime_error(
                        "solve_hitting_prob: probability left [0, 1] at step " + std::to_string(i));
            }
        }
    }
    return s;
}

double price_from_u(const HittingProbSurface& surface, const VolatilityModel& model, double tau,
                    double y) {
    if (y <= 0.0) return 0.0;
    double x = model.f_inv(y);
    const double t_max = surface.times.back();
    const double x_max = surface.xs.back();
    if (tau < -1e-12 || tau > t_max + 1e-12)
        throw std::out_of_range("price_from_u: tau outside the stored surface");
    if (!(x >= 0.0) || x > x_max + 1e-12)
        throw std::out_of_range("price_from_u: f_inv(y) lands outside the transformed grid");

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

    double v00 = surface.values[i][k], v01 = surface.values[i][k + 1];
    double v10 = surface.values[i + 1][k], v11 = surface.values[i + 1][k + 1];
    double lo = v00 + wx * (v01 - v00);
    double hi = v10 + wx * (v11 - v10);
    return y * (lo + wt * (hi - lo));
}

HittingGrid default_hitting_grid(const VolatilityModel& model, double maturity) {
    HittingGrid g;
    g.maturity = maturity;
    g.dtau = 0.01;
    if (model.id == "logpow" && model.params.at("p") < 0.5) {
        g.x_max = 8.0;
        g.dx = 0.001;
    } else {
        g.x_max = 4.0;
        g.dx = 0.02;
    }
    return g;
}

}  // namespace bubblefd
