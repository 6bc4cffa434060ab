#include "bubblefd/pde.hpp"

#include "bubblefd/boundary.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bubblefd {

namespace {

int checked_ratio(double total, double step, const char* what) {
    double ratio = total / step;
    int count = static_cast<int>(std::lround(ratio));
    if (count < 1 || std::abs(ratio - count) > 1e-6 * ratio + 1e-9)
        throw std::invalid_argument(std::string("SolverConfig: ") + what + " must divide evenly");
    return count;
}

void guard_finite(const std::vector<double>& level, int step) {
    for (std::size_t k = 0; k < level.size(); ++k) {
        if (!std::isfinite(level[k]))
            throw std::runtime_error("march: solution blew up at step " + std::to_string(step) +
                                     ", node " + std::to_string(k));
    }
}

}  // namespace

int SolverConfig::space_nodes() const { return checked_ratio(n, dy, "n/dy"); }

int SolverConfig::time_steps() const { return checked_ratio(maturity, dtau, "maturity/dtau"); }

void SolverConfig::validate() const {
    if (!(n > 0.0) || !(dy > 0.0) || !(dtau > 0.0) || !(maturity > 0.0))
        throw std::invalid_argument("SolverConfig: n, dy, dtau, maturity must be positive");
    if (theta < 0.0 || theta > 1.0)
        throw std::invalid_argument("SolverConfig: theta must lie in [0, 1]");
    if (space_nodes() < 3) throw std::invalid_argument("SolverConfig: need at least 3 intervals");
    time_steps();
}

// ======= assembly =======

TridiagonalSystem assemble_interior(const VolatilityModel& model, const SolverConfig& cfg,
                                    int step, const PriceSurface& surface) {
    if (step < 1 || static_cast<std::size_t>(step) > surface.values.size())
        throw std::invalid_argument("assemble_interior: step out of range");

    const int M = cfg.space_nodes();
    const double th = cfg.theta;
    const std::vector<double>& old_level = surface.values[step - 1];

    TridiagonalSystem sys;
    sys.sub.assign(M + 1, 0.0);
    sys.diag.assign(M + 1, 0.0);
    sys.super.assign(M + 1, 0.0);
    sys.rhs.assign(M + 1, 0.0);

    // absorption at 0
    sys.diag[0] = 1.0;
    sys.rhs[0] = 0.0;

    for (int k = 1; k < M; ++k) {
        double y = k * cfg.dy;
        double s = model.sigma(y);
        double lam = 0.5 * s * s * cfg.dtau / (cfg.dy * cfg.dy);
        sys.sub[k] = -th * lam;
        sys.diag[k] = 1.0 + 2.0 * th * lam;
        sys.super[k] = -th * lam;
        double expl = (1.0 - th) * lam *
                      (old_level[k + 1] - 2.0 * old_level[k] + old_level[k - 1]);
        sys.rhs[k] = old_level[k] + expl;
    }
    // row M belongs to the far-boundary scheme
    return sys;
}

// ======= tridiagonal solve (Thomas) =======

std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys) {
    const std::size_t m = sys.diag.size();
    if (sys.sub.size() != m || sys.super.size() != m || sys.rhs.size() != m)
        throw std::invalid_argument("solve_tridiagonal: inconsistent lengths");

    std::vector<double> cp(m), dp(m), x(m);
    double pivot = sys.diag[0];
    if (std::abs(pivot) < 1e-300)
        throw std::runtime_error("solve_tridiagonal: singular pivot at row 0");
    cp[0] = sys.super[0] / pivot;
    dp[0] = sys.rhs[0] / pivot;

    for (std::size_t k = 1; k < m; ++k) {
        pivot = sys.diag[k] - sys.sub[k] * cp[k - 1];
        if (std::abs(pivot) < 1e-300)
            throw std::runtime_error("solve_tridiagonal: singular pivot at row " + std::to_string(k));
        cp[k] = sys.super[k] / pivot;
        dp[k] = (sys.rhs[k] - sys.sub[k] * dp[k - 1]) / pivot;
    }

    x[m - 1] = dp[m - 1];
    for (std::size_t k = m - 1; k-- > 0;) x[k] = dp[k] - cp[k] * x[k + 1];
    return x;
}

// ======= time march =======

PriceSurface march(const VolatilityModel& model, const SolverConfig& cfg,
                   const BoundaryScheme& scheme, bool assume_strict) {
    cfg.validate();
    if (scheme.kind == FarBoundary::CetinRoute)
        throw std::invalid_argument("march: CetinRoute prices through the transformed solver");
    if (!assume_strict) {
        StrictLmResult d = strict_lm_check(model);
        if (!d.is_strict)
            throw std::invalid_argument("march: tail integral diverges; pass assume_strict to override");
    }

    const int M = cfg.space_nodes();
    const int N = cfg.time_steps();

    PriceSurface s;
    s.nodes.resize(M + 1);
    for (int k = 0; k <= M; ++k) s.nodes[k] = k * cfg.dy;
    s.times.reserve(N + 1);
    s.times.push_back(0.0);
    s.values.reserve(N + 1);
    s.values.push_back(s.nodes);  // payoff v(0, y) = y

    for (int i = 1; i <= N; ++i) {
        TridiagonalSystem sys = assemble_interior(model, cfg, i, s);
        BoundaryRow row = far_boundary_row(scheme, cfg, i, s.values[i - 1]);
        sys.sub[M] = row.sub;
        sys.diag[M] = row.diag;
        sys.super[M] = 0.0;
        sys.rhs[M] = row.rhs;

        s.values.push_back(solve_tridiagonal(sys));
        s.times.push_back(i * cfg.dtau);
        if (i % 10 == 0 || i == N) guard_finite(s.values.back(), i);
    }
    return s;
}

double sample(const PriceSurface& surface, double tau, double y) {
    const double t_max = surface.times.back();
    const double y_max = surface.nodes.back();
    if (tau < -1e-12 || tau > t_max + 1e-12 || y < -1e-12 || y > y_max + 1e-12)
        throw std::out_of_range("sample: query outside the stored surface");

    auto locate = [](const std::vector<double>& grid, double v, std::size_t& idx, double& w) {
        if (v <= grid.front()) { idx = 0; w = 0.0; return; }
        if (v >= grid.back()) { idx = grid.size() - 2; w = 1.0; return; }
        std::size_t hi = 1;
        while (grid[hi] < v) ++hi;
        idx = hi - 1;
        w = (v - grid[idx]) / (grid[idx + 1] - grid[idx]);
    };

    std::size_t i, k;
    double wt, wy;
    locate(surface.times, tau, i, wt);
    locate(surface.nodes, y, k, wy);

    double v00 = surface.values[i][k], v01 = surface.values[i][k + 1];
    double v10 = surface.values[i + 1][k], v11 = surface.values[i + 1][k + 1];
    double lo = v00 + wy * (v01 - v00);
    double hi = v10 + wy * (v11 - v10);
    return lo + wt * (hi - lo);
}

}  // namespace bubblefd
