#include "bubblefd/report.hpp"

#include "bubblefd/boundary.hpp"
#include "bubblefd/hitting.hpp"
#include "bubblefd/version.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bubblefd {

namespace {

// shortest decimal string that recovers the exact double on re-parse
std::string fmt_exact(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt_fixed(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return std::string(buf);
}

bool parse_double(const std::string& text, double& out) {
    const char* b = text.data();
    const char* e = b + text.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc{} && res.ptr == e;
}

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

}  // namespace

RunRecord table_preset(int id) {
    RunRecord r;
    r.tool_version = kVersion;
    r.table = id;
    r.grid = {10.0, 0.05, 0.01, 1.0, 1.0};
    r.tau = 1.0;
    switch (id) {
        case 1:
            r.model = "cev";
            r.params = {{"a", 0.5}, {"nu", 1.0}};
            r.x_max = 4.0;
            r.dx = 0.02;
            break;
        case 2:
            r.model = "logpow";
            r.params = {{"p", 1.0}};
            r.x_max = 4.0;
            r.dx = 0.02;
            break;
        case 3:
            r.model = "logpow";
            r.params = {{"p", 0.1}};
            r.x_max = 8.0;
            r.dx = 0.001;
            break;
        default:
            throw std::invalid_argument("table_preset: table must be 1, 2, or 3");
    }
    return r;
}

std::vector<double> table_query_points() {
    std::vector<double> ys;
    for (int i = 0; i < 9; ++i) ys.push_back(1.0 + 0.5 * i);
    return ys;
}

VolatilityModel record_model(const RunRecord& rec) {
    auto get = [&](const char* key, double fallback) {
        auto it = rec.params.find(key);
        return it == rec.params.end() ? fallback : it->second;
    };
    if (rec.model == "cev") return make_cev(get("a", 0.5), get("nu", 1.0));
    if (rec.model == "qnv") return make_qnv(get("a", 1.0), get("l", -1.0));
    if (rec.model == "logpow") return make_log_power(get("p", 1.0));
    throw std::invalid_argument("record_model: unknown model '" + rec.model + "'");
}

std::string metadata_block(const RunRecord& rec) {
    std::ostringstream out;
    out << "# tool_version=" << (rec.tool_version.empty() ? kVersion : rec.tool_version) << "\n";
    out << "# table=" << rec.table << "\n";
    out << "# model=" << rec.model << "\n";
    for (const auto& [key, value] : rec.params) out << "# param_" << key << "=" << fmt_exact(value) << "\n";
    out << "# n=" << fmt_exact(rec.grid.n) << "\n";
    out << "# dy=" << fmt_exact(rec.grid.dy) << "\n";
    out << "# dtau=" << fmt_exact(rec.grid.dtau) << "\n";
    out << "# maturity=" << fmt_exact(rec.grid.maturity) << "\n";
    out << "# theta=" << fmt_exact(rec.grid.theta) << "\n";
    out << "# x_max=" << fmt_exact(rec.x_max) << "\n";
    out << "# dx=" << fmt_exact(rec.dx) << "\n";
    out << "# tau=" << fmt_exact(rec.tau) << "\n";
    out << "# precision=" << rec.precision << "\n";
    if (rec.seed != 0) out << "# seed=" << rec.seed << "\n";
    return out.str();
}

bool parse_metadata_block(const std::string& text, RunRecord& rec) {
    std::istringstream in(text);
    std::string line;
    bool saw_any = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#') break;
        if (line.size() < 3 || line[1] != ' ') return false;
        std::string body = line.substr(2);
        std::size_t eq = body.find('=');
        if (eq == std::string::npos) return false;
        std::string key = body.substr(0, eq);
        std::string value = body.substr(eq + 1);
        saw_any = true;

        double num = 0.0;
        if (key == "tool_version") rec.tool_version = value;
        else if (key == "model") rec.model = value;
        else if (key == "precision") rec.precision = value;
        else if (key == "table") {
            if (!parse_double(value, num)) return false;
            rec.table = static_cast<int>(num);
        } else if (key == "seed") {
            if (!parse_double(value, num)) return false;
            rec.seed = static_cast<std::uint64_t>(num);
        } else if (key.rfind("param_", 0) == 0) {
            if (!parse_double(value, num)) return false;
            rec.params[key.substr(6)] = num;
        } else if (key == "n") {
            if (!parse_double(value, rec.grid.n)) return false;
        } else if (key == "dy") {
            if (!parse_double(value, rec.grid.dy)) return false;
        } else if (key == "dtau") {
            if (!parse_double(value, rec.grid.dtau)) return false;
        } else if (key == "maturity") {
            if (!parse_double(value, rec.grid.maturity)) return false;
        } else if (key == "theta") {
            if (!parse_double(value, rec.grid.theta)) return false;
        } else if (key == "x_max") {
            if (!parse_double(value, rec.x_max)) return false;
        } else if (key == "dx") {
            if (!parse_double(value, rec.dx)) return false;
        } else if (key == "tau") {
            if (!parse_double(value, rec.tau)) return false;
        } else {
            return false;
        }
    }
    return saw_any;
}

std::string build_table_csv(const RunRecord& rec) {
    VolatilityModel model = record_model(rec);
    const SolverConfig& cfg = rec.grid;
    cfg.validate();

    PriceSurface one_sided = march(model, cfg, neumann_scheme());
    PriceSurface absorbing = march(model, cfg, dirichlet_zero_scheme());
    PriceSurface integral = march(model, cfg, integral_infinity_scheme(model, cfg));
    PriceSurface curve_fed = march(model, cfg, theta_j_scheme(model, cfg));

    HittingGrid hg{rec.x_max, rec.dx, cfg.dtau, cfg.maturity, cfg.theta, TopCondition::NeumannZero};
    HittingProbSurface u = solve_hitting_prob(model, hg);

    const bool with_exact = static_cast<bool>(model.closed_forward);
    const bool full = rec.precision == "full";

    std::ostringstream out;
    out << metadata_block(rec);
    out << "y,ekstrom,song_yang,cetin,theta_j,this_study";
    if (with_exact) out << ",exact";
    out << ",vol_pct";
    if (full) {
        out << ",ekstrom_full,song_yang_full,cetin_full,theta_j_full,this_study_full";
        if (with_exact) out << ",exact_full";
    }
    out << "\n";

    for (double y : table_query_points()) {
        double x = model.f_inv(y);
        if (x > hg.x_max) x = hg.x_max;  // truncated transformed grid; boundary value extends
        double c_ek = sample(one_sided, rec.tau, y);
        double c_sy = sample(absorbing, rec.tau, y);
        double c_ce = y * interp_u(u, rec.tau, x);
        double c_tj = sample(curve_fed, rec.tau, y);
        double c_ts = sample(integral, rec.tau, y);
        double c_ex = with_exact ? model.closed_forward(rec.tau, y) : 0.0;
        double vol = 100.0 * model.sigma(y) / y;

        out << fmt_fixed(y, 2) << ',' << fmt_fixed(c_ek, 2) << ',' << fmt_fixed(c_sy, 2) << ','
            << fmt_fixed(c_ce, 2) << ',' << fmt_fixed(c_tj, 2) << ',' << fmt_fixed(c_ts, 2);
        if (with_exact) out << ',' << fmt_fixed(c_ex, 2);
        out << ',' << fmt_fixed(vol, 1);
        if (full) {
            out << ',' << fmt_exact(c_ek) << ',' << fmt_exact(c_sy) << ',' << fmt_exact(c_ce)
                << ',' << fmt_exact(c_tj) << ',' << fmt_exact(c_ts);
            if (with_exact) out << ',' << fmt_exact(c_ex);
        }
        out << "\n";
    }
    return out.str();
}

std::string build_theta_curve_csv(const RunRecord& rec, double j, bool with_theta0) {
    VolatilityModel model = record_model(rec);
    rec.grid.validate();

    std::vector<double> curve = theta_j_curve(model, j, rec.grid);
    bool use_exact = with_theta0 && static_cast<bool>(model.closed_theta0);

    std::ostringstream out;
    out << metadata_block(rec);
    out << "tau,theta_j";
    if (use_exact) out << ",theta0_exact";
    out << "\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        double tau = static_cast<double>(i) * rec.grid.dtau;
        out << fmt_exact(tau) << ',' << fmt_exact(curve[i]);
        if (use_exact) out << ',' << fmt_exact(model.closed_theta0(tau));
        out << "\n";
    }
    return out.str();
}

}  // namespace bubblefd
