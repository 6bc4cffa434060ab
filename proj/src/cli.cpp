#include "bubblefd/cli.hpp"

#include "bubblefd/boundary.hpp"
#include "bubblefd/hitting.hpp"
#include "bubblefd/mc.hpp"
#include "bubblefd/report.hpp"
#include "bubblefd/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bubblefd {

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Translate a plain key=value file into flag tokens for one subcommand.
// CLI11's own config reader does not reach subcommand options from a flat
// file, so the file is replayed through the normal parser instead: tokens go
// in front of the explicit arguments and last-one-wins makes flags override.
std::vector<std::string> config_tokens(const std::string& path, const CLI::App* sub) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read config file: " + path);
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::vector<std::string> toks;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto where = [&] { return path + ":" + std::to_string(lineno); };
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(where() + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || key == "config")
            throw std::invalid_argument(where() + ": bad key '" + key + "'");
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw std::invalid_argument(where() + ": unknown key '" + key + "' for '" +
                                        sub->get_name() + "'");
        if (opt->get_expected_min() == 0) {
            if (val == "true" || val == "1" || val == "yes") {
                toks.push_back("--" + key);
            } else if (!(val == "false" || val == "0" || val == "no")) {
                throw std::invalid_argument(where() + ": flag '" + key + "' wants true/false");
            }
        } else {
            toks.push_back("--" + key);
            toks.push_back(val);
        }
    }
    return toks;
}

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

VolatilityModel state_model(const CliState& st) {
    if (st.model == "cev") return make_cev(st.a, st.nu);
    if (st.model == "qnv") return make_qnv(st.a, st.l);
    if (st.model == "logpow") return make_log_power(st.p);
    throw std::invalid_argument("unknown model '" + st.model + "'");
}

RunRecord record_from_state(const CliState& st) {
    RunRecord rec;
    rec.table = 0;
    rec.model = st.model;
    if (st.model == "cev") rec.params = {{"a", st.a}, {"nu", st.nu}};
    else if (st.model == "qnv") rec.params = {{"a", st.a}, {"l", st.l}};
    else rec.params = {{"p", st.p}};
    rec.grid = st.grid;
    if (st.x_max > 0.0) rec.x_max = st.x_max;
    if (st.dx > 0.0) rec.dx = st.dx;
    rec.tau = st.tau;
    rec.precision = st.precision;
    return rec;
}

BoundaryScheme named_scheme(const std::string& name, const VolatilityModel& model,
                            const SolverConfig& cfg) {
    if (name == "neumann") return neumann_scheme();
    if (name == "dirichlet-zero") return dirichlet_zero_scheme();
    if (name == "integral-infinity") return integral_infinity_scheme(model, cfg);
    if (name == "theta-j") return theta_j_scheme(model, cfg);
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open output file '" + path + "'");
    file << text;
    file.flush();
    if (!file) throw IoError("write to '" + path + "' failed");
}

HittingGrid state_hitting_grid(const CliState& st, const VolatilityModel& model) {
    HittingGrid g = default_hitting_grid(model, st.grid.maturity);
    g.dtau = st.grid.dtau;
    g.theta = st.grid.theta;
    if (st.x_max > 0.0) g.x_max = st.x_max;
    if (st.dx > 0.0) g.dx = st.dx;
    if (st.dirichlet_top) g.top = TopCondition::DirichletOne;
    return g;
}

int cmd_price(const CliState& st, std::ostream& out) {
    VolatilityModel model = state_model(st);
    double price = 0.0;
    if (st.scheme == "exact") {
        if (!model.closed_forward)
            throw std::invalid_argument("price: model '" + model.id + "' has no closed form");
        price = st.y <= 0.0 ? 0.0 : model.closed_forward(st.tau, st.y);
    } else if (st.scheme == "cetin") {
        HittingProbSurface u = solve_hitting_prob(model, state_hitting_grid(st, model));
        price = price_from_u(u, model, st.tau, st.y);
    } else {
        PriceSurface s = march(model, st.grid, named_scheme(st.scheme, model, st.grid));
        price = sample(s, st.tau, st.y);
    }
    out << (st.precision == "full" ? fmt_exact(price) : fmt_fixed(price, 2)) << "\n";
    return kOk;
}

struct GridOverrides {
    bool n = false, dy = false, dtau = false, maturity = false, theta = false;
    bool x_max = false, dx = false, tau = false;
};

int cmd_table(const CliState& st, const GridOverrides& ov, std::ostream& out) {
    RunRecord rec = table_preset(st.table);
    rec.precision = st.precision;
    if (ov.n) rec.grid.n = st.grid.n;
    if (ov.dy) rec.grid.dy = st.grid.dy;
    if (ov.dtau) rec.grid.dtau = st.grid.dtau;
    if (ov.maturity) rec.grid.maturity = st.grid.maturity;
    if (ov.theta) rec.grid.theta = st.grid.theta;
    if (ov.x_max) rec.x_max = st.x_max;
    if (ov.dx) rec.dx = st.dx;
    if (ov.tau) rec.tau = st.tau;
    write_output(build_table_csv(rec), st.out_path, out);
    return kOk;
}

int cmd_theta_curve(const CliState& st, std::ostream& out) {
    RunRecord rec = record_from_state(st);
    VolatilityModel model = record_model(rec);
    double j = st.j > 0.0 ? st.j : model.f_inv(rec.grid.n);
    write_output(build_theta_curve_csv(rec, j, !st.no_theta0), st.out_path, out);
    return kOk;
}

int cmd_validate(const CliState& st, std::ostream& out) {
    VolatilityModel model = state_model(st);
    StrictLmResult r = strict_lm_check(model);
    out << "model=" << model.id << "\n";
    out << "strict=" << (r.is_strict ? "yes" : "no") << "\n";
    out << "tail_integral=" << fmt_exact(r.integral) << "\n";
    double rt = 0.0;
    for (double y = 0.1; y <= 1e6; y *= 10.0) {
        rt = std::max(rt, std::abs(model.f(model.f_inv(y)) - y) / std::max(1.0, y));
    }
    out << "roundtrip_error=" << fmt_exact(rt) << "\n";
    if (r.quadrature_issue) out << "quadrature_issue=yes\n";
    return r.is_strict ? kOk : kNumerical;
}

int cmd_mc_check(const CliState& st, std::ostream& out) {
    VolatilityModel model = state_model(st);
    McConfig cfg{st.paths, st.steps, st.seed, st.antithetic};
    McResult res = simulate_forward(model, st.y0, st.grid.maturity, cfg);

    double ref;
    std::string ref_kind;
    if (model.closed_forward) {
        ref = model.closed_forward(st.grid.maturity, st.y0);
        ref_kind = "closed_form";
    } else {
        PriceSurface s = march(model, st.grid, integral_infinity_scheme(model, st.grid));
        ref = sample(s, st.grid.maturity, st.y0);
        ref_kind = "integral_infinity";
    }

    double diff = std::abs(res.mean - ref);
    double band = 3.0 * res.std_err + 0.02;
    out << "mean=" << fmt_exact(res.mean) << "\n";
    out << "std_err=" << fmt_exact(res.std_err) << "\n";
    out << "absorbed_frac=" << fmt_exact(res.absorbed_frac) << "\n";
    out << "reference=" << fmt_exact(ref) << "\n";
    out << "reference_kind=" << ref_kind << "\n";
    out << "abs_error=" << fmt_exact(diff) << "\n";
    if (res.std_err > 0.0) out << "z_score=" << fmt_exact((res.mean - ref) / res.std_err) << "\n";
    out << "verdict=" << (diff <= band ? "ok" : "deviation") << "\n";
    return diff <= band ? kOk : kNumerical;
}

int run_cli_impl(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                 CliState* state_out) {
    CliState st;
    GridOverrides ov;

    CLI::App app{"Forward prices for strict local martingale diffusions with selectable far-boundary treatments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    // repeated options keep the last value, which lets config-file tokens be
    // replayed ahead of the explicit flags below
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path;

    std::vector<CLI::Option*> a_opts;
    auto add_model_opts = [&](CLI::App* sub) {
        sub->add_option("--model", st.model, "Volatility model")
            ->check(CLI::IsMember({"cev", "qnv", "logpow"}))
            ->capture_default_str();
        a_opts.push_back(
            sub->add_option("-a,--alpha", st.a, "Scale coefficient (default 0.5 for cev, 1.0 for qnv)"));
        sub->add_option("--nu", st.nu, "Tail exponent (cev)")->capture_default_str();
        sub->add_option("-l,--lower", st.l, "Negative root of the quadratic (qnv)")
            ->capture_default_str();
        sub->add_option("-p,--power", st.p, "Log exponent (logpow)")->capture_default_str();
    };
    auto add_grid_opts = [&](CLI::App* sub) {
        ov.n = ov.dy = ov.dtau = ov.maturity = ov.theta = false;
        sub->add_option("--n", st.grid.n, "Truncation level of the price grid")->capture_default_str();
        sub->add_option("--dy", st.grid.dy, "Price step")->capture_default_str();
        sub->add_option("--dtau", st.grid.dtau, "Time step")->capture_default_str();
        sub->add_option("-T,--maturity", st.grid.maturity, "Longest horizon to march to")
            ->capture_default_str();
        sub->add_option("--theta", st.grid.theta, "Implicitness weight in [0,1]")
            ->capture_default_str();
    };
    auto add_transform_opts = [&](CLI::App* sub) {
        sub->add_option("--x-max", st.x_max, "Transformed-grid truncation (0 = model default)")
            ->capture_default_str();
        sub->add_option("--dx", st.dx, "Transformed-grid step (0 = model default)")
            ->capture_default_str();
        sub->add_flag("--dirichlet-top", st.dirichlet_top,
                      "Pin the transformed solution to 1 at the top instead of zero slope");
    };

    CLI::App* price = app.add_subcommand("price", "Price the forward at one (tau, y) point");
    add_model_opts(price);
    add_grid_opts(price);
    add_transform_opts(price);
    price->add_option("--scheme", st.scheme, "Far-boundary treatment")
        ->check(CLI::IsMember({"neumann", "dirichlet-zero", "integral-infinity", "theta-j", "cetin",
                               "exact"}))
        ->capture_default_str();
    price->add_option("--tau", st.tau, "Time to maturity")->capture_default_str();
    price->add_option("-y,--y", st.y, "Current price level")->capture_default_str();
    price->add_option("--precision", st.precision, "Output precision")
        ->check(CLI::IsMember({"2", "full"}))
        ->capture_default_str();
    price->add_option("--config", config_path,
                      "Key=value file supplying defaults; explicit flags win");

    CLI::App* table = app.add_subcommand(
        "table", "Tabulate all boundary treatments side by side over a range of price levels");
    table->add_option("--table", st.table, "Preset: 1=cev, 2=logpow p=1, 3=logpow p=0.1")
        ->check(CLI::IsMember({1, 2, 3}))
        ->capture_default_str();
    CLI::Option* o_n = table->add_option("--n", st.grid.n, "Truncation level override");
    CLI::Option* o_dy = table->add_option("--dy", st.grid.dy, "Price step override");
    CLI::Option* o_dtau = table->add_option("--dtau", st.grid.dtau, "Time step override");
    CLI::Option* o_mat = table->add_option("-T,--maturity", st.grid.maturity, "Horizon override");
    CLI::Option* o_theta = table->add_option("--theta", st.grid.theta, "Implicitness override");
    CLI::Option* o_xmax = table->add_option("--x-max", st.x_max, "Transformed truncation override");
    CLI::Option* o_dx = table->add_option("--dx", st.dx, "Transformed step override");
    CLI::Option* o_tau = table->add_option("--tau", st.tau, "Report horizon override");
    table->add_option("--precision", st.precision, "Output precision")
        ->check(CLI::IsMember({"2", "full"}))
        ->capture_default_str();
    table->add_option("-o,--out", st.out_path, "Write the table to a file instead of stdout");
    table->add_option("--config", config_path,
                      "Key=value file supplying defaults; explicit flags win");

    CLI::App* curve = app.add_subcommand(
        "theta-curve", "Tabulate the knocked-out expectation used as a far-boundary value");
    add_model_opts(curve);
    add_grid_opts(curve);
    curve->add_option("-j,--j", st.j, "Transformed level defining the knock-out cap (0 = grid top)")
        ->capture_default_str();
    curve->add_flag("--no-theta0", st.no_theta0, "Skip the closed-form column");
    curve->add_option("-o,--out", st.out_path, "Write the curve to a file instead of stdout");
    curve->add_option("--config", config_path,
                      "Key=value file supplying defaults; explicit flags win");

    CLI::App* validate = app.add_subcommand(
        "validate", "Check that the model prices as a strict local martingale");
    add_model_opts(validate);
    validate->add_option("--config", config_path,
                      "Key=value file supplying defaults; explicit flags win");

    CLI::App* mc = app.add_subcommand("mc-check", "Cross-check a forward price against simulation");
    add_model_opts(mc);
    add_grid_opts(mc);
    mc->add_option("--y0", st.y0, "Starting price level")->capture_default_str();
    mc->add_option("--paths", st.paths, "Number of paths")->capture_default_str();
    mc->add_option("--steps", st.steps, "Time steps per path")->capture_default_str();
    mc->add_option("--seed", st.seed, "Simulation seed")->capture_default_str();
    mc->add_flag("--antithetic", st.antithetic, "Average mirrored path pairs");
    mc->add_option("--config", config_path,
                      "Key=value file supplying defaults; explicit flags win");

    std::vector<std::string> tokens(argv + 1, argv + argc);
    for (int round = 0;; ++round) {
        try {
            app.parse(std::vector<std::string>(tokens.rbegin(), tokens.rend()));
        } catch (const CLI::ParseError& e) {
            int code = app.exit(e, out, err);
            return code == 0 ? kOk : kUsage;
        }
        if (round > 0 || config_path.empty()) break;
        const CLI::App* ran = app.get_subcommands().front();
        std::vector<std::string> extra;
        try {
            extra = config_tokens(config_path, ran);
        } catch (const IoError& e) {
            err << "error: " << e.what() << "\n";
            return kIo;
        } catch (const std::invalid_argument& e) {
            err << "error: " << e.what() << "\n";
            return kUsage;
        }
        if (extra.empty()) break;
        auto at = std::find(tokens.begin(), tokens.end(), ran->get_name());
        tokens.insert(at == tokens.end() ? tokens.end() : at + 1, extra.begin(), extra.end());
        st = CliState{};
    }

    bool a_given = false;
    for (const CLI::Option* o : a_opts) a_given = a_given || o->count() > 0;
    if (!a_given && st.model == "qnv") st.a = 1.0;

    if (price->parsed()) st.cmd = "price";
    else if (table->parsed()) st.cmd = "table";
    else if (curve->parsed()) st.cmd = "theta-curve";
    else if (validate->parsed()) st.cmd = "validate";
    else if (mc->parsed()) st.cmd = "mc-check";

    ov.n = o_n->count() > 0;
    ov.dy = o_dy->count() > 0;
    ov.dtau = o_dtau->count() > 0;
    ov.maturity = o_mat->count() > 0;
    ov.theta = o_theta->count() > 0;
    ov.x_max = o_xmax->count() > 0;
    ov.dx = o_dx->count() > 0;
    ov.tau = o_tau->count() > 0;

    if (state_out) *state_out = st;

    auto started = std::chrono::steady_clock::now();
    int code = kOk;
    try {
        if (st.cmd == "price") code = cmd_price(st, out);
        else if (st.cmd == "table") code = cmd_table(st, ov, out);
        else if (st.cmd == "theta-curve") code = cmd_theta_curve(st, out);
        else if (st.cmd == "validate") code = cmd_validate(st, out);
        else if (st.cmd == "mc-check") code = cmd_mc_check(st, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    }

    if (st.cmd == "table" || st.cmd == "theta-curve" || st.cmd == "mc-check") {
        auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            started);
        err << "wall_ms=" << fmt_fixed(ms.count(), 1) << "\n";
    }
    return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            CliState* state_out) {
    std::vector<std::string> owned = args;
    std::vector<const char*> argv;
    argv.push_back("bubblefd");
    for (const std::string& s : owned) argv.push_back(s.c_str());
    return run_cli_impl(static_cast<int>(argv.size()), argv.data(), out, err, state_out);
}

int run_cli(int argc, char** argv) { return run_cli_impl(argc, argv, std::cout, std::cerr, nullptr); }

}  // namespace bubblefd
