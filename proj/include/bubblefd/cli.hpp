#pragma once

#include "bubblefd/pde.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bubblefd {

// Exit codes: 0 success, 2 usage, 3 numerical failure, 4 I/O.
enum ExitCode { kOk = 0, kUsage = 2, kNumerical = 3, kIo = 4 };

// Flag values shared by the subcommands; defaults match the benchmark grid.
struct CliState {
    std::string cmd;  // subcommand that ran

    std::string model = "cev";
    double a = 0.5;
    double nu = 1.0;
    double l = -1.0;
    double p = 1.0;

    SolverConfig grid{10.0, 0.05, 0.01, 1.0, 1.0};

    double x_max = 0.0;  // 0: per-model default
    double dx = 0.0;
    bool dirichlet_top = false;

    std::string scheme = "integral-infinity";
    double tau = 1.0;
    double y = 1.0;
    double j = 0.0;  // 0: f_inv(n)
    std::string precision = "2";

    int table = 1;
    std::string out_path;  // empty: stdout
    bool no_theta0 = false;

    double y0 = 2.0;
    long paths = 100000;
    long steps = 2000;
    std::uint64_t seed = 12345;
    bool antithetic = false;
};

// Parses args (without the program name) and runs the chosen subcommand,
// writing results to out and diagnostics to err. Never throws. state_out,
// when given, receives the post-parse flag values.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            CliState* state_out = nullptr);

// main() adapter: forwards argv[1..] to the overload above with cout/cerr.
int run_cli(int argc, char** argv);

}  // namespace bubblefd
