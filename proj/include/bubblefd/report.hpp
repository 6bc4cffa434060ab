#pragma once

#include "bubblefd/model.hpp"
#include "bubblefd/pde.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bubblefd {

// Everything needed to replay one experiment. Serialized as '# key=value'
// metadata lines at the top of CSV output; parsing those lines back and
// re-running reproduces the file byte for byte. wall_ms is runtime telemetry
// and deliberately stays out of the serialized block.
struct RunRecord {
    std::string tool_version;
    int table = 0;  // benchmark preset id (1..3); 0 for freeform runs
    std::string model;
    std::map<std::string, double> params;  // a, nu | p | a, l | j
    SolverConfig grid{10.0, 0.05, 0.01, 1.0, 1.0};
    double x_max = 4.0;
    double dx = 0.02;
    double tau = 1.0;
    std::string precision = "2";  // "2" or "full"
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
};

// Presets for the three benchmark tables: 1 = CEV (a=0.5, nu=1),
// 2 = log-power p=1, 3 = log-power p=0.1 (wider transformed grid).
RunRecord table_preset(int id);

// Query prices at y = 1.00, 1.50, ..., 5.00.
std::vector<double> table_query_points();

VolatilityModel record_model(const RunRecord& rec);

std::string metadata_block(const RunRecord& rec);
bool parse_metadata_block(const std::string& text, RunRecord& out);

// CSV with header y,ekstrom,song_yang,cetin,theta_j,this_study[,exact],vol_pct.
// The exact column appears only for models with a closed-form forward.
// precision "full" appends a *_full column set at full double precision.
std::string build_table_csv(const RunRecord& rec);

// CSV with header tau,theta_j[,theta0_exact]; the closed-form column appears
// when the model has one, unless with_theta0 is false.
std::string build_theta_curve_csv(const RunRecord& rec, double j, bool with_theta0);

}  // namespace bubblefd
