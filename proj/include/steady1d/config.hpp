#pragma once

// JSON run configuration: schema validation (unknown keys rejected),
// parsing into typed options, and grid construction.

#include <optional>
#include <string>
#include <vector>

#include "steady1d/continuation.hpp"
#include "steady1d/nehari_min.hpp"

namespace steady1d {

struct SeedSpec {
    std::string type;     // "constant" (trivial line) or "nehari"
    double t = 0.0;       // constant seeds: mean value
    std::string family;   // nehari seeds: "u0", "u1", "u2"
    double lambda = 0.0;  // nehari seeds: where to start
    int direction = 1;
    std::string label;
};

struct RunConfig {
    Exponents exponents{3.0, 1.5};
    int n = 401;
    WeightSpec m = WeightSpec::constant(1.0);
    WeightSpec a = WeightSpec::constant(-1.0);
    double b0 = 0.0;
    double b1 = 0.0;
    ProblemVariant variant = ProblemVariant::P;
    NewtonOptions solver;
    std::optional<double> lambda_value;
    std::vector<double> lambda_sweep;
    TraceOptions continuation;
    std::vector<SeedSpec> seeds;
    struct Reduce {
        double t_min = 0.0, t_max = 1.0;
        int t_points = 0;
        std::vector<double> lambdas;
    } reduce;
    std::optional<std::pair<double, double>> Dplus, Dminus;
    std::optional<WeightSpec> initial;  // starting guess for direct solves
    std::string out_dir = "out";

    Discretization grid() const { return build_grid(n, m, a, b0, b1); }
};

// Throws ConfigError on malformed JSON, schema violations, or unknown keys.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

}  // namespace steady1d
