#pragma once

// Energy minimization over intersections of fibering classes with the
// sign-constraint sets B > 0, E < 0, A > 0, plus small-lambda /
// large-lambda asymptotic comparisons against the limit profiles.

#include <cstdint>
#include <string>
#include <vector>

#include "steady1d/solve.hpp"

namespace steady1d {

struct MinimizerOptions {
    int restarts = 16;
    std::uint64_t seed = 2024;
    int descent_iters = 300;
    NewtonOptions newton;
};

struct MinimizerResult {
    State state;
    double energy = 0.0;           // I at the minimizer
    NehariClass cls = NehariClass::OffNehari;
    double constraint_margin = 0.0;  // value of the active sign constraint
    double residual_norm = 0.0;
    int candidates_tried = 0;
};

// u0-type: minimize I over N+ with B > 0 (small-amplitude family).
MinimizerResult min_Nplus_Bplus(const Discretization& d, const Exponents& e,
                                double lambda, const MinimizerOptions& opts = {});

// u1-type: minimize I over N+ with E < 0.
MinimizerResult min_Nplus_Eminus(const Discretization& d, const Exponents& e,
                                 double lambda, const MinimizerOptions& opts = {});

// u2-type: minimize I over N- with A > 0.
MinimizerResult min_Nminus_Aplus(const Discretization& d, const Exponents& e,
                                 double lambda, const MinimizerOptions& opts = {});

struct AsymptoticReport {
    std::vector<double> lambdas;
    std::vector<double> sup_norms;       // of the raw minimizers
    std::vector<double> distances;       // scaled minimizer vs limit profile
    double rate = 0.0;                   // log-log slope of the distances
};

// Rescales each minimizer by lambda^scaling_exponent and reports sup-norm
// distances to the limit profile plus the empirical convergence rate.
AsymptoticReport asymptotic_report(const std::vector<double>& lambdas,
                                   const std::vector<MinimizerResult>& results,
                                   const std::vector<double>& limit_profile,
                                   double scaling_exponent);

}  // namespace steady1d
