#pragma once

// Pseudo-arclength continuation of solution branches in (u, lambda), with
// per-point stability and fibering-class tags, fold detection, and a
// quadratic fold fit.

#include <string>
#include <vector>

#include "steady1d/solve.hpp"
#include "steady1d/spectral.hpp"

namespace steady1d {

struct BranchPoint {
    State state;
    double arclength = 0.0;
    double u_mean = 0.0;  // weighted mean, sum w_i u_i
    double u_min = 0.0;
    double u_max = 0.0;
    double h1_norm = 0.0;
    double gamma1 = 0.0;  // NaN when tagging is suspended
    StabilityVerdict verdict = StabilityVerdict::Marginal;
    NehariClass nehari = NehariClass::OffNehari;
    bool fold = false;    // lambda tangent changed sign entering this point
};

struct Branch {
    std::vector<BranchPoint> points;
    bool stalled = false;  // step control hit the minimum step mid-branch
    std::string label;
};

struct TraceOptions {
    double ds = 0.01;
    double ds_min = 1e-7;
    double ds_max = 0.05;
    int n_steps = 200;
    double lambda_abs_max = 0.12;
    double sup_cap = 1e3;
    double positivity_floor = 1e-10;  // min u below this suspends tagging
    bool reject_trivial = false;      // refuse corrector results on lambda = 0
    NewtonOptions newton;
    std::string label;
};

// Seed with a converged state, or with a trivial-line state (constant u,
// lambda = 0); in the latter case the initial tangent comes from the
// one-dimensional reduction. `direction` = +1/-1 selects the orientation.
Branch trace(const Discretization& d, const Exponents& e, const State& seed,
             int direction, const TraceOptions& opts);

struct FoldFit {
    double t_fold = 0.0;       // mean coordinate of the vertex
    double lambda_fold = 0.0;
    double lambda_pp = 0.0;    // second derivative of lambda along the mean
};

// Least-squares parabola lambda(u_mean) through the points surrounding
// branch.points[fold_index]; window = points within `half_width` indices.
// Throws InsufficientPoints when fewer than 5 points are available.
FoldFit fold_fit(const Branch& branch, int fold_index, int half_width = 10);

}  // namespace steady1d
