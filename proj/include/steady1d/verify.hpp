#pragma once

// Discrete comparison-principle checker on subintervals with mixed
// Dirichlet / nonlinear-flux ends, plus positivity certification.

#include <functional>
#include <string>
#include <vector>

#include "steady1d/grid.hpp"

namespace steady1d {

struct ComparisonProblem {
    const Discretization* d = nullptr;
    int i_lo = 0;               // subgrid [i_lo .. i_hi]
    int i_hi = 0;
    bool dirichlet_left = false;
    bool dirichlet_right = false;
    std::function<double(double x, double t)> f;   // interior reaction
    std::function<double(double t)> g_left;        // flux reaction, non-Dirichlet ends
    std::function<double(double t)> g_right;
};

struct ComparisonResult {
    bool hypotheses_ok = false;   // f(x,t)/t strictly decreasing, g(t)/t non-increasing
    bool sub_ok = false;          // u has nonpositive lumped residual
    bool super_ok = false;        // v has nonnegative lumped residual
    bool ordered = false;         // u <= v nodewise (within tolerance)
    double max_violation = 0.0;   // max(u - v)
    std::string failed_clause;    // empty when everything holds
};

// Checks the ordering u <= v for a subsolution u and supersolution v of
// -w'' = f(x, w) on the subinterval, with w = 0 at Dirichlet ends and
// flux w' = g(w) at the others. Quotient monotonicity is sampled on a
// geometric grid of t values up to 10x the sup of the inputs.
ComparisonResult comparison_check(const ComparisonProblem& cp,
                                  const std::vector<double>& u,
                                  const std::vector<double>& v,
                                  double tol = 1e-9);

enum class PositivityVerdict { Positive, TouchesZero, NotNontrivial };

// Certifies nonnegativity: throws NegativeState when min u < -tol, where
// tol = pos_tol * sup|u|.
PositivityVerdict positivity_check(const std::vector<double>& u,
                                   double pos_tol = 1e-12);

}  // namespace steady1d
