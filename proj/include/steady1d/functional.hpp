#pragma once

// The discrete energy I_lambda, its pieces E/A/B, the weak residual and
// tridiagonal Jacobian, and Nehari classification of states.

#include <optional>
#include <vector>

#include "steady1d/grid.hpp"

namespace steady1d {

struct State {
    std::vector<double> u;
    double lambda = 0.0;
};

struct EnergyBreakdown {
    double E = 0.0;  // int |u'|^2 - lambda int m u^2
    double A = 0.0;  // int a |u|^p
    double B = 0.0;  // b0 |u(0)|^q + b1 |u(1)|^q
    double I = 0.0;  // E/2 - lambda A/p - lambda B/q
    double J = 0.0;  // <I'(u), u> = E - lambda A - lambda B
    std::optional<double> S;  // defined when A >= 0 and B >= 0
};

EnergyBreakdown energy(const Discretization& d, const State& s,
                       const Exponents& e);

// Gradient of I_lambda; zero iff u is a discrete weak solution.
std::vector<double> residual(const Discretization& d, const State& s,
                             const Exponents& e);

// d/du of the residual. The |u|^{q-2} endpoint terms are floored at
// floor_eps to keep the derivative finite near u = 0.
SymTridiag jacobian(const Discretization& d, const State& s, const Exponents& e,
                    double floor_eps);

NehariClass nehari_classify(const Discretization& d, const State& s,
                            const Exponents& e, double tol_N = 1e-8);

std::optional<State> project_to_nehari(const Discretization& d, const State& s,
                                       const Exponents& e, NehariClass target);

// Signed power |u|^{r-1} u, with value 0 at u = 0.
double signed_pow(double u, double r);

}  // namespace steady1d
