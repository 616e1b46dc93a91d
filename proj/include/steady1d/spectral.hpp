#pragma once

// Generalized eigenvalue computations: the principal eigenvalue of the
// Neumann problem with indefinite weight m, the linearized-stability
// eigenproblem with boundary mass, Dirichlet eigenvalues on subintervals,
// the lambda* closed form, and upper-bound estimators for the variational
// constants lambda_a, lambda_b, lambda_s.

#include <cstdint>
#include <utility>
#include <vector>

#include "steady1d/functional.hpp"

namespace steady1d {

struct PrincipalEigen {
    double value = 0.0;            // meaningful only when !infinite
    bool infinite = false;         // m <= 0 everywhere: empty constraint set
    std::vector<double> eigfun;    // normalized so that sum w m phi^2 = 1
};

PrincipalEigen lambda1(const Discretization& d);

enum class StabilityVerdict { Stable, Unstable, Marginal };

struct StabilityReport {
    double gamma1 = 0.0;
    std::vector<double> psi1;  // positive, interior+boundary mass norm 1
    StabilityVerdict verdict = StabilityVerdict::Marginal;
};

// Smallest eigenvalue of  jacobian(u, lambda) psi = gamma (M + M_boundary) psi.
StabilityReport stability_eigen(const Discretization& d, const State& s,
                                const Exponents& e, double floor_eps = 1e-10);

// Principal eigenvalue of -psi'' - lambda m psi = mu psi with zero Dirichlet
// data at both ends of the subinterval [alpha, beta] (grid-aligned).
double dirichlet_mu1(const Discretization& d, double alpha, double beta,
                     double lambda);

// A priori bound: largest |lambda| compatible with nonnegative Dirichlet
// principal eigenvalues on the configured subintervals.
double apriori_Lambda(const Discretization& d,
                      std::pair<double, double> Dplus,
                      std::pair<double, double> Dminus);

double lambda_star(const Discretization& d, const Exponents& e);

struct VariationalBounds {
    double lambda_a_ub = 0.0;
    double lambda_b_ub = 0.0;
    double lambda_s_ub = 0.0;
    // Smallest eigenvalue of (K - lambda M_m, M) at each probe lambda.
    std::vector<double> coercivity_min_eigs;
};

VariationalBounds variational_bounds(const Discretization& d, const Exponents& e,
                                     const std::vector<double>& lambda_probe,
                                     int restarts, std::uint64_t seed = 1234);

}  // namespace steady1d
