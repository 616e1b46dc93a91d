#pragma once

// Damped Newton on the discrete weak residual, closed-form small-amplitude
// and large-amplitude limit profiles, and the one-dimensional reduction
// near the trivial branch: the zero-mean corrector v(lambda, t) and the
// reduced map Phi(lambda, t) with its derivatives.

#include <optional>
#include <vector>

#include "steady1d/functional.hpp"

namespace steady1d {

struct NewtonOptions {
    double tol_res = 1e-11;   // absolute sup-norm residual target
    int max_iter = 50;
    bool damping = true;
    double floor_eps = 1e-8;  // Jacobian floor for the |u|^{q-2} endpoint terms
};

struct NewtonResult {
    State state;
    int iterations = 0;
    double residual_norm = 0.0;
};

NewtonResult newton(const Discretization& d, const State& start,
                    const Exponents& e, const NewtonOptions& opts = {});

// Small-amplitude limit profile w0(x) = alpha + beta x solving
// -w'' = 0, -w'(0) = b0 w(0)^{q-1}, w'(1) = b1 w(1)^{q-1}, w >= 0.
// Throws NoCandidate when no such nontrivial affine profile exists.
std::vector<double> solve_w0(double b0, double b1, const Exponents& e,
                             const std::vector<double>& x);

// Large-amplitude limit profile: nonnegative nontrivial solution of
// -w'' = a(x) w^{p-1} with zero Neumann data. Empty when a <= 0 (the
// compatibility condition int a w^{p-1} = 0 fails for w >= 0 nontrivial).
std::optional<std::vector<double>> solve_winf(const Discretization& d,
                                              const Exponents& e,
                                              const NewtonOptions& opts = {});

// Projected-gradient descent of the energy restricted to a fibering class;
// `start` must already lie in the target class. Nonnegativity is enforced
// by clipping when clip_nonneg is set.
State nehari_descent(const Discretization& d, const Exponents& e, State start,
                     NehariClass target, int max_iter = 200,
                     double step0 = 0.25, bool clip_nonneg = false);

struct CorrectorResult {
    std::vector<double> v;  // zero weighted mean
    double mu = 0.0;        // multiplier, equals the reduced map value
    int iterations = 0;
};

// Solves the projected problem at fixed mean t: find zero-mean v with
// K(t+v) = lambda P [ w f(x, t+v) + boundary flux ], P the weighted
// mean-free projector, mu the projected-out constant. Throws
// OutOfNeighborhood when ||v||_inf exceeds t/2.
CorrectorResult ls_v(const Discretization& d, const Exponents& e,
                     double lambda, double t, const NewtonOptions& opts = {});

// Reduced map Phi(lambda, t) = sum_i w_i f(x_i, t+v_i) + b0 g(t+v_0)
// + b1 g(t+v_n) evaluated on the corrector v(lambda, t).
double ls_phi(const Discretization& d, const Exponents& e, double lambda,
              double t, const NewtonOptions& opts = {});

// d v / d lambda at lambda = 0 and mean t: the zero-mean solution of the
// linear bordered system K v = P [ w f(x, t) + t^{q-1} boundary flux ].
std::vector<double> ls_vlambda0(const Discretization& d, const Exponents& e,
                                double t);

struct LSDerivatives {
    double Phi_t = 0.0;        // finite-difference, Richardson-extrapolated
    double Phi_tt = 0.0;
    double Phi_lambda = 0.0;
    double Phi_t_closed = 0.0;
    double Phi_tt_closed = 0.0;
    double Phi_lambda_closed = 0.0;
};

// Derivatives of the reduced map at (lambda, t) = (0, t_star), both by
// central differences (with one Richardson halving) and in closed form.
LSDerivatives ls_derivatives(const Discretization& d, const Exponents& e,
                             double t_star, double h_fd = -1.0);

}  // namespace steady1d
