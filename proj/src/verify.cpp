#include "steady1d/verify.hpp"

#include <algorithm>
#include <cmath>

namespace steady1d {

namespace {

double sup_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

// Lumped residual of -w'' = f(x, w) on the subgrid; rows at Dirichlet ends
// are skipped (entry left at zero).
std::vector<double> lumped_residual(const ComparisonProblem& cp,
                                    const std::vector<double>& w) {
    const auto& d = *cp.d;
    const int M = cp.i_hi - cp.i_lo + 1;
    std::vector<double> r(M, 0.0);
    for (int j = 1; j + 1 < M; ++j) {
        const double x = d.x[cp.i_lo + j];
        r[j] = (-w[j - 1] + 2.0 * w[j] - w[j + 1]) / d.h -
               d.h * cp.f(x, w[j]);
    }
    if (!cp.dirichlet_left)
        r[0] = (w[0] - w[1]) / d.h - 0.5 * d.h * cp.f(d.x[cp.i_lo], w[0]) -
               cp.g_left(w[0]);
    if (!cp.dirichlet_right)
        r[M - 1] = (w[M - 1] - w[M - 2]) / d.h -
                   0.5 * d.h * cp.f(d.x[cp.i_hi], w[M - 1]) -
                   cp.g_right(w[M - 1]);
    return r;
}

}  // namespace

ComparisonResult comparison_check(const ComparisonProblem& cp,
                                  const std::vector<double>& u,
                                  const std::vector<double>& v,
                                  double tol) {
    if (cp.d == nullptr) throw PreconditionViolated("comparison needs a grid");
    const auto& d = *cp.d;
    if (cp.i_lo < 0 || cp.i_hi >= d.n || cp.i_hi - cp.i_lo < 2)
        throw BadSubinterval("comparison subinterval too small");
    const int M = cp.i_hi - cp.i_lo + 1;
    if (static_cast<int>(u.size()) != M || static_cast<int>(v.size()) != M)
        throw PreconditionViolated("comparison inputs must live on the subgrid");

    ComparisonResult res;
    const double T = std::max({sup_abs(u), sup_abs(v), 1e-6});

    // quotient monotonicity of f(x, t)/t and g(t)/t on a geometric t-grid
    res.hypotheses_ok = true;
    const int nt = 40;
    const int stride = std::max(1, M / 20);
    for (int j = 0; j < M && res.hypotheses_ok; j += stride) {
        const double x = d.x[cp.i_lo + j];
        double prev = 0.0;
        for (int k = 0; k < nt; ++k) {
            const double t = 1e-6 * T * std::pow(1e7, k / double(nt - 1));
            const double quot = cp.f(x, t) / t;
            if (k > 0 && quot > prev + 1e-10 * (1.0 + std::abs(prev))) {
                res.hypotheses_ok = false;
                break;
            }
            prev = quot;
        }
    }
    auto flux_mono = [&](const std::function<double(double)>& g) {
        double prev = 0.0;
        for (int k = 0; k < nt; ++k) {
            const double t = 1e-6 * T * std::pow(1e7, k / double(nt - 1));
            const double quot = g(t) / t;
            if (k > 0 && quot > prev + 1e-10 * (1.0 + std::abs(prev))) return false;
            prev = quot;
        }
        return true;
    };
    if (res.hypotheses_ok && !cp.dirichlet_left) res.hypotheses_ok = flux_mono(cp.g_left);
    if (res.hypotheses_ok && !cp.dirichlet_right) res.hypotheses_ok = flux_mono(cp.g_right);
    if (!res.hypotheses_ok) {
        res.failed_clause = "monotonicity";
        return res;
    }

    // boundary data: sub lies below, super above, at Dirichlet ends
    const double tol_b = tol * std::max(1.0, T);
    if ((cp.dirichlet_left && (u.front() > tol_b || v.front() < -tol_b)) ||
        (cp.dirichlet_right && (u.back() > tol_b || v.back() < -tol_b))) {
        res.failed_clause = "boundary-data";
        return res;
    }

    const double tol_r = tol * std::max(1.0, T / d.h);
    const auto ru = lumped_residual(cp, u);
    const auto rv = lumped_residual(cp, v);
    res.sub_ok = true;
    res.super_ok = true;
    for (int j = 0; j < M; ++j) {
        if (cp.dirichlet_left && j == 0) continue;
        if (cp.dirichlet_right && j == M - 1) continue;
        if (ru[j] > tol_r) res.sub_ok = false;
        if (rv[j] < -tol_r) res.super_ok = false;
    }
    if (!res.sub_ok) {
        res.failed_clause = "subsolution";
        return res;
    }
    if (!res.super_ok) {
        res.failed_clause = "supersolution";
        return res;
    }

    res.ordered = true;
    for (int j = 0; j < M; ++j) {
        res.max_violation = std::max(res.max_violation, u[j] - v[j]);
        if (u[j] > v[j] + tol_b) res.ordered = false;
    }
    if (!res.ordered) res.failed_clause = "ordering";
    return res;
}

PositivityVerdict positivity_check(const std::vector<double>& u, double pos_tol) {
    const double sup = sup_abs(u);
    if (sup == 0.0) return PositivityVerdict::NotNontrivial;
    const double mn = *std::min_element(u.begin(), u.end());
    if (mn < -pos_tol * sup) throw NegativeState("state has a negative node value");
    if (mn <= pos_tol * sup) return PositivityVerdict::TouchesZero;
    return PositivityVerdict::Positive;
}

}  // namespace steady1d
