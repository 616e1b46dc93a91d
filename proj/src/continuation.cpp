#include "steady1d/continuation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace steady1d {

namespace {

struct Tangent {
    std::vector<double> u;
    double lambda = 0.0;
};

double arc_norm(const Discretization& d, const std::vector<double>& du,
                double dl) {
    double s = dl * dl;
    for (int i = 0; i < d.n; ++i) s += d.w[i] * du[i] * du[i];
    return std::sqrt(s);
}

void normalize(const Discretization& d, Tangent& t) {
    const double nrm = arc_norm(d, t.u, t.lambda);
    if (nrm == 0.0) throw PreconditionViolated("zero continuation tangent");
    for (auto& v : t.u) v /= nrm;
    t.lambda /= nrm;
}

double sup_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

// dF/dlambda: minus the lambda-multiplied part of the residual.
std::vector<double> residual_dlambda(const Discretization& d, const State& s,
                                     const Exponents& e) {
    std::vector<double> Fl(d.n);
    for (int i = 0; i < d.n; ++i)
        Fl[i] = -d.w[i] * (d.m_nodes[i] * s.u[i] +
                           d.a_nodes[i] * signed_pow(s.u[i], e.p - 1.0));
    Fl.front() -= d.b0 * signed_pow(s.u.front(), e.q - 1.0);
    Fl.back() -= d.b1 * signed_pow(s.u.back(), e.q - 1.0);
    return Fl;
}

// Solves [J, Fl; (w o tu)^T, tl] [du; dl] = -[F; N].
void bordered_solve(const Discretization& d, const SymTridiag& J,
                    const std::vector<double>& Fl, const Tangent& tg,
                    const std::vector<double>& F, double N,
                    std::vector<double>& du, double& dl) {
    const int n = d.n;
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) c[i] = d.w[i] * tg.u[i];
    bool dense = false;
    try {
        std::vector<double> a = tridiag_solve(J, F);
        std::vector<double> b = tridiag_solve(J, Fl);
        double ca = 0.0, cb = 0.0;
        for (int i = 0; i < n; ++i) {
            ca += c[i] * a[i];
            cb += c[i] * b[i];
        }
        const double denom = tg.lambda - cb;
        if (std::abs(denom) < 1e-12 * (std::abs(tg.lambda) + std::abs(cb) + 1.0)) {
            dense = true;
        } else {
            dl = (ca - N) / denom;
            du.resize(n);
            for (int i = 0; i < n; ++i) du[i] = -a[i] - b[i] * dl;
            // Reject block elimination when the tridiagonal factor was
            // nearly singular and amplified roundoff.
            double amp = sup_norm(a) + sup_norm(b);
            if (!std::isfinite(amp) || amp > 1e14) dense = true;
        }
    } catch (const SingularJacobian&) {
        dense = true;
    }
    if (!dense) return;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::VectorXd rhs(n + 1);
    for (int i = 0; i < n; ++i) {
        M(i, i) = J.diag[i];
        if (i + 1 < n) {
            M(i, i + 1) = J.off[i];
            M(i + 1, i) = J.off[i];
        }
        M(i, n) = Fl[i];
        M(n, i) = c[i];
        rhs(i) = -F[i];
    }
    M(n, n) = tg.lambda;
    rhs(n) = -N;
    Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
    du.resize(n);
    for (int i = 0; i < n; ++i) du[i] = sol(i);
    dl = sol(n);
}

BranchPoint make_point(const Discretization& d, const Exponents& e,
                       const State& s, double arclength,
                       const TraceOptions& opts) {
    BranchPoint p;
    p.state = s;
    p.arclength = arclength;
    p.u_mean = d.quadrature(s.u);
    p.u_min = *std::min_element(s.u.begin(), s.u.end());
    p.u_max = *std::max_element(s.u.begin(), s.u.end());
    double l2 = 0.0;
    for (int i = 0; i < d.n; ++i) l2 += d.w[i] * s.u[i] * s.u[i];
    p.h1_norm = std::sqrt(d.K.quad(s.u) + l2);
    if (p.u_min > opts.positivity_floor) {
        const auto rep = stability_eigen(d, s, e, opts.newton.floor_eps);
        p.gamma1 = rep.gamma1;
        p.verdict = rep.verdict;
    } else {
        p.gamma1 = std::numeric_limits<double>::quiet_NaN();
        p.verdict = StabilityVerdict::Marginal;
    }
    try {
        p.nehari = nehari_classify(d, s, e, 1e-6);
    } catch (const ZeroState&) {
        p.nehari = NehariClass::OffNehari;
    }
    return p;
}

// One-directional march. `first_pred` optionally overrides the predictor of
// the first step (used when seeding exactly at a quadratic fold).
std::vector<BranchPoint> march(const Discretization& d, const Exponents& e,
                               State current, Tangent tg,
                               const std::optional<State>& first_pred,
                               const TraceOptions& opts, bool reject_trivial,
                               bool& stalled) {
    std::vector<BranchPoint> pts;
    double ds = opts.ds;
    double arclength = 0.0;
    stalled = false;
    for (int step = 0; step < opts.n_steps; ++step) {
        State pred;
        if (step == 0 && first_pred) {
            pred = *first_pred;
        } else {
            pred = current;
            for (int i = 0; i < d.n; ++i) pred.u[i] += ds * tg.u[i];
            pred.lambda += ds * tg.lambda;
        }
        State it = pred;
        bool ok = false;
        for (int k = 0; k < opts.newton.max_iter; ++k) {
            std::vector<double> F = residual(d, it, e);
            double N = (it.lambda - pred.lambda) * tg.lambda;
            for (int i = 0; i < d.n; ++i)
                N += d.w[i] * (it.u[i] - pred.u[i]) * tg.u[i];
            if (sup_norm(F) <= opts.newton.tol_res * std::max(1.0, sup_norm(it.u)) &&
                std::abs(N) <= 1e-12) {
                ok = true;
                break;
            }
            SymTridiag J = jacobian(d, it, e, opts.newton.floor_eps);
            std::vector<double> Fl = residual_dlambda(d, it, e);
            std::vector<double> du;
            double dl = 0.0;
            try {
                bordered_solve(d, J, Fl, tg, F, N, du, dl);
            } catch (const SingularJacobian&) {
                break;
            }
            for (int i = 0; i < d.n; ++i) it.u[i] += du[i];
            it.lambda += dl;
            if (!std::isfinite(it.lambda) || sup_norm(it.u) > 10.0 * opts.sup_cap)
                break;
        }
        if (ok && reject_trivial && std::abs(it.lambda) < 1e-13) ok = false;
        if (!ok) {
            ds *= 0.5;
            if (ds < opts.ds_min) {
                stalled = true;
                return pts;
            }
            --step;
            continue;
        }
        std::vector<double> du(d.n);
        for (int i = 0; i < d.n; ++i) du[i] = it.u[i] - current.u[i];
        const double moved = arc_norm(d, du, it.lambda - current.lambda);
        arclength += moved;
        pts.push_back(make_point(d, e, it, arclength, opts));
        if (moved > 0.0) {
            Tangent secant;
            secant.u = std::move(du);
            secant.lambda = it.lambda - current.lambda;
            normalize(d, secant);
            // keep orientation
            double dot = secant.lambda * tg.lambda;
            for (int i = 0; i < d.n; ++i)
                dot += d.w[i] * secant.u[i] * tg.u[i];
            if (dot < 0.0) {
                for (auto& v : secant.u) v = -v;
                secant.lambda = -secant.lambda;
            }
            tg = std::move(secant);
        }
        current = std::move(it);
        if (std::abs(current.lambda) > opts.lambda_abs_max) break;
        if (sup_norm(current.u) > opts.sup_cap) break;
        ds = std::min(opts.ds_max, ds * 1.3);
    }
    return pts;
}

void mark_folds(Branch& b) {
    for (std::size_t k = 2; k < b.points.size(); ++k) {
        const double d1 = b.points[k - 1].state.lambda - b.points[k - 2].state.lambda;
        const double d2 = b.points[k].state.lambda - b.points[k - 1].state.lambda;
        if (d1 * d2 < 0.0) b.points[k - 1].fold = true;
    }
}

void rebuild_arclength(const Discretization& d, Branch& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < b.points.size(); ++k) {
        if (k > 0) {
            std::vector<double> du(d.n);
            for (int i = 0; i < d.n; ++i)
                du[i] = b.points[k].state.u[i] - b.points[k - 1].state.u[i];
            s += arc_norm(d, du, b.points[k].state.lambda -
                                     b.points[k - 1].state.lambda);
        }
        b.points[k].arclength = s;
    }
}

}  // namespace

Branch trace(const Discretization& d, const Exponents& e, const State& seed,
             int direction, const TraceOptions& opts) {
    if (direction != 1 && direction != -1)
        throw PreconditionViolated("direction must be +1 or -1");
    Branch out;
    out.label = opts.label;

    const double umax = sup_norm(seed.u);
    const bool trivial =
        seed.lambda == 0.0 &&
        *std::max_element(seed.u.begin(), seed.u.end()) -
                *std::min_element(seed.u.begin(), seed.u.end()) <=
            1e-12 * (1.0 + umax);

    if (!trivial) {
        // transversal tangent from the bordered linearization
        State s = seed;
        std::vector<double> F = residual(d, s, e);
        if (sup_norm(F) > 1e-8 * std::max(1.0, umax))
            throw PreconditionViolated("continuation seed is not converged");
        SymTridiag J = jacobian(d, s, e, opts.newton.floor_eps);
        std::vector<double> Fl = residual_dlambda(d, s, e);
        std::vector<double> neg = Fl;
        for (auto& v : neg) v = -v;
        Tangent tg;
        tg.u = tridiag_solve(J, neg);
        tg.lambda = 1.0;
        normalize(d, tg);
        if (direction * tg.lambda < 0.0) {
            for (auto& v : tg.u) v = -v;
            tg.lambda = -tg.lambda;
        }
        bool stalled = false;
        out.points.push_back(make_point(d, e, s, 0.0, opts));
        auto pts = march(d, e, s, tg, std::nullopt, opts, false, stalled);
        out.stalled = stalled;
        out.points.insert(out.points.end(), pts.begin(), pts.end());
        rebuild_arclength(d, out);
        mark_folds(out);
        return out;
    }

    const double c = d.quadrature(seed.u);
    if (!(c > 0.0))
        throw PreconditionViolated("trivial-line seed needs a positive mean");
    const auto ld = ls_derivatives(d, e, c);
    const auto vl = ls_vlambda0(d, e, c);
    const double scale = std::abs(ld.Phi_t_closed) + std::abs(ld.Phi_tt_closed) +
                         std::abs(ld.Phi_lambda_closed);

    if (std::abs(ld.Phi_t_closed) > 1e-8 * std::max(1.0, scale)) {
        // transversal bifurcation from the trivial line
        const double dtdl = -ld.Phi_lambda_closed / ld.Phi_t_closed;
        Tangent tg;
        tg.u.resize(d.n);
        for (int i = 0; i < d.n; ++i) tg.u[i] = dtdl + vl[i];
        tg.lambda = 1.0;
        normalize(d, tg);
        if (direction * tg.lambda < 0.0) {
            for (auto& v : tg.u) v = -v;
            tg.lambda = -tg.lambda;
        }
        bool stalled = false;
        out.points.push_back(make_point(d, e, seed, 0.0, opts));
        auto pts = march(d, e, seed, tg, std::nullopt, opts, true, stalled);
        out.stalled = stalled;
        out.points.insert(out.points.end(), pts.begin(), pts.end());
        rebuild_arclength(d, out);
        mark_folds(out);
        return out;
    }

    // Quadratic fold on the trivial line: march both mean directions with a
    // second-order predictor and glue the halves through the seed.
    if (std::abs(ld.Phi_lambda_closed) < 1e-14)
        throw PreconditionViolated("degenerate fold: Phi_lambda vanishes");
    const double lam_pp = -ld.Phi_tt_closed / ld.Phi_lambda_closed;
    auto half = [&](double sgn, bool& stalled) {
        Tangent tg;
        tg.u.assign(d.n, sgn);
        tg.lambda = 0.0;
        const double lam1 = 0.5 * lam_pp * opts.ds * opts.ds;
        State pred;
        pred.u.resize(d.n);
        for (int i = 0; i < d.n; ++i)
            pred.u[i] = c + sgn * opts.ds + lam1 * vl[i];
        pred.lambda = lam1;
        return march(d, e, seed, tg, pred, opts, true, stalled);
    };
    bool stalled_m = false, stalled_p = false;
    auto minus = half(-1.0, stalled_m);
    auto plus = half(+1.0, stalled_p);
    out.stalled = stalled_m || stalled_p;
    out.points.assign(minus.rbegin(), minus.rend());
    out.points.push_back(make_point(d, e, seed, 0.0, opts));
    out.points.back().fold = true;
    out.points.insert(out.points.end(), plus.begin(), plus.end());
    rebuild_arclength(d, out);
    mark_folds(out);
    return out;
}

FoldFit fold_fit(const Branch& branch, int fold_index, int half_width) {
    const int n = static_cast<int>(branch.points.size());
    if (fold_index < 0 || fold_index >= n)
        throw PreconditionViolated("fold index out of range");
    const int lo = std::max(0, fold_index - half_width);
    const int hi = std::min(n - 1, fold_index + half_width);
    const int m = hi - lo + 1;
    if (m < 5) throw InsufficientPoints("fold fit needs at least 5 points");
    const double t_c = branch.points[fold_index].u_mean;
    Eigen::MatrixXd V(m, 3);
    Eigen::VectorXd y(m);
    for (int k = 0; k < m; ++k) {
        const double s = branch.points[lo + k].u_mean - t_c;
        V(k, 0) = 1.0;
        V(k, 1) = s;
        V(k, 2) = s * s;
        y(k) = branch.points[lo + k].state.lambda;
    }
    Eigen::Vector3d a = (V.transpose() * V).ldlt().solve(V.transpose() * y);
    FoldFit f;
    f.lambda_pp = 2.0 * a(2);
    if (a(2) == 0.0) {
        f.t_fold = t_c;
        f.lambda_fold = a(0);
        return f;
    }
    const double s_star = -a(1) / (2.0 * a(2));
    f.t_fold = t_c + s_star;
    f.lambda_fold = a(0) + a(1) * s_star + a(2) * s_star * s_star;
    return f;
}

}  // namespace steady1d
