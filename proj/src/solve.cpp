#include "steady1d/solve.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace steady1d {

namespace {

double sup_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace

NewtonResult newton(const Discretization& d, const State& start,
                    const Exponents& e, const NewtonOptions& opts) {
    NewtonResult res;
    res.state = start;
    std::vector<double> F = residual(d, res.state, e);
    res.residual_norm = sup_norm(F);
    for (int it = 0; it < opts.max_iter; ++it) {
        if (res.residual_norm <= opts.tol_res) {
            res.iterations = it;
            return res;
        }
        SymTridiag J = jacobian(d, res.state, e, opts.floor_eps);
        std::vector<double> neg = F;
        for (auto& v : neg) v = -v;
        std::vector<double> delta = tridiag_solve(J, std::move(neg));
        double s = 1.0;
        for (int bt = 0; bt < 40; ++bt) {
            State trial = res.state;
            for (int i = 0; i < d.n; ++i) trial.u[i] += s * delta[i];
            std::vector<double> Ft = residual(d, trial, e);
            const double nt = sup_norm(Ft);
            if (nt <= (1.0 - 1e-4 * s) * res.residual_norm || !opts.damping) {
                res.state = std::move(trial);
                F = std::move(Ft);
                res.residual_norm = nt;
                break;
            }
            s *= 0.5;
            if (bt == 39) throw MaxIterExceeded("newton line search stalled");
        }
    }
    if (res.residual_norm <= opts.tol_res) {
        res.iterations = opts.max_iter;
        return res;
    }
    throw MaxIterExceeded("newton did not reach the residual target");
}

std::vector<double> solve_w0(double b0, double b1, const Exponents& e,
                             const std::vector<double>& x) {
    // w = alpha + beta x with beta = -b0 alpha^{q-1} and the matching
    // condition beta = b1 (alpha + beta)^{q-1}; scan alpha for a root.
    auto mismatch = [&](double alpha, bool& valid) {
        const double beta = -b0 * std::pow(alpha, e.q - 1.0);
        const double w1 = alpha + beta;
        valid = w1 >= 0.0;
        if (!valid) return 0.0;
        return beta - b1 * std::pow(w1, e.q - 1.0);
    };
    double prev_alpha = 0.0, prev_g = 0.0;
    bool have_prev = false;
    for (int k = 0; k <= 2200; ++k) {
        const double alpha = std::pow(10.0, -14.0 + k * 0.01);
        bool valid = false;
        const double g = mismatch(alpha, valid);
        if (!valid) {
            have_prev = false;
            continue;
        }
        if (have_prev && ((prev_g < 0.0 && g > 0.0) || (prev_g > 0.0 && g < 0.0))) {
            double lo = prev_alpha, hi = alpha, glo = prev_g;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                bool ok = false;
                const double gm = mismatch(mid, ok);
                if ((gm < 0.0) == (glo < 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            const double alpha_star = 0.5 * (lo + hi);
            const double beta_star = -b0 * std::pow(alpha_star, e.q - 1.0);
            std::vector<double> w(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                w[i] = alpha_star + beta_star * x[i];
            return w;
        }
        prev_alpha = alpha;
        prev_g = g;
        have_prev = true;
    }
    throw NoCandidate("no positive affine limit profile for these boundary weights");
}

State nehari_descent(const Discretization& d, const Exponents& e, State start,
                     NehariClass target, int max_iter, double step0,
                     bool clip_nonneg) {
    auto Ival = [&](const State& s) { return energy(d, s, e).I; };
    State best = std::move(start);
    double bestI = Ival(best);
    double step = step0;
    for (int it = 0; it < max_iter; ++it) {
        const auto g = residual(d, best, e);
        const double gn = sup_norm(g);
        const double un = sup_norm(best.u);
        if (gn < 1e-13 * std::max(1.0, un)) break;
        State trial = best;
        const double scale = step * std::max(un, 1e-8) / gn;
        for (int i = 0; i < d.n; ++i) {
            trial.u[i] -= scale * g[i];
            if (clip_nonneg && trial.u[i] < 0.0) trial.u[i] = 0.0;
        }
        if (sup_norm(trial.u) == 0.0) {
            step *= 0.5;
            if (step < 1e-8) break;
            continue;
        }
        auto proj = project_to_nehari(d, trial, e, target);
        if (!proj) {
            step *= 0.5;
            if (step < 1e-8) break;
            continue;
        }
        const double In = Ival(*proj);
        if (In < bestI - 1e-15) {
            best = std::move(*proj);
            bestI = In;
            step = std::min(step * 1.3, 4.0 * step0);
        } else {
            step *= 0.5;
            if (step < 1e-8) break;
        }
    }
    return best;
}

std::optional<std::vector<double>> solve_winf(const Discretization& d,
                                              const Exponents& e,
                                              const NewtonOptions& opts) {
    const bool a_pos = std::any_of(d.a_nodes.begin(), d.a_nodes.end(),
                                   [](double v) { return v > 0.0; });
    if (!a_pos) return std::nullopt;

    Discretization d0 = d;
    std::fill(d0.m_nodes.begin(), d0.m_nodes.end(), 0.0);
    d0.b0 = d0.b1 = 0.0;

    int imax = 0;
    for (int i = 1; i < d.n; ++i)
        if (d.a_nodes[i] > d.a_nodes[imax]) imax = i;
    std::vector<std::vector<double>> seeds;
    {
        std::vector<double> s1(d.n), s2(d.n);
        const double amax = d.a_nodes[imax];
        for (int i = 0; i < d.n; ++i) {
            s1[i] = std::max(d.a_nodes[i], 0.0) / amax;
            const double r = (d.x[i] - d.x[imax]) / 0.25;
            s2[i] = std::exp(-r * r);
        }
        seeds.push_back(std::move(s1));
        seeds.push_back(std::move(s2));
    }

    std::optional<State> best;
    double bestI = 0.0;
    for (auto& seed : seeds) {
        State s{seed, 1.0};
        auto proj = project_to_nehari(d0, s, e, NehariClass::NehariMinus);
        if (!proj) continue;
        State min = nehari_descent(d0, e, *proj, NehariClass::NehariMinus, 300,
                                   0.25, true);
        NewtonResult polished;
        try {
            polished = newton(d0, min, e, opts);
        } catch (const MaxIterExceeded&) {
            continue;
        }
        // the limit problem has no small nontrivial states: a polished root
        // with tiny amplitude is the zero solution up to roundoff
        const double nrm = sup_norm(polished.state.u);
        if (nrm < 1e-2) continue;
        const double I = energy(d0, polished.state, e).I;
        if (!best || I < bestI) {
            best = polished.state;
            bestI = I;
        }
    }
    if (!best) return std::nullopt;
    return best->u;
}

namespace {

struct Reaction {
    double val, deriv;
};

Reaction f_at(const Discretization& d, const Exponents& e, int i, double u,
              double floor_eps) {
    Reaction r;
    const double au = std::abs(u);
    r.val = d.m_nodes[i] * u + d.a_nodes[i] * signed_pow(u, e.p - 1.0);
    r.deriv = d.m_nodes[i] +
              (e.p - 1.0) * d.a_nodes[i] * std::pow(au, e.p - 2.0);
    (void)floor_eps;
    return r;
}

Reaction g_at(const Exponents& e, double u, double floor_eps) {
    Reaction r;
    r.val = signed_pow(u, e.q - 1.0);
    r.deriv = (e.q - 1.0) * std::pow(std::max(std::abs(u), floor_eps), e.q - 2.0);
    return r;
}

}  // namespace

CorrectorResult ls_v(const Discretization& d, const Exponents& e, double lambda,
                     double t, const NewtonOptions& opts) {
    if (!(t > 0.0)) throw PreconditionViolated("ls_v requires t > 0");
    const int n = d.n;
    CorrectorResult out;
    out.v.assign(n, 0.0);
    double mu = 0.0;

    Eigen::VectorXd R(n + 1);
    auto residual_ext = [&](const std::vector<double>& v, double m) {
        std::vector<double> Kv = d.K.apply(v);
        for (int i = 0; i < n; ++i) {
            const double fi = f_at(d, e, i, t + v[i], opts.floor_eps).val;
            R(i) = Kv[i] - lambda * d.w[i] * fi + m * d.w[i];
        }
        R(0) -= lambda * d.b0 * g_at(e, t + v[0], opts.floor_eps).val;
        R(n - 1) -= lambda * d.b1 * g_at(e, t + v[n - 1], opts.floor_eps).val;
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += d.w[i] * v[i];
        R(n) = c;
    };

    for (int it = 0; it < opts.max_iter; ++it) {
        residual_ext(out.v, mu);
        const double rn = R.lpNorm<Eigen::Infinity>();
        if (rn <= opts.tol_res * std::max(1.0, t)) {
            out.mu = mu;
            out.iterations = it;
            return out;
        }
        Eigen::MatrixXd Jx = Eigen::MatrixXd::Zero(n + 1, n + 1);
        for (int i = 0; i < n; ++i) {
            Jx(i, i) = d.K.diag[i] -
                       lambda * d.w[i] *
                           f_at(d, e, i, t + out.v[i], opts.floor_eps).deriv;
            if (i + 1 < n) {
                Jx(i, i + 1) = d.K.off[i];
                Jx(i + 1, i) = d.K.off[i];
            }
            Jx(i, n) = d.w[i];
            Jx(n, i) = d.w[i];
        }
        Jx(0, 0) -= lambda * d.b0 * g_at(e, t + out.v[0], opts.floor_eps).deriv;
        Jx(n - 1, n - 1) -=
            lambda * d.b1 * g_at(e, t + out.v[n - 1], opts.floor_eps).deriv;
        Eigen::VectorXd delta = Jx.partialPivLu().solve(-R);
        for (int i = 0; i < n; ++i) out.v[i] += delta(i);
        mu += delta(n);
        if (sup_norm(out.v) > 0.5 * t)
            throw OutOfNeighborhood("corrector left the small-amplitude neighborhood");
    }
    throw MaxIterExceeded("corrector Newton did not converge");
}

double ls_phi(const Discretization& d, const Exponents& e, double lambda,
              double t, const NewtonOptions& opts) {
    const auto cr = ls_v(d, e, lambda, t, opts);
    double phi = 0.0;
    for (int i = 0; i < d.n; ++i)
        phi += d.w[i] * f_at(d, e, i, t + cr.v[i], opts.floor_eps).val;
    phi += d.b0 * g_at(e, t + cr.v.front(), opts.floor_eps).val;
    phi += d.b1 * g_at(e, t + cr.v.back(), opts.floor_eps).val;
    return phi;
}

std::vector<double> ls_vlambda0(const Discretization& d, const Exponents& e,
                                double t) {
    if (!(t > 0.0)) throw PreconditionViolated("ls_vlambda0 requires t > 0");
    const int n = d.n;
    Eigen::MatrixXd Mx = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    for (int i = 0; i < n; ++i) {
        Mx(i, i) = d.K.diag[i];
        if (i + 1 < n) {
            Mx(i, i + 1) = d.K.off[i];
            Mx(i + 1, i) = d.K.off[i];
        }
        Mx(i, n) = d.w[i];
        Mx(n, i) = d.w[i];
        rhs(i) = d.w[i] * (d.m_nodes[i] * t +
                           d.a_nodes[i] * std::pow(t, e.p - 1.0));
    }
    const double gq = std::pow(t, e.q - 1.0);
    rhs(0) += d.b0 * gq;
    rhs(n - 1) += d.b1 * gq;
    Eigen::VectorXd sol = Mx.partialPivLu().solve(rhs);
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = sol(i);
    return v;
}

LSDerivatives ls_derivatives(const Discretization& d, const Exponents& e,
                             double t_star, double h_fd) {
    if (!(t_star > 0.0))
        throw PreconditionViolated("ls_derivatives requires t_star > 0");
    const double h = h_fd > 0.0 ? h_fd : 1e-4 * std::max(1.0, t_star);
    LSDerivatives out;
    NewtonOptions opts;

    auto phi0 = [&](double t) { return ls_phi(d, e, 0.0, t, opts); };
    auto richardson1 = [&](double hh) {
        auto D = [&](double s) { return (phi0(t_star + s) - phi0(t_star - s)) / (2.0 * s); };
        return (4.0 * D(hh / 2.0) - D(hh)) / 3.0;
    };
    auto richardson2 = [&](double hh) {
        const double c = phi0(t_star);
        auto S = [&](double s) {
            return (phi0(t_star + s) - 2.0 * c + phi0(t_star - s)) / (s * s);
        };
        return (4.0 * S(hh / 2.0) - S(hh)) / 3.0;
    };
    out.Phi_t = richardson1(h);
    out.Phi_tt = richardson2(h);
    auto G = [&](double s) {
        return (ls_phi(d, e, s, t_star, opts) - ls_phi(d, e, -s, t_star, opts)) /
               (2.0 * s);
    };
    out.Phi_lambda = (4.0 * G(h / 2.0) - G(h)) / 3.0;

    const MassData md = d.integrals();
    out.Phi_t_closed = md.Im +
                       (e.p - 1.0) * std::pow(t_star, e.p - 2.0) * md.Ia +
                       (e.q - 1.0) * std::pow(t_star, e.q - 2.0) * md.Ib;
    out.Phi_tt_closed =
        (e.p - 1.0) * (e.p - 2.0) * std::pow(t_star, e.p - 3.0) * md.Ia +
        (e.q - 1.0) * (e.q - 2.0) * std::pow(t_star, e.q - 3.0) * md.Ib;
    const auto vl = ls_vlambda0(d, e, t_star);
    double pl = 0.0;
    for (int i = 0; i < d.n; ++i)
        pl += d.w[i] * f_at(d, e, i, t_star, opts.floor_eps).deriv * vl[i];
    pl += (e.q - 1.0) * std::pow(t_star, e.q - 2.0) *
          (d.b0 * vl.front() + d.b1 * vl.back());
    out.Phi_lambda_closed = pl;
    return out;
}

}  // namespace steady1d
