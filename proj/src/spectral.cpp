#include "steady1d/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace steady1d {

namespace {

// Interior nodes [i_lo+1 .. i_hi-1] of the pencil
// (K_D - lambda M_m, M) under zero Dirichlet data at i_lo and i_hi.
double dirichlet_sub_mu1(const Discretization& d, int i_lo, int i_hi,
                         double lambda) {
    const int m = i_hi - i_lo - 1;
    if (m < 1) throw BadSubinterval("subinterval has no interior node");
    SymTridiag T;
    T.diag.assign(m, 2.0 / d.h);
    T.off.assign(m - 1, -1.0 / d.h);
    std::vector<double> D(m, d.h);
    for (int j = 0; j < m; ++j)
        T.diag[j] -= lambda * d.h * d.m_nodes[i_lo + 1 + j];
    return pencil_smallest_eig(T, D);
}

int locate_node(const Discretization& d, double xv) {
    const double idx = xv / d.h;
    const int i = static_cast<int>(std::lround(idx));
    if (i < 0 || i >= d.n || std::abs(d.x[i] - xv) > 1e-9)
        throw BadSubinterval("subinterval endpoint is not a grid node");
    return i;
}

}  // namespace

PrincipalEigen lambda1(const Discretization& d) {
    PrincipalEigen out;
    const double Im = d.quadrature(d.m_nodes);
    const bool m_pos_somewhere =
        std::any_of(d.m_nodes.begin(), d.m_nodes.end(),
                    [](double v) { return v > 0.0; });
    if (!m_pos_somewhere) {
        out.infinite = true;
        return out;
    }
    if (Im > 0.0) {
        out.value = 0.0;
        out.eigfun.assign(d.n, 1.0 / std::sqrt(Im));
        return out;
    }
    // Im <= 0 with m positive somewhere: the smallest eigenvalue of
    // (K - lambda M_m, M) starts at 0, rises, and crosses zero again at
    // the principal eigenvalue. Track the crossing through the Sturm
    // count, which stays reliable where the eigenvalue itself is at the
    // bisection noise floor.
    auto nneg = [&](double lam) {
        SymTridiag T = d.K;
        std::vector<double> mm(d.n);
        for (int i = 0; i < d.n; ++i) mm[i] = d.w[i] * d.m_nodes[i];
        T.add_diag(mm, -lam);
        return pencil_count_below(T, d.w, 0.0);
    };
    double lo = 1e-6;
    while (nneg(lo) > 0) {
        lo *= 0.5;
        if (lo < 1e-12) throw MaxIterExceeded("principal eigenvalue bracket failed");
    }
    double hi = lo;
    while (nneg(hi) == 0) {
        hi *= 2.0;
        if (hi > 1e12) throw MaxIterExceeded("principal eigenvalue bracket failed");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (nneg(mid) == 0 ? lo : hi) = mid;
    }
    out.value = 0.5 * (lo + hi);
    SymTridiag T = d.K;
    std::vector<double> mm(d.n);
    for (int i = 0; i < d.n; ++i) mm[i] = d.w[i] * d.m_nodes[i];
    T.add_diag(mm, -out.value);
    auto [ev, phi] = pencil_smallest_pair(T, d.w);
    double s = 0.0;
    for (int i = 0; i < d.n; ++i) s += d.w[i] * d.m_nodes[i] * phi[i] * phi[i];
    if (s <= 0.0) throw PreconditionViolated("principal eigenfunction has nonpositive m-mass");
    const double scale = 1.0 / std::sqrt(s);
    for (auto& v : phi) v *= scale;
    out.eigfun = std::move(phi);
    return out;
}

StabilityReport stability_eigen(const Discretization& d, const State& s,
                                const Exponents& e, double floor_eps) {
    StabilityReport rep;
    SymTridiag J = jacobian(d, s, e, floor_eps);
    std::vector<double> D = d.w;
    D.front() += 1.0;
    D.back() += 1.0;
    auto [gamma, psi] = pencil_smallest_pair(J, D);
    rep.gamma1 = gamma;
    rep.psi1 = std::move(psi);
    const double tol = 1e-7 * (1.0 + std::abs(s.lambda));
    if (gamma > tol)
        rep.verdict = StabilityVerdict::Stable;
    else if (gamma < -tol)
        rep.verdict = StabilityVerdict::Unstable;
    else
        rep.verdict = StabilityVerdict::Marginal;
    return rep;
}

double dirichlet_mu1(const Discretization& d, double alpha, double beta,
                     double lambda) {
    if (!(alpha < beta)) throw BadSubinterval("need alpha < beta");
    return dirichlet_sub_mu1(d, locate_node(d, alpha), locate_node(d, beta), lambda);
}

namespace {

// sup { s > 0 : mu1(sub, sign*s) >= 0 }; mu1 is concave in lambda and
// positive at 0, so the admissible set is an interval.
double admissible_sup(const Discretization& d, int i_lo, int i_hi, double sign) {
    double lo = 0.0, hi = 1.0;
    while (dirichlet_sub_mu1(d, i_lo, i_hi, sign * hi) >= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw MaxIterExceeded("a priori bound bracket failed");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dirichlet_sub_mu1(d, i_lo, i_hi, sign * mid) >= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double apriori_Lambda(const Discretization& d,
                      std::pair<double, double> Dplus,
                      std::pair<double, double> Dminus) {
    const int pl = locate_node(d, Dplus.first), pr = locate_node(d, Dplus.second);
    const int ml = locate_node(d, Dminus.first), mr = locate_node(d, Dminus.second);
    if (pr - pl < 2 || mr - ml < 2)
        throw BadSubinterval("subinterval has no interior node");
    auto changes_sign = [&](int lo, int hi) {
        bool pos = false, neg = false;
        for (int i = lo; i <= hi; ++i) {
            pos = pos || d.m_nodes[i] > 0.0;
            neg = neg || d.m_nodes[i] < 0.0;
        }
        return pos && neg;
    };
    bool a_pos = false, a_neg = false;
    for (int i = pl; i <= pr; ++i) a_pos = a_pos || d.a_nodes[i] > 0.0;
    for (int i = ml; i <= mr; ++i) a_neg = a_neg || d.a_nodes[i] < 0.0;
    if (!a_pos) throw HypothesisViolated("a must be positive somewhere on D+");
    if (!a_neg) throw HypothesisViolated("a must be negative somewhere on D-");
    if (!changes_sign(pl, pr)) throw HypothesisViolated("m must change sign on D+");
    if (!changes_sign(ml, mr)) throw HypothesisViolated("m must change sign on D-");
    const double lam_plus = admissible_sup(d, pl, pr, +1.0);
    const double lam_minus = admissible_sup(d, ml, mr, -1.0);
    return std::max(lam_plus, lam_minus);
}

double lambda_star(const Discretization& d, const Exponents& e) {
    const auto pe = lambda1(d);
    if (pe.infinite)
        throw PreconditionViolated("lambda_star needs a finite principal eigenvalue");
    if (!(pe.value > 0.0))
        throw PreconditionViolated("lambda_star needs a positive principal eigenvalue");
    const auto& phi = pe.eigfun;
    double Iap = 0.0;
    for (int i = 0; i < d.n; ++i)
        Iap += d.w[i] * d.a_nodes[i] * std::pow(std::abs(phi[i]), e.p);
    const double Ibq = d.b0 * std::pow(std::abs(phi.front()), e.q) +
                       d.b1 * std::pow(std::abs(phi.back()), e.q);
    if (!(Iap < 0.0 && Ibq < 0.0))
        throw PreconditionViolated("lambda_star needs negative weighted masses");
    const double Cpq = fiber_constants(e).Cpq;
    const double inner =
        (-Ibq) / Cpq * std::pow(-Iap, (2.0 - e.q) / (e.p - 2.0));
    const double bracket = 1.0 - std::pow(inner, (e.p - 2.0) / (e.p - e.q));
    if (!(bracket > 0.0))
        throw PreconditionViolated("lambda_star closed form is not applicable");
    return pe.value / bracket;
}

namespace {

struct QuadForms {
    double numer;  // u^T K u
    double mu2;    // sum w m u^2
    double A;
    double B;
};

QuadForms forms(const Discretization& d, const Exponents& e,
                const std::vector<double>& u) {
    QuadForms f{d.K.quad(u), 0.0, 0.0, 0.0};
    for (int i = 0; i < d.n; ++i) {
        f.mu2 += d.w[i] * d.m_nodes[i] * u[i] * u[i];
        f.A += d.w[i] * d.a_nodes[i] * std::pow(std::abs(u[i]), e.p);
    }
    f.B = d.b0 * std::pow(std::abs(u.front()), e.q) +
          d.b1 * std::pow(std::abs(u.back()), e.q);
    return f;
}

// Shrink u on the nodes where a < 0 until A(u) >= 0. Returns false when
// even the fully shrunk field fails (A of the a>=0 part is ~0).
bool enforce_A(const Discretization& d, const Exponents& e,
               std::vector<double>& u) {
    if (forms(d, e, u).A >= 0.0) return true;
    auto scaled = [&](double theta) {
        std::vector<double> v = u;
        for (int i = 0; i < d.n; ++i)
            if (d.a_nodes[i] < 0.0) v[i] *= theta;
        return v;
    };
    if (forms(d, e, scaled(0.0)).A <= 0.0) {
        u = scaled(0.0);
        return forms(d, e, u).A >= 0.0;
    }
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (forms(d, e, scaled(mid)).A >= 0.0 ? lo : hi) = mid;
    }
    u = scaled(lo);
    return true;
}

bool enforce_B(const Discretization& d, const Exponents& e,
               std::vector<double>& u) {
    if (forms(d, e, u).B >= 0.0) return true;
    auto scaled = [&](double theta) {
        std::vector<double> v = u;
        if (d.b0 < 0.0) v.front() *= theta;
        if (d.b1 < 0.0) v.back() *= theta;
        return v;
    };
    if (forms(d, e, scaled(0.0)).B < 0.0) return false;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (forms(d, e, scaled(mid)).B >= 0.0 ? lo : hi) = mid;
    }
    u = scaled(lo);
    return true;
}

double S_denominator(const Exponents& e, const QuadForms& f) {
    const double Cpq = fiber_constants(e).Cpq;
    return f.mu2 + std::pow(f.B / Cpq * std::pow(f.A, (2.0 - e.q) / (e.p - 2.0)),
                            (e.p - 2.0) / (e.p - e.q));
}

enum class Constraint { AOnly, BOnly, Both };

// Rayleigh-type quotient numer/denom after projecting u to the feasible set.
// Returns infinity for infeasible candidates.
double quotient(const Discretization& d, const Exponents& e,
                std::vector<double> u, Constraint c) {
    const double inf = std::numeric_limits<double>::infinity();
    if (c != Constraint::BOnly && !enforce_A(d, e, u)) return inf;
    if (c != Constraint::AOnly && !enforce_B(d, e, u)) return inf;
    if (c != Constraint::BOnly && !enforce_A(d, e, u)) return inf;
    const auto f = forms(d, e, u);
    if (c != Constraint::BOnly && f.A < 0.0) return inf;
    if (c != Constraint::AOnly && f.B < 0.0) return inf;
    const double denom = c == Constraint::Both ? S_denominator(e, f) : f.mu2;
    if (!(denom > 1e-14)) return inf;
    return f.numer / denom;
}

// Coordinate-free local refinement: nudge along the negative Rayleigh
// gradient of numer/mu2, re-project, keep improvements.
double refine(const Discretization& d, const Exponents& e,
              std::vector<double> u, Constraint c, double best) {
    double step = 0.5;
    for (int it = 0; it < 60; ++it) {
        const auto f = forms(d, e, u);
        if (!(f.mu2 > 1e-14)) break;
        const double R = f.numer / f.mu2;
        auto g = d.K.apply(u);
        double gnorm = 0.0, unorm = 0.0;
        for (int i = 0; i < d.n; ++i) {
            g[i] = 2.0 * (g[i] - R * d.w[i] * d.m_nodes[i] * u[i]) / f.mu2;
            gnorm = std::max(gnorm, std::abs(g[i]));
            unorm = std::max(unorm, std::abs(u[i]));
        }
        if (gnorm < 1e-13) break;
        std::vector<double> trial = u;
        for (int i = 0; i < d.n; ++i) trial[i] -= step * unorm / gnorm * g[i];
        const double qv = quotient(d, e, trial, c);
        if (qv < best - 1e-14) {
            best = qv;
            u = std::move(trial);
            step = std::min(1.0, step * 1.5);
        } else {
            step *= 0.5;
            if (step < 1e-6) break;
        }
    }
    return best;
}

}  // namespace

VariationalBounds variational_bounds(const Discretization& d, const Exponents& e,
                                     const std::vector<double>& lambda_probe,
                                     int restarts, std::uint64_t seed) {
    VariationalBounds out;
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> cands;
    cands.emplace_back(d.n, 1.0);
    {
        // bump supported where a >= 0, and a right-edge ramp
        std::vector<double> bump(d.n), ramp(d.n);
        for (int i = 0; i < d.n; ++i) {
            bump[i] = std::max(d.a_nodes[i], 0.0);
            ramp[i] = std::max(0.0, (d.x[i] - 0.5) * 2.0);
        }
        cands.push_back(std::move(bump));
        cands.push_back(std::move(ramp));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> u(d.n);
        const double a1 = unif(rng), a2 = unif(rng), a3 = unif(rng);
        for (int i = 0; i < d.n; ++i) {
            const double t = d.x[i];
            u[i] = 1.0 + a1 * std::cos(3.14159265358979323846 * t) +
                   a2 * std::cos(2.0 * 3.14159265358979323846 * t) + a3 * t;
        }
        cands.push_back(std::move(u));
    }

    double best_a = inf, best_b = inf, best_s = inf;
    for (const auto& u : cands) {
        const double qa = quotient(d, e, u, Constraint::AOnly);
        if (qa < inf) best_a = std::min(best_a, refine(d, e, u, Constraint::AOnly, qa));
        const double qb = quotient(d, e, u, Constraint::BOnly);
        if (qb < inf) best_b = std::min(best_b, refine(d, e, u, Constraint::BOnly, qb));
        const double qs = quotient(d, e, u, Constraint::Both);
        if (qs < inf) best_s = std::min(best_s, refine(d, e, u, Constraint::Both, qs));
    }

    // When both boundary coefficients are negative the boundary constraint
    // forces zero traces, so interior Dirichlet eigenfunctions are feasible.
    if (d.b0 < 0.0 && d.b1 < 0.0) {
        bool interior_m_pos = true;
        for (int i = 1; i + 1 < d.n; ++i)
            interior_m_pos = interior_m_pos && d.m_nodes[i] > 0.0;
        if (interior_m_pos) {
            const int m = d.n - 2;
            SymTridiag T;
            T.diag.assign(m, 2.0 / d.h);
            T.off.assign(m - 1, -1.0 / d.h);
            std::vector<double> D(m);
            for (int j = 0; j < m; ++j) D[j] = d.h * d.m_nodes[j + 1];
            best_b = std::min(best_b, pencil_smallest_eig(T, D));
        }
    }

    out.lambda_a_ub = best_a;
    out.lambda_b_ub = best_b;
    out.lambda_s_ub = best_s;
    out.coercivity_min_eigs.reserve(lambda_probe.size());
    for (double lam : lambda_probe) {
        SymTridiag T = d.K;
        std::vector<double> mm(d.n);
        for (int i = 0; i < d.n; ++i) mm[i] = d.w[i] * d.m_nodes[i];
        T.add_diag(mm, -lam);
        out.coercivity_min_eigs.push_back(pencil_smallest_eig(T, d.w));
    }
    return out;
}

}  // namespace steady1d
