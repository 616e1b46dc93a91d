#include "steady1d/nehari_min.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace steady1d {

namespace {

double sup_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

using Margin = std::function<double(const EnergyBreakdown&, double lambda)>;

// Gradient descent restricted to the fibering class, keeping the sign
// constraint satisfied at every accepted step.
State constrained_descent(const Discretization& d, const Exponents& e,
                          State start, NehariClass target, const Margin& margin,
                          int max_iter, bool clip_nonneg) {
    auto Ival = [&](const State& s) { return energy(d, s, e).I; };
    State best = std::move(start);
    double bestI = Ival(best);
    double step = 0.25;
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
        bool ok = sup_norm(trial.u) > 0.0;
        if (ok) {
            auto proj = project_to_nehari(d, trial, e, target);
            ok = proj.has_value();
            if (ok) {
                const auto eb = energy(d, *proj, e);
                ok = margin(eb, proj->lambda) > 0.0 && Ival(*proj) < bestI - 1e-15;
                if (ok) {
                    best = std::move(*proj);
                    bestI = Ival(best);
                }
            }
        }
        if (ok) {
            step = std::min(step * 1.3, 1.0);
        } else {
            step *= 0.5;
            if (step < 1e-8) break;
        }
    }
    return best;
}

MinimizerResult run_minimizer(const Discretization& d, const Exponents& e,
                              double lambda, NehariClass target,
                              const Margin& margin,
                              std::vector<std::vector<double>> candidates,
                              const MinimizerOptions& opts, bool clip_nonneg) {
    std::optional<State> best;
    double bestI = 0.0;
    int tried = 0;
    for (auto& cu : candidates) {
        if (sup_norm(cu) == 0.0) continue;
        State seed{std::move(cu), lambda};
        const auto eb0 = energy(d, seed, e);
        if (!(margin(eb0, lambda) > 0.0)) continue;
        auto proj = project_to_nehari(d, seed, e, target);
        if (!proj) continue;
        ++tried;
        State refined = constrained_descent(d, e, *proj, target, margin,
                                            opts.descent_iters, clip_nonneg);
        const double I = energy(d, refined, e).I;
        if (!best || I < bestI) {
            best = std::move(refined);
            bestI = I;
        }
    }
    if (!best) throw NoCandidate("no feasible candidate for this constraint set");

    MinimizerResult out;
    out.candidates_tried = tried;
    State final_state = *best;
    try {
        const auto nr = newton(d, *best, e, opts.newton);
        const auto eb = energy(d, nr.state, e);
        const auto cls = nehari_classify(d, nr.state, e, 1e-6);
        if (cls == target && margin(eb, lambda) > 0.0 && eb.I <= bestI + 1e-10)
            final_state = nr.state;
    } catch (const MaxIterExceeded&) {
    } catch (const SingularJacobian&) {
    }
    out.state = final_state;
    const auto eb = energy(d, final_state, e);
    out.energy = eb.I;
    out.cls = nehari_classify(d, final_state, e, 1e-6);
    out.constraint_margin = margin(eb, lambda);
    out.residual_norm = sup_norm(residual(d, final_state, e));
    return out;
}

std::vector<std::vector<double>> random_fields(const Discretization& d, int count,
                                               std::uint64_t seed,
                                               bool nonneg) {
    std::vector<std::vector<double>> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double pi = 3.14159265358979323846;
    for (int r = 0; r < count; ++r) {
        std::vector<double> u(d.n);
        const double a1 = unif(rng), a2 = unif(rng), a3 = unif(rng);
        for (int i = 0; i < d.n; ++i) {
            const double t = d.x[i];
            u[i] = 1.0 + 0.8 * a1 * std::cos(pi * t) +
                   0.6 * a2 * std::cos(2.0 * pi * t) + 0.4 * a3 * t;
            if (nonneg) u[i] = std::max(u[i], 0.0);
        }
        out.push_back(std::move(u));
    }
    return out;
}

}  // namespace

MinimizerResult min_Nplus_Bplus(const Discretization& d, const Exponents& e,
                                double lambda, const MinimizerOptions& opts) {
    Margin margin = [](const EnergyBreakdown& eb, double) { return eb.B; };
    std::vector<std::vector<double>> cands;
    try {
        auto w0 = solve_w0(d.b0, d.b1, e, d.x);
        const double s = std::pow(lambda, 1.0 / (2.0 - e.q)) /
                         std::max(sup_norm(w0), 1e-300);
        for (auto& v : w0) v *= s;
        cands.push_back(std::move(w0));
    } catch (const NoCandidate&) {
    }
    {
        // mass concentrated at whichever end has the positive boundary weight
        std::vector<double> edge(d.n, 0.0);
        const bool right = d.b1 > d.b0;
        for (int i = 0; i < d.n; ++i) {
            const double t = right ? d.x[i] : 1.0 - d.x[i];
            edge[i] = std::max(0.0, 2.0 * (t - 0.5));
        }
        cands.push_back(std::move(edge));
    }
    for (auto& u : random_fields(d, opts.restarts, opts.seed, true))
        cands.push_back(std::move(u));
    return run_minimizer(d, e, lambda, NehariClass::NehariPlus, margin,
                         std::move(cands), opts, true);
}

MinimizerResult min_Nplus_Eminus(const Discretization& d, const Exponents& e,
                                 double lambda, const MinimizerOptions& opts) {
    Margin margin = [](const EnergyBreakdown& eb, double) { return -eb.E; };
    std::vector<std::vector<double>> cands;
    cands.emplace_back(d.n, 1.0);
    for (auto& u : random_fields(d, opts.restarts, opts.seed + 1, true)) {
        // damp the oscillation so E stays negative
        for (int i = 0; i < d.n; ++i) u[i] = 1.0 + 0.1 * (u[i] - 1.0);
        cands.push_back(std::move(u));
    }
    return run_minimizer(d, e, lambda, NehariClass::NehariPlus, margin,
                         std::move(cands), opts, true);
}

MinimizerResult min_Nminus_Aplus(const Discretization& d, const Exponents& e,
                                 double lambda, const MinimizerOptions& opts) {
    Margin margin = [](const EnergyBreakdown& eb, double) { return eb.A; };
    std::vector<std::vector<double>> cands;
    int imax = 0;
    for (int i = 1; i < d.n; ++i)
        if (d.a_nodes[i] > d.a_nodes[imax]) imax = i;
    {
        std::vector<double> s1(d.n), s2(d.n);
        const double amax = std::max(d.a_nodes[imax], 1e-300);
        for (int i = 0; i < d.n; ++i) {
            s1[i] = std::max(d.a_nodes[i], 0.0) / amax;
            const double r = (d.x[i] - d.x[imax]) / 0.2;
            s2[i] = std::exp(-r * r);
        }
        cands.push_back(std::move(s1));
        cands.push_back(std::move(s2));
    }
    if (lambda > 0.0) {
        // the large-amplitude family tracks lambda^{-1/(p-2)} times the
        // limit-problem profile; seed there so the descent does not lose it
        if (auto winf = solve_winf(d, e)) {
            const double s = std::pow(lambda, -1.0 / (e.p - 2.0));
            for (auto& v : *winf) v = std::max(v, 0.0) * s;
            cands.push_back(std::move(*winf));
        }
    }
    for (auto& u : random_fields(d, opts.restarts, opts.seed + 2, true)) {
        // localize on the region where a is positive
        for (int i = 0; i < d.n; ++i)
            if (d.a_nodes[i] <= 0.0) u[i] *= 0.05;
        cands.push_back(std::move(u));
    }
    return run_minimizer(d, e, lambda, NehariClass::NehariMinus, margin,
                         std::move(cands), opts, true);
}

AsymptoticReport asymptotic_report(const std::vector<double>& lambdas,
                                   const std::vector<MinimizerResult>& results,
                                   const std::vector<double>& limit_profile,
                                   double scaling_exponent) {
    if (lambdas.size() != results.size())
        throw PreconditionViolated("lambda grid and result list differ in length");
    AsymptoticReport rep;
    rep.lambdas = lambdas;
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& u = results[k].state.u;
        rep.sup_norms.push_back(sup_norm(u));
        const double s = std::pow(lambdas[k], scaling_exponent);
        double dist = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            dist = std::max(dist, std::abs(s * u[i] - limit_profile[i]));
        rep.distances.push_back(dist);
    }
    // log-log least-squares slope of distance vs lambda
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (std::size_t k = 0; k < rep.distances.size(); ++k) {
        if (!(rep.distances[k] > 0.0) || !(lambdas[k] > 0.0)) continue;
        const double lx = std::log(lambdas[k]), ly = std::log(rep.distances[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m >= 2) rep.rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return rep;
}

}  // namespace steady1d
