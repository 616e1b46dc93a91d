#include "steady1d/functional.hpp"

#include <cmath>

namespace steady1d {

double signed_pow(double u, double r) {
    if (u == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(u), r), u);
}

EnergyBreakdown energy(const Discretization& d, const State& s,
                       const Exponents& e) {
    EnergyBreakdown out;
    const auto& u = s.u;
    const double lambda = s.lambda;
    double mu2 = 0.0, A = 0.0;
    for (int i = 0; i < d.n; ++i) {
        mu2 += d.w[i] * d.m_nodes[i] * u[i] * u[i];
        A += d.w[i] * d.a_nodes[i] * std::pow(std::abs(u[i]), e.p);
    }
    const double B = d.b0 * std::pow(std::abs(u.front()), e.q) +
                     d.b1 * std::pow(std::abs(u.back()), e.q);
    out.E = d.K.quad(u) - lambda * mu2;
    out.A = A;
    out.B = B;
    out.I = 0.5 * out.E - lambda * A / e.p - lambda * B / e.q;
    out.J = out.E - lambda * A - lambda * B;
    if (A >= 0.0 && B >= 0.0) {
        const double Cpq = fiber_constants(e).Cpq;
        out.S = mu2 + std::pow(B / Cpq * std::pow(A, (2.0 - e.q) / (e.p - 2.0)),
                               (e.p - 2.0) / (e.p - e.q));
    }
    return out;
}

std::vector<double> residual(const Discretization& d, const State& s,
                             const Exponents& e) {
    const auto& u = s.u;
    const double lambda = s.lambda;
    std::vector<double> F = d.K.apply(u);
    for (int i = 0; i < d.n; ++i) {
        F[i] -= lambda * d.w[i] *
                (d.m_nodes[i] * u[i] + d.a_nodes[i] * signed_pow(u[i], e.p - 1.0));
    }
    F.front() -= lambda * d.b0 * signed_pow(u.front(), e.q - 1.0);
    F.back() -= lambda * d.b1 * signed_pow(u.back(), e.q - 1.0);
    return F;
}

SymTridiag jacobian(const Discretization& d, const State& s, const Exponents& e,
                    double floor_eps) {
    if (!(floor_eps > 0.0))
        throw PreconditionViolated("jacobian requires floor_eps > 0");
    const auto& u = s.u;
    const double lambda = s.lambda;
    SymTridiag J = d.K;
    for (int i = 0; i < d.n; ++i) {
        J.diag[i] -= lambda * d.w[i] *
                     (d.m_nodes[i] +
                      (e.p - 1.0) * d.a_nodes[i] * std::pow(std::abs(u[i]), e.p - 2.0));
    }
    J.diag.front() -= lambda * (e.q - 1.0) * d.b0 *
                      std::pow(std::max(std::abs(u.front()), floor_eps), e.q - 2.0);
    J.diag.back() -= lambda * (e.q - 1.0) * d.b1 *
                     std::pow(std::max(std::abs(u.back()), floor_eps), e.q - 2.0);
    return J;
}

NehariClass nehari_classify(const Discretization& d, const State& s,
                            const Exponents& e, double tol_N) {
    double norm = 0.0;
    for (double ui : s.u) norm = std::max(norm, std::abs(ui));
    if (norm == 0.0) throw ZeroState("nehari_classify requires u != 0");
    const auto eb = energy(d, s, e);
    const double scale =
        std::abs(eb.E) + std::abs(s.lambda) * (std::abs(eb.A) + std::abs(eb.B));
    if (std::abs(eb.J) > tol_N * scale) return NehariClass::OffNehari;
    // Sign of E - lambda (p-q)/(p-2) B decides the submanifold.
    const double D = eb.E - s.lambda * (e.p - e.q) / (e.p - 2.0) * eb.B;
    if (std::abs(D) <= tol_N * scale) return NehariClass::NehariZero;
    return D < 0.0 ? NehariClass::NehariPlus : NehariClass::NehariMinus;
}

std::optional<State> project_to_nehari(const Discretization& d, const State& s,
                                       const Exponents& e, NehariClass target) {
    double norm = 0.0;
    for (double ui : s.u) norm = std::max(norm, std::abs(ui));
    if (norm == 0.0) throw ZeroState("project_to_nehari requires u != 0");
    const auto eb = energy(d, s, e);
    const auto fr = fibering_roots(eb.E, eb.A, eb.B, s.lambda, e);
    for (const auto& root : fr.roots) {
        if (root.degenerate || root.cls != target) continue;
        State out = s;
        for (auto& ui : out.u) ui *= root.t;
        return out;
    }
    return std::nullopt;
}

}  // namespace steady1d
