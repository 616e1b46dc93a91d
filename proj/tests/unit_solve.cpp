#include <cmath>

#include "doctest.h"
#include "steady1d/solve.hpp"

using namespace steady1d;

namespace {

Discretization s1_grid(int n = 401) {
    return build_grid(n, WeightSpec::constant(1.0), WeightSpec::affine(-4.0, 6.0),
                      -0.25, 0.05);
}

const Exponents E35(3.0, 1.5);

double c2_of(const Discretization& d) {
    return phi_zeros(d.integrals(), E35).zeros.back();
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

}  // namespace

TEST_CASE("newton converges instantly on the trivial line") {
    const auto d = s1_grid();
    const double c2 = c2_of(d);
    State s{std::vector<double>(d.n, c2), 0.0};
    const auto nr = newton(d, s, E35);
    CHECK(nr.iterations == 0);
    CHECK(nr.residual_norm < 1e-11);
}

TEST_CASE("newton from a constant at small lambda stays O(lambda) close") {
    const auto d = s1_grid();
    const double c2 = c2_of(d);
    State s{std::vector<double>(d.n, c2), 0.01};
    const auto nr = newton(d, s, E35);
    CHECK(nr.residual_norm <= 1e-11);
    double dist = 0.0;
    for (double v : nr.state.u) dist = std::max(dist, std::abs(v - c2));
    CHECK(dist > 0.0);
    CHECK(dist < 0.1);
    // halving lambda roughly halves the distance
    State s2{std::vector<double>(d.n, c2), 0.005};
    const auto nr2 = newton(d, s2, E35);
    double dist2 = 0.0;
    for (double v : nr2.state.u) dist2 = std::max(dist2, std::abs(v - c2));
    CHECK(dist2 < 0.75 * dist);
}

TEST_CASE("newton diverges from a far basin") {
    const auto d = s1_grid();
    State s{std::vector<double>(d.n, 100.0 * c2_of(d)), 0.5};
    CHECK_THROWS_AS(newton(d, s, E35), MaxIterExceeded);
}

TEST_CASE("small-amplitude limit profile closed form") {
    const auto d = s1_grid();
    const auto w = solve_w0(-0.25, 0.05, E35, d.x);
    const double alpha_exact = std::pow(0.25 / 24.0, 2.0);
    CHECK(std::abs(w.front() - alpha_exact) < 1e-10);
    const double beta = 0.25 * std::sqrt(w.front());
    CHECK(w.back() == doctest::Approx(w.front() + beta).epsilon(1e-8));
    for (double v : w) CHECK(v > 0.0);
    // boundary conditions hold for the affine profile
    const double slope = (w.back() - w.front());
    CHECK(-slope == doctest::Approx(-0.25 * std::pow(w.front(), 0.5)).epsilon(1e-8));
    CHECK(slope == doctest::Approx(0.05 * std::pow(w.back(), 0.5)).epsilon(1e-8));
}

TEST_CASE("no small-amplitude profile when the positive boundary part vanishes") {
    const auto d = s1_grid(11);
    CHECK_THROWS_AS(solve_w0(-0.25, 0.0, E35, d.x), NoCandidate);
}

TEST_CASE("large-amplitude limit profile") {
    const auto d = s1_grid(201);
    const auto w = solve_winf(d, E35);
    REQUIRE(w.has_value());
    double mn = 1e300;
    for (double v : *w) mn = std::min(mn, v);
    CHECK(mn > 0.0);
    // residual of the limit problem itself
    Discretization d0 = d;
    std::fill(d0.m_nodes.begin(), d0.m_nodes.end(), 0.0);
    d0.b0 = d0.b1 = 0.0;
    State s{*w, 1.0};
    double rn = 0.0;
    for (double v : residual(d0, s, E35)) rn = std::max(rn, std::abs(v));
    CHECK(rn <= 1e-10 * std::max(1.0, s.u[0]));

    // mesh refinement: second-order agreement
    const auto d2 = s1_grid(401);
    const auto w2 = solve_winf(d2, E35);
    REQUIRE(w2.has_value());
    std::vector<double> coarse(d.n);
    for (int i = 0; i < d.n; ++i) coarse[i] = (*w2)[2 * i];
    CHECK(sup_diff(*w, coarse) < 1e-2);
}

TEST_CASE("no large-amplitude profile for one-signed negative a") {
    const auto d = build_grid(101, WeightSpec::constant(1.0),
                              WeightSpec::constant(-1.0), -0.25, 0.05);
    CHECK_FALSE(solve_winf(d, E35).has_value());
}

TEST_CASE("corrector vanishes on the trivial line") {
    const auto d = s1_grid();
    for (double t : {0.1, 0.5, 1.0}) {
        const auto cr = ls_v(d, E35, 0.0, t);
        for (double v : cr.v) CHECK(std::abs(v) < 1e-14);
        CHECK(std::abs(cr.mu) < 1e-12);
    }
}

TEST_CASE("reduced map at lambda = 0 equals the scalar polynomial") {
    const auto d = s1_grid();
    const auto md = d.integrals();
    for (int k = 1; k <= 50; ++k) {
        const double t = 0.02 * k;
        const double phi = ls_phi(d, E35, 0.0, t);
        const double expected = std::pow(t, 0.5) * phi_eval(t, md, E35);
        CHECK(phi == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("corrector at positive lambda is zero-mean and small") {
    const auto d = s1_grid();
    const double t = c2_of(d);
    const auto cr = ls_v(d, E35, 0.05, t);
    double mean = 0.0, sup = 0.0;
    for (int i = 0; i < d.n; ++i) {
        mean += d.w[i] * cr.v[i];
        sup = std::max(sup, std::abs(cr.v[i]));
    }
    CHECK(std::abs(mean) < 1e-12);
    CHECK(sup < 0.5 * t);
    CHECK(sup > 0.0);
}

TEST_CASE("linear corrector derivative solves the bordered system") {
    const auto d = s1_grid();
    const double t = 0.4;
    const auto v = ls_vlambda0(d, E35, t);
    double mean = 0.0;
    for (int i = 0; i < d.n; ++i) mean += d.w[i] * v[i];
    CHECK(std::abs(mean) < 1e-12);
    // K v + Phi(0,t) w = w f + boundary flux
    const auto Kv = d.K.apply(v);
    const double phi0 = ls_phi(d, E35, 0.0, t);
    for (int i = 0; i < d.n; ++i) {
        double rhs = d.w[i] * (d.m_nodes[i] * t + d.a_nodes[i] * t * t);
        if (i == 0) rhs += -0.25 * std::pow(t, 0.5);
        if (i == d.n - 1) rhs += 0.05 * std::pow(t, 0.5);
        CHECK(Kv[i] + phi0 * d.w[i] == doctest::Approx(rhs).epsilon(1e-9));
    }
    // finite-difference consistency: v(lambda, t) / lambda -> v_lambda
    const double lam = 1e-5;
    const auto cr = ls_v(d, E35, lam, t);
    double err = 0.0;
    for (int i = 0; i < d.n; ++i)
        err = std::max(err, std::abs(cr.v[i] / lam - v[i]));
    CHECK(err < 1e-3);
}

TEST_CASE("reduced-map derivatives: finite differences agree with closed forms") {
    const auto d = s1_grid();
    const double t = c2_of(d);
    const auto ld = ls_derivatives(d, E35, t);
    CHECK(ld.Phi_t == doctest::Approx(ld.Phi_t_closed).epsilon(1e-6));
    CHECK(ld.Phi_tt == doctest::Approx(ld.Phi_tt_closed).epsilon(1e-4));
    CHECK(ld.Phi_lambda == doctest::Approx(ld.Phi_lambda_closed).epsilon(1e-4));
    CHECK_THROWS_AS(ls_derivatives(d, E35, -1.0), PreconditionViolated);
}

TEST_CASE("projected descent does not increase the restricted energy") {
    const auto d = s1_grid(101);
    State seed{std::vector<double>(d.n, 1.0), 0.05};
    auto proj = project_to_nehari(d, seed, E35, NehariClass::NehariMinus);
    REQUIRE(proj.has_value());
    const double I0 = energy(d, *proj, E35).I;
    const State out = nehari_descent(d, E35, *proj, NehariClass::NehariMinus, 100);
    CHECK(energy(d, out, E35).I <= I0 + 1e-14);
    CHECK(nehari_classify(d, out, E35, 1e-6) == NehariClass::NehariMinus);
}
