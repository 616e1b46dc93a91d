#include <cmath>

#include "doctest.h"
#include "steady1d/continuation.hpp"

using namespace steady1d;

namespace {

Discretization s1_grid(int n = 401) {
    return build_grid(n, WeightSpec::constant(1.0), WeightSpec::affine(-4.0, 6.0),
                      -0.25, 0.05);
}

const Exponents E35(3.0, 1.5);

}  // namespace

TEST_CASE("branch from the larger constant: lambda rises, points converge") {
    const auto d = s1_grid();
    const auto pa = phi_zeros(d.integrals(), E35);
    State seed{std::vector<double>(d.n, pa.zeros.back()), 0.0};
    TraceOptions opts;
    opts.lambda_abs_max = 0.1;
    opts.n_steps = 120;
    const Branch b = trace(d, E35, seed, +1, opts);
    REQUIRE(b.points.size() > 5);
    CHECK(b.points.front().state.lambda == 0.0);
    CHECK(b.points.back().state.lambda > 0.05);
    for (std::size_t k = 1; k < b.points.size(); ++k) {
        const auto& pt = b.points[k];
        double rn = 0.0, un = 0.0;
        for (double v : residual(d, pt.state, E35)) rn = std::max(rn, std::abs(v));
        for (double v : pt.state.u) un = std::max(un, std::abs(v));
        CHECK(rn <= 1e-9 * std::max(1.0, un));
        CHECK(pt.arclength > b.points[k - 1].arclength);
        CHECK(pt.u_min > 0.0);
    }
    // summary columns agree with the stored state
    const auto& last = b.points.back();
    CHECK(last.u_mean == doctest::Approx(d.quadrature(last.state.u)));
    CHECK(last.u_max >= last.u_mean);
    CHECK(last.u_mean >= last.u_min);
}

TEST_CASE("branch from the smaller constant is unstable for positive lambda") {
    const auto d = s1_grid();
    const auto pa = phi_zeros(d.integrals(), E35);
    State seed{std::vector<double>(d.n, pa.zeros.front()), 0.0};
    TraceOptions opts;
    opts.ds = 0.005;
    opts.lambda_abs_max = 0.06;
    opts.n_steps = 80;
    const Branch b = trace(d, E35, seed, +1, opts);
    REQUIRE(b.points.size() > 5);
    int tagged = 0;
    for (const auto& pt : b.points) {
        if (pt.state.lambda > 0.01 && std::isfinite(pt.gamma1)) {
            CHECK(pt.gamma1 < 0.0);
            ++tagged;
        }
    }
    CHECK(tagged > 0);
}

TEST_CASE("continuation rejects unconverged seeds and bad directions") {
    const auto d = s1_grid(51);
    State garbage{std::vector<double>(d.n, 1.0), 0.3};
    TraceOptions opts;
    CHECK_THROWS_AS(trace(d, E35, garbage, +1, opts), PreconditionViolated);
    State seed{std::vector<double>(d.n, 0.5), 0.0};
    CHECK_THROWS_AS(trace(d, E35, seed, 2, opts), PreconditionViolated);
}

TEST_CASE("fold fit recovers a synthetic parabola exactly") {
    Branch b;
    const double t_f = 0.4, lam_f = 0.02, pp = 3.0;
    for (int k = -6; k <= 6; ++k) {
        BranchPoint pt;
        const double t = t_f + 0.01 * k;
        pt.u_mean = t;
        pt.state.lambda = lam_f + 0.5 * pp * (t - t_f) * (t - t_f);
        pt.fold = (k == 0);
        b.points.push_back(pt);
    }
    const auto ff = fold_fit(b, 6);
    CHECK(ff.t_fold == doctest::Approx(t_f).epsilon(1e-12));
    CHECK(ff.lambda_fold == doctest::Approx(lam_f).epsilon(1e-10));
    CHECK(ff.lambda_pp == doctest::Approx(pp).epsilon(1e-10));

    Branch tiny;
    tiny.points.assign(3, BranchPoint{});
    CHECK_THROWS_AS(fold_fit(tiny, 1), InsufficientPoints);
}

TEST_CASE("quadratic fold on the trivial line is traced through") {
    // a = -m with boundary masses at the exact threshold
    const int n = 201;
    const auto kt = k_thresholds({1.0, -1.0, 0.0}, E35);
    const auto d = build_grid(n, WeightSpec::cosine(1.0, 1.0, 2.0),
                              WeightSpec::cosine(-1.0, -1.0, 2.0),
                              -kt.tildeK1 / 2.0, -kt.tildeK1 / 2.0);
    State seed{std::vector<double>(d.n, 1.0 / 3.0), 0.0};
    TraceOptions opts;
    opts.ds = 0.02;
    opts.n_steps = 12;
    opts.lambda_abs_max = 5.0;
    const Branch b = trace(d, E35, seed, +1, opts);
    REQUIRE(b.points.size() > 6);
    int fold_idx = -1;
    for (std::size_t k = 0; k < b.points.size(); ++k)
        if (b.points[k].fold) fold_idx = static_cast<int>(k);
    REQUIRE(fold_idx >= 0);
    // lambda is positive on both sides of the fold
    CHECK(b.points.front().state.lambda > 0.0);
    CHECK(b.points.back().state.lambda > 0.0);
    CHECK(b.points[fold_idx].state.lambda == 0.0);
    // mean increases through the glued branch
    for (std::size_t k = 1; k < b.points.size(); ++k)
        CHECK(b.points[k].u_mean > b.points[k - 1].u_mean);
}
