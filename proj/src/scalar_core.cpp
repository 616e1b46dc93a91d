#include "steady1d/scalar_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace steady1d {

namespace {

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

// Bisection on [lo, hi] assuming f(lo) and f(hi) have opposite signs.
template <typename F>
double bisect(F&& f, double lo, double hi, double flo, double tol) {
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo <= tol * std::max(1.0, mid)) return mid;
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if (sgn(fm) == sgn(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Exponents::Exponents(double p_, double q_) : p(p_), q(q_) {
    if (!(1.0 < q && q < 2.0 && 2.0 < p) || !std::isfinite(p) || !std::isfinite(q))
        throw PreconditionViolated("Exponents require 1 < q < 2 < p");
}

FiberConstants fiber_constants(const Exponents& e) {
    const double p = e.p, q = e.q;
    const double Cpq =
        q * (p - 2.0) / (2.0 * (p - q)) *
        std::pow(p * (2.0 - q) / (2.0 * (p - q)), (2.0 - q) / (p - 2.0));
    const double tildeCpq =
        Cpq / (q / 2.0 * std::pow(p / 2.0, (2.0 - q) / (p - 2.0)));
    return {Cpq, tildeCpq};
}

double phi_eval(double t, const MassData& md, const Exponents& e) {
    if (t == 0.0) return md.Ib;
    return std::pow(t, 2.0 - e.q) * md.Im + std::pow(t, e.p - e.q) * md.Ia + md.Ib;
}

double phi_deriv(double t, const MassData& md, const Exponents& e) {
    return (2.0 - e.q) * std::pow(t, 1.0 - e.q) * md.Im +
           (e.p - e.q) * std::pow(t, e.p - e.q - 1.0) * md.Ia;
}

KThresholds k_thresholds(const MassData& md, const Exponents& e) {
    if (!(md.Im > 0.0 && md.Ia < 0.0))
        throw PreconditionViolated("k_thresholds requires Im > 0 > Ia");
    const auto fc = fiber_constants(e);
    const double num = std::pow(md.Im, (e.p - e.q) / (e.p - 2.0));
    const double den = std::pow(-md.Ia, (2.0 - e.q) / (e.p - 2.0));
    return {fc.Cpq * num / den, fc.tildeCpq * num / den};
}

namespace {

// Critical point of phi when Im > 0 > Ia (its global max over t > 0).
double phi_crit(const MassData& md, const Exponents& e) {
    return std::pow((2.0 - e.q) * md.Im / ((e.p - e.q) * (-md.Ia)),
                    1.0 / (e.p - 2.0));
}

// Finds the single zero of phi in (lo, hi) given opposite signs at the ends.
double phi_bisect(const MassData& md, const Exponents& e, double lo, double hi,
                  double tol) {
    auto f = [&](double t) { return phi_eval(t, md, e); };
    return bisect(f, lo, hi, f(lo), tol);
}

// Expands hi from start until phi has the requested sign there.
double expand_until_sign(const MassData& md, const Exponents& e, double start,
                         int want) {
    double t = start;
    for (int it = 0; it < 200 && sgn(phi_eval(t, md, e)) != want; ++it) t *= 2.0;
    return t;
}

}  // namespace

PhiAnalysis phi_zeros(const MassData& md, const Exponents& e, double tol) {
    if (!(tol > 0.0)) throw PreconditionViolated("phi_zeros requires tol > 0");
    PhiAnalysis out;

    const bool case_mp = md.Im > 0.0 && md.Ia < 0.0;   // Im > 0 > Ia
    const bool case_pm = md.Im < 0.0 && md.Ia > 0.0;   // Im < 0 < Ia

    if (case_mp || case_pm) {
        // Mirror the second case onto the first: phi_mirror = -phi with
        // (Im, Ia, Ib) -> (-Im, -Ia, -Ib).
        MassData w = case_mp ? md : MassData{-md.Im, -md.Ia, -md.Ib};
        const auto kt = k_thresholds(w, e);
        out.K1 = kt.K1;
        out.tildeK1 = kt.tildeK1;
        const double c0 = phi_crit(w, e);
        out.c0 = c0;
        const double band = 1e-9 * std::max(1.0, std::abs(kt.tildeK1));
        if (std::abs(w.Ib + kt.tildeK1) <= band) {
            out.regime = PhiRegime::DoubleZero;
            out.zeros = {c0};
        } else if (w.Ib >= 0.0) {
            out.regime = PhiRegime::UniqueZero;
            double hi = expand_until_sign(w, e, 2.0 * std::max(1.0, c0), -1);
            out.zeros = {phi_bisect(w, e, c0, hi, tol)};
        } else if (w.Ib > -kt.tildeK1) {
            out.regime = PhiRegime::TwoZeros;
            // phi(0) = Ib < 0 < phi(c0), phi -> -inf beyond c0.
            double lo = c0;
            while (phi_eval(lo * 0.5, w, e) > 0.0 && lo > 1e-300) lo *= 0.5;
            double z1 = phi_bisect(w, e, lo * 0.5, c0, tol);
            double hi = expand_until_sign(w, e, 2.0 * c0, -1);
            double z2 = phi_bisect(w, e, c0, hi, tol);
            out.zeros = {z1, z2};
        } else {
            out.regime = PhiRegime::NoZero;
        }
        return out;
    }

    if (md.Ia >= 0.0 && md.Ib < 0.0 && (md.Im > 0.0 || md.Ia > 0.0)) {
        // phi increases from Ib < 0 to +inf: one crossing.
        out.regime = PhiRegime::UniqueZero;
        double hi = expand_until_sign(md, e, 1.0, +1);
        out.zeros = {phi_bisect(md, e, 0.0, hi, tol)};
        return out;
    }
    if (md.Ia <= 0.0 && md.Ib > 0.0 && (md.Im < 0.0 || md.Ia < 0.0)) {
        out.regime = PhiRegime::UniqueZero;
        double hi = expand_until_sign(md, e, 1.0, -1);
        out.zeros = {phi_bisect(md, e, 0.0, hi, tol)};
        return out;
    }

    out.regime = PhiRegime::NotApplicable;
    return out;
}

RegimeReport classify_regime(const MassData& md, const SignFlags& signs,
                             const Exponents& e, ProblemVariant variant) {
    RegimeReport rep;
    if (variant == ProblemVariant::Q) {
        // a = -m specialization: thresholds taken with (Im, -Im).
        if (!(md.Im > 0.0) || !signs.m_changes_sign || !signs.b_changes_sign)
            return rep;
        const auto kt = k_thresholds({md.Im, -md.Im, md.Ib}, e);
        const double band = 1e-9 * std::max(1.0, kt.tildeK1);
        rep.applicable = true;
        if (std::abs(md.Ib + kt.tildeK1) <= band) {
            rep.label = "turning point at (0, c0)";
            rep.theorems = {"fold-with-stability-exchange", "variational-minimizers"};
        } else if (md.Ib > -kt.tildeK1) {
            rep.label = ">= 4 nontrivial non-negative solutions for small lambda > 0";
            rep.theorems = {"variational-minimizers", "constant-bifurcation"};
        } else {
            rep.label =
                ">= 2 variational solutions; no classical positive solution "
                "converging to a constant";
            rep.theorems = {"variational-minimizers", "constant-limit-exclusion"};
        }
        return rep;
    }

    if (!(md.Im > 0.0 && md.Ia < 0.0) || !signs.a_changes_sign) return rep;
    const auto kt = k_thresholds(md, e);
    const double band = 1e-9 * std::max(1.0, kt.tildeK1);
    rep.applicable = true;
    if (std::abs(md.Ib + kt.tildeK1) <= band) {
        rep.label = ">= 2 variational solutions";
        rep.theorems = {"variational-minimizers"};
    } else if (md.Ib > -kt.tildeK1) {
        rep.label = ">= 4 nontrivial non-negative solutions for small lambda > 0";
        rep.theorems = {"variational-minimizers", "constant-bifurcation",
                        "stability-signs"};
    } else {
        rep.label =
            ">= 2 variational solutions; no classical positive solution "
            "converging to a constant";
        rep.theorems = {"variational-minimizers", "constant-limit-exclusion"};
    }
    return rep;
}

const char* to_string(NehariClass c) {
    switch (c) {
        case NehariClass::NehariPlus: return "NehariPlus";
        case NehariClass::NehariMinus: return "NehariMinus";
        case NehariClass::NehariZero: return "NehariZero";
        default: return "OffNehari";
    }
}

FiberRoots fibering_roots(double E, double A, double B, double lambda,
                          const Exponents& e, double tol) {
    FiberRoots out;
    const double p = e.p, q = e.q;

    // r(t) = E t^{2-q} - lambda A t^{p-q} - lambda B; roots of j_u'(t)/t^{q-1}.
    const double a2 = E;
    const double ap = -lambda * A;
    const double b = -lambda * B;
    auto r = [&](double t) {
        return a2 * std::pow(t, 2.0 - q) + ap * std::pow(t, p - q) + b;
    };
    auto rprime = [&](double t) {
        return (2.0 - q) * a2 * std::pow(t, 1.0 - q) +
               (p - q) * ap * std::pow(t, p - q - 1.0);
    };
    auto classify = [&](double t) {
        return rprime(t) > 0.0 ? NehariClass::NehariPlus : NehariClass::NehariMinus;
    };

    if (lambda != 0.0 && E / (lambda * A) > 0.0) {
        out.t0 = std::pow(p * (2.0 - q) * E / (2.0 * (p - q) * lambda * A),
                          1.0 / (p - 2.0));
    }

    if (lambda == 0.0) return out;  // r = E t^{2-q}: no positive roots for E != 0

    if (ap == 0.0) {
        // Single power balance: E t^{2-q} = lambda B.
        if (a2 != 0.0 && -b / a2 > 0.0) {
            double t = std::pow(-b / a2, 1.0 / (2.0 - q));
            out.roots.push_back({t, classify(t), false});
        }
        return out;
    }

    const int sign0 = (b != 0.0) ? sgn(b) : (a2 != 0.0 ? sgn(a2) : sgn(ap));
    const int signInf = sgn(ap);

    // r has at most one interior critical point, at t_c.
    std::optional<double> tc;
    if (a2 != 0.0 && sgn(a2) != sgn(ap)) {
        tc = std::pow((2.0 - q) * a2 / (-(p - q) * ap), 1.0 / (p - 2.0));
    }

    auto push_root_in = [&](double lo, double hi, int slo) {
        double flo = (lo == 0.0) ? static_cast<double>(slo) : r(lo);
        double t = bisect(r, lo, hi, flo, tol);
        // bisection stops on an absolute width, which loses relative accuracy
        // for roots far below 1; polish to machine precision
        for (int it = 0; it < 20; ++it) {
            const double dr = rprime(t);
            if (!(std::abs(dr) > 0.0) || !std::isfinite(dr)) break;
            const double step = r(t) / dr;
            const double tn = t - step;
            if (!(tn > 0.0) || !std::isfinite(tn)) break;
            t = tn;
            if (std::abs(step) <= 1e-15 * t) break;
        }
        out.roots.push_back({t, classify(t), false});
    };

    if (!tc) {
        // Monotone-in-sign tail: at most one root.
        if (sign0 != signInf && sign0 != 0) {
            double hi = 1.0;
            for (int it = 0; it < 400 && sgn(r(hi)) != signInf; ++it) hi *= 2.0;
            double lo = 1.0;
            for (int it = 0; it < 400 && sgn(r(lo)) != sign0 && lo > 0.0; ++it)
                lo *= 0.5;
            push_root_in(lo * 0.5, hi, sign0);
        }
        return out;
    }

    const double rc = r(*tc);
    const double scale = std::abs(a2) * std::pow(*tc, 2.0 - q) +
                         std::abs(ap) * std::pow(*tc, p - q) + std::abs(b);
    if (std::abs(rc) <= 1e-11 * std::max(1.0, scale)) {
        // Coalesced pair: j'' vanishes with j' at t_c.
        out.roots.push_back({*tc, NehariClass::NehariZero, true});
        return out;
    }

    // Left piece (0, t_c): sign0 -> sgn(rc); right piece (t_c, inf): sgn(rc) -> signInf.
    if (sign0 != 0 && sign0 != sgn(rc)) {
        double lo = *tc;
        for (int it = 0; it < 400 && sgn(r(lo * 0.5)) == sgn(rc) && lo > 1e-300;
             ++it)
            lo *= 0.5;
        push_root_in(lo * 0.5, *tc, sign0);
    }
    if (sgn(rc) != signInf) {
        double hi = 2.0 * *tc;
        for (int it = 0; it < 400 && sgn(r(hi)) != signInf; ++it) hi *= 2.0;
        push_root_in(*tc, hi, sgn(rc));
    }
    std::sort(out.roots.begin(), out.roots.end(),
              [](const FiberRoot& x, const FiberRoot& y) { return x.t < y.t; });
    return out;
}

}  // namespace steady1d
