#pragma once

// Closed-form constants, the scalar function phi(t) = t^{2-q} Im + t^{p-q} Ia + Ib,
// its zeros and regime classification, and the fibering-root arithmetic for the
// scalar projection onto the Nehari manifold. Pure scalar math, no grid.

#include <optional>
#include <string>
#include <vector>

#include "steady1d/errors.hpp"

namespace steady1d {

struct Exponents {
    double p;  // superlinear interior exponent
    double q;  // sublinear boundary exponent
    Exponents(double p_, double q_);  // enforces 1 < q < 2 < p
};

// Integrated weights: Im = int m, Ia = int a, Ib = boundary sum b0 + b1.
struct MassData {
    double Im = 0.0;
    double Ia = 0.0;
    double Ib = 0.0;
};

struct FiberConstants {
    double Cpq;
    double tildeCpq;  // always > Cpq
};

FiberConstants fiber_constants(const Exponents& e);

double phi_eval(double t, const MassData& md, const Exponents& e);
double phi_deriv(double t, const MassData& md, const Exponents& e);

struct KThresholds {
    double K1;
    double tildeK1;
};

// Requires Im > 0 > Ia; throws PreconditionViolated otherwise.
KThresholds k_thresholds(const MassData& md, const Exponents& e);

enum class PhiRegime { TwoZeros, DoubleZero, UniqueZero, NoZero, NotApplicable };

struct PhiAnalysis {
    std::vector<double> zeros;  // ascending, 0..2 entries
    std::optional<double> c0;   // critical point of phi, when Im > 0 > Ia
    double K1 = 0.0;            // defined only when Im > 0 > Ia
    double tildeK1 = 0.0;
    PhiRegime regime = PhiRegime::NotApplicable;
};

PhiAnalysis phi_zeros(const MassData& md, const Exponents& e, double tol = 1e-12);

enum class ProblemVariant { P, Q };

struct SignFlags {
    bool a_changes_sign = false;
    bool b_changes_sign = false;
    bool m_changes_sign = false;
};

struct RegimeReport {
    bool applicable = false;
    std::string label;
    std::vector<std::string> theorems;
};

RegimeReport classify_regime(const MassData& md, const SignFlags& signs,
                             const Exponents& e, ProblemVariant variant);

enum class NehariClass { NehariPlus, NehariMinus, NehariZero, OffNehari };

const char* to_string(NehariClass c);

struct FiberRoot {
    double t;
    NehariClass cls;        // NehariPlus / NehariMinus, NehariZero when degenerate
    bool degenerate = false;
};

struct FiberRoots {
    std::vector<FiberRoot> roots;  // ascending in t, at most two
    std::optional<double> t0;      // global max of i_u when E and lambda*A share sign
};

// Positive roots of  E t^{2-q} - lambda A t^{p-q} - lambda B = 0,
// classified by the sign of j_u'' at the root.
FiberRoots fibering_roots(double E, double A, double B, double lambda,
                          const Exponents& e, double tol = 1e-12);

}  // namespace steady1d
