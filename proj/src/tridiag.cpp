#include "steady1d/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace steady1d {

std::vector<double> SymTridiag::apply(const std::vector<double>& u) const {
    const std::size_t n = size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * u[i];
        if (i > 0) s += off[i - 1] * u[i - 1];
        if (i + 1 < n) s += off[i] * u[i + 1];
        out[i] = s;
    }
    return out;
}

double SymTridiag::quad(const std::vector<double>& u) const {
    const std::size_t n = size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += diag[i] * u[i] * u[i];
    for (std::size_t i = 0; i + 1 < n; ++i) s += 2.0 * off[i] * u[i] * u[i + 1];
    return s;
}

void SymTridiag::add_diag(const std::vector<double>& d, double scale) {
    for (std::size_t i = 0; i < size(); ++i) diag[i] += scale * d[i];
}

std::vector<double> tridiag_solve(const SymTridiag& T, std::vector<double> rhs) {
    const std::size_t n = T.size();
    // Working bands: c (sub), d (main), e (super), f (super-super, fill-in).
    std::vector<double> d = T.diag, e(n, 0.0), f(n, 0.0), c(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        e[i] = T.off[i];
        c[i + 1] = T.off[i];
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (std::abs(c[k + 1]) > std::abs(d[k])) {
            std::swap(d[k], c[k + 1]);
            std::swap(e[k], d[k + 1]);
            std::swap(f[k], e[k + 1]);
            std::swap(rhs[k], rhs[k + 1]);
        }
        if (d[k] == 0.0) throw SingularJacobian("zero pivot in tridiagonal solve");
        const double m = c[k + 1] / d[k];
        d[k + 1] -= m * e[k];
        e[k + 1] -= m * f[k];
        rhs[k + 1] -= m * rhs[k];
    }
    if (d[n - 1] == 0.0) throw SingularJacobian("zero pivot in tridiagonal solve");
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = rhs[k];
        if (k + 1 < n) s -= e[k] * x[k + 1];
        if (k + 2 < n) s -= f[k] * x[k + 2];
        x[k] = s / d[k];
    }
    return x;
}

int pencil_count_below(const SymTridiag& T, const std::vector<double>& D,
                       double x) {
    const std::size_t n = T.size();
    int count = 0;
    double dprev = 1.0;
    const double tiny = std::numeric_limits<double>::min();
    for (std::size_t i = 0; i < n; ++i) {
        double di = T.diag[i] - x * D[i];
        if (i > 0) {
            double denom = dprev;
            if (denom == 0.0) denom = tiny;
            di -= T.off[i - 1] * T.off[i - 1] / denom;
        }
        if (di < 0.0) ++count;
        dprev = di;
    }
    return count;
}

namespace {

std::pair<double, double> pencil_bracket(const SymTridiag& T,
                                         const std::vector<double>& D) {
    // Gershgorin bounds for D^{-1/2} T D^{-1/2}.
    const std::size_t n = T.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(T.off[i - 1]) / std::sqrt(D[i - 1] * D[i]);
        if (i + 1 < n) r += std::abs(T.off[i]) / std::sqrt(D[i] * D[i + 1]);
        const double c = T.diag[i] / D[i];
        lo = std::min(lo, c - r);
        hi = std::max(hi, c + r);
    }
    return {lo, hi};
}

}  // namespace

double pencil_smallest_eig(const SymTridiag& T, const std::vector<double>& D,
                           double tol) {
    auto [lo, hi] = pencil_bracket(T, D);
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    for (int it = 0; it < 200 && hi - lo > tol * scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pencil_count_below(T, D, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, std::vector<double>> pencil_smallest_pair(
    const SymTridiag& T, const std::vector<double>& D, double tol) {
    const std::size_t n = T.size();
    const double mu = pencil_smallest_eig(T, D, tol);
    auto [lo, hi] = pencil_bracket(T, D);
    const double gap = std::max(1e-10, 1e-10 * (hi - lo));

    // Inverse iteration on (T - sigma D) with sigma just below mu.
    SymTridiag S = T;
    S.add_diag(D, -(mu - gap));
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (int it = 0; it < 50; ++it) {
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = D[i] * v[i];
        std::vector<double> w;
        try {
            w = tridiag_solve(S, std::move(rhs));
        } catch (const SingularJacobian&) {
            S.add_diag(D, -gap);  // nudge the shift and retry
            continue;
        }
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm2 += D[i] * w[i] * w[i];
        const double norm = std::sqrt(norm2);
        for (std::size_t i = 0; i < n; ++i) w[i] /= norm;
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            diff = std::max(diff, std::abs(std::abs(w[i]) - std::abs(v[i])));
        v = std::move(w);
        if (diff < 1e-13) break;
    }
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    if (v[imax] < 0.0)
        for (auto& vi : v) vi = -vi;
    return {mu, std::move(v)};
}

}  // namespace steady1d
