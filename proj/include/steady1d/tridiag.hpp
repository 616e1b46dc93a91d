#pragma once

// Symmetric tridiagonal operators, a pivoted tridiagonal solver, and
// Sturm-sequence bisection for the generalized pencil (T, D) with D diagonal
// positive. Everything here is O(n) per operation.

#include <cstddef>
#include <utility>
#include <vector>

#include "steady1d/errors.hpp"

namespace steady1d {

struct SymTridiag {
    std::vector<double> diag;  // n entries
    std::vector<double> off;   // n-1 entries

    std::size_t size() const { return diag.size(); }
    std::vector<double> apply(const std::vector<double>& u) const;
    double quad(const std::vector<double>& u) const;  // u^T T u
    void add_diag(const std::vector<double>& d, double scale);
};

// Solves T x = rhs by LU with partial pivoting (fill-in bandwidth 2).
// Throws SingularJacobian on an exactly zero pivot.
std::vector<double> tridiag_solve(const SymTridiag& T, std::vector<double> rhs);

// Number of eigenvalues of the pencil T v = mu D v strictly below x.
int pencil_count_below(const SymTridiag& T, const std::vector<double>& D, double x);

// Smallest eigenvalue of the pencil (T, D), D diagonal positive.
double pencil_smallest_eig(const SymTridiag& T, const std::vector<double>& D,
                           double tol = 1e-13);

// Smallest eigenpair; the vector is D-normalized (v^T D v = 1) and oriented
// so that its largest-magnitude entry is positive.
std::pair<double, std::vector<double>> pencil_smallest_pair(
    const SymTridiag& T, const std::vector<double>& D, double tol = 1e-13);

}  // namespace steady1d
