#pragma once

// Uniform-grid P1 finite elements on (0,1): stiffness operator, lumped
// (trapezoid) quadrature weights, and ingestion of the weight functions
// m, a and the boundary coefficients b0, b1.

#include <string>
#include <variant>
#include <vector>

#include "steady1d/scalar_core.hpp"
#include "steady1d/tridiag.hpp"

namespace steady1d {

class WeightSpec {
  public:
    static WeightSpec constant(double c);
    static WeightSpec affine(double c0, double c1);           // c0 + c1*x
    static WeightSpec cosine(double c0, double c1, double k); // c0 + c1*cos(k*pi*x)
    static WeightSpec samples(std::vector<double> values);
    static WeightSpec csv(std::string path);  // header "x,value", one row per node

    // Nodal values on the given grid; throws BadWeightSpec on mismatch.
    std::vector<double> evaluate(const std::vector<double>& x) const;

  private:
    struct Constant { double c; };
    struct Affine { double c0, c1; };
    struct Cosine { double c0, c1, k; };
    struct Samples { std::vector<double> values; };
    struct CsvPath { std::string path; };
    std::variant<Constant, Affine, Cosine, Samples, CsvPath> spec_;
};

struct Discretization {
    int n = 0;
    double h = 0.0;
    std::vector<double> x;        // node coordinates
    std::vector<double> w;        // trapezoid weights, sum to 1
    std::vector<double> m_nodes;
    std::vector<double> a_nodes;
    double b0 = 0.0;
    double b1 = 0.0;
    SymTridiag K;                 // pure-Neumann stiffness, K * const = 0

    MassData integrals() const;
    double quadrature(const std::vector<double>& f) const;  // sum w_i f_i
};

Discretization build_grid(int n, const WeightSpec& m, const WeightSpec& a,
                          double b0, double b1);

}  // namespace steady1d
