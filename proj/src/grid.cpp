#include "steady1d/grid.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace steady1d {

WeightSpec WeightSpec::constant(double c) {
    WeightSpec s;
    s.spec_ = Constant{c};
    return s;
}

WeightSpec WeightSpec::affine(double c0, double c1) {
    WeightSpec s;
    s.spec_ = Affine{c0, c1};
    return s;
}

WeightSpec WeightSpec::cosine(double c0, double c1, double k) {
    WeightSpec s;
    s.spec_ = Cosine{c0, c1, k};
    return s;
}

WeightSpec WeightSpec::samples(std::vector<double> values) {
    WeightSpec s;
    s.spec_ = Samples{std::move(values)};
    return s;
}

WeightSpec WeightSpec::csv(std::string path) {
    WeightSpec s;
    s.spec_ = CsvPath{std::move(path)};
    return s;
}

namespace {

std::vector<double> read_csv_weights(const std::string& path,
                                     const std::vector<double>& x) {
    std::ifstream in(path);
    if (!in) throw BadWeightSpec("cannot open weight CSV: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,value", 0) != 0)
        throw BadWeightSpec("weight CSV must start with header 'x,value': " + path);
    std::vector<double> xs, vs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double xi, vi;
        char comma;
        if (!(row >> xi >> comma >> vi) || comma != ',')
            throw BadWeightSpec("malformed row in weight CSV: " + line);
        xs.push_back(xi);
        vs.push_back(vi);
    }
    if (xs.size() != x.size())
        throw BadWeightSpec("weight CSV row count does not match grid");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(xs[i] - x[i]) > 1e-12)
            throw BadWeightSpec("weight CSV nodes do not match grid");
    return vs;
}

}  // namespace

std::vector<double> WeightSpec::evaluate(const std::vector<double>& x) const {
    std::vector<double> out(x.size());
    if (const auto* c = std::get_if<Constant>(&spec_)) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = c->c;
    } else if (const auto* a = std::get_if<Affine>(&spec_)) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = a->c0 + a->c1 * x[i];
    } else if (const auto* cs = std::get_if<Cosine>(&spec_)) {
        for (std::size_t i = 0; i < x.size(); ++i)
            out[i] = cs->c0 + cs->c1 * std::cos(cs->k * std::numbers::pi * x[i]);
    } else if (const auto* sm = std::get_if<Samples>(&spec_)) {
        if (sm->values.size() != x.size())
            throw BadWeightSpec("sample array length does not match grid");
        out = sm->values;
    } else {
        out = read_csv_weights(std::get<CsvPath>(spec_).path, x);
    }
    return out;
}

Discretization build_grid(int n, const WeightSpec& m, const WeightSpec& a,
                          double b0, double b1) {
    if (n < 3) throw BadWeightSpec("grid needs at least 3 nodes");
    Discretization d;
    d.n = n;
    d.h = 1.0 / (n - 1);
    d.x.resize(n);
    for (int i = 0; i < n; ++i) d.x[i] = i * d.h;
    d.w.assign(n, d.h);
    d.w.front() = d.w.back() = 0.5 * d.h;
    d.m_nodes = m.evaluate(d.x);
    d.a_nodes = a.evaluate(d.x);
    d.b0 = b0;
    d.b1 = b1;
    d.K.diag.assign(n, 2.0 / d.h);
    d.K.diag.front() = d.K.diag.back() = 1.0 / d.h;
    d.K.off.assign(n - 1, -1.0 / d.h);
    return d;
}

MassData Discretization::integrals() const {
    MassData md;
    md.Im = quadrature(m_nodes);
    md.Ia = quadrature(a_nodes);
    md.Ib = b0 + b1;
    return md;
}

double Discretization::quadrature(const std::vector<double>& f) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += w[i] * f[i];
    return s;
}

}  // namespace steady1d
