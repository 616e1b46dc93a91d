// Command-line laboratory for the indefinite steady-state problem on (0,1):
// scalar analysis, direct solves, branch continuation, constrained
// minimization, the one-dimensional reduction, and output re-validation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "steady1d/config.hpp"
#include "steady1d/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace steady1d;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 2024;
    int n_override = 0;
    bool quiet = false;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* regime_name(PhiRegime r) {
    switch (r) {
        case PhiRegime::TwoZeros: return "TwoZeros";
        case PhiRegime::DoubleZero: return "DoubleZero";
        case PhiRegime::UniqueZero: return "UniqueZero";
        case PhiRegime::NoZero: return "NoZero";
        default: return "NotApplicable";
    }
}

const char* verdict_name(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::Stable: return "Stable";
        case StabilityVerdict::Unstable: return "Unstable";
        default: return "Marginal";
    }
}

RunConfig load(const GlobalOpts& g) {
    if (g.config_path.empty()) throw ConfigError("--config is required");
    RunConfig cfg = load_config(g.config_path);
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    if (g.n_override > 0) cfg.n = g.n_override;
    return cfg;
}

void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

void emit(const GlobalOpts& g, const fs::path& p, const json& j) {
    write_text(p, j.dump(2) + "\n");
    if (!g.quiet) std::cout << j.dump(2) << "\n";
}

SignFlags sign_flags(const Discretization& d) {
    SignFlags s;
    bool ap = false, an = false, mp = false, mn = false;
    for (int i = 0; i < d.n; ++i) {
        ap = ap || d.a_nodes[i] > 0.0;
        an = an || d.a_nodes[i] < 0.0;
        mp = mp || d.m_nodes[i] > 0.0;
        mn = mn || d.m_nodes[i] < 0.0;
    }
    s.a_changes_sign = ap && an;
    s.m_changes_sign = mp && mn;
    s.b_changes_sign = (d.b0 > 0.0 || d.b1 > 0.0) && (d.b0 < 0.0 || d.b1 < 0.0);
    return s;
}

int cmd_analyze(const GlobalOpts& g) {
    RunConfig cfg = load(g);
    Discretization d = cfg.grid();
    const Exponents& e = cfg.exponents;
    const MassData md = d.integrals();
    const auto fc = fiber_constants(e);

    json rep;
    rep["constants"]["Cpq"] = fc.Cpq;
    rep["constants"]["tildeCpq"] = fc.tildeCpq;
    rep["masses"] = {{"Im", md.Im}, {"Ia", md.Ia}, {"Ib", md.Ib}};

    const auto pa = phi_zeros(md, e);
    rep["phi"]["regime"] = regime_name(pa.regime);
    rep["phi"]["zeros"] = pa.zeros;
    if (pa.c0) rep["phi"]["c0"] = *pa.c0;
    if (pa.regime != PhiRegime::NotApplicable && md.Im > 0.0 && md.Ia < 0.0) {
        rep["phi"]["K1"] = pa.K1;
        rep["phi"]["tildeK1"] = pa.tildeK1;
    }

    const auto regime = classify_regime(md, sign_flags(d), e, cfg.variant);
    rep["regime"]["applicable"] = regime.applicable;
    rep["regime"]["label"] = regime.label;
    rep["regime"]["theorems"] = regime.theorems;

    const auto pe = lambda1(d);
    if (pe.infinite)
        rep["lambda1"] = "infinite";
    else
        rep["lambda1"] = pe.value;

    std::vector<double> probe = cfg.lambda_sweep;
    if (probe.empty()) probe = {0.02, 0.05, 0.08};
    const auto vb = variational_bounds(d, e, probe, 8, g.seed);
    rep["variational"]["lambda_a_ub"] = vb.lambda_a_ub;
    rep["variational"]["lambda_b_ub"] = vb.lambda_b_ub;
    rep["variational"]["lambda_s_ub"] = vb.lambda_s_ub;
    rep["variational"]["coercivity_min_eigs"] = vb.coercivity_min_eigs;
    rep["variational"]["probe_lambdas"] = probe;

    try {
        rep["lambda_star"] = lambda_star(d, e);
    } catch (const PreconditionViolated& ex) {
        rep["lambda_star"] = nullptr;
        rep["lambda_star_note"] = ex.what();
    }

    if (cfg.Dplus && cfg.Dminus) {
        try {
            rep["apriori_Lambda"] = apriori_Lambda(d, *cfg.Dplus, *cfg.Dminus);
        } catch (const HypothesisViolated& ex) {
            rep["apriori_Lambda"] = nullptr;
            rep["apriori_note"] = ex.what();
        }
    }

    emit(g, fs::path(cfg.out_dir) / "analyze.json", rep);
    return 0;
}

NewtonResult direct_solve(const RunConfig& cfg, const Discretization& d,
                          double lambda) {
    State start;
    start.lambda = lambda;
    if (cfg.initial) {
        start.u = cfg.initial->evaluate(d.x);
    } else {
        // default start: the largest zero of phi, else the constant 1
        double c = 1.0;
        const auto pa = phi_zeros(d.integrals(), cfg.exponents);
        if (!pa.zeros.empty()) c = pa.zeros.back();
        start.u.assign(d.n, c);
    }
    return newton(d, start, cfg.exponents, cfg.solver);
}

json state_summary(const Discretization& d, const Exponents& e, const State& s,
                   const NewtonOptions& opts) {
    json j;
    j["lambda"] = s.lambda;
    double mn = s.u[0], mx = s.u[0];
    for (double v : s.u) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    j["u_min"] = mn;
    j["u_max"] = mx;
    j["u_mean"] = d.quadrature(s.u);
    const auto eb = energy(d, s, e);
    j["energy"] = {{"E", eb.E}, {"A", eb.A}, {"B", eb.B}, {"I", eb.I}, {"J", eb.J}};
    j["nehari_class"] = to_string(nehari_classify(d, s, e, 1e-6));
    if (mn > 0.0) {
        const auto rep = stability_eigen(d, s, e, opts.floor_eps);
        j["gamma1"] = rep.gamma1;
        j["stability"] = verdict_name(rep.verdict);
    }
    return j;
}

void write_profile_csv(const fs::path& p, const Discretization& d,
                       const std::vector<State>& states) {
    std::ostringstream out;
    out << "lambda";
    for (int i = 0; i < d.n; ++i) out << ",u" << i;
    out << "\n";
    for (const auto& s : states) {
        out << fmt(s.lambda);
        for (int i = 0; i < d.n; ++i) out << "," << fmt(s.u[i]);
        out << "\n";
    }
    write_text(p, out.str());
}

int cmd_solve(const GlobalOpts& g, bool stability_only) {
    RunConfig cfg = load(g);
    if (!cfg.lambda_value) throw ConfigError("lambda.value is required for this command");
    Discretization d = cfg.grid();
    const auto nr = direct_solve(cfg, d, *cfg.lambda_value);
    json rep = state_summary(d, cfg.exponents, nr.state, cfg.solver);
    rep["iterations"] = nr.iterations;
    rep["residual_norm"] = nr.residual_norm;
    if (stability_only) {
        const auto sr = stability_eigen(d, nr.state, cfg.exponents, cfg.solver.floor_eps);
        rep["gamma1"] = sr.gamma1;
        rep["stability"] = verdict_name(sr.verdict);
        emit(g, fs::path(cfg.out_dir) / "stability.json", rep);
        return 0;
    }
    std::ostringstream csv;
    csv << "x,u\n";
    for (int i = 0; i < d.n; ++i)
        csv << fmt(d.x[i]) << "," << fmt(nr.state.u[i]) << "\n";
    write_text(fs::path(cfg.out_dir) / "solution.csv", csv.str());
    emit(g, fs::path(cfg.out_dir) / "solve.json", rep);
    return 0;
}

void write_branch_csv(const fs::path& p, const Branch& b) {
    std::ostringstream out;
    out << "arclength,lambda,u_mean,u_min,u_max,h1_norm,gamma1,nehari_class,fold_flag\n";
    for (const auto& pt : b.points) {
        out << fmt(pt.arclength) << "," << fmt(pt.state.lambda) << ","
            << fmt(pt.u_mean) << "," << fmt(pt.u_min) << "," << fmt(pt.u_max)
            << "," << fmt(pt.h1_norm) << "," << fmt(pt.gamma1) << ","
            << to_string(pt.nehari) << "," << (pt.fold ? 1 : 0) << "\n";
    }
    write_text(p, out.str());
}

State seed_state(const RunConfig& cfg, const Discretization& d,
                 const SeedSpec& s, std::uint64_t seed) {
    if (s.type == "constant") {
        State st;
        st.u.assign(d.n, s.t);
        st.lambda = 0.0;
        return st;
    }
    MinimizerOptions mo;
    mo.seed = seed;
    mo.newton = cfg.solver;
    if (s.family == "u0") return min_Nplus_Bplus(d, cfg.exponents, s.lambda, mo).state;
    if (s.family == "u1") return min_Nplus_Eminus(d, cfg.exponents, s.lambda, mo).state;
    if (s.family == "u2") return min_Nminus_Aplus(d, cfg.exponents, s.lambda, mo).state;
    throw ConfigError("unknown seed family '" + s.family + "'");
}

int run_branches(const GlobalOpts& g, bool diagram) {
    RunConfig cfg = load(g);
    if (cfg.seeds.empty()) throw ConfigError("continuation.seeds must not be empty");
    Discretization d = cfg.grid();
    const Exponents& e = cfg.exponents;
    const fs::path dir(cfg.out_dir);

    json summary;
    bool failed = false;
    std::vector<std::string> csv_names;
    for (const auto& sd : cfg.seeds) {
        json binfo;
        binfo["label"] = sd.label;
        try {
            TraceOptions topts = cfg.continuation;
            topts.label = sd.label;
            const State s0 = seed_state(cfg, d, sd, g.seed);
            const Branch b = trace(d, e, s0, sd.direction, topts);
            write_branch_csv(dir / (sd.label + ".csv"), b);
            std::vector<State> profiles;
            for (const auto& pt : b.points) profiles.push_back(pt.state);
            write_profile_csv(dir / (sd.label + "_profiles.csv"), d, profiles);
            csv_names.push_back(sd.label + ".csv");
            binfo["points"] = b.points.size();
            binfo["stalled"] = b.stalled;
            json folds = json::array();
            for (std::size_t k = 0; k < b.points.size(); ++k) {
                if (!b.points[k].fold) continue;
                json f;
                f["index"] = k;
                f["lambda"] = b.points[k].state.lambda;
                f["u_mean"] = b.points[k].u_mean;
                try {
                    const auto ff = fold_fit(b, static_cast<int>(k));
                    f["fit"] = {{"t_fold", ff.t_fold},
                                {"lambda_fold", ff.lambda_fold},
                                {"lambda_pp", ff.lambda_pp}};
                } catch (const InsufficientPoints&) {
                }
                folds.push_back(f);
            }
            binfo["folds"] = folds;
            json flips = json::array();
            for (std::size_t k = 1; k < b.points.size(); ++k) {
                const double a = b.points[k - 1].gamma1, bb = b.points[k].gamma1;
                if (std::isfinite(a) && std::isfinite(bb) && a * bb < 0.0)
                    flips.push_back({{"index", k}, {"lambda", b.points[k].state.lambda}});
            }
            binfo["stability_sign_changes"] = flips;
        } catch (const std::exception& ex) {
            binfo["error"] = ex.what();
            failed = true;
        }
        summary["branches"].push_back(binfo);
    }

    if (diagram) {
        // the large-amplitude family, sampled via constrained minimization
        std::vector<double> sweep = cfg.lambda_sweep;
        if (sweep.empty()) sweep = {0.1, 0.08, 0.06, 0.05, 0.04, 0.03, 0.02};
        try {
            std::ostringstream out;
            out << "arclength,lambda,u_mean,u_min,u_max,h1_norm,gamma1,nehari_class,fold_flag\n";
            MinimizerOptions mo;
            mo.seed = g.seed;
            mo.newton = cfg.solver;
            double arc = 0.0;
            std::vector<State> profiles;
            State prev;
            for (double lam : sweep) {
                const auto mr = min_Nminus_Aplus(d, e, lam, mo);
                const auto& s = mr.state;
                if (!prev.u.empty()) {
                    double acc = (s.lambda - prev.lambda) * (s.lambda - prev.lambda);
                    for (int i = 0; i < d.n; ++i)
                        acc += d.w[i] * (s.u[i] - prev.u[i]) * (s.u[i] - prev.u[i]);
                    arc += std::sqrt(acc);
                }
                prev = s;
                double mn = s.u[0], mx = s.u[0], l2 = 0.0;
                for (int i = 0; i < d.n; ++i) {
                    mn = std::min(mn, s.u[i]);
                    mx = std::max(mx, s.u[i]);
                    l2 += d.w[i] * s.u[i] * s.u[i];
                }
                const auto sr = stability_eigen(d, s, e, cfg.solver.floor_eps);
                out << fmt(arc) << "," << fmt(lam) << "," << fmt(d.quadrature(s.u))
                    << "," << fmt(mn) << "," << fmt(mx) << ","
                    << fmt(std::sqrt(d.K.quad(s.u) + l2)) << "," << fmt(sr.gamma1)
                    << "," << to_string(mr.cls) << ",0\n";
                profiles.push_back(s);
            }
            write_text(dir / "u2_family.csv", out.str());
            write_profile_csv(dir / "u2_family_profiles.csv", d, profiles);
            csv_names.push_back("u2_family.csv");
        } catch (const std::exception& ex) {
            summary["u2_family_error"] = ex.what();
            failed = true;
        }
        if (cfg.Dplus && cfg.Dminus) {
            try {
                summary["apriori_Lambda"] = apriori_Lambda(d, *cfg.Dplus, *cfg.Dminus);
            } catch (const std::exception& ex) {
                summary["apriori_note"] = ex.what();
            }
        }
        std::ostringstream gp;
        gp << "set datafile separator ','\n"
           << "set xlabel 'lambda'\nset ylabel 'u mean'\nset key outside\n";
        gp << "plot ";
        for (std::size_t k = 0; k < csv_names.size(); ++k) {
            if (k > 0) gp << ", ";
            gp << "'" << csv_names[k] << "' every ::1 using 2:3 with lines title '"
               << csv_names[k] << "'";
        }
        gp << "\n";
        write_text(dir / "plot.gp", gp.str());
    }

    emit(g, dir / (diagram ? "diagram.json" : "branch.json"), summary);
    return failed ? 3 : 0;
}

int cmd_nehari(const GlobalOpts& g) {
    RunConfig cfg = load(g);
    Discretization d = cfg.grid();
    const Exponents& e = cfg.exponents;
    std::vector<double> lambdas = cfg.lambda_sweep;
    if (lambdas.empty() && cfg.lambda_value) lambdas = {*cfg.lambda_value};
    if (lambdas.empty()) throw ConfigError("nehari needs lambda.value or lambda.sweep");

    MinimizerOptions mo;
    mo.seed = g.seed;
    mo.newton = cfg.solver;

    json rep;
    std::vector<MinimizerResult> r0, r2;
    std::vector<double> l0, l2;
    std::vector<State> profiles;
    for (double lam : lambdas) {
        json row;
        row["lambda"] = lam;
        auto one = [&](const char* name, auto fn, std::vector<MinimizerResult>* acc,
                       std::vector<double>* accl) {
            try {
                const auto mr = fn(d, e, lam, mo);
                row[name] = {{"energy", mr.energy},
                             {"class", to_string(mr.cls)},
                             {"constraint_margin", mr.constraint_margin},
                             {"residual_norm", mr.residual_norm},
                             {"u_max", *std::max_element(mr.state.u.begin(), mr.state.u.end())},
                             {"u_min", *std::min_element(mr.state.u.begin(), mr.state.u.end())}};
                if (acc) {
                    acc->push_back(mr);
                    accl->push_back(lam);
                }
                profiles.push_back(mr.state);
            } catch (const NoCandidate& ex) {
                row[name] = {{"error", ex.what()}};
            }
        };
        one("u0", min_Nplus_Bplus, &r0, &l0);
        one("u1", min_Nplus_Eminus, nullptr, nullptr);
        one("u2", min_Nminus_Aplus, &r2, &l2);
        rep["sweep"].push_back(row);
    }

    if (l0.size() >= 3) {
        try {
            const auto w0 = solve_w0(d.b0, d.b1, e, d.x);
            const auto ar = asymptotic_report(l0, r0, w0, -1.0 / (2.0 - e.q));
            rep["u0_to_w0"] = {{"rate", ar.rate}, {"distances", ar.distances}};
        } catch (const NoCandidate&) {
        }
    }
    if (l2.size() >= 3) {
        const auto wi = solve_winf(d, e, cfg.solver);
        if (wi) {
            const auto ar = asymptotic_report(l2, r2, *wi, 1.0 / (e.p - 2.0));
            rep["u2_to_winf"] = {{"rate", ar.rate}, {"distances", ar.distances}};
        }
    }
    write_profile_csv(fs::path(cfg.out_dir) / "nehari_profiles.csv", d, profiles);
    emit(g, fs::path(cfg.out_dir) / "nehari.json", rep);
    return 0;
}

int cmd_reduce(const GlobalOpts& g) {
    RunConfig cfg = load(g);
    Discretization d = cfg.grid();
    const Exponents& e = cfg.exponents;
    if (cfg.reduce.t_points < 2) throw ConfigError("reduce.t_points must be >= 2");
    std::vector<double> lambdas = cfg.reduce.lambdas;
    if (lambdas.empty()) lambdas = {0.0};

    std::ostringstream csv;
    csv << "lambda,t,Phi\n";
    for (double lam : lambdas) {
        for (int k = 0; k < cfg.reduce.t_points; ++k) {
            const double t = cfg.reduce.t_min +
                             (cfg.reduce.t_max - cfg.reduce.t_min) * k /
                                 (cfg.reduce.t_points - 1);
            const double phi = ls_phi(d, e, lam, t, cfg.solver);
            csv << fmt(lam) << "," << fmt(t) << "," << fmt(phi) << "\n";
        }
    }
    write_text(fs::path(cfg.out_dir) / "reduce.csv", csv.str());

    json rep;
    const auto pa = phi_zeros(d.integrals(), e);
    std::vector<double> tpoints = pa.zeros;
    if (pa.c0) tpoints.push_back(*pa.c0);
    for (double t : tpoints) {
        if (t < cfg.reduce.t_min || t > cfg.reduce.t_max) continue;
        const auto ld = ls_derivatives(d, e, t);
        rep["derivatives"].push_back({{"t", t},
                                      {"Phi_t_fd", ld.Phi_t},
                                      {"Phi_t_closed", ld.Phi_t_closed},
                                      {"Phi_tt_fd", ld.Phi_tt},
                                      {"Phi_tt_closed", ld.Phi_tt_closed},
                                      {"Phi_lambda_fd", ld.Phi_lambda},
                                      {"Phi_lambda_closed", ld.Phi_lambda_closed}});
    }
    if (!rep.contains("derivatives")) rep["derivatives"] = json::array();
    emit(g, fs::path(cfg.out_dir) / "reduce.json", rep);
    return 0;
}

int cmd_verify(const GlobalOpts& g) {
    RunConfig cfg = load(g);
    Discretization d = cfg.grid();
    const Exponents& e = cfg.exponents;
    const fs::path dir(cfg.out_dir);
    if (!fs::exists(dir)) throw ConfigError("output directory does not exist: " + dir.string());

    json rep;
    bool any_fail = false;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().filename().string().ends_with("_profiles.csv"))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    for (const auto& f : files) {
        std::ifstream in(f);
        std::string line;
        std::getline(in, line);  // header
        int rows = 0, bad = 0, positive = 0, touches = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string cell;
            State s;
            std::getline(row, cell, ',');
            s.lambda = std::stod(cell);
            while (std::getline(row, cell, ',')) s.u.push_back(std::stod(cell));
            if (static_cast<int>(s.u.size()) != d.n) {
                ++bad;
                continue;
            }
            ++rows;
            const auto F = residual(d, s, e);
            double fn = 0.0, un = 0.0;
            for (double v : F) fn = std::max(fn, std::abs(v));
            for (double v : s.u) un = std::max(un, std::abs(v));
            if (fn > 1e-8 * std::max(1.0, un)) ++bad;
            try {
                const auto pv = positivity_check(s.u, 1e-9);
                if (pv == PositivityVerdict::Positive) ++positive;
                if (pv == PositivityVerdict::TouchesZero) ++touches;
            } catch (const NegativeState&) {
            }
        }
        json jf;
        jf["rows"] = rows;
        jf["residual_failures"] = bad;
        jf["positive_rows"] = positive;
        jf["touching_rows"] = touches;
        rep["files"][f.filename().string()] = jf;
        if (bad > 0) any_fail = true;
    }
    rep["checked_files"] = files.size();
    emit(g, dir / "verify.json", rep);
    return any_fail ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for a 1D indefinite concave-convex steady state"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON run configuration");
    app.add_option("--out", g.out_dir, "output directory override");
    app.add_option("--seed", g.seed, "random restart seed");
    app.add_option("--n", g.n_override, "grid size override");
    app.add_flag("--quiet", g.quiet, "suppress stdout reports");

    auto* analyze = app.add_subcommand("analyze", "scalar constants, regimes, eigenvalues");
    auto* solve = app.add_subcommand("solve", "direct Newton solve at one lambda");
    auto* branch = app.add_subcommand("branch", "trace continuation branches");
    auto* nehari = app.add_subcommand("nehari", "constrained minimizers u0/u1/u2");
    auto* stability = app.add_subcommand("stability", "linearized stability of a solve");
    auto* reduce = app.add_subcommand("reduce", "reduced-map scan and derivative table");
    auto* verify = app.add_subcommand("verify", "re-validate emitted profile files");
    auto* diagram = app.add_subcommand("diagram", "full bifurcation diagram pipeline");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return 2;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(g);
        if (solve->parsed()) return cmd_solve(g, false);
        if (stability->parsed()) return cmd_solve(g, true);
        if (branch->parsed()) return run_branches(g, false);
        if (diagram->parsed()) return run_branches(g, true);
        if (nehari->parsed()) return cmd_nehari(g);
        if (reduce->parsed()) return cmd_reduce(g);
        if (verify->parsed()) return cmd_verify(g);
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const BadWeightSpec& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "numerical failure: " << ex.what() << "\n";
        return 3;
    }
    return 0;
}
