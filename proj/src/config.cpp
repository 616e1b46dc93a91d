#include "steady1d/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace steady1d {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

double num(const json& obj, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ConfigError("missing or non-numeric '" + key + "'");
    return obj[key].get<double>();
}

WeightSpec parse_weight(const json& obj, const std::string& where) {
    if (!obj.is_object() || !obj.contains("kind"))
        throw ConfigError(where + " must be an object with a 'kind'");
    const std::string kind = obj["kind"].get<std::string>();
    if (kind == "constant") {
        check_keys(obj, {"kind", "c"}, where);
        return WeightSpec::constant(num(obj, "c"));
    }
    if (kind == "affine") {
        check_keys(obj, {"kind", "c0", "c1"}, where);
        return WeightSpec::affine(num(obj, "c0"), num(obj, "c1"));
    }
    if (kind == "cosine") {
        check_keys(obj, {"kind", "c0", "c1", "k"}, where);
        return WeightSpec::cosine(num(obj, "c0"), num(obj, "c1"), num(obj, "k"));
    }
    if (kind == "samples") {
        check_keys(obj, {"kind", "values"}, where);
        if (!obj.contains("values") || !obj["values"].is_array())
            throw ConfigError(where + ".values must be an array");
        return WeightSpec::samples(obj["values"].get<std::vector<double>>());
    }
    if (kind == "csv") {
        check_keys(obj, {"kind", "path"}, where);
        return WeightSpec::csv(obj["path"].get<std::string>());
    }
    throw ConfigError(where + ": unknown weight kind '" + kind + "'");
}

std::pair<double, double> parse_interval(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.size() != 2)
        throw ConfigError(where + " must be [lo, hi]");
    return {arr[0].get<double>(), arr[1].get<double>()};
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& ex) {
        throw ConfigError(std::string("JSON parse error: ") + ex.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    check_keys(root,
               {"exponents", "grid", "weights", "variant", "solver", "lambda",
                "continuation", "reduce", "subintervals", "initial", "output"},
               "config");

    if (!root.contains("exponents") || !root.contains("weights"))
        throw ConfigError("config needs 'exponents' and 'weights'");

    const auto& je = root["exponents"];
    check_keys(je, {"p", "q"}, "exponents");
    RunConfig cfg;
    try {
        cfg.exponents = Exponents(num(je, "p"), num(je, "q"));
    } catch (const PreconditionViolated& ex) {
        throw ConfigError(ex.what());
    }

    if (root.contains("grid")) {
        check_keys(root["grid"], {"n"}, "grid");
        if (!root["grid"].contains("n") || !root["grid"]["n"].is_number_integer())
            throw ConfigError("grid.n must be an integer");
        cfg.n = root["grid"]["n"].get<int>();
        if (cfg.n < 3) throw ConfigError("grid.n must be at least 3");
    }

    const auto& jw = root["weights"];
    check_keys(jw, {"m", "a", "b0", "b1"}, "weights");
    if (!jw.contains("m") || !jw.contains("a"))
        throw ConfigError("weights needs 'm' and 'a'");
    cfg.m = parse_weight(jw["m"], "weights.m");
    cfg.a = parse_weight(jw["a"], "weights.a");
    cfg.b0 = jw.contains("b0") ? num(jw, "b0") : 0.0;
    cfg.b1 = jw.contains("b1") ? num(jw, "b1") : 0.0;

    if (root.contains("variant")) {
        const std::string v = root["variant"].get<std::string>();
        if (v == "P")
            cfg.variant = ProblemVariant::P;
        else if (v == "Q")
            cfg.variant = ProblemVariant::Q;
        else
            throw ConfigError("variant must be 'P' or 'Q'");
    }

    if (root.contains("solver")) {
        const auto& js = root["solver"];
        check_keys(js, {"tol_res", "max_iter", "damping", "floor_eps"}, "solver");
        if (js.contains("tol_res")) cfg.solver.tol_res = num(js, "tol_res");
        if (js.contains("max_iter")) cfg.solver.max_iter = js["max_iter"].get<int>();
        if (js.contains("damping")) cfg.solver.damping = js["damping"].get<bool>();
        if (js.contains("floor_eps")) cfg.solver.floor_eps = num(js, "floor_eps");
        if (!(cfg.solver.tol_res > 0.0) || cfg.solver.max_iter < 1)
            throw ConfigError("solver options out of range");
    }

    if (root.contains("lambda")) {
        const auto& jl = root["lambda"];
        check_keys(jl, {"value", "sweep"}, "lambda");
        if (jl.contains("value")) cfg.lambda_value = num(jl, "value");
        if (jl.contains("sweep"))
            cfg.lambda_sweep = jl["sweep"].get<std::vector<double>>();
    }

    if (root.contains("continuation")) {
        const auto& jc = root["continuation"];
        check_keys(jc,
                   {"ds", "ds_min", "ds_max", "n_steps", "lambda_max", "sup_cap",
                    "seeds"},
                   "continuation");
        if (jc.contains("ds")) cfg.continuation.ds = num(jc, "ds");
        if (jc.contains("ds_min")) cfg.continuation.ds_min = num(jc, "ds_min");
        if (jc.contains("ds_max")) cfg.continuation.ds_max = num(jc, "ds_max");
        if (jc.contains("n_steps")) cfg.continuation.n_steps = jc["n_steps"].get<int>();
        if (jc.contains("lambda_max"))
            cfg.continuation.lambda_abs_max = num(jc, "lambda_max");
        if (jc.contains("sup_cap")) cfg.continuation.sup_cap = num(jc, "sup_cap");
        if (jc.contains("seeds")) {
            for (const auto& jseed : jc["seeds"]) {
                check_keys(jseed, {"type", "t", "family", "lambda", "direction", "label"},
                           "continuation.seeds[]");
                SeedSpec s;
                s.type = jseed.value("type", "constant");
                if (s.type != "constant" && s.type != "nehari")
                    throw ConfigError("seed type must be 'constant' or 'nehari'");
                if (jseed.contains("t")) s.t = num(jseed, "t");
                s.family = jseed.value("family", "");
                if (jseed.contains("lambda")) s.lambda = num(jseed, "lambda");
                s.direction = jseed.value("direction", 1);
                if (s.direction != 1 && s.direction != -1)
                    throw ConfigError("seed direction must be +1 or -1");
                s.label = jseed.value("label", "branch" + std::to_string(cfg.seeds.size()));
                cfg.seeds.push_back(std::move(s));
            }
        }
    }
    cfg.continuation.newton = cfg.solver;

    if (root.contains("reduce")) {
        const auto& jr = root["reduce"];
        check_keys(jr, {"t_min", "t_max", "t_points", "lambdas"}, "reduce");
        cfg.reduce.t_min = jr.contains("t_min") ? num(jr, "t_min") : 0.0;
        cfg.reduce.t_max = jr.contains("t_max") ? num(jr, "t_max") : 1.0;
        cfg.reduce.t_points = jr.value("t_points", 0);
        if (jr.contains("lambdas"))
            cfg.reduce.lambdas = jr["lambdas"].get<std::vector<double>>();
        if (cfg.reduce.t_points > 0 && !(cfg.reduce.t_min > 0.0))
            throw ConfigError("reduce.t_min must be positive");
    }

    if (root.contains("subintervals")) {
        const auto& jsub = root["subintervals"];
        check_keys(jsub, {"Dplus", "Dminus"}, "subintervals");
        if (!jsub.contains("Dplus") || !jsub.contains("Dminus"))
            throw ConfigError("subintervals needs both Dplus and Dminus");
        cfg.Dplus = parse_interval(jsub["Dplus"], "subintervals.Dplus");
        cfg.Dminus = parse_interval(jsub["Dminus"], "subintervals.Dminus");
    }

    if (root.contains("initial"))
        cfg.initial = parse_weight(root["initial"], "initial");

    if (root.contains("output")) {
        check_keys(root["output"], {"dir"}, "output");
        if (root["output"].contains("dir"))
            cfg.out_dir = root["output"]["dir"].get<std::string>();
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace steady1d
