#include "nijhydro/config.hpp"

#include <fstream>
#include <json.hpp>

#include "nijhydro/expr.hpp"
#include "nijhydro/selftest.hpp"

namespace nijhydro {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

Func1 func_from(const json& j, const std::string& where, const std::string& var) {
    if (!j.is_string()) throw ConfigError(where + " must be an expression string");
    return Expression::parse(j.get<std::string>()).as_func1(var);
}

BlockSpec parse_blocks(const json& j) {
    BlockSpec spec;
    if (!j.is_array() || j.empty()) throw ConfigError("operator.blocks must be a non-empty array");
    for (const auto& b : j) {
        require_keys(b, "operator.blocks[]", {"type", "size", "lambda", "variable"});
        const std::string type = b.at("type").get<std::string>();
        if (type == "jordan") {
            const int k = b.at("size").get<int>();
            if (k < 1 || k > 16) throw ConfigError("jordan block size must be in 1..16");
            spec.blocks.push_back(Block::jordan(k));
        } else if (type == "diagonal") {
            const std::string var = b.value("variable", "s");
            Func1 lam = b.contains("lambda") ? func_from(b.at("lambda"), "operator lambda", var)
                                             : func_identity();
            spec.blocks.push_back(Block::diagonal(std::move(lam)));
        } else {
            throw ConfigError("unknown block type '" + type + "'");
        }
    }
    if (spec.dimension() > 16) throw ConfigError("total dimension exceeds 16");
    return spec;
}

std::vector<double> axis_nodes(const json& j, const std::string& where) {
    require_keys(j, where, {"min", "max", "count"});
    const double lo = j.at("min").get<double>();
    const double hi = j.at("max").get<double>();
    const int count = j.at("count").get<int>();
    if (count < 1 || hi < lo) throw ConfigError("bad axis spec in " + where);
    std::vector<double> nodes;
    for (int i = 0; i < count; ++i)
        nodes.push_back(count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (count - 1));
    return nodes;
}

ScalarField family_field(const json& j, const std::string& where, int n) {
    if (!j.is_string()) throw ConfigError(where + " must be an expression string");
    return Expression::parse(j.get<std::string>()).as_scalar_field(n);
}

OperatorField parse_verify_m(const json& j, const RunConfig& cfg) {
    require_keys(j, "verify check m", {"blocks", "variable", "family"});
    if (j.contains("family")) {
        if (!cfg.builtin)
            throw ConfigError("'family' symmetries are only defined for builtin operators");
        const json& f = j.at("family");
        require_keys(f, "verify family", {"f", "g", "a", "b", "c"});
        auto field = [&](const char* key) {
            return f.contains(key) ? family_field(f.at(key), std::string("family.") + key, 3)
                                   : zero_field(3);
        };
        if (cfg.builtin_name == "counterexample1")
            return counterexample1_symmetry(field("f"), field("g"), field("a"), field("b"),
                                            field("c"));
        return counterexample2_symmetry(field("f"), field("g"), field("a"), field("b"),
                                        field("c"));
    }
    if (!j.contains("blocks"))
        throw ConfigError("verify check m needs 'blocks' functions or a 'family'");
    const std::string var = j.value("variable", "s");
    const json& blocks = j.at("blocks");
    if (!blocks.is_array() || blocks.size() != cfg.spec.blocks.size())
        throw ConfigError("m.blocks must list functions per operator block");
    std::vector<std::vector<Func1>> per_block;
    for (size_t b = 0; b < blocks.size(); ++b) {
        const json& fb = blocks[b];
        if (!fb.is_array()) throw ConfigError("m.blocks[] must be arrays of expressions");
        std::vector<Func1> fs;
        for (const auto& e : fb) fs.push_back(func_from(e, "m.blocks[]", var));
        per_block.push_back(std::move(fs));
    }
    return compose_symmetry(cfg.spec, std::move(per_block));
}

void parse_tolerances(const json& j, Tolerances& tol) {
    require_keys(j, "tolerances",
                 {"newton_tol", "newton_max_iter", "newton_max_backtrack", "quadrature_abs",
                  "quadrature_max_depth", "extend_tol", "spline_consistency",
                  "min_curve_samples", "max_curve_samples", "symmetry_tol", "closedness_tol",
                  "oncurve_tol"});
    tol.newton_tol = j.value("newton_tol", tol.newton_tol);
    tol.newton_max_iter = j.value("newton_max_iter", tol.newton_max_iter);
    tol.newton_max_backtrack = j.value("newton_max_backtrack", tol.newton_max_backtrack);
    tol.quadrature_abs = j.value("quadrature_abs", tol.quadrature_abs);
    tol.quadrature_max_depth = j.value("quadrature_max_depth", tol.quadrature_max_depth);
    tol.extend_tol = j.value("extend_tol", tol.extend_tol);
    tol.spline_consistency = j.value("spline_consistency", tol.spline_consistency);
    tol.min_curve_samples = j.value("min_curve_samples", tol.min_curve_samples);
    tol.max_curve_samples = j.value("max_curve_samples", tol.max_curve_samples);
    tol.symmetry_tol = j.value("symmetry_tol", tol.symmetry_tol);
    tol.closedness_tol = j.value("closedness_tol", tol.closedness_tol);
    tol.oncurve_tol = j.value("oncurve_tol", tol.oncurve_tol);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("JSON parse failure: ") + e.what());
    }
    require_keys(j, "config",
                 {"operator", "curve", "hierarchy", "grids", "tolerances", "seed", "output",
                  "verify", "threads"});

    RunConfig cfg;

    const json& op = j.at("operator");
    require_keys(op, "operator", {"blocks", "builtin"});
    if (op.contains("builtin")) {
        cfg.builtin = true;
        cfg.builtin_name = op.at("builtin").get<std::string>();
        if (cfg.builtin_name == "counterexample1")
            cfg.L = counterexample1_operator();
        else if (cfg.builtin_name == "counterexample2")
            cfg.L = counterexample2_operator();
        else
            throw ConfigError("unknown builtin operator '" + cfg.builtin_name + "'");
        cfg.n = 3;
    } else {
        if (!op.contains("blocks")) throw ConfigError("operator needs 'blocks' or 'builtin'");
        cfg.spec = parse_blocks(op.at("blocks"));
        cfg.L = make_operator(cfg.spec);
        cfg.n = cfg.spec.dimension();
    }

    if (j.contains("curve")) {
        const json& c = j.at("curve");
        require_keys(c, "curve", {"components", "variable", "domain", "order"});
        const std::string var = c.value("variable", "x");
        const json& comps = c.at("components");
        if (!comps.is_array() || static_cast<int>(comps.size()) != cfg.n)
            throw ConfigError("curve.components must list n expressions");
        std::vector<Func1> fs;
        for (const auto& e : comps) fs.push_back(func_from(e, "curve.components[]", var));
        const json& dom = c.at("domain");
        if (!dom.is_array() || dom.size() != 2) throw ConfigError("curve.domain must be [a, b]");
        const double a = dom[0].get<double>(), b = dom[1].get<double>();
        if (!(a < 0.0 && b > 0.0))
            throw ConfigError("curve.domain must contain the base parameter 0");
        const int order = c.value("order", 4);
        cfg.curve = Curve(std::move(fs), a, b, order);
    }

    if (j.contains("hierarchy")) {
        const json& h = j.at("hierarchy");
        if (h.is_string()) {
            if (h.get<std::string>() != "standard")
                throw ConfigError("hierarchy must be \"standard\" or {\"seed\": expr}");
            cfg.standard_hierarchy_requested = true;
        } else {
            require_keys(h, "hierarchy", {"seed"});
            cfg.standard_hierarchy_requested = false;
            cfg.seed_field = Expression::parse(h.at("seed").get<std::string>())
                                 .as_scalar_field(cfg.n);
        }
    }

    if (j.contains("grids")) {
        const json& g = j.at("grids");
        require_keys(g, "grids", {"x", "t"});
        cfg.x_nodes = axis_nodes(g.at("x"), "grids.x");
        const json& t = g.at("t");
        if (t.is_array()) {
            if (static_cast<int>(t.size()) != cfg.n - 1)
                throw ConfigError("grids.t must list n-1 axes");
            for (const auto& ax : t) cfg.t_axes.push_back(axis_nodes(ax, "grids.t[]"));
        } else {
            std::vector<double> nodes = axis_nodes(t, "grids.t");
            cfg.t_axes.assign(static_cast<size_t>(cfg.n) - 1, nodes);
        }
        cfg.has_grids = true;
    }

    if (j.contains("tolerances")) parse_tolerances(j.at("tolerances"), cfg.tol);
    cfg.seed = j.value("seed", 0);
    cfg.threads = j.value("threads", 1);
    if (j.contains("output")) {
        require_keys(j.at("output"), "output", {"dir"});
        cfg.out_dir = j.at("output").value("dir", ".");
    }

    if (j.contains("verify")) {
        const json& v = j.at("verify");
        require_keys(v, "verify", {"probes", "box", "checks"});
        cfg.verify_probes = v.value("probes", 20);
        if (v.contains("box")) {
            const json& b = v.at("box");
            require_keys(b, "verify.box", {"min", "max"});
            Box box;
            const auto lo = b.at("min").get<std::vector<double>>();
            const auto hi = b.at("max").get<std::vector<double>>();
            if (static_cast<int>(lo.size()) != cfg.n || static_cast<int>(hi.size()) != cfg.n)
                throw ConfigError("verify.box min/max must have n entries");
            box.lo = Eigen::Map<const Vector>(lo.data(), cfg.n);
            box.hi = Eigen::Map<const Vector>(hi.data(), cfg.n);
            cfg.probe_box = box;
        }
        for (const auto& c : v.at("checks")) {
            require_keys(c, "verify.checks[]", {"check", "expect", "m", "f", "label"});
            VerifyCheck chk;
            chk.kind = c.at("check").get<std::string>();
            const std::string expect = c.value("expect", "pass");
            if (expect != "pass" && expect != "fail")
                throw ConfigError("expect must be \"pass\" or \"fail\"");
            chk.expect_pass = expect == "pass";
            chk.label = c.value("label", chk.kind);
            if (chk.kind == "symmetry" || chk.kind == "strong_symmetry") {
                if (!c.contains("m")) throw ConfigError(chk.kind + " check needs 'm'");
                chk.M = parse_verify_m(c.at("m"), cfg);
            } else if (chk.kind == "conservation_law") {
                if (!c.contains("f")) throw ConfigError("conservation_law check needs 'f'");
                chk.f = Expression::parse(c.at("f").get<std::string>()).as_scalar_field(cfg.n);
            } else if (chk.kind != "torsion") {
                throw ConfigError("unknown check kind '" + chk.kind + "'");
            }
            cfg.checks.push_back(std::move(chk));
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

}  // namespace nijhydro
