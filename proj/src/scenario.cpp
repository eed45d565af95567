#include "circtrace/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace ct {

namespace {

MatrixTrigPoly mono(int k, cplx v) { return MatrixTrigPoly::monomial(k, Mat::Constant(1, 1, v)); }

DiscreteOp single(int m, int n, cplx v) {
    Patch p(1);
    p.add(m, n, Mat::Constant(1, 1, v));
    return DiscreteOp::patch_only(p);
}

Mat pauli(int a) {
    Mat s = Mat::Zero(2, 2);
    const cplx I(0.0, 1.0);
    if (a == 0) s << 0.0, 1.0, 1.0, 0.0;
    if (a == 1) s << 0.0, -I, I, 0.0;
    if (a == 2) s << 1.0, 0.0, 0.0, -1.0;
    return s;
}

const std::map<std::string, std::function<DiscreteOp()>>& registry() {
    static const std::map<std::string, std::function<DiscreteOp()>> r = {
        {"identity", [] { return DiscreteOp::identity(); }},
        {"abs", [] { return DiscreteOp(PhgSymbol::power(1.0)); }},
        {"inv_abs", [] { return DiscreteOp(PhgSymbol::power(-1.0)); }},
        {"inv_square", [] { return DiscreteOp(PhgSymbol::power(-2.0)); }},
        {"hardy_up", [] { return DiscreteOp(PhgSymbol::term(0.0, mono(1, 1.0), MatrixTrigPoly(1, 0))); }},
        {"hardy_down", [] { return DiscreteOp(PhgSymbol::term(0.0, mono(-1, 1.0), MatrixTrigPoly(1, 0))); }},
        {"hardy_projection", [] { return DiscreteOp(PhgSymbol::term(0.0, mono(0, 1.0), MatrixTrigPoly(1, 0))); }},
        {"sign",
         [] {
             Patch p(1);
             p.add(0, 0, Mat::Constant(1, 1, 1.0));
             return DiscreteOp(PhgSymbol::term(0.0, mono(0, 1.0), mono(0, -1.0)), p);
         }},
        {"shift", [] { return DiscreteOp::multiplication(mono(1, 1.0)); }},
        {"worked_A", [] { return DiscreteOp(PhgSymbol::term(1.0, mono(-1, 1.0), mono(-1, 1.0))); }},
        {"worked_B", [] { return DiscreteOp(PhgSymbol::term(0.0, mono(1, 1.0), mono(1, 1.0))); }},
        {"mode1_projection", [] { return single(1, 1, 1.0); }},
        {"nilpotent_up", [] { return single(1, -1, 1.0); }},
        {"nilpotent_down", [] { return single(-1, 1, 1.0); }},
        {"mode0_unit", [] { return single(0, 0, 1.0); }},
        {"pauli_x", [] { return mode0_block(pauli(0)); }},
        {"pauli_y", [] { return mode0_block(pauli(1)); }},
        {"pauli_z", [] { return mode0_block(pauli(2)); }},
    };
    return r;
}

struct Ctx {
    Json operators = Json::object();
    std::string base;
    std::map<std::string, std::shared_ptr<const DiscreteOp>> cache;

    std::shared_ptr<const DiscreteOp> op(const Json& idj, const std::string& path) {
        if (!idj.is_string()) throw InputError(path, "operator_id must be a string");
        const std::string id = idj.get<std::string>();
        auto c = cache.find(id);
        if (c != cache.end()) return c->second;
        std::shared_ptr<const DiscreteOp> r;
        if (operators.contains(id)) {
            const Json& d = operators[id];
            if (d.is_string()) {
                std::filesystem::path f = std::filesystem::path(base) / d.get<std::string>();
                std::ifstream in(f);
                if (!in) throw InputError("operators." + id, "cannot open " + f.string());
                Json doc;
                try {
                    doc = Json::parse(in);
                } catch (const Json::parse_error& e) {
                    throw InputError("operators." + id, std::string("malformed JSON: ") + e.what());
                }
                r = std::make_shared<const DiscreteOp>(op_from_json(doc, "operators." + id));
            } else {
                r = std::make_shared<const DiscreteOp>(op_from_json(d, "operators." + id));
            }
        } else {
            r = std::make_shared<const DiscreteOp>(builtin_operator_at(id, path));
        }
        cache[id] = r;
        return r;
    }

    static DiscreteOp builtin_operator_at(const std::string& id, const std::string& path) {
        auto it = registry().find(id);
        if (it == registry().end()) throw InputError(path, "unknown operator_id '" + id + "'");
        return it->second();
    }
};

const Json& need(const Json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw InputError(path, std::string("missing required field '") + key + "'");
    return j.at(key);
}

double num(const Json& j, const std::string& path) {
    if (!j.is_number()) throw InputError(path, "expected a number");
    return j.get<double>();
}

int integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw InputError(path, "expected an integer");
    return j.get<int>();
}

double opt_num(const Json& j, const char* key, double dflt, const std::string& path) {
    return j.contains(key) ? num(j.at(key), path + "." + key) : dflt;
}

Expr expr(const Json& j, const std::string& path) {
    if (!j.is_string()) throw InputError(path, "coeff_expr must be a string");
    try {
        return Expr::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw InputError(path, e.what());
    }
}

Weight weight(const Json& doc, const char* key, const std::string& path) {
    const Json& w = need(doc, key, path);
    if (!w.is_string()) throw InputError(path + "." + key, "weight_id must be a string");
    Weight Q = builtin_weight(w.get<std::string>());
    if (doc.contains("weight_power")) Q = Q.power(num(doc["weight_power"], path + ".weight_power"));
    return Q;
}

ParamDomain domain(const Json& j, const std::string& path) {
    check_keys(j, {"dim", "ranges", "h", "points", "richardson"}, path);
    ParamDomain d;
    d.dim = integer(need(j, "dim", path), path + ".dim");
    if (d.dim < 1 || d.dim > kMaxParamDim) throw InputError(path + ".dim", "dimension must be in 1..4");
    const Json& r = need(j, "ranges", path);
    if (!r.is_array() || int(r.size()) != d.dim) throw InputError(path + ".ranges", "need one [lo, hi] per axis");
    for (int a = 0; a < d.dim; ++a) {
        std::string p = path + ".ranges[" + std::to_string(a) + "]";
        if (!r[a].is_array() || r[a].size() != 2) throw InputError(p, "expected [lo, hi]");
        d.lo[a] = num(r[a][0], p);
        d.hi[a] = num(r[a][1], p);
        if (!(d.hi[a] > d.lo[a])) throw InputError(p, "empty range");
    }
    d.h = opt_num(j, "h", 1e-3, path);
    if (!(d.h > 0.0)) throw InputError(path + ".h", "step must be positive");
    if (j.contains("points")) d.points = integer(j["points"], path + ".points");
    if (d.points < 1) throw InputError(path + ".points", "need at least one point");
    if (j.contains("richardson")) {
        if (!j["richardson"].is_boolean()) throw InputError(path + ".richardson", "expected a boolean");
        d.richardson = j["richardson"].get<bool>();
    }
    return d;
}

Mat matrix(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw InputError(path, "expected a square matrix");
    const int n = int(j.size());
    Mat M(n, n);
    for (int i = 0; i < n; ++i) {
        if (!j[i].is_array() || int(j[i].size()) != n) throw InputError(path, "expected a square matrix");
        for (int k = 0; k < n; ++k) M(i, k) = cplx_from_json(j[i][k], path + "[" + std::to_string(i) + "]");
    }
    return M;
}

TrigPoly trig(const Json& j, const std::string& path) {
    check_keys(j, {"K", "coeffs"}, path);
    int K = integer(need(j, "K", path), path + ".K");
    const Json& c = need(j, "coeffs", path);
    if (K < 0 || !c.is_array() || int(c.size()) != 2 * K + 1) throw InputError(path + ".coeffs", "need 2K+1 coefficients");
    std::vector<cplx> v;
    for (size_t i = 0; i < c.size(); ++i) v.push_back(cplx_from_json(c[i], path + ".coeffs"));
    return TrigPoly(K, v);
}

Loop loop(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) throw InputError(path, "a loop is three trigonometric polynomials");
    Loop L;
    for (int i = 0; i < 3; ++i) L.c[i] = trig(j[i], path + "[" + std::to_string(i) + "]");
    return L;
}

struct Checks {
    Json list = Json::array();
    bool pass = true;

    void add(const std::string& name, double residual, double tol, Json extra = Json::object()) {
        bool ok = std::isfinite(residual) && residual <= tol;
        extra["name"] = name;
        extra["residual"] = residual;
        extra["tolerance"] = tol;
        extra["pass"] = ok;
        list.push_back(extra);
        pass = pass && ok;
    }
};

Json laurent_json(const LaurentData& L) {
    return {{"residue", cplx_to_json(L.residue)},   {"finite_part", cplx_to_json(L.finite_part)},
            {"linear", cplx_to_json(L.linear)},     {"pole2", cplx_to_json(L.pole2)},
            {"pole3", cplx_to_json(L.pole3)},       {"pole_order", L.pole_order()}};
}

Json base_summary(const std::string& name, const std::string& kind, const RunOptions& opt) {
    return {{"scenario", name},
            {"kind", kind},
            {"seed", opt.seed},
            {"tolerance_scale", opt.tolerance_scale},
            {"functional", nullptr},
            {"operator_id", nullptr},
            {"weight_id", nullptr},
            {"value", nullptr},
            {"laurent", nullptr},
            {"truncation_tail_degree", nullptr}};
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// CSV of grid points and the listed forms (real and imaginary parts per component)
std::string forms_csv(const std::vector<std::pair<std::string, FormFamily>>& forms, const std::vector<Point>& grid,
                      int p) {
    std::ostringstream os;
    for (int a = 0; a < p; ++a) os << (a ? "," : "") << 'x' << a + 1;
    for (auto& [name, f] : forms)
        for (unsigned m : subsets(f.p, f.k)) {
            std::string ax;
            for (int a = 0; a < f.p; ++a)
                if (m & (1u << a)) ax += std::to_string(a + 1);
            os << ',' << name << "_dx" << ax << "_re," << name << "_dx" << ax << "_im";
        }
    os << '\n';
    for (auto& x : grid) {
        for (int a = 0; a < p; ++a) os << (a ? "," : "") << fmt(x[a]);
        for (auto& [name, f] : forms)
            for (auto v : f.coeffs(x)) os << ',' << fmt(v.real()) << ',' << fmt(v.imag());
        os << '\n';
    }
    return os.str();
}

OperatorForm connection(const Json& j, int p, Ctx& ctx, const std::string& path) {
    check_keys(j, {"terms"}, path);
    const Json& terms = need(j, "terms", path);
    if (!terms.is_array() || terms.empty()) throw InputError(path + ".terms", "expected a non-empty array");
    OperatorForm th(p, 1);
    for (size_t i = 0; i < terms.size(); ++i) {
        std::string tp = path + ".terms[" + std::to_string(i) + "]";
        check_keys(terms[i], {"coeff_expr", "operator_id", "axis"}, tp);
        int axis = integer(need(terms[i], "axis", tp), tp + ".axis");
        if (axis < 1 || axis > p) throw InputError(tp + ".axis", "axis out of range 1.." + std::to_string(p));
        th.add(1u << (axis - 1), expr(need(terms[i], "coeff_expr", tp), tp + ".coeff_expr"),
               ctx.op(need(terms[i], "operator_id", tp), tp + ".operator_id"));
    }
    return th;
}

ExprForm expected_form(const Json& j, int p, int k, const std::string& path) {
    if (!j.is_array()) throw InputError(path, "expected an array of {axes, coeff_expr}");
    ExprForm e{p, k, {}};
    for (size_t i = 0; i < j.size(); ++i) {
        std::string tp = path + "[" + std::to_string(i) + "]";
        check_keys(j[i], {"axes", "coeff_expr"}, tp);
        const Json& ax = need(j[i], "axes", tp);
        unsigned m = 0;
        std::vector<int> axes;
        for (auto& a : ax) axes.push_back(integer(a, tp + ".axes"));
        int sign = 1;
        for (size_t u = 0; u < axes.size(); ++u) {
            if (axes[u] < 1 || axes[u] > p) throw InputError(tp + ".axes", "axis out of range");
            unsigned bit = 1u << (axes[u] - 1);
            if (m & bit) throw InputError(tp + ".axes", "repeated axis");
            sign *= wedge_sign(m, bit);
            m |= bit;
        }
        if (int(axes.size()) != k) throw InputError(tp + ".axes", "wrong number of axes for the form degree");
        e.c[m] = e.get(m) + Expr(double(sign)) * expr(need(j[i], "coeff_expr", tp), tp + ".coeff_expr");
    }
    return e;
}

void integral_check(const Json& doc, const FormFamily& f, const ParamDomain& dom, double scale, Checks& checks,
                    Json& summary, const std::string& path) {
    if (!doc.contains("integral")) return;
    const Json& ij = doc["integral"];
    check_keys(ij, {"expect", "nodes", "relative_tolerance"}, path + ".integral");
    if (f.k != 2) throw InputError(path + ".integral", "integral needs a 2-form");
    int nodes = ij.contains("nodes") ? integer(ij["nodes"], path + ".integral.nodes") : 48;
    cplx v = integrate_2form(f, dom, nodes);
    cplx ex = cplx_from_json(need(ij, "expect", path + ".integral"), path + ".integral.expect");
    double tol = opt_num(ij, "relative_tolerance", 1e-3, path + ".integral") * scale;
    summary["integral"] = cplx_to_json(v);
    checks.add("integral", std::abs(v - ex) / std::max(std::abs(ex), 1e-300), tol,
               {{"value", cplx_to_json(v)}, {"expected", cplx_to_json(ex)}});
}

// ---------------------------------------------------------------------------

ScenarioReport run_trace(const Json& doc, Ctx& ctx, const RunOptions& opt, Json s) {
    check_keys(doc, {"kind", "description", "operators", "operator_id", "weight_id", "weight_power", "functional",
                     "expect", "tolerance"},
               "");
    auto A = ctx.op(need(doc, "operator_id", ""), "operator_id");
    std::string fn = doc.value("functional", std::string("weighted"));
    s["functional"] = fn;
    s["operator_id"] = doc["operator_id"];
    s["truncation_tail_degree"] = A->tail_degree();
    cplx v = 0.0;
    if (fn == "weighted") {
        Weight Q = weight(doc, "weight_id", "");
        s["weight_id"] = doc["weight_id"];
        v = weighted_trace(*A, Q);
        s["laurent"] = laurent_json(kv_pole_check(*A, Q));
    } else if (fn == "canonical") {
        v = canonical_trace(*A);
    } else if (fn == "residue") {
        v = residue(*A);
    } else if (fn == "leading") {
        v = leading_trace(*A);
    } else if (fn == "conditioned") {
        v = conditioned_trace(*A);
    } else if (fn == "finite_part") {
        v = finite_part_trace(*A).finite_part;
    } else {
        throw InputError("functional", "unknown functional '" + fn + "'");
    }
    s["value"] = cplx_to_json(v);
    Checks c;
    if (doc.contains("expect")) {
        cplx ex = cplx_from_json(doc["expect"], "expect");
        c.add("value", std::abs(v - ex), opt_num(doc, "tolerance", 1e-10, "") * opt.tolerance_scale,
              {{"expected", cplx_to_json(ex)}});
    }
    s["checks"] = c.list;
    s["pass"] = c.pass;
    return {s, "", c.pass};
}

ScenarioReport run_defect(const Json& doc, Ctx& ctx, const RunOptions& opt, Json s) {
    check_keys(doc, {"kind", "description", "operators", "defect", "operator_id", "operator_id_b", "weight_id",
                     "weight_power", "weight_id_2", "depth", "expect_lhs", "expect_rhs", "tolerance"},
               "");
    std::string which = doc.value("defect", std::string("hochschild"));
    auto A = ctx.op(need(doc, "operator_id", ""), "operator_id");
    Weight Q = weight(doc, "weight_id", "");
    int depth = doc.contains("depth") ? integer(doc["depth"], "depth") : 0;
    DefectPair d;
    if (which == "hochschild") {
        auto B = ctx.op(need(doc, "operator_id_b", ""), "operator_id_b");
        d = hochschild_defect(*A, *B, Q, depth);
    } else if (which == "weight_change") {
        Weight Q2 = weight(doc, "weight_id_2", "");
        d = weight_change_defect(*A, Q, Q2, depth);
    } else {
        throw InputError("defect", "unknown defect '" + which + "'");
    }
    const double tol = opt_num(doc, "tolerance", 1e-10, "") * opt.tolerance_scale;
    s["functional"] = which;
    s["operator_id"] = doc["operator_id"];
    s["weight_id"] = doc["weight_id"];
    s["value"] = {{"lhs", cplx_to_json(d.lhs)}, {"rhs", cplx_to_json(d.rhs)}};
    s["truncation_tail_degree"] = d.tail_degree;
    Checks c;
    c.add("lhs_equals_rhs", std::abs(d.lhs - d.rhs), tol);
    if (doc.contains("expect_lhs"))
        c.add("lhs", std::abs(d.lhs - cplx_from_json(doc["expect_lhs"], "expect_lhs")), tol);
    if (doc.contains("expect_rhs"))
        c.add("rhs", std::abs(d.rhs - cplx_from_json(doc["expect_rhs"], "expect_rhs")), tol);
    s["checks"] = c.list;
    s["pass"] = c.pass;
    return {s, "", c.pass};
}

ScenarioReport run_kv(const Json& doc, Ctx& ctx, const RunOptions& opt, Json s) {
    check_keys(doc, {"kind", "description", "operators", "operator_id", "weight_id", "weight_power", "window",
                     "tolerance"},
               "");
    auto A = ctx.op(need(doc, "operator_id", ""), "operator_id");
    Weight Q = weight(doc, "weight_id", "");
    const double tol = opt_num(doc, "tolerance", 1e-8, "") * opt.tolerance_scale;
    LaurentData L = kv_pole_check(*A, Q);
    int N = doc.contains("window") ? integer(doc["window"], "window") : 256;
    LaurentData O = spectral_zeta_laurent(*A, Q, N);
    cplx r = residue(*A) / Q.order();
    s["functional"] = "kv";
    s["operator_id"] = doc["operator_id"];
    s["weight_id"] = doc["weight_id"];
    s["value"] = cplx_to_json(L.finite_part);
    s["laurent"] = laurent_json(L);
    s["oracle_laurent"] = laurent_json(O);
    s["truncation_tail_degree"] = A->tail_degree();
    Checks c;
    c.add("residue_vs_res_over_q", std::abs(L.residue - r), tol);
    c.add("oracle_residue", std::abs(O.residue - r), tol);
    c.add("oracle_finite_part", std::abs(O.finite_part - L.finite_part), tol);
    s["checks"] = c.list;
    s["pass"] = c.pass;
    return {s, "", c.pass};
}

ScenarioReport run_chern(const Json& doc, Ctx& ctx, const RunOptions& opt, Json s) {
    check_keys(doc, {"kind", "description", "operators", "domain", "connection", "functional", "weight_id",
                     "weight_power", "j", "tolerance", "expect_form", "min_peak", "integral", "depth"},
               "");
    ParamDomain dom = domain(need(doc, "domain", ""), "domain");
    OperatorForm th = connection(need(doc, "connection", ""), dom.dim, ctx, "connection");
    int j = doc.contains("j") ? integer(doc["j"], "j") : 1;
    if (j < 1 || 2 * j > dom.dim) throw InputError("j", "need 1 <= j and 2j <= dim");
    std::string fn = doc.value("functional", std::string("finite"));
    const double tol = opt_num(doc, "tolerance", 1e-8, "") * opt.tolerance_scale;
    ComposeCache cache(doc.contains("depth") ? integer(doc["depth"], "depth") : kDefaultDepth);
    auto grid = dom.grid();
    s["functional"] = fn;
    Checks c;
    ExprForm form;
    std::vector<std::pair<std::string, FormFamily>> out;
    if (fn == "weighted") {
        Weight Q = weight(doc, "weight_id", "");
        s["weight_id"] = doc["weight_id"];
        DefectForms d = weighted_chern_defect(th, Q, j, dom, cache);
        form = d.trace_form;
        double peak = max_norm(d.lhs, grid);
        s["value"] = {{"lhs_peak", peak},
                      {"printed_sign_residual", max_diff(d.lhs, d.printed_rhs.family(), grid)},
                      {"observed_sign", -1},
                      {"printed_sign", 1}};
        c.add("defect_balance", max_diff(d.lhs, d.rhs.family(), grid), tol);
        if (doc.contains("min_peak")) {
            double mp = num(doc["min_peak"], "min_peak");
            c.add("nonvacuous", peak >= mp ? 0.0 : mp - peak, 0.0, {{"peak", peak}});
        }
        out = {{"trace", form.family()}, {"lhs", d.lhs}, {"rhs", d.rhs.family()}};
    } else {
        ScalarForms r;
        if (fn == "finite")
            r = finite_chern(th, j, dom, cache);
        else if (fn == "residue")
            r = singular_chern(th, j, SingularFunctional::Residue, dom, cache);
        else if (fn == "leading")
            r = singular_chern(th, j, SingularFunctional::Leading, dom, cache);
        else
            throw InputError("functional", "unknown functional '" + fn + "'");
        form = r.form;
        c.add("closed", max_norm(r.dform, grid), tol);
        s["value"] = {{"form_peak", max_norm(r.form.family(), grid)}};
        out = {{"form", r.form.family()}, {"dform", r.dform}};
    }
    OperatorForm Om = curvature(th, cache);
    c.add("bianchi", op_form_max_norm(bianchi(th, Om, cache), grid, 16), tol);
    if (doc.contains("expect_form"))
        c.add("form", max_diff(form.family(), expected_form(doc["expect_form"], dom.dim, 2 * j, "expect_form").family(), grid),
              tol);
    integral_check(doc, form.family(), dom, opt.tolerance_scale, c, s, "");
    s["truncation_tail_degree"] = -double(cache.depth());
    s["checks"] = c.list;
    s["pass"] = c.pass;
    return {s, forms_csv(out, grid, dom.dim), c.pass};
}

ScenarioReport run_grassmann(const Json& doc, Ctx& ctx, const RunOptions& opt, Json s) {
    check_keys(doc, {"kind", "description", "operators", "domain", "family", "weight_id", "weight_power",
                     "compare_weight_id", "j", "tolerance", "integral", "min_peak"},
               "");
    ParamDomain dom = domain(need(doc, "domain", ""), "domain");
    const Json& fj = need(doc, "family", "");
    check_keys(fj, {"F0", "factors", "terms"}, "family");
    ComposeCache cache;
    GradingFamily fam;
    if (fj.contains("terms")) {
        if (fj.contains("F0") || fj.contains("factors")) throw InputError("family", "give either terms or F0/factors");
        const Json& t = fj["terms"];
        fam.F = OperatorForm(dom.dim, 0);
        for (size_t i = 0; i < t.size(); ++i) {
            std::string tp = "family.terms[" + std::to_string(i) + "]";
            check_keys(t[i], {"coeff_expr", "operator_id"}, tp);
            fam.F.add(0, expr(need(t[i], "coeff_expr", tp), tp + ".coeff_expr"),
                      ctx.op(need(t[i], "operator_id", tp), tp + ".operator_id"));
        }
        fam.dF = fam.F.d();
    } else {
        auto F0 = ctx.op(need(fj, "F0", "family"), "family.F0");
        std::vector<std::pair<Expr, DiscreteOp>> factors;
        if (fj.contains("factors"))
            for (size_t i = 0; i < fj["factors"].size(); ++i) {
                std::string tp = "family.factors[" + std::to_string(i) + "]";
                const Json& f = fj["factors"][i];
                check_keys(f, {"coeff_expr", "operator_id"}, tp);
                factors.push_back({expr(need(f, "coeff_expr", tp), tp + ".coeff_expr"),
                                   *ctx.op(need(f, "operator_id", tp), tp + ".operator_id")});
            }
        fam = conjugation_family(*F0, factors, dom.dim, cache);
    }
    int j = doc.contains("j") ? integer(doc["j"], "j") : 1;
    if (j < 1 || 2 * j > dom.dim) throw InputError("j", "need 1 <= j and 2j <= dim");
    Weight Q = weight(doc, "weight_id", "");
    const double tol = opt_num(doc, "tolerance", 1e-8, "") * opt.tolerance_scale;
    auto grid = dom.grid();
    GrassmannForms g = grassmann_forms(fam, Q, j, dom, cache);
    s["functional"] = "grassmann";
    s["weight_id"] = doc["weight_id"];
    double peak = max_norm(g.omega, grid);
    s["value"] = {{"omega_peak", peak}};
    s["truncation_tail_degree"] = -double(cache.depth());
    Checks c;
    c.add("domega_vs_residue", max_diff(g.domega, g.residue_side, grid), tol);
    if (doc.contains("compare_weight_id")) {
        Weight Q2 = weight(doc, "compare_weight_id", "");
        GrassmannForms g2 = grassmann_forms(fam, Q2, j, dom, cache);
        c.add("weight_independence", max_diff(g.omega, g2.omega, grid), tol);
    }
    if (doc.contains("min_peak")) {
        double mp = num(doc["min_peak"], "min_peak");
        c.add("nonvacuous", peak >= mp ? 0.0 : mp - peak, 0.0, {{"peak", peak}});
    }
    integral_check(doc, g.omega, dom, opt.tolerance_scale, c, s, "");
    s["checks"] = c.list;
    s["pass"] = c.pass;
    return {s, forms_csv({{"omega", g.omega}, {"domega", g.domega}, {"residue_side", g.residue_side}}, grid, dom.dim),
            c.pass};
}

ScenarioReport run_freed(const Json& doc, Ctx&, const RunOptions& opt, Json s) {
    check_keys(doc, {"kind", "description", "s", "window", "third_exponent", "U", "V", "tolerance", "decay_margin"}, "");
    double sv = num(need(doc, "s", ""), "s");
    int N = doc.contains("window") ? integer(doc["window"], "window") : 128;
    std::string te = doc.value("third_exponent", std::string("-s"));
    if (te != "-s" && te != "+s") throw InputError("third_exponent", "expected \"-s\" or \"+s\"");
    Loop U = loop(need(doc, "U", ""), "U"), V = loop(need(doc, "V", ""), "V");
    const double tol = opt_num(doc, "tolerance", 1e-6, "") * opt.tolerance_scale;
    const double margin = opt_num(doc, "decay_margin", 0.3, "");
    const int sign = te == "-s" ? -1 : 1;
    FreedResult r = freed_loop_connection(U, V, sv, N, sign);
    FreedResult rv = freed_loop_connection(V, V, sv, N, sign);
    s["functional"] = "conditioned";
    s["value"] = {{"chern_direct", cplx_to_json(r.chern_direct)},
                  {"chern_conditioned", cplx_to_json(r.chern_conditioned)},
                  {"chern_zeta", cplx_to_json(r.chern_zeta)},
                  {"decay_exponent", r.decay_exponent},
                  {"theta_bandwidth", r.theta_bandwidth},
                  {"third_exponent", te}};
    s["truncation_tail_degree"] = -double(kDefaultDepth);
    Checks c;
    double bound = std::max(-1.0, -2.0 * sv) + margin;
    c.add("decay_exponent", std::max(0.0, r.decay_exponent - bound), 0.0, {{"fit", r.decay_exponent}, {"bound", bound}});
    c.add("direct_vs_conditioned", std::abs(r.chern_direct - r.chern_conditioned), tol);
    c.add("direct_vs_zeta", std::abs(r.chern_direct - r.chern_zeta), tol);
    c.add("conditioned_vs_zeta", std::abs(r.chern_conditioned - r.chern_zeta), tol);
    c.add("curvature_VV", rv.curvature.matrix().cwiseAbs().maxCoeff(), 0.0);
    s["checks"] = c.list;
    s["pass"] = c.pass;
    return {s, "", c.pass};
}

ScenarioReport run_super(const Json& doc, Ctx&, const RunOptions& opt, Json s) {
    check_keys(doc, {"kind", "description", "domain", "even_rank", "odd_rank", "terms", "j", "tolerance"}, "");
    ParamDomain dom = domain(need(doc, "domain", ""), "domain");
    int ne = integer(need(doc, "even_rank", ""), "even_rank"), no = integer(need(doc, "odd_rank", ""), "odd_rank");
    if (ne < 0 || no < 0 || ne + no == 0) throw InputError("even_rank", "ranks must be non-negative and not both zero");
    SuperForm w(dom.dim, ne, no);
    const Json& t = need(doc, "terms", "");
    if (!t.is_array()) throw InputError("terms", "expected an array");
    for (size_t i = 0; i < t.size(); ++i) {
        std::string tp = "terms[" + std::to_string(i) + "]";
        check_keys(t[i], {"coeff_expr", "axes", "matrix"}, tp);
        unsigned m = 0;
        if (t[i].contains("axes"))
            for (auto& a : t[i]["axes"]) {
                int ax = integer(a, tp + ".axes");
                if (ax < 1 || ax > dom.dim) throw InputError(tp + ".axes", "axis out of range");
                m |= 1u << (ax - 1);
            }
        if (mask_degree(m) > 1) throw InputError(tp + ".axes", "superconnection terms are 0- or 1-forms");
        Mat M = matrix(need(t[i], "matrix", tp), tp + ".matrix");
        if (M.rows() != ne + no) throw InputError(tp + ".matrix", "matrix size must equal even_rank + odd_rank");
        try {
            w.add(m, expr(need(t[i], "coeff_expr", tp), tp + ".coeff_expr"), M);
        } catch (const std::invalid_argument& e) {
            throw InputError(tp, e.what());
        }
    }
    int j = doc.contains("j") ? integer(doc["j"], "j") : 1;
    if (j < 1 || 2 * j > dom.dim) throw InputError("j", "need 1 <= j and 2j <= dim");
    const double tol = opt_num(doc, "tolerance", 1e-6, "") * opt.tolerance_scale;
    ScalarForms r;
    try {
        r = super_chern_finite(w, j, dom);
    } catch (const std::invalid_argument& e) {
        throw InputError("terms", e.what());
    }
    auto grid = dom.grid();
    s["functional"] = "supertrace";
    s["value"] = {{"form_peak", max_norm(r.form.family(), grid)}};
    Checks c;
    c.add("closed", max_norm(r.dform, grid), tol);
    s["checks"] = c.list;
    s["pass"] = c.pass;
    return {s, forms_csv({{"form", r.form.family()}, {"dform", r.dform}}, grid, dom.dim), c.pass};
}

}  // namespace

DiscreteOp builtin_operator(const std::string& id) { return Ctx::builtin_operator_at(id, "operator_id"); }

std::vector<std::string> builtin_operator_ids() {
    std::vector<std::string> r;
    for (auto& [k, v] : registry()) r.push_back(k);
    return r;
}

Weight builtin_weight(const std::string& id) {
    if (id == "abs_D") return Weight::abs_D();
    if (id == "laplacian") return Weight::laplacian();
    if (id == "bracket") return Weight::bracket();
    throw InputError("weight_id", "unknown weight_id '" + id + "'");
}

ScenarioReport run_scenario(const Json& doc, const std::string& base_dir, const RunOptions& opt,
                            const std::string& name) {
    if (!doc.is_object()) throw InputError("", "scenario must be a JSON object");
    const Json& k = need(doc, "kind", "");
    if (!k.is_string()) throw InputError("kind", "expected a string");
    Ctx ctx;
    ctx.base = base_dir;
    if (doc.contains("operators")) {
        if (!doc["operators"].is_object()) throw InputError("operators", "expected an object");
        ctx.operators = doc["operators"];
    }
    const std::string kind = k.get<std::string>();
    Json s = base_summary(name, kind, opt);
    if (kind == "trace") return run_trace(doc, ctx, opt, s);
    if (kind == "defect") return run_defect(doc, ctx, opt, s);
    if (kind == "kv") return run_kv(doc, ctx, opt, s);
    if (kind == "chern") return run_chern(doc, ctx, opt, s);
    if (kind == "grassmann") return run_grassmann(doc, ctx, opt, s);
    if (kind == "freed") return run_freed(doc, ctx, opt, s);
    if (kind == "super") return run_super(doc, ctx, opt, s);
    throw InputError("kind", "unknown kind '" + kind + "'");
}

ScenarioReport run_scenario_file(const std::string& path, const RunOptions& opt) {
    std::ifstream in(path);
    if (!in) throw InputError("", "cannot open " + path);
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError("", std::string("malformed JSON: ") + e.what());
    }
    std::filesystem::path p(path);
    return run_scenario(doc, p.parent_path().string(), opt, p.stem().string());
}

void write_report(const ScenarioReport& r, const std::string& out_dir, const std::string& name) {
    std::filesystem::create_directories(out_dir);
    std::ofstream js(std::filesystem::path(out_dir) / (name + ".json"));
    js << r.summary.dump(2) << '\n';
    if (!r.csv.empty()) {
        std::ofstream cs(std::filesystem::path(out_dir) / (name + ".csv"));
        cs << r.csv;
    }
}

}  // namespace ct
