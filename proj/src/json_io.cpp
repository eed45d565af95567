#include "circtrace/json_io.hpp"

#include <cmath>

namespace ct {

namespace {

Json matrix_poly_to_json(const MatrixTrigPoly& f) {
    const int d = f.dim(), K = f.bandwidth();
    Json coeffs = Json::array();
    for (int k = -K; k <= K; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) coeffs.push_back(cplx_to_json(f.at(k, i, j)));
    return Json{{"K", K}, {"coeffs", coeffs}};
}

MatrixTrigPoly matrix_poly_from_json(const Json& j, int d, const std::string& path) {
    if (!j.is_object()) throw InputError(path, "expected object");
    check_keys(j, {"K", "coeffs"}, path);
    if (!j.contains("K") || !j["K"].is_number_integer()) throw InputError(path + ".K", "expected integer");
    int K = j["K"].get<int>();
    if (K < 0) throw InputError(path + ".K", "must be >= 0");
    if (!j.contains("coeffs") || !j["coeffs"].is_array()) throw InputError(path + ".coeffs", "expected array");
    const Json& c = j["coeffs"];
    if (c.size() != size_t(2 * K + 1) * d * d)
        throw InputError(path + ".coeffs", "expected " + std::to_string((2 * K + 1) * d * d) + " entries");
    MatrixTrigPoly f(d, K);
    size_t q = 0;
    for (int k = -K; k <= K; ++k)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b, ++q)
                f.ref(k, a, b) = cplx_from_json(c[q], path + ".coeffs[" + std::to_string(q) + "]");
    return f;
}

double number(const Json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j[key].is_number()) throw InputError(path + "." + key, "expected number");
    return j[key].get<double>();
}

}  // namespace

Json cplx_to_json(cplx v) { return Json::array({v.real(), v.imag()}); }

cplx cplx_from_json(const Json& j, const std::string& path) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InputError(path, "expected complex number [re, im]");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw InputError(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
    }
}

Json to_json(const PhgSymbol& s) {
    Json j;
    j["order"] = s.order();
    j["depth"] = s.depth();
    if (s.dim() != 1) j["dim"] = s.dim();
    Json terms = Json::array();
    for (auto& t : s.terms())
        terms.push_back(Json{{"degree", s.degree(t)},
                             {"logpow", t.logpow},
                             {"plus", matrix_poly_to_json(t.plus)},
                             {"minus", matrix_poly_to_json(t.minus)}});
    j["terms"] = terms;
    return j;
}

Json to_json(const DiscreteOp& A) {
    Json j = to_json(A.symbol());
    Json patch = Json::array();
    const int d = A.dim();
    for (auto& [n, col] : A.patch().columns())
        for (auto& [m, blk] : col) {
            Json e = Json::array();
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) e.push_back(cplx_to_json(blk(a, b)));
            patch.push_back(Json::array({m, n, e}));
        }
    j["patch"] = patch;
    return j;
}

PhgSymbol symbol_from_json(const Json& j, const std::string& path) {
    if (!j.is_object()) throw InputError(path, "expected object");
    check_keys(j, {"order", "depth", "dim", "terms", "patch"}, path);
    const std::string p = path;
    double order = number(j, "order", p);
    if (!j.contains("depth") || !j["depth"].is_number_integer()) throw InputError(p + ".depth", "expected integer");
    int depth = j["depth"].get<int>();
    if (depth < 1) throw InputError(p + ".depth", "must be >= 1");
    int d = 1;
    if (j.contains("dim")) {
        if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1) throw InputError(p + ".dim", "expected integer >= 1");
        d = j["dim"].get<int>();
    }
    PhgSymbol s(order, depth, d);
    if (!j.contains("terms") || !j["terms"].is_array()) throw InputError(p + ".terms", "expected array");
    for (size_t i = 0; i < j["terms"].size(); ++i) {
        const Json& t = j["terms"][i];
        std::string tp = p + ".terms[" + std::to_string(i) + "]";
        if (!t.is_object()) throw InputError(tp, "expected object");
        check_keys(t, {"degree", "logpow", "plus", "minus"}, tp);
        double deg = number(t, "degree", tp);
        double jj = order - deg;
        if (std::abs(jj - std::round(jj)) > 1e-12 || std::round(jj) < 0)
            throw InputError(tp + ".degree", "must equal order minus a non-negative integer");
        int jint = int(std::lround(jj));
        if (jint >= depth) throw InputError(tp + ".degree", "below the declared depth");
        int lp = 0;
        if (t.contains("logpow")) {
            if (!t["logpow"].is_number_integer()) throw InputError(tp + ".logpow", "expected integer");
            lp = t["logpow"].get<int>();
            if (lp < 0 || lp > kMaxLogPower) throw InputError(tp + ".logpow", "must be 0, 1 or 2");
        }
        if (!t.contains("plus")) throw InputError(tp + ".plus", "missing");
        if (!t.contains("minus")) throw InputError(tp + ".minus", "missing");
        s.add_term(jint, lp, matrix_poly_from_json(t["plus"], d, tp + ".plus"),
                   matrix_poly_from_json(t["minus"], d, tp + ".minus"));
    }
    return s;
}

DiscreteOp op_from_json(const Json& j, const std::string& path) {
    PhgSymbol s = symbol_from_json(j, path);
    const int d = s.dim();
    Patch p(d);
    if (j.contains("patch")) {
        const Json& pj = j["patch"];
        if (!pj.is_array()) throw InputError(path + ".patch", "expected array");
        for (size_t i = 0; i < pj.size(); ++i) {
            std::string ep = path + ".patch[" + std::to_string(i) + "]";
            const Json& e = pj[i];
            if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer())
                throw InputError(ep, "expected [m, n, entries]");
            Mat blk(d, d);
            if (d == 1 && (e[2].is_number() || (e[2].is_array() && e[2].size() == 2 && e[2][0].is_number()))) {
                blk(0, 0) = cplx_from_json(e[2], ep + "[2]");
            } else {
                if (!e[2].is_array() || e[2].size() != size_t(d * d))
                    throw InputError(ep + "[2]", "expected " + std::to_string(d * d) + " complex entries");
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        blk(a, b) = cplx_from_json(e[2][a * d + b], ep + "[2][" + std::to_string(a * d + b) + "]");
            }
            p.add(e[0].get<int>(), e[1].get<int>(), blk);
        }
    }
    return DiscreteOp(s, p);
}

}  // namespace ct
