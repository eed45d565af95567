#include "circtrace/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ct {

namespace {

bool is_integer(double v, double tol = 1e-12) { return std::abs(v - std::round(v)) <= tol; }

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

PhgSymbol::PhgSymbol(double order, int depth, int dim) : order_(order), depth_(depth), dim_(dim) {
    if (depth < 1) throw std::invalid_argument("PhgSymbol: depth must be >= 1");
    if (dim < 1) throw std::invalid_argument("PhgSymbol: fiber dimension must be >= 1");
}

PhgSymbol PhgSymbol::identity(int dim, int depth) {
    PhgSymbol s(0.0, depth, dim);
    auto I = MatrixTrigPoly::identity(dim);
    s.add_term(0, 0, I, I);
    return s;
}

PhgSymbol PhgSymbol::power(double alpha, cplx c, int dim, int depth) {
    PhgSymbol s(alpha, depth, dim);
    auto I = MatrixTrigPoly::identity(dim) * c;
    s.add_term(0, 0, I, I);
    return s;
}

PhgSymbol PhgSymbol::term(double order, const MatrixTrigPoly& plus, const MatrixTrigPoly& minus, int logpow,
                          int depth) {
    PhgSymbol s(order, depth, plus.dim());
    s.add_term(0, logpow, plus, minus);
    return s;
}

void PhgSymbol::add_term(int j, int logpow, const MatrixTrigPoly& plus, const MatrixTrigPoly& minus) {
    if (j < 0) throw std::invalid_argument("PhgSymbol: term index j must be >= 0");
    if (logpow < 0 || logpow > kMaxLogPower) throw std::domain_error("PhgSymbol: log power beyond 2");
    if (plus.dim() != dim_ || minus.dim() != dim_) throw std::invalid_argument("PhgSymbol: fiber dimension mismatch");
    if (j >= depth_) return;  // below the represented class
    auto it = std::lower_bound(terms_.begin(), terms_.end(), std::make_pair(j, logpow),
                               [](const HomogeneousTerm& t, const std::pair<int, int>& key) {
                                   return std::make_pair(t.j, t.logpow) < key;
                               });
    if (it != terms_.end() && it->j == j && it->logpow == logpow) {
        it->plus += plus;
        it->minus += minus;
    } else {
        terms_.insert(it, HomogeneousTerm{j, logpow, plus, minus});
    }
}

const HomogeneousTerm* PhgSymbol::find(int j, int logpow) const {
    for (auto& t : terms_)
        if (t.j == j && t.logpow == logpow) return &t;
    return nullptr;
}

bool PhgSymbol::is_zero(double tol) const {
    for (auto& t : terms_)
        if (!t.plus.is_zero(tol) || !t.minus.is_zero(tol)) return false;
    return true;
}

double PhgSymbol::effective_order(double tol) const {
    for (auto& t : terms_)
        if (!t.plus.is_zero(tol) || !t.minus.is_zero(tol)) return degree(t);
    return -std::numeric_limits<double>::infinity();
}

int PhgSymbol::bandwidth() const {
    int K = 0;
    for (auto& t : terms_) K = std::max({K, t.plus.bandwidth(), t.minus.bandwidth()});
    return K;
}

bool PhgSymbol::x_independent(double tol) const {
    for (auto& t : terms_)
        if (!t.plus.x_independent(tol) || !t.minus.x_independent(tol)) return false;
    return true;
}

int PhgSymbol::max_logpow() const {
    int m = 0;
    for (auto& t : terms_) m = std::max(m, t.logpow);
    return m;
}

Mat PhgSymbol::fourier(int k, int n) const {
    Mat m = Mat::Zero(dim_, dim_);
    if (n == 0) return m;
    const double an = std::abs(double(n)), L = std::log(an);
    for (auto& t : terms_) {
        const MatrixTrigPoly& f = n > 0 ? t.plus : t.minus;
        if (std::abs(k) > f.bandwidth()) continue;
        double g = std::pow(an, degree(t)) * std::pow(L, t.logpow);
        const cplx* b = f.block(k);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) m(i, j) += b[i * dim_ + j] * g;
    }
    return m;
}

Mat PhgSymbol::eval(double x, double xi) const {
    Mat m = Mat::Zero(dim_, dim_);
    if (xi == 0.0) throw std::domain_error("PhgSymbol::eval at xi = 0");
    const double a = std::abs(xi), L = std::log(a);
    for (auto& t : terms_) {
        const MatrixTrigPoly& f = xi > 0 ? t.plus : t.minus;
        m += f.eval(x) * (std::pow(a, degree(t)) * std::pow(L, t.logpow));
    }
    return m;
}

PhgSymbol PhgSymbol::reorder(double new_order) const {
    double shift = new_order - order_;
    if (!is_integer(shift) || std::round(shift) < 0)
        throw std::domain_error("PhgSymbol::reorder: orders must differ by a non-negative integer");
    int m = int(std::lround(shift));
    PhgSymbol r(new_order, depth_ + m, dim_);
    for (auto& t : terms_) r.terms_.push_back(HomogeneousTerm{t.j + m, t.logpow, t.plus, t.minus});
    return r;
}

PhgSymbol PhgSymbol::truncated(int depth) const {
    PhgSymbol r(order_, std::min(depth, depth_), dim_);
    for (auto& t : terms_)
        if (t.j < r.depth_) r.terms_.push_back(t);
    return r;
}

PhgSymbol PhgSymbol::pruned(double tol) const {
    PhgSymbol r(order_, depth_, dim_);
    for (auto& t : terms_)
        if (!t.plus.is_zero(tol) || !t.minus.is_zero(tol))
            r.terms_.push_back(HomogeneousTerm{t.j, t.logpow, t.plus.trimmed(tol), t.minus.trimmed(tol)});
    return r;
}

PhgSymbol PhgSymbol::operator+(const PhgSymbol& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("PhgSymbol: fiber dimension mismatch");
    if (o.terms_.empty()) return *this;
    if (terms_.empty()) return o;
    double diff = order_ - o.order_;
    if (!is_integer(diff)) throw std::domain_error("PhgSymbol: orders differ by a non-integer");
    double top = std::max(order_, o.order_);
    double fl = std::max(order_ - depth_, o.order_ - o.depth_);
    int depth = int(std::lround(top - fl));
    PhgSymbol a = reorder(top), b = o.reorder(top);
    PhgSymbol r(top, depth, dim_);
    for (auto& t : a.terms_) r.add_term(t.j, t.logpow, t.plus, t.minus);
    for (auto& t : b.terms_) r.add_term(t.j, t.logpow, t.plus, t.minus);
    return r;
}

PhgSymbol PhgSymbol::operator-(const PhgSymbol& o) const { return *this + o * cplx(-1.0); }

PhgSymbol PhgSymbol::operator*(cplx v) const {
    PhgSymbol r = *this;
    for (auto& t : r.terms_) {
        t.plus = t.plus * v;
        t.minus = t.minus * v;
    }
    return r;
}

bool PhgSymbol::operator==(const PhgSymbol& o) const {
    if (order_ != o.order_ || depth_ != o.depth_ || dim_ != o.dim_ || terms_.size() != o.terms_.size()) return false;
    for (size_t i = 0; i < terms_.size(); ++i) {
        const auto &a = terms_[i], &b = o.terms_[i];
        if (a.j != b.j || a.logpow != b.logpow || !(a.plus == b.plus) || !(a.minus == b.minus)) return false;
    }
    return true;
}

std::string PhgSymbol::describe() const {
    std::ostringstream os;
    os << "order " << order_ << " depth " << depth_ << " dim " << dim_ << "\n";
    for (auto& t : terms_) {
        os << "  deg " << degree(t) << " log^" << t.logpow << "  +:";
        for (int k = -t.plus.bandwidth(); k <= t.plus.bandwidth(); ++k)
            if (t.plus.coeff(k).norm() > 0) os << " [" << k << "]" << t.plus.coeff(k)(0, 0);
        os << "  -:";
        for (int k = -t.minus.bandwidth(); k <= t.minus.bandwidth(); ++k)
            if (t.minus.coeff(k).norm() > 0) os << " [" << k << "]" << t.minus.coeff(k)(0, 0);
        os << "\n";
    }
    return os.str();
}

std::vector<double> power_log_derivative(double alpha, int logpow, int r) {
    std::vector<double> p(logpow + 1, 0.0);
    p[logpow] = 1.0;
    double beta = alpha;
    for (int s = 0; s < r; ++s) {
        // d/dt t^beta log^m t = beta t^{beta-1} log^m + m t^{beta-1} log^{m-1}
        std::vector<double> q(logpow + 1, 0.0);
        for (int m = 0; m <= logpow; ++m) {
            q[m] += beta * p[m];
            if (m > 0) q[m - 1] += m * p[m];
        }
        p = q;
        beta -= 1.0;
    }
    return p;
}

PhgSymbol star_product(const PhgSymbol& s1, const PhgSymbol& s2, int depth) {
    if (s1.dim() != s2.dim()) throw std::invalid_argument("star_product: fiber dimension mismatch");
    PhgSymbol out(s1.order() + s2.order(), depth, s1.dim());
    if (s1.terms().empty() || s2.terms().empty()) return out;
    if (depth > std::min(s1.depth(), s2.depth()))
        throw std::domain_error("star_product: depth " + std::to_string(depth) + " exceeds available terms (" +
                                std::to_string(std::min(s1.depth(), s2.depth())) + ")");
    for (auto& tb : s2.terms()) {
        std::vector<MatrixTrigPoly> dbp, dbm;  // k^i/i! f_B
        for (auto& ta : s1.terms()) {
            if (ta.j + tb.j >= depth) continue;
            const double alpha = s1.degree(ta);
            for (int i = 0; ta.j + tb.j + i < depth; ++i) {
                if (int(dbp.size()) <= i) {
                    double inv = 1.0 / factorial(i);
                    dbp.push_back(tb.plus.k_power(i) * inv);
                    dbm.push_back(tb.minus.k_power(i) * inv);
                }
                if (i > 0 && dbp[i].is_zero() && dbm[i].is_zero()) break;
                std::vector<double> p = power_log_derivative(alpha, ta.logpow, i);
                bool any = false;
                for (double v : p) any = any || v != 0.0;
                if (!any) continue;
                MatrixTrigPoly prodp = ta.plus * dbp[i];
                MatrixTrigPoly prodm = ta.minus * dbm[i];
                if (prodp.is_zero() && prodm.is_zero()) continue;
                const double sgn = (i % 2) ? -1.0 : 1.0;
                for (int m = 0; m <= ta.logpow; ++m) {
                    if (p[m] == 0.0) continue;
                    int l = m + tb.logpow;
                    if (l > kMaxLogPower) throw std::domain_error("star_product: log-power overflow beyond 2");
                    out.add_term(ta.j + tb.j + i, l, prodp * p[m], prodm * (sgn * p[m]));
                }
            }
        }
    }
    return out;
}

PhgSymbol parametrix(const PhgSymbol& s, int depth) {
    const HomogeneousTerm* lead = s.find(0, 0);
    for (auto& t : s.terms())
        if (t.j == 0 && t.logpow > 0 && (!t.plus.is_zero() || !t.minus.is_zero()))
            throw std::domain_error("parametrix: leading symbol carries log terms");
    if (!lead) throw std::domain_error("parametrix: non-invertible leading symbol (no leading term)");
    if (depth > s.depth()) throw std::domain_error("parametrix: depth exceeds available terms");
    const int d = s.dim();
    PhgSymbol p0 = PhgSymbol::term(-s.order(), lead->plus.exact_inverse(), lead->minus.exact_inverse(), 0, depth);
    PhgSymbol one = PhgSymbol::identity(d, depth);
    PhgSymbol sp = star_product(s.truncated(depth), p0, depth);
    PhgSymbol r(0.0, depth, d);
    for (auto& t : sp.terms())
        if (t.j > 0) r.add_term(t.j, t.logpow, t.plus * cplx(-1.0), t.minus * cplx(-1.0));
    PhgSymbol sum = one, pk = one;
    for (int k = 1; k < depth; ++k) {
        pk = star_product(pk, r, depth);
        if (pk.is_zero()) break;
        sum = sum + pk;
    }
    return star_product(p0, sum, depth);
}

}  // namespace ct
