#include "circtrace/forms.hpp"
#include "circtrace/oracle.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ct {

int mask_degree(unsigned mask) { return std::popcount(mask); }

std::vector<unsigned> subsets(int p, int k) {
    std::vector<unsigned> out;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    if (k > p) return out;
    for (;;) {
        unsigned m = 0;
        for (int i : idx) m |= 1u << i;
        out.push_back(m);
        int i = k - 1;
        while (i >= 0 && idx[i] == p - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

int wedge_sign(unsigned I, unsigned J) {
    if (I & J) return 0;
    int inv = 0;
    for (unsigned j = J; j; j &= j - 1) {
        unsigned bit = j & (~j + 1);
        inv += std::popcount(I & ~(bit | (bit - 1)));  // elements of I above this element of J
    }
    return inv % 2 ? -1 : 1;
}

std::vector<Point> ParamDomain::grid() const {
    if (dim < 1 || dim > kMaxParamDim) throw std::invalid_argument("ParamDomain: dimension must be in 1..4");
    if (!(h > 0.0)) throw std::invalid_argument("ParamDomain: step h must be positive");
    if (points < 1) throw std::invalid_argument("ParamDomain: need at least one grid point per axis");
    std::vector<Point> out;
    size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= size_t(points);
    out.reserve(total);
    for (size_t idx = 0; idx < total; ++idx) {
        Point x{};
        size_t r = idx;
        for (int a = 0; a < dim; ++a) {
            int i = int(r % size_t(points));
            r /= size_t(points);
            x[a] = points == 1 ? 0.5 * (lo[a] + hi[a]) : lo[a] + (hi[a] - lo[a]) * i / (points - 1);
        }
        out.push_back(x);
    }
    return out;
}

// ---------------------------------------------------------------------------
// numerical forms

namespace {

std::vector<cplx> central(const FormFamily& a, const Point& x, int axis, double h) {
    Point xp = x, xm = x;
    xp[axis] += h;
    xm[axis] -= h;
    auto fp = a.coeffs(xp), fm = a.coeffs(xm);
    for (size_t i = 0; i < fp.size(); ++i) fp[i] = (fp[i] - fm[i]) / (2.0 * h);
    return fp;
}

}  // namespace

FormFamily ext_d(const FormFamily& alpha, double h, bool richardson) {
    if (alpha.k >= alpha.p) {
        const int p = alpha.p;
        return {p, alpha.k + 1, [](const Point&) { return std::vector<cplx>{}; }};
    }
    const int p = alpha.p, k = alpha.k;
    auto src = subsets(p, k), dst = subsets(p, k + 1);
    std::map<unsigned, size_t> pos;
    for (size_t i = 0; i < src.size(); ++i) pos[src[i]] = i;
    FormFamily out{p, k + 1, {}};
    out.coeffs = [alpha, h, richardson, src, dst, pos, p](const Point& x) {
        std::vector<std::vector<cplx>> D(p);
        for (int i = 0; i < p; ++i) {
            D[i] = central(alpha, x, i, h);
            if (richardson) {
                auto half = central(alpha, x, i, h / 2);
                for (size_t c = 0; c < half.size(); ++c) D[i][c] = (4.0 * half[c] - D[i][c]) / 3.0;
            }
        }
        std::vector<cplx> r(dst.size(), 0.0);
        for (size_t c = 0; c < dst.size(); ++c) {
            unsigned K = dst[c];
            int place = 0;
            for (int i = 0; i < p; ++i) {
                if (!(K & (1u << i))) continue;
                double s = place % 2 ? -1.0 : 1.0;
                r[c] += s * D[i][pos.at(K & ~(1u << i))];
                ++place;
            }
        }
        return r;
    };
    return out;
}

double max_norm(const FormFamily& f, const std::vector<Point>& grid) {
    std::vector<double> per(grid.size(), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < long(grid.size()); ++i) {
        double m = 0.0;
        for (auto v : f.coeffs(grid[i])) m = std::max(m, std::abs(v));
        per[i] = m;
    }
    double m = 0.0;
    for (double v : per) m = std::max(m, v);
    return m;
}

double max_diff(const FormFamily& a, const FormFamily& b, const std::vector<Point>& grid) {
    if (a.p != b.p || a.k != b.k) throw std::invalid_argument("max_diff: forms of different type");
    FormFamily d{a.p, a.k, [a, b](const Point& x) {
                     auto u = a.coeffs(x), v = b.coeffs(x);
                     for (size_t i = 0; i < u.size(); ++i) u[i] -= v[i];
                     return u;
                 }};
    return max_norm(d, grid);
}

void gauss_legendre(int n, double lo, double hi, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = z;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = 0.5 * (lo + hi) - 0.5 * (hi - lo) * z;
        w[i] = (hi - lo) / ((1.0 - z * z) * dp * dp);
    }
}

cplx integrate_2form(const FormFamily& f, const ParamDomain& dom, int nodes) {
    if (f.k != 2) throw std::invalid_argument("integrate_2form: expected a 2-form");
    std::vector<double> x0, w0, x1, w1;
    gauss_legendre(nodes, dom.lo[0], dom.hi[0], x0, w0);
    gauss_legendre(nodes, dom.lo[1], dom.hi[1], x1, w1);
    std::vector<cplx> row(nodes, 0.0);
#pragma omp parallel for
    for (int i = 0; i < nodes; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < nodes; ++j) {
            Point x = dom.lo;
            x[0] = x0[i];
            x[1] = x1[j];
            s += w1[j] * f.coeffs(x)[0];  // dx1 ^ dx2 is first in subset order
        }
        row[i] = w0[i] * s;
    }
    cplx s = 0.0;
    for (auto v : row) s += v;
    return s;
}

// ---------------------------------------------------------------------------
// ExprForm

Expr ExprForm::get(unsigned mask) const {
    auto it = c.find(mask);
    return it == c.end() ? Expr(0.0) : it->second;
}

FormFamily ExprForm::family() const {
    std::vector<Expr> comps;
    for (unsigned m : subsets(p, k)) comps.push_back(get(m));
    return {p, k, [comps](const Point& x) {
                std::vector<cplx> r;
                r.reserve(comps.size());
                for (auto& e : comps) r.push_back(e.eval(x.data()));
                return r;
            }};
}

ExprForm ExprForm::d() const {
    ExprForm out{p, k + 1, {}};
    for (auto& [I, g] : c)
        for (int i = 0; i < p; ++i) {
            if (I & (1u << i)) continue;
            Expr dg = g.derivative(i);
            if (dg.is_zero()) continue;
            unsigned K = I | (1u << i);
            out.c[K] = out.get(K) + Expr(double(wedge_sign(1u << i, I))) * dg;
        }
    return out;
}

// ---------------------------------------------------------------------------
// OperatorForm

void OperatorForm::add(unsigned mask, const Expr& g, std::shared_ptr<const DiscreteOp> op) {
    if (mask_degree(mask) != k_ || mask >= (1u << p_))
        throw std::invalid_argument("OperatorForm::add: axis multi-index does not match form degree");
    if (g.is_zero()) return;
    for (auto& t : terms_)
        if (t.mask == mask && t.op == op) {
            t.coeff = t.coeff + g;
            return;
        }
    terms_.push_back({mask, g, std::move(op)});
}

OperatorForm OperatorForm::operator+(const OperatorForm& o) const {
    if (o.p_ != p_ || o.k_ != k_) throw std::invalid_argument("OperatorForm: sum of forms of different type");
    OperatorForm r = *this;
    for (auto& t : o.terms_) r.add(t.mask, t.coeff, t.op);
    return r;
}

OperatorForm OperatorForm::operator-(const OperatorForm& o) const { return *this + o * Expr(-1.0); }

OperatorForm OperatorForm::operator*(const Expr& g) const {
    OperatorForm r(p_, k_);
    for (auto& t : terms_) r.add(t.mask, t.coeff * g, t.op);
    return r;
}

OperatorForm OperatorForm::d() const {
    OperatorForm r(p_, k_ + 1);
    for (auto& t : terms_)
        for (int i = 0; i < p_; ++i) {
            if (t.mask & (1u << i)) continue;
            Expr dg = t.coeff.derivative(i);
            r.add(t.mask | (1u << i), Expr(double(wedge_sign(1u << i, t.mask))) * dg, t.op);
        }
    return r;
}

DiscreteOp OperatorForm::at(unsigned mask, const Point& x) const {
    bool any = false;
    DiscreteOp r;
    for (auto& t : terms_) {
        if (t.mask != mask) continue;
        DiscreteOp v = *t.op * t.coeff.eval(x.data());
        r = any ? r + v : v;
        any = true;
    }
    if (!any) {
        int dim = terms_.empty() ? 1 : terms_.front().op->dim();
        return DiscreteOp::zero(dim);
    }
    return r;
}

ExprForm OperatorForm::apply(const std::function<cplx(const DiscreteOp&)>& f) const {
    std::map<const DiscreteOp*, cplx> memo;
    ExprForm out{p_, k_, {}};
    for (auto& t : terms_) {
        auto it = memo.find(t.op.get());
        if (it == memo.end()) it = memo.emplace(t.op.get(), f(*t.op)).first;
        if (it->second == 0.0) continue;
        out.c[t.mask] = out.get(t.mask) + Expr(it->second) * t.coeff;
    }
    return out;
}

double OperatorForm::max_order() const {
    double o = -std::numeric_limits<double>::infinity();
    for (auto& t : terms_) o = std::max(o, t.op->symbol().effective_order());
    return o;
}

std::shared_ptr<const DiscreteOp> ComposeCache::product(const std::shared_ptr<const DiscreteOp>& a,
                                                        const std::shared_ptr<const DiscreteOp>& b) {
    auto key = std::make_pair(a.get(), b.get());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    keep_.push_back(a);
    keep_.push_back(b);
    auto c = std::make_shared<const DiscreteOp>(compose(*a, *b, depth_));
    cache_.emplace(key, c);
    return c;
}

OperatorForm wedge(const OperatorForm& a, const OperatorForm& b, ComposeCache& cache) {
    if (a.dim() != b.dim()) throw std::invalid_argument("wedge: forms over different domains");
    OperatorForm r(a.dim(), a.degree() + b.degree());
    if (r.degree() > r.dim()) return r;
    for (auto& s : a.terms())
        for (auto& t : b.terms()) {
            int sg = wedge_sign(s.mask, t.mask);
            if (!sg) continue;
            r.add(s.mask | t.mask, Expr(double(sg)) * s.coeff * t.coeff, cache.product(s.op, t.op));
        }
    return r;
}

OperatorForm wedge(const OperatorForm& a, const OperatorForm& b, int depth) {
    ComposeCache cache(depth);
    return wedge(a, b, cache);
}

OperatorForm graded_commutator(const OperatorForm& a, const OperatorForm& b, ComposeCache& cache) {
    OperatorForm ab = wedge(a, b, cache), ba = wedge(b, a, cache);
    return (a.degree() * b.degree()) % 2 ? ab + ba : ab - ba;
}

OperatorForm power(const OperatorForm& a, int j, ComposeCache& cache) {
    if (j < 1) throw std::invalid_argument("power: exponent must be >= 1");
    OperatorForm r = a;
    for (int i = 1; i < j; ++i) r = wedge(r, a, cache);
    return r;
}

OperatorForm curvature(const OperatorForm& theta, ComposeCache& cache) {
    if (theta.degree() != 1) throw std::invalid_argument("curvature: connection form must have degree 1");
    return theta.d() + wedge(theta, theta, cache);
}

OperatorForm bianchi(const OperatorForm& theta, const OperatorForm& omega, ComposeCache& cache) {
    return omega.d() + graded_commutator(theta, omega, cache);
}

double op_form_max_norm(const OperatorForm& f, const std::vector<Point>& grid, int N) {
    auto masks = subsets(f.dim(), f.degree());
    std::vector<double> per(grid.size(), 0.0);
    for (size_t i = 0; i < grid.size(); ++i) {
        double m = 0.0;
        for (unsigned K : masks) {
            ModeMatrix M(f.at(K, grid[i]), N);
            if (M.matrix().size()) m = std::max(m, M.matrix().cwiseAbs().maxCoeff());
        }
        per[i] = m;
    }
    double m = 0.0;
    for (double v : per) m = std::max(m, v);
    return m;
}

}  // namespace ct
