#include "circtrace/discrete_op.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace ct {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Fourier blocks sigma_k(n) of a symbol for all |k| <= band at one column n.
std::vector<Mat> symbol_column(const PhgSymbol& s, int n) {
    const int K = s.bandwidth(), d = s.dim();
    std::vector<Mat> out(2 * K + 1, Mat::Zero(d, d));
    if (n == 0) return out;
    const double an = std::abs(double(n)), L = std::log(an);
    for (auto& t : s.terms()) {
        const MatrixTrigPoly& f = n > 0 ? t.plus : t.minus;
        const double g = std::pow(an, s.degree(t)) * std::pow(L, t.logpow);
        for (int k = -f.bandwidth(); k <= f.bandwidth(); ++k) {
            const cplx* b = f.block(k);
            Mat& o = out[k + K];
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) o(i, j) += b[i * d + j] * g;
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Patch

size_t Patch::size() const {
    size_t s = 0;
    for (auto& c : cols_) s += c.second.size();
    return s;
}

void Patch::add(int m, int n, const Mat& v) {
    if (v.rows() != dim_ || v.cols() != dim_) throw std::invalid_argument("Patch::add: block dimension mismatch");
    auto& col = cols_[n];
    auto it = col.find(m);
    if (it == col.end()) {
        if (max_abs(v) > 0.0) col.emplace(m, v);
    } else {
        it->second += v;
        if (max_abs(it->second) == 0.0) col.erase(it);
    }
    if (col.empty()) cols_.erase(n);
}

Mat Patch::get(int m, int n) const {
    auto c = cols_.find(n);
    if (c != cols_.end()) {
        auto e = c->second.find(m);
        if (e != c->second.end()) return e->second;
    }
    return Mat::Zero(dim_, dim_);
}

int Patch::support() const {
    int s = -1;
    for (auto& c : cols_)
        for (auto& e : c.second) s = std::max({s, std::abs(c.first), std::abs(e.first)});
    return s;
}

int Patch::bandwidth() const {
    int b = 0;
    for (auto& c : cols_)
        for (auto& e : c.second) b = std::max(b, std::abs(e.first - c.first));
    return b;
}

cplx Patch::trace() const {
    cplx t = 0.0;
    for (auto& c : cols_) {
        auto e = c.second.find(c.first);
        if (e != c.second.end()) t += e->second.trace();
    }
    return t;
}

const std::map<int, Mat>* Patch::column(int n) const {
    auto c = cols_.find(n);
    return c == cols_.end() ? nullptr : &c->second;
}

Patch Patch::operator+(const Patch& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("Patch: fiber dimension mismatch");
    Patch r = *this;
    for (auto& c : o.cols_)
        for (auto& e : c.second) r.add(e.first, c.first, e.second);
    return r;
}

Patch Patch::operator*(cplx v) const {
    Patch r = *this;
    for (auto& c : r.cols_)
        for (auto& e : c.second) e.second *= v;
    return r;
}

Patch Patch::pruned(double tol) const {
    Patch r(dim_);
    for (auto& c : cols_)
        for (auto& e : c.second)
            if (max_abs(e.second) > tol) r.cols_[c.first][e.first] = e.second;
    return r;
}

bool Patch::operator==(const Patch& o) const {
    Patch a = pruned(0.0), b = o.pruned(0.0);
    return a.dim_ == b.dim_ && a.cols_ == b.cols_;
}

// ---------------------------------------------------------------------------
// DiscreteOp

DiscreteOp::DiscreteOp(PhgSymbol sym, Patch patch) : sym_(std::move(sym)), patch_(std::move(patch)) {
    if (patch_.dim() != sym_.dim()) throw std::invalid_argument("DiscreteOp: patch and symbol fiber dimensions differ");
}

DiscreteOp DiscreteOp::identity(int dim, int depth) {
    Patch p(dim);
    p.add(0, 0, Mat::Identity(dim, dim));
    return DiscreteOp(PhgSymbol::identity(dim, depth), p);
}

DiscreteOp DiscreteOp::zero(int dim, double order, int depth) { return DiscreteOp(PhgSymbol(order, depth, dim)); }

DiscreteOp DiscreteOp::patch_only(const Patch& p, int depth) {
    return DiscreteOp(PhgSymbol(0.0, depth, p.dim()), p);
}

DiscreteOp DiscreteOp::multiplication(const MatrixTrigPoly& f, int depth) {
    PhgSymbol s = PhgSymbol::term(0.0, f, f, 0, depth);
    Patch p(f.dim());
    for (int k = -f.bandwidth(); k <= f.bandwidth(); ++k) {
        Mat c = f.coeff(k);
        if (max_abs(c) > 0.0) p.add(k, 0, c);
    }
    return DiscreteOp(s, p);
}

DiscreteOp DiscreteOp::multiplier(const PhgSymbol& s, cplx zero_mode) {
    if (!s.x_independent()) throw std::invalid_argument("DiscreteOp::multiplier: symbol must be x-independent");
    Patch p(s.dim());
    if (zero_mode != 0.0) p.add(0, 0, Mat::Identity(s.dim(), s.dim()) * zero_mode);
    return DiscreteOp(s, p);
}

int DiscreteOp::bandwidth() const { return std::max(sym_.bandwidth(), patch_.bandwidth()); }

Mat DiscreteOp::entry(int m, int n) const { return sym_.fourier(m - n, n) + patch_.get(m, n); }

std::vector<std::pair<int, Mat>> DiscreteOp::column(int n) const {
    std::map<int, Mat> acc;
    if (n != 0 && !sym_.terms().empty()) {
        const int K = sym_.bandwidth();
        std::vector<Mat> sc = symbol_column(sym_, n);
        for (int k = -K; k <= K; ++k)
            if (max_abs(sc[k + K]) > 0.0) acc.emplace(n + k, sc[k + K]);
    }
    if (auto* c = patch_.column(n))
        for (auto& e : *c) {
            auto it = acc.find(e.first);
            if (it == acc.end())
                acc.emplace(e.first, e.second);
            else
                it->second += e.second;
        }
    return {acc.begin(), acc.end()};
}

DiscreteOp DiscreteOp::operator+(const DiscreteOp& o) const {
    return DiscreteOp(sym_ + o.sym_, patch_ + o.patch_);
}

DiscreteOp DiscreteOp::operator-(const DiscreteOp& o) const { return *this + o * cplx(-1.0); }

DiscreteOp DiscreteOp::operator*(cplx v) const { return DiscreteOp(sym_ * v, patch_ * v); }

bool DiscreteOp::operator==(const DiscreteOp& o) const { return sym_ == o.sym_ && patch_ == o.patch_; }

// ---------------------------------------------------------------------------
// composition

DiscreteOp compose(const DiscreteOp& A, const DiscreteOp& B, int depth, int window) {
    if (A.dim() != B.dim()) throw std::invalid_argument("compose: fiber dimension mismatch");
    const int d = A.dim();
    PhgSymbol sym = star_product(A.symbol(), B.symbol(), depth);

    const int bB = B.symbol().bandwidth();
    const int KpA = A.patch().support(), KpB = B.patch().support();
    // beyond W every product entry is symbol x symbol with p = n + k on the same side as n
    const int W = std::max({window, KpA + bB + 1, KpB + 1, bB + 1});

    std::unordered_map<int, std::vector<std::pair<int, Mat>>> acache;
    auto acol = [&](int p) -> const std::vector<std::pair<int, Mat>>& {
        auto it = acache.find(p);
        if (it == acache.end()) it = acache.emplace(p, A.column(p)).first;
        return it->second;
    };

    Patch patch(d);
    const int Ks = sym.bandwidth();
    for (int n = -W; n <= W; ++n) {
        std::map<int, Mat> exact;
        std::map<int, double> scale;
        for (auto& [p, bpn] : B.column(n)) {
            const double nb = max_abs(bpn);
            for (auto& [m, amp] : acol(p)) {
                Mat prod = amp * bpn;
                auto it = exact.find(m);
                if (it == exact.end()) {
                    exact.emplace(m, prod);
                    scale.emplace(m, max_abs(amp) * nb * d);
                } else {
                    it->second += prod;
                    scale[m] += max_abs(amp) * nb * d;
                }
            }
        }
        if (n != 0 && !sym.terms().empty()) {
            std::vector<Mat> sc = symbol_column(sym, n);
            for (int k = -Ks; k <= Ks; ++k) {
                const Mat& s = sc[k + Ks];
                double ns = max_abs(s);
                if (ns == 0.0) continue;
                auto it = exact.find(n + k);
                if (it == exact.end()) {
                    exact.emplace(n + k, -s);
                    scale.emplace(n + k, ns);
                } else {
                    it->second -= s;
                    scale[n + k] += ns;
                }
            }
        }
        for (auto& [m, dev] : exact) {
            double tol = 8.0 * kEps * scale[m];
            if (max_abs(dev) > tol) patch.add(m, n, dev);
        }
    }
    return DiscreteOp(sym, patch);
}

DiscreteOp commutator(const DiscreteOp& A, const DiscreteOp& B, int depth, int window) {
    return compose(A, B, depth, window) - compose(B, A, depth, window);
}

// ---------------------------------------------------------------------------
// inverse and gauge action

DiscreteOp exact_inverse(const DiscreteOp& C, int depth) {
    const int d = C.dim();
    if (std::abs(C.order()) > 1e-12 && !C.symbol().is_zero())
        throw std::domain_error("exact_inverse: gauge element must have order 0");
    PhgSymbol p = parametrix(C.symbol().truncated(depth), depth);
    DiscreteOp X0(p, Patch(d));
    DiscreteOp I = DiscreteOp::identity(d, depth);
    DiscreteOp R = I - compose(C, X0, depth);
    if (!R.symbol().pruned(1e-13).is_zero())
        throw std::domain_error("exact_inverse: parametrix leaves a symbolic remainder; no banded inverse");

    Patch Y(d);
    const Patch Rp = R.patch().pruned(1e-14);
    if (!Rp.empty()) {
        // dense solve C y = r on a window covering the remainder
        const int band = std::max(C.bandwidth(), 1);
        const int Wc = Rp.support() + 8 * band + 16;
        const int Wr = Wc + band;
        const int nc = (2 * Wc + 1) * d, nr = (2 * Wr + 1) * d;
        Mat M = Mat::Zero(nr, nc);
        for (int n = -Wc; n <= Wc; ++n)
            for (auto& [m, blk] : C.column(n)) {
                if (std::abs(m) > Wr) continue;
                M.block((m + Wr) * d, (n + Wc) * d, d, d) = blk;
            }
        Eigen::ColPivHouseholderQR<Mat> qr(M);
        for (auto& [n, col] : Rp.columns()) {
            Mat rhs = Mat::Zero(nr, d);
            for (auto& [m, blk] : col) rhs.block((m + Wr) * d, 0, d, d) = blk;
            Mat y = qr.solve(rhs);
            double res = max_abs(M * y - rhs);
            if (res > 1e-10 * std::max(1.0, max_abs(rhs)))
                throw std::domain_error("exact_inverse: finite-rank correction does not close");
            for (int m = -Wc; m <= Wc; ++m) {
                Mat blk = y.block((m + Wc) * d, 0, d, d);
                if (max_abs(blk) > 1e-14) {
                    if (std::abs(m) > Wc - band)
                        throw std::domain_error("exact_inverse: correction reaches the solve window boundary");
                    Y.add(m, n, blk);
                }
            }
        }
    }
    DiscreteOp Cinv(p, Y);
    for (const DiscreteOp& E : {compose(C, Cinv, depth) - I, compose(Cinv, C, depth) - I}) {
        if (!E.symbol().pruned(1e-12).is_zero() || !E.patch().pruned(1e-10).empty())
            throw std::domain_error("exact_inverse: inverse check failed");
    }
    return Cinv;
}

DiscreteOp gauge_conjugate(const DiscreteOp& A, const DiscreteOp& C, int depth) {
    return gauge_conjugate(A, C, exact_inverse(C, depth), depth);
}

DiscreteOp gauge_conjugate(const DiscreteOp& A, const DiscreteOp& C, const DiscreteOp& Cinv, int depth) {
    return compose(Cinv, compose(A, C, depth), depth);
}

// ---------------------------------------------------------------------------

double composition_tail_bound(const DiscreteOp& A, const DiscreteOp& B, int depth, int n) {
    if (n == 0) return std::numeric_limits<double>::infinity();
    const PhgSymbol &sa = A.symbol(), &sb = B.symbol();
    const double an = std::abs(double(n));
    double total = 0.0;
    for (auto& tb : sb.terms()) {
        const MatrixTrigPoly& fb = n > 0 ? tb.plus : tb.minus;
        const double bmag = std::pow(an, sb.degree(tb)) * std::pow(std::abs(std::log(an)), tb.logpow);
        for (auto& ta : sa.terms()) {
            const MatrixTrigPoly& fa = n > 0 ? ta.plus : ta.minus;
            double fa1 = 0.0;
            for (int k = -fa.bandwidth(); k <= fa.bandwidth(); ++k) fa1 += max_abs(fa.coeff(k)) * fa.dim();
            if (fa1 == 0.0) continue;
            const int r = std::max(0, depth - ta.j - tb.j);
            const double alpha = sa.degree(ta);
            std::vector<double> pcoef = power_log_derivative(alpha, ta.logpow, r);
            const double beta = alpha - r;
            for (int k = -fb.bandwidth(); k <= fb.bandwidth(); ++k) {
                double bk = max_abs(fb.coeff(k));
                if (bk == 0.0 || (k == 0 && r > 0)) continue;
                double lo = an - std::abs(k), hi = an + std::abs(k);
                if (lo < 1.0) return std::numeric_limits<double>::infinity();
                double pw = std::max(std::pow(lo, beta), std::pow(hi, beta));
                double lg = std::max(std::abs(std::log(lo)), std::abs(std::log(hi)));
                double gmax = 0.0;
                for (size_t m = 0; m < pcoef.size(); ++m) gmax += std::abs(pcoef[m]) * std::pow(lg, double(m));
                double fac = 1.0;
                for (int i = 1; i <= r; ++i) fac *= double(std::abs(k)) / i;
                total += fa1 * bk * bmag * pw * gmax * fac;
            }
        }
    }
    return total;
}

}  // namespace ct
