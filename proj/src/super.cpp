#include "circtrace/geomforms.hpp"

#include <stdexcept>

namespace ct {

int SuperForm::parity(const Mat& M) const {
    const int n = rank();
    if (M.rows() != n || M.cols() != n) throw std::invalid_argument("SuperForm: matrix rank mismatch");
    double odd = 0.0, even = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ((i < ne_) == (j < ne_) ? even : odd) += std::abs(M(i, j));
    if (odd > 0.0 && even > 0.0) throw std::invalid_argument("SuperForm: matrix is not homogeneous");
    return odd > 0.0 ? 1 : 0;
}

void SuperForm::add(unsigned mask, const Expr& g, const Mat& M) {
    if (mask >= (1u << p_)) throw std::invalid_argument("SuperForm::add: axis out of range");
    if (g.is_zero()) return;
    const int n = rank();
    Mat E = Mat::Zero(n, n), O = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ((i < ne_) == (j < ne_) ? E : O)(i, j) = M(i, j);
    for (Mat* part : {&E, &O})
        if (part->cwiseAbs().maxCoeff() > 0.0) terms_.push_back({mask, g, *part});
}

SuperForm SuperForm::operator*(const SuperForm& o) const {
    SuperForm r(p_, ne_, no_);
    for (auto& a : terms_)
        for (auto& b : o.terms_) {
            int s = wedge_sign(a.mask, b.mask);
            if (!s) continue;
            if (parity(a.M) && mask_degree(b.mask) % 2) s = -s;
            Mat P = a.M * b.M;
            if (P.cwiseAbs().maxCoeff() == 0.0) continue;
            r.terms_.push_back({a.mask | b.mask, Expr(double(s)) * a.coeff * b.coeff, P});
        }
    return r;
}

SuperForm SuperForm::operator+(const SuperForm& o) const {
    SuperForm r = *this;
    r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
    return r;
}

SuperForm SuperForm::d() const {
    SuperForm r(p_, ne_, no_);
    for (auto& t : terms_)
        for (int i = 0; i < p_; ++i) {
            if (t.mask & (1u << i)) continue;
            Expr dg = t.coeff.derivative(i);
            if (dg.is_zero()) continue;
            r.terms_.push_back({t.mask | (1u << i), Expr(double(wedge_sign(1u << i, t.mask))) * dg, t.M});
        }
    return r;
}

ExprForm SuperForm::str() const {
    // mixed degree: k is left at -1, components keyed by mask
    ExprForm out{p_, -1, {}};
    for (auto& t : terms_) {
        cplx s = t.M.topLeftCorner(ne_, ne_).trace() - t.M.bottomRightCorner(no_, no_).trace();
        if (s == 0.0) continue;
        out.c[t.mask] = out.get(t.mask) + Expr(s) * t.coeff;
    }
    return out;
}

ScalarForms super_chern_finite(const SuperForm& omega, int j, const ParamDomain& dom) {
    if (j < 1) throw std::invalid_argument("super_chern_finite: j must be >= 1");
    for (auto& t : omega.terms())
        if ((mask_degree(t.mask) + omega.parity(t.M)) % 2 == 0)
            throw std::invalid_argument("super_chern_finite: superconnection part must be odd in total degree");
    SuperForm F = omega.d() + omega * omega, P = F;
    for (int i = 1; i < j; ++i) P = P * F;
    ExprForm all = P.str();
    ScalarForms r;
    r.form = {omega.dim(), 2 * j, {}};
    for (auto& [m, g] : all.c)
        if (mask_degree(m) == 2 * j) r.form.c[m] = g;
    r.dform = ext_d(r.form.family(), dom.h, dom.richardson);
    return r;
}

}  // namespace ct
