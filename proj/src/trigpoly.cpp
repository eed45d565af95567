#include "circtrace/trigpoly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ct {

TrigPoly::TrigPoly(int K, std::vector<cplx> coeffs) : K_(K), c_(std::move(coeffs)) {
    if (K < 0 || c_.size() != size_t(2 * K + 1)) throw std::invalid_argument("TrigPoly: expected 2K+1 coefficients");
}

TrigPoly TrigPoly::constant(cplx v) {
    TrigPoly p(0);
    p.c_[0] = v;
    return p;
}

TrigPoly TrigPoly::monomial(int k, cplx v) {
    TrigPoly p(std::abs(k));
    p.set(k, v);
    return p;
}

void TrigPoly::set(int k, cplx v) {
    if (k < -K_ || k > K_) throw std::out_of_range("TrigPoly::set");
    c_[k + K_] = v;
}

cplx TrigPoly::eval(double x) const {
    cplx s = 0.0;
    for (int k = -K_; k <= K_; ++k) s += c_[k + K_] * std::exp(cplx(0.0, k * x));
    return s;
}

bool TrigPoly::is_real(double tol) const {
    for (int k = 0; k <= K_; ++k)
        if (std::abs(coeff(-k) - std::conj(coeff(k))) > tol) return false;
    return true;
}

bool TrigPoly::is_zero(double tol) const {
    for (auto& v : c_)
        if (std::abs(v) > tol) return false;
    return true;
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
    TrigPoly r(std::max(K_, o.K_));
    for (int k = -r.K_; k <= r.K_; ++k) r.c_[k + r.K_] = coeff(k) + o.coeff(k);
    return r;
}

TrigPoly TrigPoly::operator-(const TrigPoly& o) const { return *this + o * cplx(-1.0); }

TrigPoly TrigPoly::operator*(const TrigPoly& o) const {
    TrigPoly r(K_ + o.K_);
    for (int a = -K_; a <= K_; ++a)
        for (int b = -o.K_; b <= o.K_; ++b) r.c_[a + b + r.K_] += coeff(a) * o.coeff(b);
    return r;
}

TrigPoly TrigPoly::operator*(cplx v) const {
    TrigPoly r = *this;
    for (auto& x : r.c_) x *= v;
    return r;
}

TrigPoly TrigPoly::derivative() const {
    TrigPoly r = *this;
    for (int k = -K_; k <= K_; ++k) r.c_[k + K_] *= cplx(0.0, k);
    return r;
}

TrigPoly TrigPoly::conj() const {
    TrigPoly r(K_);
    for (int k = -K_; k <= K_; ++k) r.c_[k + K_] = std::conj(coeff(-k));
    return r;
}

bool TrigPoly::operator==(const TrigPoly& o) const {
    int K = std::max(K_, o.K_);
    for (int k = -K; k <= K; ++k)
        if (coeff(k) != o.coeff(k)) return false;
    return true;
}

// ---------------------------------------------------------------------------

MatrixTrigPoly MatrixTrigPoly::identity(int d) { return constant(Mat::Identity(d, d)); }

MatrixTrigPoly MatrixTrigPoly::constant(const Mat& m) { return monomial(0, m); }

MatrixTrigPoly MatrixTrigPoly::monomial(int k, const Mat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("MatrixTrigPoly: square matrix expected");
    MatrixTrigPoly p(int(m.rows()), std::abs(k));
    p.set(k, m);
    return p;
}

MatrixTrigPoly MatrixTrigPoly::scalar(const TrigPoly& s, int d) {
    MatrixTrigPoly p(d, s.bandwidth());
    for (int k = -s.bandwidth(); k <= s.bandwidth(); ++k)
        for (int i = 0; i < d; ++i) p.ref(k, i, i) = s.coeff(k);
    return p;
}

MatrixTrigPoly MatrixTrigPoly::from_entries(const std::vector<std::vector<TrigPoly>>& e) {
    int d = int(e.size());
    int K = 0;
    for (auto& row : e) {
        if (int(row.size()) != d) throw std::invalid_argument("MatrixTrigPoly: ragged entries");
        for (auto& t : row) K = std::max(K, t.bandwidth());
    }
    MatrixTrigPoly p(d, K);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = -K; k <= K; ++k) p.ref(k, i, j) = e[i][j].coeff(k);
    return p;
}

Mat MatrixTrigPoly::coeff(int k) const {
    Mat m = Mat::Zero(d_, d_);
    if (k < -K_ || k > K_) return m;
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) m(i, j) = at(k, i, j);
    return m;
}

void MatrixTrigPoly::set(int k, const Mat& m) {
    if (m.rows() != d_ || m.cols() != d_) throw std::invalid_argument("MatrixTrigPoly::set: dimension");
    if (std::abs(k) > K_) *this = widened(std::abs(k));
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) ref(k, i, j) = m(i, j);
}

void MatrixTrigPoly::add(int k, const Mat& m) {
    if (std::abs(k) > K_) *this = widened(std::abs(k));
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) ref(k, i, j) += m(i, j);
}

Mat MatrixTrigPoly::eval(double x) const {
    Mat m = Mat::Zero(d_, d_);
    for (int k = -K_; k <= K_; ++k) {
        cplx e = std::exp(cplx(0.0, k * x));
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) m(i, j) += at(k, i, j) * e;
    }
    return m;
}

TrigPoly MatrixTrigPoly::trace() const {
    TrigPoly t(K_);
    for (int k = -K_; k <= K_; ++k) {
        cplx s = 0.0;
        for (int i = 0; i < d_; ++i) s += at(k, i, i);
        t.set(k, s);
    }
    return t;
}

TrigPoly MatrixTrigPoly::entry(int i, int j) const {
    TrigPoly t(K_);
    for (int k = -K_; k <= K_; ++k) t.set(k, at(k, i, j));
    return t;
}

MatrixTrigPoly MatrixTrigPoly::widened(int K) const {
    if (K <= K_) return *this;
    MatrixTrigPoly r(d_, K);
    for (int k = -K_; k <= K_; ++k)
        std::copy(block(k), block(k) + d_ * d_, &r.c_[size_t(k + K) * d_ * d_]);
    return r;
}

MatrixTrigPoly MatrixTrigPoly::operator+(const MatrixTrigPoly& o) const {
    if (d_ != o.d_) throw std::invalid_argument("MatrixTrigPoly: fiber dimension mismatch");
    MatrixTrigPoly r = widened(std::max(K_, o.K_));
    for (int k = -o.K_; k <= o.K_; ++k) {
        const cplx* src = o.block(k);
        cplx* dst = &r.c_[size_t(k + r.K_) * d_ * d_];
        for (int q = 0; q < d_ * d_; ++q) dst[q] += src[q];
    }
    return r;
}

MatrixTrigPoly MatrixTrigPoly::operator-(const MatrixTrigPoly& o) const { return *this + o * cplx(-1.0); }

MatrixTrigPoly MatrixTrigPoly::operator*(cplx v) const {
    MatrixTrigPoly r = *this;
    for (auto& x : r.c_) x *= v;
    return r;
}

MatrixTrigPoly MatrixTrigPoly::operator*(const MatrixTrigPoly& o) const {
    if (d_ != o.d_) throw std::invalid_argument("MatrixTrigPoly: fiber dimension mismatch");
    const int d = d_;
    MatrixTrigPoly r(d, K_ + o.K_);
    for (int a = -K_; a <= K_; ++a) {
        const cplx* A = block(a);
        for (int b = -o.K_; b <= o.K_; ++b) {
            const cplx* B = o.block(b);
            cplx* C = &r.c_[size_t(a + b + r.K_) * d * d];
            if (d == 1) {
                C[0] += A[0] * B[0];
                continue;
            }
            for (int i = 0; i < d; ++i)
                for (int l = 0; l < d; ++l) {
                    cplx ail = A[i * d + l];
                    if (ail == 0.0) continue;
                    for (int j = 0; j < d; ++j) C[i * d + j] += ail * B[l * d + j];
                }
        }
    }
    return r;
}

MatrixTrigPoly MatrixTrigPoly::k_power(int p) const {
    MatrixTrigPoly r = *this;
    for (int k = -K_; k <= K_; ++k) {
        double f = std::pow(double(k), p);
        cplx* dst = &r.c_[size_t(k + K_) * d_ * d_];
        for (int q = 0; q < d_ * d_; ++q) dst[q] *= f;
    }
    return r;
}

namespace {

TrigPoly trimmed_poly(const TrigPoly& p) {
    int K = p.bandwidth();
    while (K > 0 && p.coeff(K) == 0.0 && p.coeff(-K) == 0.0) --K;
    TrigPoly r(K);
    for (int k = -K; k <= K; ++k) r.set(k, p.coeff(k));
    return r;
}

TrigPoly det_rec(const std::vector<std::vector<TrigPoly>>& e) {
    size_t d = e.size();
    if (d == 1) return e[0][0];
    TrigPoly acc(0);
    for (size_t c = 0; c < d; ++c) {
        std::vector<std::vector<TrigPoly>> minor;
        for (size_t i = 1; i < d; ++i) {
            std::vector<TrigPoly> row;
            for (size_t j = 0; j < d; ++j)
                if (j != c) row.push_back(e[i][j]);
            minor.push_back(row);
        }
        TrigPoly t = e[0][c] * det_rec(minor);
        acc = (c % 2) ? acc - t : acc + t;
    }
    return acc;
}

}  // namespace

MatrixTrigPoly MatrixTrigPoly::exact_inverse() const {
    const int d = d_;
    std::vector<std::vector<TrigPoly>> e(d, std::vector<TrigPoly>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) e[i][j] = entry(i, j);
    double scale = std::max(max_abs(), 1e-300);
    TrigPoly det = det_rec(e);
    // snap roundoff-level coefficients
    for (int k = -det.bandwidth(); k <= det.bandwidth(); ++k)
        if (std::abs(det.coeff(k)) <= 1e-14 * std::pow(scale, d)) det.set(k, 0.0);
    det = trimmed_poly(det);
    int mode = 0, count = 0;
    for (int k = -det.bandwidth(); k <= det.bandwidth(); ++k)
        if (det.coeff(k) != 0.0) {
            mode = k;
            ++count;
        }
    if (count == 0) throw std::domain_error("non-invertible leading symbol");
    if (count != 1)
        throw std::domain_error("leading symbol has no trigonometric-polynomial inverse (det is not a unit)");
    TrigPoly dinv = TrigPoly::monomial(-mode, 1.0 / det.coeff(mode));
    std::vector<std::vector<TrigPoly>> inv(d, std::vector<TrigPoly>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            TrigPoly cof;
            if (d == 1) {
                cof = TrigPoly::constant(1.0);
            } else {
                std::vector<std::vector<TrigPoly>> minor;
                for (int r = 0; r < d; ++r) {
                    if (r == j) continue;
                    std::vector<TrigPoly> row;
                    for (int c = 0; c < d; ++c)
                        if (c != i) row.push_back(e[r][c]);
                    minor.push_back(row);
                }
                cof = det_rec(minor);
                if ((i + j) % 2) cof = cof * cplx(-1.0);
            }
            inv[i][j] = trimmed_poly(cof * dinv);
        }
    return from_entries(inv);
}

double MatrixTrigPoly::max_abs() const {
    double m = 0.0;
    for (auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

bool MatrixTrigPoly::is_zero(double tol) const { return max_abs() <= tol; }

bool MatrixTrigPoly::x_independent(double tol) const {
    for (int k = -K_; k <= K_; ++k) {
        if (k == 0) continue;
        const cplx* b = block(k);
        for (int q = 0; q < d_ * d_; ++q)
            if (std::abs(b[q]) > tol) return false;
    }
    return true;
}

MatrixTrigPoly MatrixTrigPoly::trimmed(double tol) const {
    int K = K_;
    auto vanish = [&](int k) {
        const cplx* b = block(k);
        for (int q = 0; q < d_ * d_; ++q)
            if (std::abs(b[q]) > tol) return false;
        return true;
    };
    while (K > 0 && vanish(K) && vanish(-K)) --K;
    if (K == K_) return *this;
    MatrixTrigPoly r(d_, K);
    for (int k = -K; k <= K; ++k) std::copy(block(k), block(k) + d_ * d_, &r.c_[size_t(k + K) * d_ * d_]);
    return r;
}

bool MatrixTrigPoly::operator==(const MatrixTrigPoly& o) const {
    if (d_ != o.d_) return false;
    int K = std::max(K_, o.K_);
    for (int k = -K; k <= K; ++k)
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j)
                if (at(k, i, j) != o.at(k, i, j)) return false;
    return true;
}

}  // namespace ct
