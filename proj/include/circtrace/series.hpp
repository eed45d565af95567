#pragma once

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

namespace ct {

using cplx = std::complex<double>;

// Truncated Laurent series  sum_{k=lo}^{hi} c_k e^k  in one variable.
// Coefficients above hi are unknown (truncated), below lo are zero.
class Series {
public:
    Series() : lo_(0), hi_(0), c_(1, 0.0) {}
    Series(int lo, int hi) : lo_(lo), hi_(hi), c_(hi >= lo ? hi - lo + 1 : 0, 0.0) {}

    static Series constant(cplx v, int hi) {
        Series s(0, hi);
        if (hi >= 0) s.c_[0] = v;
        return s;
    }
    static Series monomial(cplx v, int k, int hi) {
        Series s(std::min(k, hi + 1), hi);
        if (k <= hi) s.c_[k - s.lo_] = v;
        return s;
    }
    // v * exp(w e)
    static Series exp_linear(cplx v, cplx w, int hi) {
        Series s(0, hi);
        cplx t = v;
        for (int k = 0; k <= hi; ++k) {
            s.c_[k] = t;
            t *= w / double(k + 1);
        }
        return s;
    }

    int lo() const { return lo_; }
    int hi() const { return hi_; }

    cplx operator[](int k) const {
        if (k < lo_ || k > hi_) return 0.0;
        return c_[k - lo_];
    }
    cplx& at(int k) {
        if (k < lo_ || k > hi_) throw std::out_of_range("Series::at");
        return c_[k - lo_];
    }

    // lowest index with a nonzero coefficient (hi+1 if none)
    int valuation() const {
        for (int k = lo_; k <= hi_; ++k)
            if ((*this)[k] != 0.0) return k;
        return hi_ + 1;
    }

    Series truncated(int hi) const {
        Series r(std::min(lo_, hi + 1), std::min(hi, hi_));
        for (int k = r.lo_; k <= r.hi_; ++k) r.c_[k - r.lo_] = (*this)[k];
        return r;
    }

    Series operator+(const Series& o) const {
        Series r(std::min(lo_, o.lo_), std::min(hi_, o.hi_));
        for (int k = r.lo_; k <= r.hi_; ++k) r.c_[k - r.lo_] = (*this)[k] + o[k];
        return r;
    }
    Series operator-(const Series& o) const { return *this + o * cplx(-1.0); }
    Series operator-() const { return *this * cplx(-1.0); }
    Series& operator+=(const Series& o) { return *this = *this + o; }
    Series& operator-=(const Series& o) { return *this = *this - o; }

    Series operator*(cplx v) const {
        Series r = *this;
        for (auto& x : r.c_) x *= v;
        return r;
    }
    Series operator*(const Series& o) const {
        int va = std::min(valuation(), hi_), vb = std::min(o.valuation(), o.hi_);
        int hi = std::min(hi_ + vb, o.hi_ + va);
        Series r(lo_ + o.lo_, hi);
        for (int i = lo_; i <= hi_; ++i) {
            cplx a = (*this)[i];
            if (a == 0.0) continue;
            for (int j = o.lo_; j <= o.hi_ && i + j <= hi; ++j) r.c_[i + j - r.lo_] += a * o[j];
        }
        return r;
    }

    // d/de
    Series derivative() const {
        Series r(lo_ - 1, hi_ - 1);
        for (int k = lo_; k <= hi_; ++k) r.c_[k - 1 - r.lo_] = double(k) * (*this)[k];
        return r;
    }

    // f(w e)
    Series rescaled(cplx w) const {
        Series r = *this;
        for (int k = lo_; k <= hi_; ++k) r.c_[k - lo_] *= std::pow(w, k);
        return r;
    }

    // exp(f), f regular at 0
    Series exp() const {
        if (valuation() < 0) throw std::domain_error("Series::exp of a pole");
        Series r = Series::constant(std::exp((*this)[0]), hi_);
        // r' = f' r, solved order by order
        for (int n = 1; n <= hi_; ++n) {
            cplx acc = 0.0;
            for (int k = 1; k <= n; ++k) acc += double(k) * (*this)[k] * r[n - k];
            r.c_[n - r.lo_] = acc / double(n);
        }
        return r;
    }

    // 1/f, f with nonzero coefficient at its valuation
    Series inverse() const {
        int v = valuation();
        if (v > hi_) throw std::domain_error("Series::inverse of zero");
        int len = hi_ - v;  // known relative orders
        Series r(-v, -v + len);
        cplx b0 = (*this)[v];
        for (int n = 0; n <= len; ++n) {
            cplx acc = (n == 0) ? cplx(1.0) : cplx(0.0);
            for (int k = 1; k <= n; ++k) acc -= (*this)[v + k] * r[-v + n - k];
            r.c_[n] = acc / b0;
        }
        return r;
    }

private:
    int lo_, hi_;
    std::vector<cplx> c_;
};

inline Series operator*(cplx v, const Series& s) { return s * v; }

}  // namespace ct
