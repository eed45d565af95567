#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace ct {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// Scalar trigonometric polynomial sum_{|k|<=K} c_k e^{ikx}.
class TrigPoly {
public:
    explicit TrigPoly(int K = 0) : K_(K), c_(2 * K + 1, 0.0) {}
    TrigPoly(int K, std::vector<cplx> coeffs);

    static TrigPoly constant(cplx v);
    static TrigPoly monomial(int k, cplx v);

    int bandwidth() const { return K_; }
    cplx coeff(int k) const { return (k < -K_ || k > K_) ? cplx(0.0) : c_[k + K_]; }
    void set(int k, cplx v);
    const std::vector<cplx>& coeffs() const { return c_; }

    cplx eval(double x) const;
    cplx mean() const { return coeff(0); }
    bool is_real(double tol = 0.0) const;
    bool is_zero(double tol = 0.0) const;

    TrigPoly operator+(const TrigPoly& o) const;
    TrigPoly operator-(const TrigPoly& o) const;
    TrigPoly operator*(const TrigPoly& o) const;
    TrigPoly operator*(cplx v) const;
    TrigPoly derivative() const;
    TrigPoly conj() const;  // pointwise complex conjugate

    bool operator==(const TrigPoly& o) const;

private:
    int K_;
    std::vector<cplx> c_;
};

// d x d matrix of trigonometric polynomials sharing one bandwidth bound.
// Flat storage: coefficient of e^{ikx} at entry (i,j) is data[((k+K)*d + i)*d + j].
class MatrixTrigPoly {
public:
    explicit MatrixTrigPoly(int d = 1, int K = 0) : d_(d), K_(K), c_(size_t(2 * K + 1) * d * d, 0.0) {}

    static MatrixTrigPoly identity(int d);
    static MatrixTrigPoly constant(const Mat& m);
    static MatrixTrigPoly monomial(int k, const Mat& m);
    static MatrixTrigPoly scalar(const TrigPoly& p, int d);
    static MatrixTrigPoly from_entries(const std::vector<std::vector<TrigPoly>>& e);

    int dim() const { return d_; }
    int bandwidth() const { return K_; }

    cplx at(int k, int i, int j) const {
        return (k < -K_ || k > K_) ? cplx(0.0) : c_[(size_t(k + K_) * d_ + i) * d_ + j];
    }
    cplx& ref(int k, int i, int j) { return c_[(size_t(k + K_) * d_ + i) * d_ + j]; }
    const cplx* block(int k) const { return &c_[size_t(k + K_) * d_ * d_]; }

    Mat coeff(int k) const;
    void set(int k, const Mat& m);
    void add(int k, const Mat& m);

    Mat eval(double x) const;
    TrigPoly trace() const;
    TrigPoly entry(int i, int j) const;

    MatrixTrigPoly operator+(const MatrixTrigPoly& o) const;
    MatrixTrigPoly operator-(const MatrixTrigPoly& o) const;
    MatrixTrigPoly operator*(cplx v) const;
    MatrixTrigPoly operator*(const MatrixTrigPoly& o) const;  // pointwise matrix product
    MatrixTrigPoly& operator+=(const MatrixTrigPoly& o) { return *this = *this + o; }

    // multiply the k-th coefficient by k^p (p-th x-derivative up to the factor i^p)
    MatrixTrigPoly k_power(int p) const;
    // pointwise inverse when it is again a trigonometric polynomial, i.e. when det is c e^{ikx}
    MatrixTrigPoly exact_inverse() const;

    double max_abs() const;
    bool is_zero(double tol = 0.0) const;
    bool x_independent(double tol = 0.0) const;
    // drop vanishing outer modes
    MatrixTrigPoly trimmed(double tol = 0.0) const;
    MatrixTrigPoly widened(int K) const;

    bool operator==(const MatrixTrigPoly& o) const;

private:
    int d_, K_;
    std::vector<cplx> c_;
};

}  // namespace ct
