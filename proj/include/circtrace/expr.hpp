#pragma once

#include <complex>
#include <memory>
#include <string>

namespace ct {

using cplx = std::complex<double>;

inline constexpr int kMaxParamDim = 4;

// Complex scalar expression in the base coordinates x1..x4.
class Expr {
public:
    enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt, Log };

    Expr() : Expr(cplx(0.0)) {}
    Expr(cplx c);
    Expr(double c) : Expr(cplx(c)) {}

    static Expr var(int i);  // 0-based axis
    // grammar: + - * / ^, unary -, parentheses, numbers, i, pi, x1..x4, sin cos exp sqrt log
    static Expr parse(const std::string& text);

    Kind kind() const;
    bool is_const() const { return kind() == Kind::Const; }
    bool is_zero() const;
    cplx const_value() const;

    cplx eval(const double* x) const;
    Expr derivative(int axis) const;
    std::string str() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr pow(const Expr& a, const Expr& b);
    friend Expr sin(const Expr& a);
    friend Expr cos(const Expr& a);
    friend Expr exp(const Expr& a);
    friend Expr sqrt(const Expr& a);
    friend Expr log(const Expr& a);

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    static Expr make(Kind k, Expr a, Expr b = Expr());
    std::shared_ptr<const Node> n_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, const Expr& b);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr sqrt(const Expr& a);
Expr log(const Expr& a);

}  // namespace ct
