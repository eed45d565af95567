#include "circtrace/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ct {

struct Expr::Node {
    Kind kind;
    cplx value = 0.0;
    int var = -1;
    // children start null so that building a node never builds another one
    Expr a{std::shared_ptr<const Node>()}, b{std::shared_ptr<const Node>()};
};

namespace {

const double kPi = 3.14159265358979323846;

}  // namespace

Expr::Expr(cplx c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Const;
    n->value = c;
    n_ = n;
}

Expr Expr::var(int i) {
    if (i < 0 || i >= kMaxParamDim) throw std::invalid_argument("Expr::var: axis out of range");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->var = i;
    return Expr(std::shared_ptr<const Node>(n));
}

Expr Expr::make(Kind k, Expr a, Expr b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return Expr(std::shared_ptr<const Node>(n));
}

Expr::Kind Expr::kind() const { return n_->kind; }
bool Expr::is_zero() const { return is_const() && n_->value == 0.0; }
cplx Expr::const_value() const { return n_->value; }

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_const() && b.is_const()) return Expr(a.const_value() + b.const_value());
    return Expr::make(Expr::Kind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return -b;
    if (a.is_const() && b.is_const()) return Expr(a.const_value() - b.const_value());
    return Expr::make(Expr::Kind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr(0.0);
    if (a.is_const() && a.const_value() == 1.0) return b;
    if (b.is_const() && b.const_value() == 1.0) return a;
    if (a.is_const() && b.is_const()) return Expr(a.const_value() * b.const_value());
    return Expr::make(Expr::Kind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw std::domain_error("Expr: division by constant zero");
    if (a.is_zero()) return Expr(0.0);
    if (b.is_const() && b.const_value() == 1.0) return a;
    if (a.is_const() && b.is_const()) return Expr(a.const_value() / b.const_value());
    return Expr::make(Expr::Kind::Div, a, b);
}

Expr operator-(const Expr& a) {
    if (a.is_const()) return Expr(-a.const_value());
    return Expr::make(Expr::Kind::Neg, a);
}

Expr pow(const Expr& a, const Expr& b) {
    if (b.is_zero()) return Expr(1.0);
    if (b.is_const() && b.const_value() == 1.0) return a;
    if (a.is_const() && b.is_const()) return Expr(std::pow(a.const_value(), b.const_value()));
    return Expr::make(Expr::Kind::Pow, a, b);
}

#define CT_UNARY(fn, K)                                        \
    Expr fn(const Expr& a) {                                   \
        if (a.is_const()) return Expr(std::fn(a.const_value())); \
        return Expr::make(Expr::Kind::K, a);                   \
    }
CT_UNARY(sin, Sin)
CT_UNARY(cos, Cos)
CT_UNARY(exp, Exp)
CT_UNARY(sqrt, Sqrt)
CT_UNARY(log, Log)
#undef CT_UNARY

cplx Expr::eval(const double* x) const {
    const Node& n = *n_;
    switch (n.kind) {
        case Kind::Const: return n.value;
        case Kind::Var: return x[n.var];
        case Kind::Add: return n.a.eval(x) + n.b.eval(x);
        case Kind::Sub: return n.a.eval(x) - n.b.eval(x);
        case Kind::Mul: return n.a.eval(x) * n.b.eval(x);
        case Kind::Div: return n.a.eval(x) / n.b.eval(x);
        case Kind::Neg: return -n.a.eval(x);
        case Kind::Pow: {
            cplx e = n.b.eval(x);
            cplx base = n.a.eval(x);
            // integer powers of real bases stay real
            if (e.imag() == 0.0 && e.real() == std::round(e.real()) && std::abs(e.real()) <= 64) {
                int k = int(e.real());
                cplx r = 1.0;
                for (int i = 0; i < std::abs(k); ++i) r *= base;
                return k < 0 ? 1.0 / r : r;
            }
            return std::pow(base, e);
        }
        case Kind::Sin: return std::sin(n.a.eval(x));
        case Kind::Cos: return std::cos(n.a.eval(x));
        case Kind::Exp: return std::exp(n.a.eval(x));
        case Kind::Sqrt: return std::sqrt(n.a.eval(x));
        case Kind::Log: return std::log(n.a.eval(x));
    }
    return 0.0;
}

Expr Expr::derivative(int axis) const {
    const Node& n = *n_;
    switch (n.kind) {
        case Kind::Const: return Expr(0.0);
        case Kind::Var: return Expr(n.var == axis ? 1.0 : 0.0);
        case Kind::Add: return n.a.derivative(axis) + n.b.derivative(axis);
        case Kind::Sub: return n.a.derivative(axis) - n.b.derivative(axis);
        case Kind::Mul: return n.a.derivative(axis) * n.b + n.a * n.b.derivative(axis);
        case Kind::Div:
            return (n.a.derivative(axis) * n.b - n.a * n.b.derivative(axis)) / (n.b * n.b);
        case Kind::Neg: return -n.a.derivative(axis);
        case Kind::Pow: {
            Expr da = n.a.derivative(axis), db = n.b.derivative(axis);
            Expr r = n.b * pow(n.a, n.b - Expr(1.0)) * da;
            if (!db.is_zero()) r = r + *this * log(n.a) * db;
            return r;
        }
        case Kind::Sin: return cos(n.a) * n.a.derivative(axis);
        case Kind::Cos: return -(sin(n.a) * n.a.derivative(axis));
        case Kind::Exp: return *this * n.a.derivative(axis);
        case Kind::Sqrt: return n.a.derivative(axis) / (Expr(2.0) * *this);
        case Kind::Log: return n.a.derivative(axis) / n.a;
    }
    return Expr(0.0);
}

std::string Expr::str() const {
    const Node& n = *n_;
    std::ostringstream os;
    os.precision(17);
    auto bin = [&](const char* op) { os << '(' << n.a.str() << ' ' << op << ' ' << n.b.str() << ')'; };
    switch (n.kind) {
        case Kind::Const:
            if (n.value.imag() == 0.0)
                os << n.value.real();
            else
                os << '(' << n.value.real() << " + " << n.value.imag() << "*i)";
            break;
        case Kind::Var: os << 'x' << n.var + 1; break;
        case Kind::Add: bin("+"); break;
        case Kind::Sub: bin("-"); break;
        case Kind::Mul: bin("*"); break;
        case Kind::Div: bin("/"); break;
        case Kind::Pow: bin("^"); break;
        case Kind::Neg: os << "(-" << n.a.str() << ')'; break;
        case Kind::Sin: os << "sin(" << n.a.str() << ')'; break;
        case Kind::Cos: os << "cos(" << n.a.str() << ')'; break;
        case Kind::Exp: os << "exp(" << n.a.str() << ')'; break;
        case Kind::Sqrt: os << "sqrt(" << n.a.str() << ')'; break;
        case Kind::Log: os << "log(" << n.a.str() << ')'; break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// recursive-descent parser

namespace {

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Expr run() {
        Expr e = sum();
        skip();
        if (p_ != s_.size()) fail("unexpected '" + std::string(1, s_[p_]) + "'");
        return e;
    }

private:
    const std::string& s_;
    size_t p_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expression \"" + s_ + "\" at offset " + std::to_string(p_) + ": " + what);
    }
    void skip() {
        while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
    }
    bool eat(char c) {
        skip();
        if (p_ < s_.size() && s_[p_] == c) {
            ++p_;
            return true;
        }
        return false;
    }

    Expr sum() {
        Expr e = product();
        for (;;) {
            if (eat('+'))
                e = e + product();
            else if (eat('-'))
                e = e - product();
            else
                return e;
        }
    }
    Expr product() {
        Expr e = unary();
        for (;;) {
            if (eat('*'))
                e = e * unary();
            else if (eat('/'))
                e = e / unary();
            else
                return e;
        }
    }
    Expr unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    Expr power() {
        Expr b = atom();
        if (eat('^')) return pow(b, unary());  // right associative
        return b;
    }
    Expr atom() {
        skip();
        if (p_ >= s_.size()) fail("unexpected end");
        char c = s_[p_];
        if (eat('(')) {
            Expr e = sum();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v = std::stod(s_.substr(p_), &used);
            p_ += used;
            return Expr(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t q = p_;
            while (q < s_.size() && std::isalnum(static_cast<unsigned char>(s_[q]))) ++q;
            std::string id = s_.substr(p_, q - p_);
            p_ = q;
            if (id == "i") return Expr(cplx(0.0, 1.0));
            if (id == "pi") return Expr(kPi);
            if (id.size() == 2 && id[0] == 'x' && id[1] >= '1' && id[1] <= '4') return Expr::var(id[1] - '1');
            Expr (*fn)(const Expr&) = nullptr;
            if (id == "sin") fn = sin;
            if (id == "cos") fn = cos;
            if (id == "exp") fn = exp;
            if (id == "sqrt") fn = sqrt;
            if (id == "log") fn = log;
            if (!fn) fail("unknown identifier '" + id + "'");
            if (!eat('(')) fail("expected '(' after " + id);
            Expr arg = sum();
            if (!eat(')')) fail("expected ')'");
            return fn(arg);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

}  // namespace

Expr Expr::parse(const std::string& text) { return Parser(text).run(); }

}  // namespace ct
