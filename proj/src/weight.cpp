#include "circtrace/weight.hpp"

#include <cmath>
#include <stdexcept>

namespace ct {

namespace {

void validate_base(const PhgSymbol& b) {
    if (b.dim() != 1) throw std::invalid_argument("Weight: base multiplier must be scalar");
    if (!b.x_independent()) throw std::invalid_argument("Weight: base multiplier must be x-independent");
    if (b.max_logpow() > 0) throw std::invalid_argument("Weight: base multiplier must be classical (no log terms)");
    if (b.order() <= 0) throw std::invalid_argument("Weight: order must be positive");
    const HomogeneousTerm* lead = b.find(0, 0);
    if (!lead) throw std::invalid_argument("Weight: base multiplier has no leading term");
    for (const MatrixTrigPoly* f : {&lead->plus, &lead->minus}) {
        cplx c = f->at(0, 0, 0);
        if (std::abs(c.imag()) > 0.0 || c.real() <= 0.0)
            throw std::invalid_argument("Weight: leading coefficient must be positive on both half-lines");
    }
    for (auto& t : b.terms())
        for (const MatrixTrigPoly* f : {&t.plus, &t.minus})
            if (f->at(0, 0, 0).imag() != 0.0) throw std::invalid_argument("Weight: base multiplier must be real");
}

// u = base / (c0 |xi|^a) - 1 on both half-lines, as an order-0 symbol with j >= 1 terms
PhgSymbol relative_correction(const PhgSymbol& b, int depth) {
    const HomogeneousTerm* lead = b.find(0, 0);
    const cplx cp = lead->plus.at(0, 0, 0), cm = lead->minus.at(0, 0, 0);
    PhgSymbol u(0.0, depth, 1);
    for (auto& t : b.terms()) {
        if (t.j == 0) continue;
        u.add_term(t.j, 0, MatrixTrigPoly::constant(Mat::Constant(1, 1, t.plus.at(0, 0, 0) / cp)),
                   MatrixTrigPoly::constant(Mat::Constant(1, 1, t.minus.at(0, 0, 0) / cm)));
    }
    return u;
}

PhgSymbol constant_sides(cplx p, cplx m, int depth) {
    return PhgSymbol::term(0.0, MatrixTrigPoly::constant(Mat::Constant(1, 1, p)),
                           MatrixTrigPoly::constant(Mat::Constant(1, 1, m)), 0, depth);
}

}  // namespace

Weight::Weight(PhgSymbol base, double zero_mode, std::function<double(int)> exact, std::string name)
    : base_(std::move(base)), z0_(zero_mode), exact_(std::move(exact)), name_(std::move(name)) {
    validate_base(base_);
    if (!(z0_ > 0.0)) throw std::invalid_argument("Weight: zero-mode value must be positive");
    for (int n = -256; n <= 256; ++n)
        if (!(value(n) > 0.0)) throw std::invalid_argument("Weight: multiplier not positive at mode " + std::to_string(n));
}

Weight Weight::abs_D() {
    return Weight(PhgSymbol::power(1.0), 1.0, [](int n) { return std::abs(double(n)); }, "abs_D");
}

Weight Weight::laplacian() {
    return Weight(PhgSymbol::power(2.0), 1.0, [](int n) { return double(n) * double(n); }, "laplacian");
}

Weight Weight::bracket() {
    // |xi| (1 + xi^{-2})^{1/2} = sum_k binom(1/2, k) |xi|^{1-2k}
    PhgSymbol b(1.0, 2 * kDefaultDepth, 1);
    double c = 1.0;
    for (int k = 0; 2 * k < 2 * kDefaultDepth; ++k) {
        auto f = MatrixTrigPoly::constant(Mat::Constant(1, 1, c));
        b.add_term(2 * k, 0, f, f);
        c *= (0.5 - k) / (k + 1);
    }
    return Weight(b, 1.0, [](int n) { return std::sqrt(1.0 + double(n) * double(n)); }, "bracket");
}

Weight Weight::power(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("Weight::power: exponent must be positive");
    Weight w = *this;
    w.t_ = t_ * t;
    if (!name_.empty()) w.name_ = name_ + "^" + std::to_string(t);
    return w;
}

Weight Weight::conjugated(const DiscreteOp& C, int depth) const { return conjugated(C, exact_inverse(C, depth)); }

Weight Weight::conjugated(const DiscreteOp& C, const DiscreteOp& Cinv) const {
    if (gauge_) throw std::invalid_argument("Weight: already gauge-conjugated");
    Weight w = *this;
    w.gauge_ = std::make_shared<const std::pair<DiscreteOp, DiscreteOp>>(C, Cinv);
    return w;
}

Weight Weight::ungauged() const {
    Weight w = *this;
    w.gauge_.reset();
    return w;
}

double Weight::value(int n) const {
    double b;
    if (n == 0)
        b = z0_;
    else if (exact_)
        b = exact_(n);
    else
        b = base_.fourier(0, n)(0, 0).real();
    return t_ == 1.0 ? b : std::pow(b, t_);
}

PhgSymbol log_weight_remainder(const Weight& Q, int depth) {
    const PhgSymbol& b = Q.base();
    const HomogeneousTerm* lead = b.find(0, 0);
    const double t = Q.exponent();
    PhgSymbol L = constant_sides(t * std::log(lead->plus.at(0, 0, 0).real()),
                                 t * std::log(lead->minus.at(0, 0, 0).real()), depth);
    PhgSymbol u = relative_correction(b, depth);
    if (u.is_zero()) return L;
    PhgSymbol uk = u;
    for (int k = 1; k < depth; ++k) {
        double c = t * ((k % 2) ? 1.0 : -1.0) / k;
        L = L + uk * c;
        uk = star_product(uk, u, depth);
        if (uk.is_zero()) break;
    }
    return L;
}

PhgSymbol log_weight(const Weight& Q, int depth) {
    auto q = MatrixTrigPoly::constant(Mat::Constant(1, 1, Q.order()));
    PhgSymbol s = PhgSymbol::term(0.0, q, q, 1, depth);
    return s + log_weight_remainder(Q, depth);
}

DiscreteOp log_weight_op(const Weight& Q, int depth, int dim) {
    PhgSymbol s = log_weight(Q, depth);
    Patch p(1);
    for (int n = -kExactWindow; n <= kExactWindow; ++n) {
        double exact = std::log(Q.value(n));
        double approx = n == 0 ? 0.0 : s.fourier(0, n)(0, 0).real();
        double dev = exact - approx;
        if (std::abs(dev) > 4e-16 * std::max(1.0, std::abs(exact))) p.add(n, n, Mat::Constant(1, 1, dev));
    }
    DiscreteOp L(s, p);
    // scalar weights act on fibers of dimension d as Q (x) I_d
    const int d = Q.has_gauge() ? Q.gauge().dim() : dim;
    if (Q.has_gauge() && dim != 1 && dim != d)
        throw std::invalid_argument("log_weight_op: fiber dimension differs from the gauge");
    if (d != 1) {
        PhgSymbol sd(0.0, depth, d);
        for (auto& t : s.terms()) {
            auto fp = MatrixTrigPoly::constant(Mat::Identity(d, d) * t.plus.at(0, 0, 0));
            auto fm = MatrixTrigPoly::constant(Mat::Identity(d, d) * t.minus.at(0, 0, 0));
            sd.add_term(t.j, t.logpow, fp, fm);
        }
        Patch pd(d);
        for (auto& [n, col] : p.columns())
            for (auto& [m, blk] : col) pd.add(m, n, Mat::Identity(d, d) * blk(0, 0));
        L = DiscreteOp(sd, pd);
    }
    if (!Q.has_gauge()) return L;
    return gauge_conjugate(L, Q.gauge(), Q.gauge_inverse(), depth);
}

}  // namespace ct
