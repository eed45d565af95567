#pragma once

#include "circtrace/discrete_op.hpp"

#include <functional>
#include <memory>
#include <string>

namespace ct {

// Positive elliptic Fourier multiplier Q = (base)^t, value zero_mode^t on mode 0,
// optionally conjugated by an invertible order-0 gauge C (Q_C = C^{-1} Q C).
class Weight {
public:
    // exact: optional exact base value at n != 0; otherwise the base expansion is evaluated
    Weight(PhgSymbol base, double zero_mode = 1.0, std::function<double(int)> exact = {}, std::string name = "");

    static Weight abs_D();      // |n| + pi_0
    static Weight laplacian();  // n^2 + pi_0
    static Weight bracket();    // (1 + n^2)^{1/2}

    Weight power(double t) const;
    Weight conjugated(const DiscreteOp& C, int depth = kDefaultDepth) const;
    Weight conjugated(const DiscreteOp& C, const DiscreteOp& Cinv) const;

    const std::string& name() const { return name_; }
    double order() const { return t_ * base_.order(); }
    double exponent() const { return t_; }
    const PhgSymbol& base() const { return base_; }
    double zero_mode() const { return z0_; }
    // q(n) > 0, gauge ignored
    double value(int n) const;

    bool has_gauge() const { return bool(gauge_); }
    const DiscreteOp& gauge() const { return gauge_->first; }
    const DiscreteOp& gauge_inverse() const { return gauge_->second; }
    Weight ungauged() const;

private:
    PhgSymbol base_;
    double t_ = 1.0;
    double z0_ = 1.0;
    std::function<double(int)> exact_;
    std::string name_;
    std::shared_ptr<const std::pair<DiscreteOp, DiscreteOp>> gauge_;
};

// log q(xi) = q log|xi| + t log c0 + t log(1 + u)  (gauge ignored)
PhgSymbol log_weight(const Weight& Q, int depth = kDefaultDepth);
// L(n) = log(q(n) / |n|^q) expanded in |n|^{-1}: the part of log_weight without q log|xi|
PhgSymbol log_weight_remainder(const Weight& Q, int depth = kDefaultDepth);
// log Q (x) I_dim as an operator: diagonal exact on the exact window and on mode 0, conjugated by the gauge
DiscreteOp log_weight_op(const Weight& Q, int depth = kDefaultDepth, int dim = 1);

}  // namespace ct
