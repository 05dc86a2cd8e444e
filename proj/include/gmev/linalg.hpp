#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace gmev {

using vector = Eigen::VectorXd;
using matrix = Eigen::MatrixXd;

inline constexpr double negative_infinity = -std::numeric_limits<double>::infinity();

namespace detail {

/// log(exp(a) + exp(b)); -inf entries are treated as zeros.
inline double log_add(double a, double b) {
    if (a == negative_infinity) return b;
    if (b == negative_infinity) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// Streaming log-sum-exp accumulator.
class log_sum {
public:
    void add(double v) {
        if (v == negative_infinity) return;
        if (v <= max_) {
            sum_ += std::exp(v - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - v) + 1.0;
            max_ = v;
        }
    }
    double value() const { return max_ == negative_infinity ? negative_infinity : max_ + std::log(sum_); }

private:
    double max_ = negative_infinity;
    double sum_ = 0.0;
};

inline double log_sum_exp(const vector& v) {
    log_sum acc;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc.add(v[i]);
    return acc.value();
}

/// Normalizes log-weights into probabilities.
inline vector softmax(const vector& log_w) {
    const double total = log_sum_exp(log_w);
    return (log_w.array() - total).exp().matrix();
}

inline vector log_softmax(const vector& log_w) {
    return (log_w.array() - log_sum_exp(log_w)).matrix();
}

}  // namespace detail
}  // namespace gmev
