#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace bvs {

template <typename Scalar>
constexpr Scalar neg_inf() {
    return -std::numeric_limits<Scalar>::infinity();
}

/// log(sum(exp(v))) with the usual max shift; -inf for an empty or all -inf input.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& v) {
    using Scalar = typename Derived::Scalar;
    if (v.size() == 0) return neg_inf<Scalar>();
    const Scalar m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    Scalar s = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::exp(v(i) - m);
    return m + std::log(s);
}

/// log(exp(a) + exp(b)).
template <typename Scalar>
Scalar log_add_exp(Scalar a, Scalar b) {
    if (a < b) std::swap(a, b);
    if (a == neg_inf<Scalar>()) return a;
    return a + std::log1p(std::exp(b - a));
}

/// 1 / (1 + exp(-x)), stable at both tails.
template <typename Scalar>
Scalar logistic(Scalar x) {
    if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
    const Scalar e = std::exp(x);
    return e / (Scalar(1) + e);
}

inline double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace bvs
