#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace bvs {

struct QuadratureConfig {
    double rel_tol = 1e-8;
    std::size_t max_subdivisions = 200;
};

struct QuadratureResult {
    double value = 0;
    double abs_error = 0;
    std::size_t intervals = 0;
    bool converged = false;
};

namespace detail {

// 21-point Gauss-Kronrod rule; the embedded 10-point Gauss rule uses every odd abscissa.
inline constexpr std::array<double, 11> kronrod_x = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kronrod_w = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600267407819, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> gauss_w = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
Segment gauss_kronrod21(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k = kronrod_w[10] * fc;
    double g = 0;
    for (int i = 0; i < 10; ++i) {
        const double dx = h * kronrod_x[i];
        const double s = f(c - dx) + f(c + dx);
        k += kronrod_w[i] * s;
        if (i % 2 == 1) g += gauss_w[i / 2] * s;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over the partition given by `breaks`
/// (sorted, at least two points). The worst segment is bisected until the summed error
/// estimate drops below rel_tol * |value| or the interval budget runs out.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, const std::vector<double>& breaks, const QuadratureConfig& cfg) {
    std::priority_queue<detail::Segment> heap;
    QuadratureResult r;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        auto s = detail::gauss_kronrod21(f, breaks[i], breaks[i + 1]);
        r.value += s.value;
        r.abs_error += s.error;
        heap.push(s);
    }
    r.intervals = heap.size();
    const auto target = [&] { return std::max(cfg.rel_tol * std::abs(r.value), 1e-300); };
    while (!heap.empty() && r.abs_error > target()) {
        if (r.intervals >= cfg.max_subdivisions) return r;
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) return r;
        heap.pop();
        const auto left = detail::gauss_kronrod21(f, worst.a, mid);
        const auto right = detail::gauss_kronrod21(f, mid, worst.b);
        r.value += left.value + right.value - worst.value;
        r.abs_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++r.intervals;
    }
    // Recompute from the segments to shed accumulated cancellation in the running sums.
    double v = 0, e = 0;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    r.value = v;
    r.abs_error = e;
    r.converged = r.abs_error <= std::max(cfg.rel_tol * std::abs(r.value), 1e-300);
    return r;
}

}  // namespace bvs
