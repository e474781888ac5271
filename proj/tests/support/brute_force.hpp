#pragma once

// Literal posterior summaries: every model visited by counting through bit masks, each fitted
// from the raw data with modified Gram-Schmidt, sums written out term by term.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "support/oracles.hpp"

namespace bvs::oracle {

struct BruteForceSummary {
    std::vector<double> prob;          ///< indexed by mask, bit j = covariate j
    std::vector<std::uint32_t> order;  ///< masks by decreasing probability
    Eigen::VectorXd pip;
    Eigen::VectorXd size_pmf;
    Eigen::MatrixXd joint;
    Eigen::MatrixXd cond;
    Eigen::VectorXd bma;
    double intercept = 0;
    std::uint32_t hpm = 0;
    std::uint32_t mpm = 0;
    double predict(const Eigen::VectorXd& x_new, const Eigen::VectorXd& x_bar) const;
    std::vector<Eigen::VectorXd> coef;  ///< per mask, shrunk slopes over all p
};

inline double BruteForceSummary::predict(const Eigen::VectorXd& x_new, const Eigen::VectorXd& x_bar) const {
    double acc = 0;
    for (std::size_t m = 0; m < prob.size(); ++m) acc += prob[m] * (intercept + (x_new - x_bar).dot(coef[m]));
    return acc;
}

/// Constant g, fixed inclusion probability theta, no fixed covariates. X is raw (uncentered).
inline BruteForceSummary brute_force_summary(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double g,
                                             double theta) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const std::uint32_t total = 1u << p;
    double ybar = 0;
    for (int i = 0; i < n; ++i) ybar += y(i);
    ybar /= n;
    double sst = 0;
    for (int i = 0; i < n; ++i) sst += (y(i) - ybar) * (y(i) - ybar);

    BruteForceSummary out;
    std::vector<double> logw(total);
    out.coef.assign(total, Eigen::VectorXd::Zero(p));
    for (std::uint32_t m = 0; m < total; ++m) {
        std::vector<int> cols;
        for (int j = 0; j < p; ++j)
            if (m >> j & 1u) cols.push_back(j);
        const int k = static_cast<int>(cols.size());
        double sse = sst;
        Eigen::VectorXd beta;
        if (k > 0) beta = mgs_least_squares(X, y, cols, sse);
        const double r2 = 1.0 - sse / sst;
        const double log_b = 0.5 * (n - 1 - k) * std::log(1.0 + g) - 0.5 * (n - 1) * std::log(1.0 + g * (1.0 - r2));
        logw[m] = log_b + k * std::log(theta) + (p - k) * std::log(1.0 - theta);
        for (int a = 0; a < k; ++a) out.coef[m](cols[a]) = g / (1.0 + g) * beta(a);
    }
    const double mx = *std::max_element(logw.begin(), logw.end());
    double z = 0;
    for (double v : logw) z += std::exp(v - mx);
    out.prob.resize(total);
    for (std::uint32_t m = 0; m < total; ++m) out.prob[m] = std::exp(logw[m] - mx) / z;

    out.pip = Eigen::VectorXd::Zero(p);
    out.size_pmf = Eigen::VectorXd::Zero(p + 1);
    out.joint = Eigen::MatrixXd::Zero(p, p);
    out.bma = Eigen::VectorXd::Zero(p);
    for (std::uint32_t m = 0; m < total; ++m) {
        int k = 0;
        for (int i = 0; i < p; ++i) {
            if (!(m >> i & 1u)) continue;
            ++k;
            out.pip(i) += out.prob[m];
            for (int j = 0; j < p; ++j)
                if (m >> j & 1u) out.joint(i, j) += out.prob[m];
        }
        out.size_pmf(k) += out.prob[m];
        for (int i = 0; i < p; ++i) out.bma(i) += out.prob[m] * out.coef[m](i);
    }
    out.cond = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) out.cond(i, j) = out.pip(j) > 0 ? out.joint(i, j) / out.pip(j) : 0.0;
    out.intercept = ybar;
    out.order.resize(total);
    for (std::uint32_t m = 0; m < total; ++m) out.order[m] = m;
    std::stable_sort(out.order.begin(), out.order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return out.prob[a] > out.prob[b]; });
    out.hpm = out.order.front();
    for (int j = 0; j < p; ++j)
        if (out.pip(j) > 0.5) out.mpm |= 1u << j;
    return out;
}

}  // namespace bvs::oracle
