#pragma once

#include <algorithm>

#include <Eigen/Dense>

#include "bvs/dataset.hpp"
#include "bvs/model_index.hpp"

namespace bvs {

/// Everything a g-prior Bayes factor needs from a model: its size and fit.
struct SufficientStats {
    int p_gamma = 0;
    double sse = 0;
    double sst = 1;
    double r2 = 0;

    static SufficientStats make(int p_gamma, double sse, double sst) {
        sse = std::clamp(sse, 0.0, sst);
        return {p_gamma, sse, sst, 1.0 - sse / sst};
    }
};

/// Design [1, X_gamma] for the included columns.
template <typename Derived>
Eigen::MatrixXd design_with_intercept(const Eigen::MatrixBase<Derived>& X, const ModelIndex& m) {
    const auto cols = m.included();
    Eigen::MatrixXd A(X.rows(), static_cast<Eigen::Index>(cols.size()) + 1);
    A.col(0).setOnes();
    for (std::size_t k = 0; k < cols.size(); ++k) A.col(static_cast<Eigen::Index>(k) + 1) = X.col(cols[k]);
    return A;
}

/// Least-squares fit of y on [1, X_gamma] by column-pivoted Householder QR.
/// Returns (intercept, slopes...) and writes the residual sum of squares.
template <typename DerivedX, typename DerivedY>
Eigen::VectorXd least_squares(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
                              const ModelIndex& m, double* sse = nullptr) {
    const Eigen::MatrixXd A = design_with_intercept(X, m);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::VectorXd coef = qr.solve(y.derived());
    if (sse) *sse = (y - A * coef).squaredNorm();
    return coef;
}

/// Reference path: one QR of the n-row design per call.
inline SufficientStats stats_from_scratch(const Dataset& d, const ModelIndex& m) {
    if (m.size() == 0) return SufficientStats::make(0, d.sst(), d.sst());
    double sse = 0;
    least_squares(d.X, d.y, m, &sse);
    return SufficientStats::make(m.size(), sse, d.sst());
}

}  // namespace bvs
