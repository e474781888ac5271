#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "bvs/dataset.hpp"
#include "bvs/model_index.hpp"
#include "bvs/sufficient_stats.hpp"

namespace bvs {

/// Centered cross-products X'X, X'y and y'y. Built once in O(n p^2); everything downstream
/// works from these and never touches the n rows again.
template <typename Scalar>
struct GramSystem {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Matrix gram;
    Vector xty;
    Scalar sst = 0;
    int n = 0;
    const Dataset* data = nullptr;  ///< for from-scratch recovery; may be null

    static GramSystem from(const Dataset& d) {
        GramSystem s;
        const Matrix X = d.X.cast<Scalar>();
        const Vector yc = (d.y.array() - d.y.mean()).matrix().cast<Scalar>();
        s.gram = X.transpose() * X;
        s.xty = X.transpose() * yc;
        s.sst = yc.squaredNorm();
        s.n = d.n();
        s.data = &d;
        return s;
    }

    int p() const { return static_cast<int>(gram.cols()); }
};

/// Upper-triangular R with R'R = X_g'X_g over the included columns (in insertion order),
/// and z = R^{-T} X_g'y, so that sse = y'y - |z|^2. Adds and drops cost O(p_gamma^2).
template <typename Scalar = double>
class CholState {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    /// Pivots below this fraction of the column's own scale count as breakdown.
    static constexpr Scalar breakdown_tol = Scalar(1e-12);

    explicit CholState(const GramSystem<Scalar>& sys)
        : sys_(&sys), r_(Matrix::Zero(sys.p(), sys.p())), z_(Vector::Zero(sys.p())), included_(sys.p()),
          sse_(sys.sst) {}

    CholState(const GramSystem<Scalar>& sys, const ModelIndex& m) : CholState(sys) {
        for (int j : m.included()) add(j);
    }

    int size() const { return static_cast<int>(cols_.size()); }
    const ModelIndex& included() const { return included_; }
    /// Column ids in factor order.
    const std::vector<int>& columns() const { return cols_; }
    Scalar sse() const { return sse_; }
    SufficientStats stats() const {
        return SufficientStats::make(size(), static_cast<double>(sse_), static_cast<double>(sys_->sst));
    }
    auto factor() const { return r_.topLeftCorner(size(), size()); }
    std::size_t fallbacks() const { return fallbacks_; }

    /// Least-squares slopes in factor order.
    Vector coefficients() const {
        const int m = size();
        return r_.topLeftCorner(m, m).template triangularView<Eigen::Upper>().solve(z_.head(m));
    }

    void add(int j) {
        const int m = size();
        const auto& G = sys_->gram;
        Vector g(m);
        for (int k = 0; k < m; ++k) g(k) = G(cols_[k], j);
        Vector r = r_.topLeftCorner(m, m).transpose().template triangularView<Eigen::Lower>().solve(g);
        const Scalar d2 = G(j, j) - r.squaredNorm();
        cols_.push_back(j);
        included_.flip(j);
        if (!(d2 > breakdown_tol * G(j, j))) {
            recompute_from_scratch();
            return;
        }
        const Scalar d = std::sqrt(d2);
        r_.col(m).head(m) = r;
        r_(m, m) = d;
        const Scalar zeta = (sys_->xty(j) - r.dot(z_.head(m))) / d;
        z_(m) = zeta;
        sse_ -= zeta * zeta;
        if (sse_ < 0) sse_ = 0;
    }

    void drop(int j) {
        const int m = size();
        int k = 0;
        while (k < m && cols_[k] != j) ++k;
        if (k == m) return;
        for (int c = k; c + 1 < m; ++c) r_.col(c).head(m) = r_.col(c + 1).head(m);
        r_.col(m - 1).setZero();
        // Restore triangularity with Givens rotations on rows (i, i+1).
        for (int i = k; i + 1 < m; ++i) {
            const Scalar a = r_(i, i), b = r_(i + 1, i);
            const Scalar h = std::hypot(a, b);
            if (h == Scalar(0)) continue;
            const Scalar c = a / h, s = b / h;
            for (int col = i; col + 1 < m; ++col) {
                const Scalar x = r_(i, col), y = r_(i + 1, col);
                r_(i, col) = c * x + s * y;
                r_(i + 1, col) = -s * x + c * y;
            }
            const Scalar x = z_(i), y = z_(i + 1);
            z_(i) = c * x + s * y;
            z_(i + 1) = -s * x + c * y;
        }
        const Scalar tail = z_(m - 1);
        sse_ += tail * tail;
        if (sse_ > sys_->sst) sse_ = sys_->sst;
        r_.row(m - 1).setZero();
        z_(m - 1) = 0;
        cols_.erase(cols_.begin() + k);
        included_.flip(j);
        bool bad = false;
        for (int i = 0; i + 1 < m; ++i)
            if (!(std::abs(r_(i, i)) > breakdown_tol * std::sqrt(sys_->gram(cols_[i], cols_[i])))) bad = true;
        if (bad) recompute_from_scratch();
    }

    void toggle(int j) {
        if (included_.test(j)) {
            drop(j);
        } else {
            add(j);
        }
    }

    /// Rebuilds the factor for the current columns from the Gram matrix, discarding drift.
    void refresh() {
        const int m = size();
        sse_ = sys_->sst;
        r_.setZero();
        z_.setZero();
        if (m == 0) return;
        Matrix sub(m, m);
        Vector rhs(m);
        for (int a = 0; a < m; ++a) {
            rhs(a) = sys_->xty(cols_[a]);
            for (int b = 0; b < m; ++b) sub(a, b) = sys_->gram(cols_[a], cols_[b]);
        }
        Eigen::LLT<Matrix> llt(sub);
        if (llt.info() != Eigen::Success) {
            recompute_from_scratch();
            return;
        }
        r_.topLeftCorner(m, m) = llt.matrixU();
        z_.head(m) = llt.matrixL().solve(rhs);
        sse_ = std::max<Scalar>(sys_->sst - z_.head(m).squaredNorm(), Scalar(0));
    }

private:
    /// QR of the raw columns when the data are available, otherwise a Gram refactorization.
    void recompute_from_scratch() {
        ++fallbacks_;
        const int m = size();
        if (sys_->data == nullptr) {
            refresh_gram_only();
            return;
        }
        const Dataset& d = *sys_->data;
        Matrix A(d.n(), m);
        for (int k = 0; k < m; ++k) A.col(k) = d.X.col(cols_[k]).template cast<Scalar>();
        const Vector yc = (d.y.array() - d.y.mean()).matrix().template cast<Scalar>();
        Eigen::HouseholderQR<Matrix> qr(A);
        Matrix R = qr.matrixQR().topLeftCorner(m, m).template triangularView<Eigen::Upper>();
        Vector qty = qr.householderQ().adjoint() * yc;
        for (int i = 0; i < m; ++i) {
            if (R(i, i) < 0) {
                R.row(i) *= Scalar(-1);
                qty(i) = -qty(i);
            }
        }
        r_.setZero();
        z_.setZero();
        r_.topLeftCorner(m, m) = R;
        z_.head(m) = qty.head(m);
        double sse = 0;
        least_squares(d.X, d.y, included_, &sse);
        sse_ = static_cast<Scalar>(sse);
    }

    void refresh_gram_only() {
        const int m = size();
        Matrix sub(m, m);
        Vector rhs(m);
        for (int a = 0; a < m; ++a) {
            rhs(a) = sys_->xty(cols_[a]);
            for (int b = 0; b < m; ++b) sub(a, b) = sys_->gram(cols_[a], cols_[b]);
        }
        Eigen::LDLT<Matrix> ldlt(sub);
        const Vector beta = ldlt.solve(rhs);
        Eigen::LLT<Matrix> llt(sub);
        r_.setZero();
        z_.setZero();
        r_.topLeftCorner(m, m) = llt.matrixU();
        z_.head(m) = llt.matrixL().solve(rhs);
        sse_ = std::max<Scalar>(sys_->sst - rhs.dot(beta), Scalar(0));
    }

    const GramSystem<Scalar>* sys_;
    Matrix r_;
    Vector z_;
    std::vector<int> cols_;
    ModelIndex included_;
    Scalar sse_;
    std::size_t fallbacks_ = 0;
};

template <typename Scalar>
CholState<Scalar> chol_add(CholState<Scalar> state, int j) {
    state.add(j);
    return state;
}

template <typename Scalar>
CholState<Scalar> chol_drop(CholState<Scalar> state, int j) {
    state.drop(j);
    return state;
}

}  // namespace bvs
