#include "bvs/summary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

#include "bvs/error.hpp"
#include "bvs/gray_code.hpp"

namespace bvs {

namespace {

/// Maps least-squares coefficients of a model to posterior means, refitting fixed columns.
class CoefficientMap {
public:
    CoefficientMap(const GramSystem<double>& sys, const ModelIndex& base) : sys_(&sys), fixed_(base.included()) {
        const int f = static_cast<int>(fixed_.size());
        if (f == 0) return;
        Eigen::MatrixXd g(f, f);
        for (int a = 0; a < f; ++a)
            for (int b = 0; b < f; ++b) g(a, b) = sys.gram(fixed_[a], fixed_[b]);
        llt_.compute(g);
        is_fixed_.assign(sys.p(), false);
        for (int j : fixed_) is_fixed_[j] = true;
    }

    Eigen::VectorXd operator()(const std::vector<int>& cols, const Eigen::VectorXd& ls, double shrinkage) const {
        Eigen::VectorXd coef = Eigen::VectorXd::Zero(sys_->p());
        for (std::size_t k = 0; k < cols.size(); ++k) coef(cols[k]) = shrinkage * ls(static_cast<Eigen::Index>(k));
        if (fixed_.empty()) return coef;
        const int f = static_cast<int>(fixed_.size());
        Eigen::VectorXd rhs(f);
        for (int a = 0; a < f; ++a) {
            double r = sys_->xty(fixed_[a]);
            for (int c : cols)
                if (!is_fixed_[c]) r -= sys_->gram(fixed_[a], c) * coef(c);
            rhs(a) = r;
        }
        const Eigen::VectorXd bf = llt_.solve(rhs);
        for (int a = 0; a < f; ++a) coef(fixed_[a]) = bf(a);
        return coef;
    }

private:
    const GramSystem<double>* sys_;
    std::vector<int> fixed_;
    std::vector<bool> is_fixed_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

struct LsFit {
    std::vector<int> cols;
    Eigen::VectorXd beta;
    double sse = 0;
};

LsFit fit_from_gram(const GramSystem<double>& sys, const ModelIndex& m) {
    LsFit fit;
    fit.cols = m.included();
    const int k = static_cast<int>(fit.cols.size());
    fit.sse = sys.sst;
    fit.beta.resize(k);
    if (k == 0) return fit;
    Eigen::MatrixXd g(k, k);
    Eigen::VectorXd rhs(k);
    for (int a = 0; a < k; ++a) {
        rhs(a) = sys.xty(fit.cols[a]);
        for (int b = 0; b < k; ++b) g(a, b) = sys.gram(fit.cols[a], fit.cols[b]);
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) throw numeric_error("singular design for model " + m.to_string());
    fit.beta = llt.solve(rhs);
    const Eigen::VectorXd z = llt.matrixL().solve(rhs);
    fit.sse = std::max(sys.sst - z.squaredNorm(), 0.0);
    return fit;
}

struct Accumulator {
    explicit Accumulator(int p)
        : pip(Eigen::VectorXd::Zero(p)),
          size_pmf(Eigen::VectorXd::Zero(p + 1)),
          joint(Eigen::MatrixXd::Zero(p, p)),
          bma(Eigen::VectorXd::Zero(p)) {}

    void add(const ModelIndex& m, double w, const Eigen::VectorXd& coef) {
        const auto inc = m.included();
        for (int a : inc) {
            pip(a) += w;
            for (int b : inc) joint(a, b) += w;
        }
        size_pmf(m.size()) += w;
        bma += w * coef;
    }

    Eigen::VectorXd pip, size_pmf;
    Eigen::MatrixXd joint;
    Eigen::VectorXd bma;
};

Eigen::MatrixXd conditional(const Eigen::MatrixXd& joint, const Eigen::VectorXd& pip) {
    Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(joint.rows(), joint.cols());
    for (Eigen::Index j = 0; j < joint.cols(); ++j)
        if (pip(j) > 0) cond.col(j) = joint.col(j) / pip(j);
    return cond;
}

ModelIndex median_model(const Eigen::VectorXd& pip) {
    ModelIndex m(static_cast<int>(pip.size()));
    for (Eigen::Index j = 0; j < pip.size(); ++j)
        if (pip(j) > 0.5) m.flip(static_cast<int>(j));
    return m;
}

std::vector<bool> sign_flags(const std::vector<Eigen::VectorXd>& coefs, const std::vector<ModelIndex>& models, int p) {
    std::vector<bool> flag(p, false);
    for (int j = 0; j < p; ++j) {
        bool pos = false, neg = false;
        for (std::size_t k = 0; k < models.size(); ++k) {
            if (!models[k].test(j)) continue;
            pos = pos || coefs[k](j) > 0;
            neg = neg || coefs[k](j) < 0;
        }
        flag[j] = pos && neg;
    }
    return flag;
}

void finish(PosteriorSummary& s, Accumulator& acc, const Dataset& d) {
    s.names = d.names;
    s.size_pmf = acc.size_pmf;
    s.joint_incl = acc.joint;
    s.cond_incl = conditional(acc.joint, s.pip);
    s.mpm = median_model(s.pip);
    s.bma_coef = acc.bma;
    s.bma_intercept = d.y_mean();
}

}  // namespace

Eigen::VectorXd model_coefficients(const GramSystem<double>& sys, const ModelIndex& m, const ModelIndex& base,
                                   double shrinkage) {
    const CoefficientMap map(sys, base);
    const LsFit fit = fit_from_gram(sys, m);
    return map(fit.cols, fit.beta, shrinkage);
}

PosteriorSummary summarize(const ExactPosterior& post, const Dataset& d, const SummaryOptions& opts) {
    if (post.size() == 0) throw config_error("empty posterior");
    const auto sys = GramSystem<double>::from(d);
    const CoefficientMap map(sys, post.base);
    Accumulator acc(d.p());

    const int nf = static_cast<int>(post.free.size());
    std::vector<int> bit_of(d.p(), -1);
    for (int f = 0; f < nf; ++f) bit_of[post.free[f]] = nf - 1 - f;
    GrayCodeWalk walk(post.free, post.base);
    CholState<double> st(sys, post.base);
    std::uint64_t code = 0;
    const auto visit = [&] {
        const auto i = static_cast<Eigen::Index>(code);
        acc.add(st.included(), post.probability(code), map(st.columns(), st.coefficients(), post.shrinkage(i)));
    };
    visit();
    while (!walk.done()) {
        const int col = walk.next();
        st.toggle(col);
        code ^= std::uint64_t{1} << bit_of[col];
        if (walk.step() % (std::uint64_t{1} << 14) == 0) st.refresh();
        visit();
    }

    PosteriorSummary s;
    s.pip = acc.pip;
    s.models = post.size();
    const auto top = top_codes(post, std::max(opts.top_k, opts.sign_models));
    s.hpm = post.model(top.front());
    s.hpm_probability = post.probability(top.front());
    for (std::size_t k = 0; k < std::min(opts.top_k, top.size()); ++k)
        s.top_models.push_back({post.model(top[k]), post.probability(top[k]), post.log_bf(static_cast<Eigen::Index>(top[k]))});

    std::vector<ModelIndex> sm;
    std::vector<Eigen::VectorXd> sc;
    int zero_shrink = 0;
    for (std::size_t k = 0; k < std::min(opts.sign_models, top.size()); ++k) {
        const auto i = static_cast<Eigen::Index>(top[k]);
        sm.push_back(post.model(top[k]));
        sc.push_back(model_coefficients(sys, sm.back(), post.base, post.shrinkage(i)));
        if (top[k] != 0 && post.shrinkage(i) == 0) ++zero_shrink;
    }
    s.sign_caveat = sign_flags(sc, sm, d.p());
    if (zero_shrink > 0)
        s.notes.push_back("estimated g is 0 for " + std::to_string(zero_shrink) +
                          " of the top models; their Bayes factor equals the base model's");
    finish(s, acc, d);
    return s;
}

PosteriorSummary summarize(const ChainTrace& trace, PipEstimator estimator, const Dataset& d,
                           const ModelScorer& scorer, const SummaryOptions& opts) {
    PosteriorSummary s;
    s.pip = estimate_pip(trace, estimator);
    const auto models = trace.sorted_models();
    const Eigen::VectorXd renorm = renormalized_weights(models);
    const Eigen::VectorXd w = opts.weighting == ModelWeighting::renormalized ? renorm : frequency_weights(models);

    const auto sys = GramSystem<double>::from(d);
    const CoefficientMap map(sys, trace.base);
    Accumulator acc(d.p());
    std::vector<Eigen::VectorXd> coefs(models.size());
    std::vector<double> shrink(models.size());
    for (std::size_t k = 0; k < models.size(); ++k) {
        const LsFit fit = fit_from_gram(sys, models[k].first);
        const auto raw = SufficientStats::make(models[k].first.size(), fit.sse, sys.sst);
        shrink[k] = scorer.bayes_factor(raw, true).shrinkage;
        coefs[k] = map(fit.cols, fit.beta, shrink[k]);
        acc.add(models[k].first, w(static_cast<Eigen::Index>(k)), coefs[k]);
    }

    std::vector<std::size_t> order(models.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return w(static_cast<Eigen::Index>(a)) > w(static_cast<Eigen::Index>(b));
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < models.size(); ++k)
        if (models[k].second.log_post() > models[best].second.log_post()) best = k;
    s.hpm = models[best].first;
    s.hpm_probability = renorm(static_cast<Eigen::Index>(best));
    s.hpm_support_conditional = true;
    s.models = models.size();
    for (std::size_t k = 0; k < std::min(opts.top_k, order.size()); ++k)
        s.top_models.push_back(
            {models[order[k]].first, w(static_cast<Eigen::Index>(order[k])), models[order[k]].second.log_bf});

    std::vector<ModelIndex> sm;
    std::vector<Eigen::VectorXd> sc;
    int zero_shrink = 0;
    for (std::size_t k = 0; k < std::min(opts.sign_models, order.size()); ++k) {
        sm.push_back(models[order[k]].first);
        sc.push_back(coefs[order[k]]);
        if (!(sm.back() == trace.base) && shrink[order[k]] == 0) ++zero_shrink;
    }
    s.sign_caveat = sign_flags(sc, sm, d.p());
    s.notes.push_back("highest probability model is the best visited model; its probability is relative to "
                      "the visited models");
    if (trace.truncated) s.notes.push_back("visit map reached its cap; least visited models were dropped");
    if (zero_shrink > 0)
        s.notes.push_back("estimated g is 0 for " + std::to_string(zero_shrink) +
                          " of the top models; their Bayes factor equals the base model's");
    finish(s, acc, d);
    return s;
}

double predict(const PosteriorSummary& s, const Dataset& d, const Eigen::VectorXd& x_new) {
    if (x_new.size() != d.p())
        throw config_error("prediction point has " + std::to_string(x_new.size()) + " values, expected " +
                           std::to_string(d.p()));
    if (!x_new.allFinite()) throw data_error("prediction point is not finite");
    return s.bma_intercept + (x_new - d.x_mean).dot(s.bma_coef);
}

}  // namespace bvs
