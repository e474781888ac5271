#pragma once

#include <Eigen/Core>

#include "bvs/dataset.hpp"
#include "bvs/gprior.hpp"
#include "bvs/model_prior.hpp"
#include "bvs/sufficient_stats.hpp"

namespace bvs {

/// Unnormalized log posterior of a model: log B + log Pr(M).
///
/// Fixed covariates are treated like the intercept: they are projected out, so Bayes factors
/// compare against the fixed-only base model with n - p_fixed effective observations, and
/// the model-space prior runs over the free covariates only.
class ModelScorer {
public:
    ModelScorer(const Dataset& d, GPriorSpec gprior, ModelPriorSpec mprior, QuadratureConfig q = {});

    const GPriorSpec& gprior() const { return gprior_; }
    const ModelPriorSpec& model_prior() const { return mprior_; }
    const QuadratureConfig& quadrature() const { return q_; }
    int n_effective() const { return n_eff_; }
    int p_free() const { return p_free_; }
    int p_fixed() const { return p_fixed_; }
    double base_sse() const { return base_sse_; }

    /// Likelihood switched off: every log Bayes factor is 0.
    void set_prior_only(bool on) { prior_only_ = on; }
    bool prior_only() const { return prior_only_; }

    /// Statistics relative to the base model, from raw statistics of a model containing it.
    SufficientStats relative(const SufficientStats& raw) const {
        return SufficientStats::make(raw.p_gamma - p_fixed_, raw.sse, base_sse_);
    }

    GPriorEvaluation bayes_factor(const SufficientStats& raw, bool want_shrinkage = false) const {
        if (prior_only_) return {0.0, 0.0, 0.0};
        return evaluate_gprior(gprior_, relative(raw), n_eff_, p_free_, q_, want_shrinkage);
    }

    /// log Pr(M) for a model with `total_size` included covariates (fixed ones counted).
    double log_prior(int total_size) const { return prior_table_(total_size - p_fixed_); }

private:
    GPriorSpec gprior_;
    ModelPriorSpec mprior_;
    QuadratureConfig q_;
    int n_eff_ = 0;
    int p_free_ = 0;
    int p_fixed_ = 0;
    double base_sse_ = 0;
    bool prior_only_ = false;
    Eigen::VectorXd prior_table_;
};

}  // namespace bvs
