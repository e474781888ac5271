#include "bvs/scoring.hpp"

#include "bvs/error.hpp"

namespace bvs {

ModelScorer::ModelScorer(const Dataset& d, GPriorSpec gprior, ModelPriorSpec mprior, QuadratureConfig q)
    : gprior_(gprior), mprior_(std::move(mprior)), q_(q) {
    gprior_.validate();
    p_fixed_ = d.p_fixed();
    p_free_ = d.p_free();
    n_eff_ = d.n() - p_fixed_;
    base_sse_ = stats_from_scratch(d, d.base_model()).sse;
    if (!(base_sse_ > 0)) throw data_error("fixed covariates fit the response exactly");
    prior_table_ = log_model_prior_table(mprior_, p_free_);
}

}  // namespace bvs
