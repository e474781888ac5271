#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "bvs/chol_state.hpp"
#include "bvs/dataset.hpp"
#include "bvs/exact_posterior.hpp"
#include "bvs/sampler.hpp"
#include "bvs/scoring.hpp"

namespace bvs {

struct RankedModel {
    ModelIndex model;
    double probability = 0;
    double log_bf = 0;
};

/// Posterior summaries over all p covariates (fixed ones have inclusion probability 1).
struct PosteriorSummary {
    std::vector<std::string> names;
    Eigen::VectorXd pip;
    ModelIndex hpm;
    double hpm_probability = 0;
    /// Sampling mode: the HPM is the best visited model and its probability is relative to the visited set.
    bool hpm_support_conditional = false;
    ModelIndex mpm;
    Eigen::VectorXd size_pmf;  ///< index = number of included covariates (fixed ones counted), 0..p
    std::vector<RankedModel> top_models;
    Eigen::MatrixXd joint_incl;
    Eigen::MatrixXd cond_incl;  ///< (i, j) = Pr(gamma_i = 1 | gamma_j = 1, y); 0 where pip_j = 0
    Eigen::VectorXd bma_coef;
    double bma_intercept = 0;
    /// Coefficient sign differs across the top models that include it.
    std::vector<bool> sign_caveat;
    std::vector<std::string> notes;
    std::uint64_t models = 0;  ///< models the summary was computed from
};

enum class ModelWeighting { renormalized, frequency };

struct SummaryOptions {
    std::size_t top_k = 10;
    /// Number of top models checked for coefficient sign changes.
    std::size_t sign_models = 10;
    /// Model-level weights in sampling mode.
    ModelWeighting weighting = ModelWeighting::renormalized;
};

/// E[beta | M, y] over all p columns (zero when excluded). Free coefficients are the least-squares
/// fit times `shrinkage`; fixed coefficients are refitted given the shrunk free part.
Eigen::VectorXd model_coefficients(const GramSystem<double>& sys, const ModelIndex& m, const ModelIndex& base,
                                   double shrinkage);

PosteriorSummary summarize(const ExactPosterior& post, const Dataset& d, const SummaryOptions& opts = {});

/// Sampling mode: PIPs from `estimator`; everything model-level from opts.weighting over the visit map.
PosteriorSummary summarize(const ChainTrace& trace, PipEstimator estimator, const Dataset& d,
                           const ModelScorer& scorer, const SummaryOptions& opts = {});

/// Model-averaged point prediction ybar + (x_new - xbar)' bma_coef.
double predict(const PosteriorSummary& s, const Dataset& d, const Eigen::VectorXd& x_new);

}  // namespace bvs
