#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "bvs/model_index.hpp"

namespace bvs {

enum class ModelPriorKind { fixed_theta, uniform_theta, beta_binomial, user_size_probs };

/// Prior over model space. Every kind makes equal-size models equiprobable, so the prior
/// is a function of the number of included free covariates only.
struct ModelPriorSpec {
    ModelPriorKind kind = ModelPriorKind::fixed_theta;
    double theta = 0.5;          ///< fixed_theta
    double a = 1.0, b = 1.0;     ///< beta_binomial
    std::vector<double> size_weights;  ///< user_size_probs, one weight per size 0..p

    static ModelPriorSpec fixed(double theta) {
        ModelPriorSpec s;
        s.theta = theta;
        return s;
    }
    static ModelPriorSpec scott_berger() {
        ModelPriorSpec s;
        s.kind = ModelPriorKind::uniform_theta;
        return s;
    }
    static ModelPriorSpec beta_binomial(double a, double b) {
        ModelPriorSpec s;
        s.kind = ModelPriorKind::beta_binomial;
        s.a = a;
        s.b = b;
        return s;
    }
    /// Beta(1, (p - w*)/w*) on theta, i.e. prior mean model size w*.
    static ModelPriorSpec mean_size(double w_star, int p);
    static ModelPriorSpec user_sizes(std::vector<double> weights) {
        ModelPriorSpec s;
        s.kind = ModelPriorKind::user_size_probs;
        s.size_weights = std::move(weights);
        return s;
    }

    void validate(int p) const;
};

/// "fixed:θ", "scott-berger", "beta-binomial:a,b", "mean-size:w*", "user-size-probs:@file".
/// `p` is the number of free covariates (needed by mean-size and to check user vectors).
ModelPriorSpec parse_model_prior(std::string_view text, int p);
std::string to_string(const ModelPriorSpec& spec);

/// Pr(W = w) for w = 0..p.
Eigen::VectorXd size_prior_pmf(const ModelPriorSpec& spec, int p);

/// log Pr(M) for one model of size `size` among p free covariates.
double log_model_prior_by_size(const ModelPriorSpec& spec, int size, int p);

/// Table of log_model_prior_by_size for sizes 0..p.
Eigen::VectorXd log_model_prior_table(const ModelPriorSpec& spec, int p);

/// log Pr(M_gamma). `m.size()` minus `n_fixed` is the model's free size; p counts free covariates.
inline double log_model_prior(const ModelPriorSpec& spec, const ModelIndex& m, int p, int n_fixed = 0) {
    return log_model_prior_by_size(spec, m.size() - n_fixed, p);
}

}  // namespace bvs
