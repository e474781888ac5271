#pragma once

#include <string>
#include <string_view>

#include "bvs/quadrature.hpp"
#include "bvs/sufficient_stats.hpp"

namespace bvs {

/// Hyperparameter choices for the g-prior on model-specific coefficients.
/// The first five are constant (per model) g, the remaining four put a prior on g.
enum class GPriorKind { uip, ric, bric, hq, ebl, jzs, hyper_g, hyper_g_n, robust };

struct GPriorSpec {
    GPriorKind kind = GPriorKind::uip;
    double a = 3.0;  ///< hyper-g and hyper-g/n only; must exceed 2

    bool random_g() const {
        return kind == GPriorKind::jzs || kind == GPriorKind::hyper_g || kind == GPriorKind::hyper_g_n ||
               kind == GPriorKind::robust;
    }
    void validate() const;
};

/// "uip", "ric", "bric", "hq", "ebl", "jzs", "hyper-g[:a]", "hyper-g-n[:a]", "robust".
GPriorSpec parse_gprior(std::string_view text);
std::string to_string(const GPriorSpec& spec);

/// log B(g) of M_gamma against the intercept-only model for a fixed g:
///   ((n-1-p_gamma)/2) log(1+g) - ((n-1)/2) log(1 + g (1 - R^2)).
double log_bf_given_g(double g, const SufficientStats& s, int n);

/// Maximizer of log_bf_given_g over g >= 0: max(F - 1, 0) with F the usual F statistic.
/// Returns 0 for the null model.
double ebl_ghat(const SufficientStats& s, int n);

/// g for the constant-g kinds (uip, ric, bric, hq); p is the number of candidate covariates.
double constant_g(const GPriorSpec& spec, int n, int p);

/// Normalized log density of g for the random-g kinds; -inf outside the support.
double log_g_density(const GPriorSpec& spec, double g, int n, int p_gamma);

struct GPriorEvaluation {
    double log_bf = 0;
    double log_bf_error = 0;  ///< absolute error estimate on log_bf (0 for closed forms)
    double shrinkage = 0;     ///< E[g/(1+g) | y, M_gamma]
};

/// log Bayes factor and posterior expected shrinkage in one pass. Random-g kinds integrate
/// over t = g/(1+g) on (0,1) with adaptive Gauss-Kronrod; throws Error(numeric) when the
/// interval budget is exhausted before rel_tol is met.
GPriorEvaluation evaluate_gprior(const GPriorSpec& spec, const SufficientStats& s, int n, int p,
                                 const QuadratureConfig& q = {}, bool want_shrinkage = true);

inline double log_bf(const GPriorSpec& spec, const SufficientStats& s, int n, int p,
                     const QuadratureConfig& q = {}) {
    return evaluate_gprior(spec, s, n, p, q, false).log_bf;
}

inline double expected_shrinkage(const GPriorSpec& spec, const SufficientStats& s, int n, int p,
                                 const QuadratureConfig& q = {}) {
    return evaluate_gprior(spec, s, n, p, q, true).shrinkage;
}

}  // namespace bvs
