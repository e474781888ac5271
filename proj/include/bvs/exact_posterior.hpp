#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "bvs/dataset.hpp"
#include "bvs/gprior.hpp"
#include "bvs/gray_code.hpp"
#include "bvs/model_prior.hpp"

namespace bvs {

struct EnumerationOptions {
    int cap = default_enumeration_cap;
    int threads = 1;
    /// Rebuild the running factor every this many steps.
    std::uint64_t refresh_interval = std::uint64_t{1} << 14;
    /// Recompute statistics with a QR of the raw data for every model (reference path).
    bool from_scratch = false;
};

/// Full posterior over the 2^p_free admissible models.
///
/// All vectors are indexed by model code (see model_code): the first free covariate is
/// the most significant bit. Shard s covers codes [s * 2^(p_free - k), (s+1) * 2^(p_free - k)).
struct ExactPosterior {
    int p = 0;
    std::vector<int> free;  ///< free column ids
    ModelIndex base;        ///< fixed columns only
    Eigen::VectorXd log_bf;
    Eigen::VectorXd log_prior;
    Eigen::VectorXd log_post;
    Eigen::VectorXd shrinkage;  ///< E[g/(1+g) | y, M]
    Eigen::VectorXd sse;
    double log_z = 0;
    double elapsed = 0;  ///< wall-clock seconds
    int shard_bits = 0;
    std::size_t fallbacks = 0;

    std::uint64_t size() const { return static_cast<std::uint64_t>(log_post.size()); }
    ModelIndex model(std::uint64_t code) const { return model_from_code(code, free, base); }
    std::uint64_t code(const ModelIndex& m) const { return model_code(m, free); }
    double probability(std::uint64_t code) const;
    /// Code visited at Gray step k inside a shard walk (before adding the shard offset).
    static std::uint64_t code_at_step(std::uint64_t k) { return gray_code(k); }
};

ExactPosterior enumerate(const Dataset& d, const GPriorSpec& gspec, const ModelPriorSpec& mspec,
                         const QuadratureConfig& q = {}, const EnumerationOptions& opts = {});

/// Model table: bitstring, log_bf, log_prior, posterior probability. top_k = 0 writes every model
/// in code order, otherwise the top_k most probable in decreasing probability.
void write_model_table(std::ostream& os, const ExactPosterior& post, std::size_t top_k = 0, char delim = ',');

/// Codes sorted by decreasing posterior probability (ties by code).
std::vector<std::uint64_t> top_codes(const ExactPosterior& post, std::size_t k);

}  // namespace bvs
