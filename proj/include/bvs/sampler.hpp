#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <random>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "bvs/chol_state.hpp"
#include "bvs/dataset.hpp"
#include "bvs/model_index.hpp"
#include "bvs/scoring.hpp"

namespace bvs {

enum class SamplerKind { gibbs_scan, birth_death };

/// One iteration is a full scan (Gibbs) or one proposed flip (birth-death).
struct SamplerConfig {
    SamplerKind kind = SamplerKind::gibbs_scan;
    std::uint64_t iterations = 100000;
    std::uint64_t burn_in = 0;
    std::uint64_t seed = 1;
    std::uint64_t thin = 1;
    /// Entries kept in the visit map before the least visited are pruned.
    std::size_t max_unique = 1000000;
    /// Store the retained state sequence (visit counts are always kept).
    bool keep_visited = true;
    /// Rebuild the running factor after this many column updates.
    std::uint64_t refresh_interval = std::uint64_t{1} << 14;

    void validate() const;
};

enum class StartKind { null_model, full, random, given };

struct StartSpec {
    StartKind kind = StartKind::null_model;
    ModelIndex model;  ///< used when kind == given

    static StartSpec null_model() { return {}; }
    static StartSpec full() { return {StartKind::full, {}}; }
    static StartSpec random() { return {StartKind::random, {}}; }
    static StartSpec given(ModelIndex m) { return {StartKind::given, std::move(m)}; }
};

/// "null", "full", "random" or a 0/1 bitstring.
StartSpec parse_start(std::string_view text);

enum class PipEstimator { frequency, rao_blackwell, renormalized };

PipEstimator parse_estimator(std::string_view text);
std::string to_string(PipEstimator e);
std::string to_string(SamplerKind k);

struct VisitRecord {
    std::uint64_t count = 0;
    double log_bf = 0;
    double log_prior = 0;
    double log_post() const { return log_bf + log_prior; }
};

using VisitMap = std::unordered_map<ModelIndex, VisitRecord, ModelIndexHash>;

/// Retained output of one chain or of several pooled chains.
struct ChainTrace {
    int p = 0;
    ModelIndex base;  ///< fixed columns
    SamplerKind kind = SamplerKind::gibbs_scan;
    std::vector<ModelIndex> visited;
    VisitMap unique_models;
    Eigen::VectorXd rb_accumulator;    ///< summed conditional inclusion probabilities
    Eigen::VectorXd freq_accumulator;  ///< summed inclusion indicators
    std::uint64_t retained = 0;
    std::uint64_t steps = 0;  ///< iterations run, burn-in included
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;
    bool truncated = false;
    int chains = 1;
    std::size_t fallbacks = 0;

    /// Visit map entries sorted by model order.
    std::vector<std::pair<ModelIndex, VisitRecord>> sorted_models() const;
};

/// mt19937_64 with uniforms built from the top 53 bits.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    std::uint64_t below(std::uint64_t n) {
        const auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
        return k < n ? k : n - 1;
    }

private:
    std::mt19937_64 eng_;
};

std::uint64_t splitmix64(std::uint64_t x);
/// Seed for chain c: splitmix64(master ^ (c * 0x9E3779B97F4A7C15)).
std::uint64_t chain_seed(std::uint64_t master, int chain);

/// A running chain: current state, its factor, and the trace built so far.
class Chain {
public:
    Chain(const Dataset& d, const ModelScorer& scorer, const SamplerConfig& cfg, const StartSpec& start = {});
    Chain(const Chain&) = delete;
    Chain& operator=(const Chain&) = delete;

    const ModelIndex& state() const { return chol_.included(); }
    double log_post() const { return cur_.log_post(); }
    const ChainTrace& trace() const { return trace_; }
    ChainTrace take_trace();
    const std::vector<int>& free_columns() const { return free_; }
    std::uint64_t iterations_done() const { return trace_.steps; }

    /// Moves the chain to `m` without touching the trace.
    void reset(const ModelIndex& m);

    /// Runs k more iterations, recording retained states.
    void run(std::uint64_t k);

    /// One Gibbs scan. Returns the conditional inclusion probability of each free
    /// coordinate at the moment it was visited (p-vector, fixed columns = 1).
    Eigen::VectorXd gibbs_scan(Rng& rng);
    /// One birth-death proposal. Returns true when accepted.
    bool birth_death(Rng& rng);

    /// Log posterior (unnormalized) and its parts for the current factor state.
    VisitRecord score_current();

    Rng& rng() { return rng_; }

private:
    void toggle(int j);
    void record(const Eigen::VectorXd* q);
    void prune();

    const Dataset* d_;
    const ModelScorer* scorer_;
    SamplerConfig cfg_;
    GramSystem<double> sys_;
    CholState<double> chol_;
    std::vector<int> free_;
    Rng rng_;
    VisitRecord cur_;
    std::uint64_t updates_ = 0;
    std::unordered_map<ModelIndex, double, ModelIndexHash> bf_cache_;
    ChainTrace trace_;
};

/// Free-function forms of the two kernels acting on a chain.
inline Eigen::VectorXd gibbs_scan_step(Chain& chain, Rng& rng) { return chain.gibbs_scan(rng); }
inline bool birth_death_step(Chain& chain, Rng& rng) { return chain.birth_death(rng); }

ChainTrace run_sampler(const Dataset& d, const ModelScorer& scorer, const SamplerConfig& cfg,
                       const StartSpec& start = {});
ChainTrace run_sampler(const Dataset& d, const GPriorSpec& g, const ModelPriorSpec& m, const SamplerConfig& cfg,
                       const StartSpec& start = {}, const QuadratureConfig& q = {});

/// Independent chains with seeds chain_seed(cfg.seed, c), pooled in chain order.
ChainTrace run_chains(const Dataset& d, const ModelScorer& scorer, const SamplerConfig& cfg, int chains,
                      int threads, const StartSpec& start = {});

/// Pools traces in the given order.
ChainTrace merge_traces(std::vector<ChainTrace> traces, std::size_t max_unique);

/// p-vector of inclusion probabilities; fixed columns come out as 1.
Eigen::VectorXd estimate_pip(const ChainTrace& trace, PipEstimator method);

/// Renormalized model probabilities over the visit map, in sorted_models() order.
Eigen::VectorXd renormalized_weights(const std::vector<std::pair<ModelIndex, VisitRecord>>& models);
/// Visit frequencies in sorted_models() order.
Eigen::VectorXd frequency_weights(const std::vector<std::pair<ModelIndex, VisitRecord>>& models);

/// model,count,log_bf,log_prior sorted by decreasing count (ties by model order).
void write_visit_table(std::ostream& os, const ChainTrace& trace, std::size_t top_k = 0, char delim = ',');

}  // namespace bvs
